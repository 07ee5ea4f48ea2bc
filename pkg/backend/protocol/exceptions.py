"""Errors raised by the per-process state machine."""


class ProtocolError(Exception):
    """Base class for protocol errors"""
    pass


class SelfMessageMissing(ProtocolError):
    """Raised when a process's inbox lacks its own message"""

    def __init__(self, process: int, round_number: int):
        self.process = process
        self.round = round_number
        super().__init__(f'Process {process} did not receive its own message in round {round_number}')


class MalformedApproxGraph(ProtocolError):
    """Raised when an approximation graph breaks its structural invariants"""

    def __init__(self, owner: int, reason: str):
        self.owner = owner
        self.reason = reason
        super().__init__(f'Approximation graph of process {owner}: {reason}')

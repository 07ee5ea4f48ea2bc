"""Errors raised while building or reading rounds, runs and scenarios."""
from typing import Any, Dict, Tuple


class RunModelError(Exception):
    """Base class for run-model errors"""
    pass


class MissingSelfLoop(RunModelError):
    """Raised when a round graph lacks the (p -> p) edge of some process"""

    def __init__(self, process: int):
        self.process = process
        super().__init__(f'Round graph is missing the self-loop of process {process}')


class EndpointOutOfRange(RunModelError):
    """Raised when an edge references a process outside [0, n)"""

    def __init__(self, edge: Tuple[int, int], n: int):
        self.edge = tuple(edge)
        self.n = n
        super().__init__(f'Edge {self.edge[0]}->{self.edge[1]} has an endpoint outside [0, {n})')


class InconsistentSystemSize(RunModelError):
    """Raised when the graphs of a run disagree on n"""

    def __init__(self, expected: int, found: int):
        self.expected = expected
        self.found = found
        super().__init__(f'Round graph over {found} processes in a run of {expected}')


class RoundOutOfRange(RunModelError):
    """Raised for round numbers below 1 (or past a recorded trace)"""

    def __init__(self, round_number: Any, detail: str = 'rounds start at 1'):
        self.round = round_number
        super().__init__(f'Round {round_number} is out of range: {detail}')


class UnknownProcess(RunModelError):
    """Raised when a process id is not part of the system"""

    def __init__(self, process: Any, n: int):
        self.process = process
        self.n = n
        super().__init__(f'Process {process} does not exist in a system of {n} processes')


class ScenarioFormatError(RunModelError):
    """Raised when a scenario file fails validation"""

    def __init__(self, errors: Dict[str, Any]):
        self.errors = errors
        super().__init__(f'Invalid scenario: {errors}')

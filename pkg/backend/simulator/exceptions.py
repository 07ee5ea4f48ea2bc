"""Errors raised while simulating, verifying or reading traces."""
from typing import Any, Dict, Iterable, Optional, Tuple


class SimulationError(Exception):
    """Base class for simulator errors"""
    pass


class InvalidProposals(SimulationError):
    """Raised when proposals do not cover exactly the processes of the run"""

    def __init__(self, detail: str):
        self.detail = detail
        super().__init__(f'Invalid proposals: {detail}')


class HorizonExceeded(SimulationError):
    """
    Raised when some process is still undecided after the last allowed round.
    Carries the partial trace so callers can still write it out.
    """

    def __init__(self, undecided: Iterable[int], horizon: int, trace: Any = None):
        self.undecided = tuple(sorted(undecided))
        self.horizon = horizon
        self.trace = trace
        super().__init__(f'Processes {list(self.undecided)} undecided after round {horizon}')


class PredicateNotSatisfied(SimulationError):
    """Raised when an agreement check is requested for a run outside its predicate"""

    def __init__(self, k: int, violating_subset: Optional[Tuple[int, ...]]):
        self.k = k
        self.violating_subset = violating_subset
        super().__init__(
            f'Run does not satisfy the {k}-sources predicate '
            f'(no 2-source for {list(violating_subset or ())})'
        )


class TraceFormatError(SimulationError):
    """Raised when a trace file fails validation"""

    def __init__(self, errors: Dict[str, Any]):
        self.errors = errors
        super().__init__(f'Invalid trace: {errors}')

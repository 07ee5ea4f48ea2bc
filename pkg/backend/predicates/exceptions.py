"""Predicate checking and generation errors."""


class PredicateError(Exception):
    """Base class for predicate errors"""
    pass


class SubsetTooSmall(PredicateError):
    """Raised when a 2-source is asked for in a subset of fewer than two processes"""

    def __init__(self, subset):
        self.subset = tuple(sorted(subset))
        super().__init__(f'Subset {list(self.subset)} has fewer than two processes')


class ParameterOutOfRange(PredicateError):
    """Raised when a generator or checker parameter violates its precondition"""

    def __init__(self, parameter: str, value, expected: str):
        self.parameter = parameter
        self.value = value
        self.expected = expected
        super().__init__(f'{parameter}={value!r} is out of range: expected {expected}')


class GenerationFailed(PredicateError):
    """Raised when the random sampler exhausts its attempts"""

    def __init__(self, attempts: int, n: int, k: int):
        self.attempts = attempts
        self.n = n
        self.k = k
        super().__init__(f'No admissible run for n={n}, k={k} after {attempts} attempts')

"""
Shared plumbing for the management commands.

Exit codes: 0 pass, 1 property violation, 2 usage / IO / parse error.
Domain exceptions are turned into CommandError with the matching code.
"""
import logging
from contextlib import contextmanager
from typing import Dict, Optional

from django.core.management.base import CommandError

from common.utils.jsonio import JsonInputError, dumps
from predicates.exceptions import ParameterOutOfRange
from rounds.exceptions import RunModelError
from rounds.graphs import RunSpec
from .exceptions import InvalidProposals, TraceFormatError

logger = logging.getLogger(__name__)

EXIT_VIOLATION = 1
EXIT_USAGE = 2

USAGE_ERRORS = (
    JsonInputError, RunModelError, TraceFormatError, InvalidProposals, ParameterOutOfRange, OSError,
)


@contextmanager
def usage_errors():
    """Re-raise input and parameter errors as CommandError(returncode=2)."""
    try:
        yield
    except USAGE_ERRORS as e:
        logger.error(f'{type(e).__name__}: {e}')
        raise CommandError(str(e), returncode=EXIT_USAGE) from e


def violation(message: str) -> CommandError:
    return CommandError(message, returncode=EXIT_VIOLATION)


def default_proposals(n: int) -> Dict[int, int]:
    """Process i proposes i + 1."""
    return {p: p + 1 for p in range(n)}


def parse_proposals(text: str, n: int) -> Dict[int, int]:
    """Comma-separated values in process order, e.g. "3,1,2"."""
    try:
        values = [int(part) for part in text.split(',')]
    except ValueError:
        raise InvalidProposals(f'{text!r} is not a comma-separated list of integers')
    if len(values) != n:
        raise InvalidProposals(f'{len(values)} values given for {n} processes')
    return dict(enumerate(values))


def choose_proposals(run: RunSpec, flag: Optional[str], from_file: Optional[Dict[int, int]]) -> Dict[int, int]:
    if flag:
        return parse_proposals(flag, run.n)
    if from_file is not None:
        return from_file
    return default_proposals(run.n)


def write_output(command, text: str, path: Optional[str]) -> None:
    """Write text to path, or to the command's stdout when no path is given."""
    if path:
        try:
            with open(path, 'w', encoding='utf-8') as handle:
                handle.write(text)
        except OSError as e:
            raise CommandError(f'{path}: cannot write ({e})', returncode=EXIT_USAGE) from e
    else:
        command.stdout.write(text, ending='')


def write_json_output(command, data, path: Optional[str]) -> None:
    write_output(command, dumps(data), path)

# src/core/exceptions.py
import logging
from contextlib import contextmanager
from typing import Iterator, Optional

import typer

logger = logging.getLogger(__name__)

# --- Exit codes ---
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INVARIANT = 3


class TempoflowError(Exception):
    """
    Base class for every error raised by the services.

    Services raise these with a human readable ``detail``; the command layer
    converts them into an exit code.
    """
    exit_code: int = EXIT_DATA

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


# --- Usage errors (exit 1) ---
class UsageError(TempoflowError):
    exit_code = EXIT_USAGE

class EmptySeedSetError(UsageError):
    pass

class UnknownVertexError(UsageError):
    pass

class PatternSyntaxError(UsageError):
    pass

class MissingTableError(UsageError):
    pass

class InfeasibleSpecError(UsageError):
    pass


# --- Data errors (exit 2) ---
class DataError(TempoflowError):
    exit_code = EXIT_DATA

class MalformedRecordError(DataError):
    def __init__(self, line_number: int, reason: str):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number

class QuantityOverflowError(DataError):
    pass

class SelfLoopError(DataError):
    pass

class CycleDetectedError(DataError):
    pass

class NotAPathError(DataError):
    pass

class ChainPremiseError(DataError):
    pass

class IterationCapExceededError(DataError):
    pass


# --- Internal invariant violations (exit 3) ---
class InvariantViolation(TempoflowError):
    exit_code = EXIT_INVARIANT

class MethodDisagreementError(InvariantViolation):
    pass

class WitnessInfeasibleError(InvariantViolation):
    pass


@contextmanager
def exit_on_error(action: Optional[str] = None) -> Iterator[None]:
    """Converts service errors raised inside the block into a typer exit code."""
    try:
        yield
    except TempoflowError as e:
        prefix = f"{action} failed: " if action else ""
        logger.error(f"{prefix}{e.detail}")
        typer.echo(f"error: {e.detail}", err=True)
        raise typer.Exit(code=e.exit_code)

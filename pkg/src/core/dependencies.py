# src/core/dependencies.py
import logging
from pathlib import Path
from typing import Annotated, List, Optional, Tuple

import typer

from src.core.config import settings
from src.core.exceptions import UsageError
from src.modules.graph.models import TemporalGraph
from src.modules.graph.services import read_graph

logger = logging.getLogger(__name__)


def resolve_window(window: Tuple[Optional[int], Optional[int]]) -> Optional[Tuple[int, int]]:
    if window is None or window == (None, None):
        return None
    t0, t1 = window
    if t0 is None or t1 is None or t0 > t1:
        raise UsageError(f"--window needs T0 <= T1, got {window}.")
    return t0, t1


def load_graph(path: Path, fmt: Optional[str], window: Tuple[Optional[int], Optional[int]] = (None, None)) -> TemporalGraph:
    """
    Shared loader for every command that takes an interaction file.
    Applies the configured default format and the optional time window.
    """
    fmt = fmt or settings.INPUT_FORMAT
    if fmt not in ("tsv", "csv"):
        raise UsageError(f"Unknown input format '{fmt}'; expected 'tsv' or 'csv'.")
    return read_graph(path, fmt, resolve_window(window))


# --- Annotated Options for Cleaner Commands ---
GraphFile = Annotated[Path, typer.Argument(exists=True, dir_okay=False, readable=True, help="Interaction records `src dst timestamp quantity`.")]
FormatOpt = Annotated[Optional[str], typer.Option("--format", "-f", help="Record format: tsv or csv (default from INPUT_FORMAT).")]
WindowOpt = Annotated[Tuple[int, int], typer.Option("--window", help="Keep only interactions with T0 <= t <= T1.")]
SourceOpt = Annotated[Optional[List[str]], typer.Option("--source", "-s", help="Source vertex; repeat for several.")]
SinkOpt = Annotated[Optional[List[str]], typer.Option("--sink", "-t", help="Sink vertex; repeat for several.")]
JsonOpt = Annotated[bool, typer.Option("--json", help="Print machine-readable JSON instead of text.")]
SeedOpt = Annotated[Optional[int], typer.Option("--seed", help="Random seed (default from BENCH_SEED).")]

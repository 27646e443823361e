import logging
import re
from pathlib import Path
from typing import Iterable, List, Optional, Tuple

import msgpack

from src.core.config import settings
from src.core.exceptions import DataError, MissingTableError, UsageError
from src.modules.graph.models import Interaction, TemporalGraph, VertexId
from src.modules.graph.services import read_intern_table, write_intern_table
from src.modules.greedy.services import extend_boundary, greedy_chain_boundary
from .models import PathRecord, PathTable, TableSet

logger = logging.getLogger(__name__)

FORMAT_VERSION = "v1"
HEADER = re.compile(rb"^tempoflow-paths (v\d+) k=(\d+) cyclic=([01]) rows=(\d+)\n$")
INTERN_FILE = "vertices.json"


def table_filename(k: int, cyclic: bool) -> str:
    return f"paths_k{k}_{'cyclic' if cyclic else 'open'}.tfp"


def precompute_paths(graph: TemporalGraph, k: int, cyclic: bool) -> PathTable:
    """
    All k-hop simple paths (cyclic: first vertex == last vertex, otherwise all
    vertices distinct) with their boundary sequences. Starts are taken in
    ascending id order and neighbours in ascending order, so rows come out
    sorted. Boundaries are extended hop by hop in strict same-timestamp mode.
    """
    if k < 2:
        raise UsageError(f"Path tables need k >= 2, got {k}.")
    rows: List[PathRecord] = []
    for start in sorted(graph.vertices):
        for first in graph.successors(start):
            boundary = greedy_chain_boundary([graph.edges[(start, first)]], strict=True)
            _extend(graph, [start, first], boundary, k, cyclic, rows)
    if len(rows) > settings.PATH_TABLE_ROW_CAP:
        logger.warning(
            f"Path table k={k} cyclic={cyclic} holds {len(rows)} rows, above PATH_TABLE_ROW_CAP={settings.PATH_TABLE_ROW_CAP}."
        )
    logger.info(f"Precomputed {len(rows)} {'cyclic' if cyclic else 'open'} {k}-hop paths.")
    return PathTable(k=k, cyclic=cyclic, rows=rows)


def _extend(graph: TemporalGraph, path: List[VertexId], boundary: List[Interaction], k: int, cyclic: bool, rows: List[PathRecord]) -> None:
    hops = len(path) - 1
    last = path[-1]
    if hops == k:
        if (last == path[0]) == cyclic:
            rows.append(PathRecord(tuple(path), tuple(boundary)))
        return
    if last == path[0]:
        return
    for nxt in graph.successors(last):
        closing = nxt == path[0]
        if closing and (not cyclic or hops + 1 != k):
            continue
        if not closing and nxt in path:
            continue
        step = extend_boundary(boundary, graph.edges[(last, nxt)].interactions, strict=True)
        path.append(nxt)
        _extend(graph, path, step, k, cyclic, rows)
        path.pop()


def edge_table(graph: TemporalGraph) -> PathTable:
    """One-hop paths: every edge with its own positive interactions as boundary."""
    rows = [
        PathRecord((src, dst), tuple(greedy_chain_boundary([graph.edges[(src, dst)]], strict=True)))
        for src, dst in sorted(graph.edges)
    ]
    return PathTable(k=1, cyclic=False, rows=rows)


def build_tables(graph: TemporalGraph, shapes: Iterable[Tuple[int, bool]]) -> TableSet:
    return {(k, cyclic): precompute_paths(graph, k, cyclic) for k, cyclic in sorted(set(shapes))}


# --- Persistence ---

def save_table(table: PathTable, graph: TemporalGraph, directory: Path) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / table_filename(table.k, table.cyclic)
    body = [
        [[graph.name(v) for v in row.vertices], [[i.t, i.q, i.seq] for i in row.boundary]]
        for row in table.rows
    ]
    with open(path, "wb") as fp:
        fp.write(f"tempoflow-paths {FORMAT_VERSION} k={table.k} cyclic={int(table.cyclic)} rows={len(table.rows)}\n".encode())
        fp.write(msgpack.packb(body, use_bin_type=True))
    with open(directory / INTERN_FILE, "w", encoding="utf-8") as fp:
        write_intern_table(graph, fp)
    logger.info(f"Wrote {len(table.rows)} rows to '{path}'.")
    return path


def save_tables(tables: TableSet, graph: TemporalGraph, directory: Path) -> List[Path]:
    return [save_table(t, graph, directory) for _, t in sorted(tables.items())]


def load_table(path: Path, graph: TemporalGraph) -> PathTable:
    with open(path, "rb") as fp:
        match = HEADER.match(fp.readline())
        if not match:
            raise DataError(f"'{path}' is not a path table file.")
        version, k, cyclic, count = match.groups()
        if version.decode() != FORMAT_VERSION:
            raise DataError(f"'{path}' has unsupported format {version.decode()}.")
        body = msgpack.unpackb(fp.read(), raw=False)
    if len(body) != int(count):
        raise DataError(f"'{path}' declares {int(count)} rows but holds {len(body)}.")
    rows = [
        PathRecord(
            tuple(graph.vertex(name) for name in names),
            tuple(Interaction(t, q, seq) for t, q, seq in boundary),
        )
        for names, boundary in body
    ]
    # ids depend on the graph the table is loaded against
    rows.sort(key=lambda r: r.vertices)
    return PathTable(k=int(k), cyclic=cyclic == b"1", rows=rows)


def load_tables(directory: Path, graph: TemporalGraph) -> TableSet:
    if not directory.is_dir():
        raise MissingTableError(f"Table directory '{directory}' does not exist.")
    intern = directory / INTERN_FILE
    if intern.exists():
        with open(intern, encoding="utf-8") as fp:
            names = set(read_intern_table(fp))
        unknown = {graph.name(v) for v in graph.vertices} - names
        if unknown:
            logger.warning(f"{len(unknown)} graph vertices are missing from the tables' intern table.")
    tables: TableSet = {}
    for path in sorted(directory.glob("paths_k*_*.tfp")):
        table = load_table(path, graph)
        tables[(table.k, table.cyclic)] = table
    logger.info(f"Loaded {len(tables)} path tables from '{directory}'.")
    return tables


def find_table(tables: Optional[TableSet], k: int, cyclic: bool) -> Optional[PathTable]:
    if not tables:
        return None
    return tables.get((k, cyclic))

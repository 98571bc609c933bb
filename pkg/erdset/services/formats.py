"""
Text artefacts: point sets, grids, PBM bitmaps, CSV tables, JSON reports.

PointSet:   `d=<int> k=<int>` then k lines of d reals (shortest round-trip decimals)
GridSet:    `ERDGRID v1 d=<d> L=<L> seed=<u64|none>` then one line of L^d '0'/'1'
PBM:        plain P1, L x L, pixel (r, c) = 1 - bit(j1=c, j2=L-1-r)
Regions:    JSON list of {"vertices", "exact", "area"}, vertices counterclockwise in (lambda, x)
"""

import csv
import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel

from erdset.errors import DomainError, FormatError
from erdset.models.schemas import ConditionRow, StageReport
from erdset.services.arrangement import CopyRegion
from erdset.services.geometry import PointSet
from erdset.services.grid import GridSet

PathLike = Union[str, Path]

CSV_COLUMNS = ["n", "k_n", "delta_n", "score", "L_n", "p_n", "bound", "mu_E", "mu_V_lo", "mu_V_hi"]
PBM_WIDTH = 70

_POINTS_HEADER = re.compile(r"^d=(\d+) k=(\d+)$")
_GRID_HEADER = re.compile(r"^ERDGRID v1 d=(\d+) L=(\d+) seed=(none|\d+)$")


def format_pointset(A: PointSet) -> str:
    lines = [f"d={A.dim} k={A.size}"]
    lines += [" ".join(repr(float(v)) for v in row) for row in A.coords]
    return "\n".join(lines) + "\n"


def parse_pointset(text: str) -> PointSet:
    lines = [line.strip() for line in text.strip().splitlines() if line.strip()]
    if not lines:
        raise FormatError("empty point-set file")
    match = _POINTS_HEADER.match(lines[0])
    if not match:
        raise FormatError(f"bad point-set header {lines[0]!r}")
    d, k = int(match.group(1)), int(match.group(2))
    if len(lines) - 1 != k:
        raise FormatError(f"header announces {k} points, found {len(lines) - 1}")
    try:
        rows = [[float(v) for v in line.split()] for line in lines[1:]]
    except ValueError as e:
        raise FormatError(f"unreadable coordinate: {e}") from e
    if any(len(row) != d for row in rows):
        raise FormatError(f"every point needs {d} coordinates")
    try:
        return PointSet(np.array(rows, dtype=np.float64).reshape(k, d))
    except DomainError as e:
        raise FormatError(f"invalid point set: {e.message}") from e


def format_grid(E: GridSet) -> str:
    seed = "none" if E.seed is None else str(E.seed)
    body = np.where(E.bits, "1", "0")
    return f"ERDGRID v1 d={E.dim} L={E.L} seed={seed}\n" + "".join(body.tolist()) + "\n"


def parse_grid(text: str) -> GridSet:
    lines = text.splitlines()
    if len(lines) < 2:
        raise FormatError("grid file needs a header and a bit line")
    match = _GRID_HEADER.match(lines[0].strip())
    if not match:
        raise FormatError(f"bad grid header {lines[0]!r}")
    d, L = int(match.group(1)), int(match.group(2))
    seed = None if match.group(3) == "none" else int(match.group(3))
    body = lines[1].strip()
    if len(body) != L ** d or set(body) - {"0", "1"}:
        raise FormatError(f"grid body must be {L ** d} characters of 0/1")
    if d < 1 or L < 1:
        raise FormatError("grid needs d >= 1 and L >= 1")
    bits = np.frombuffer(body.encode("ascii"), dtype=np.uint8) == ord("1")
    return GridSet(d, L, bits, seed)


def format_pbm(E: GridSet) -> str:
    if E.dim != 2:
        raise DomainError("PBM export needs d = 2")
    pixels = 1 - E.cube().T[::-1, :].astype(np.uint8)
    lines = [f"P1\n{E.L} {E.L}"]
    for row in pixels:
        chars = "".join("1" if v else "0" for v in row)
        lines += [chars[i:i + PBM_WIDTH] for i in range(0, len(chars), PBM_WIDTH)]
    return "\n".join(lines) + "\n"


def write_text(path: PathLike, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="ascii")
    return path


def read_pointset(path: PathLike) -> PointSet:
    return parse_pointset(_read(path))


def read_grid(path: PathLike) -> GridSet:
    return parse_grid(_read(path))


def _read(path: PathLike) -> str:
    try:
        return Path(path).read_text(encoding="ascii")
    except (OSError, UnicodeDecodeError) as e:
        raise FormatError(f"cannot read {path}: {e}") from e


def write_model(path: PathLike, model: BaseModel) -> Path:
    return write_text(path, model.model_dump_json(indent=2) + "\n")


def write_polygons(path: PathLike, regions: Iterable[CopyRegion]) -> Path:
    return write_text(path, json.dumps([r.to_dict() for r in regions], indent=2) + "\n")


def parse_polygons(text: str) -> List[CopyRegion]:
    """Copy regions from their exact vertex strings."""
    try:
        items = json.loads(text)
        if not isinstance(items, list):
            raise FormatError("copy-region file must hold a JSON list")
        regions = [
            CopyRegion(vertices=tuple((Fraction(lam), Fraction(x)) for lam, x in item["exact"]))
            for item in items
        ]
    except (ValueError, KeyError, TypeError, ZeroDivisionError) as e:
        raise FormatError(f"bad copy-region file: {e}") from e
    if any(len(r.vertices) < 3 for r in regions):
        raise FormatError("a copy region needs at least three vertices")
    return regions


def read_polygons(path: PathLike) -> List[CopyRegion]:
    return parse_polygons(_read(path))


def stage_columns(report: StageReport) -> dict:
    """CSV stage columns of a StageReport."""
    columns = {
        "L_n": report.params.L_n,
        "p_n": repr(report.params.p_n),
        "bound": repr(report.bound),
        "mu_E": report.mu_E,
    }
    if report.mu_V is not None:
        columns.update({"mu_V_lo": repr(report.mu_V.lower), "mu_V_hi": repr(report.mu_V.upper)})
    return columns


def write_convergence_csv(
    path: PathLike,
    rows: Sequence[ConditionRow],
    extras: Optional[Sequence[Optional[dict]]] = None,
) -> Path:
    """Condition rows, with any extra stage columns merged in per row."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    extras = extras or [None] * len(rows)
    with path.open("w", newline="", encoding="ascii") as handle:
        writer = csv.DictWriter(handle, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row, extra in zip(rows, extras):
            record = {"n": row.n, "k_n": row.k_n, "delta_n": repr(row.delta_n), "score": repr(row.score)}
            record.update(extra or {})
            writer.writerow(record)
    return path


def read_csv_rows(path: PathLike) -> List[dict]:
    with Path(path).open(newline="", encoding="ascii") as handle:
        return list(csv.DictReader(handle))

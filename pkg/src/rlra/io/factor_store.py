"""
Factor bundles on disk.

A bundle written under ``prefix`` consists of:
- ``prefix.json``: manifest (kind, method, rank, shape, parameters, files)
- ``prefix_<factor>.bin``: one binary matrix per factor
- ``prefix_<perm>.txt``: index vectors, one index per line

Factors with a zero dimension (rank 0) have no file; the manifest keeps their shape.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from ..core.dense import Permutation, freeze
from ..core.errors import MatrixFormatError
from ..decompositions.interp import COLUMNS, CurFactors, IdFactors, TwoSidedIdFactors
from ..decompositions.qb import QbFactors
from ..decompositions.rsvd import SvdFactors
from .binary_format import load_binary, save_binary
from .reports import Factors, factor_kind

logger = logging.getLogger(__name__)

MANIFEST_VERSION = 1
PathLike = Union[str, Path]


@dataclass(frozen=True)
class FactorBundle:
    """Factors loaded back from disk with their manifest data"""
    factors: Factors
    kind: str
    method: str
    shape: Tuple[int, int]
    params: Mapping[str, Any] = field(default_factory=dict)
    source: Optional[str] = None
    manifest_path: Optional[Path] = None


def manifest_path(prefix: PathLike) -> Path:
    path = Path(prefix)
    return path if path.suffix == ".json" else path.with_name(f"{path.name}.json")


def _matrices_and_meta(factors: Factors) -> Tuple[Dict[str, np.ndarray], Dict[str, Permutation], Dict[str, Any]]:
    if isinstance(factors, SvdFactors):
        return (
            {"u": factors.u, "sigma": factors.sigma[:, None], "v": factors.v},
            {},
            {"tolerance_reached": factors.tolerance_reached},
        )
    if isinstance(factors, IdFactors):
        return (
            {"v": factors.v},
            {"perm": factors.perm},
            {
                "rank": factors.rank,
                "residual": factors.residual,
                "stabilized": factors.stabilized,
                "tolerance_reached": factors.tolerance_reached,
                "axis": factors.axis,
            },
        )
    if isinstance(factors, TwoSidedIdFactors):
        return (
            {"w": factors.w, "v": factors.v},
            {"row_perm": factors.row_perm, "col_perm": factors.col_perm},
            {"rank": factors.rank, "residual": factors.residual},
        )
    if isinstance(factors, CurFactors):
        return (
            {"c": factors.c, "u": factors.u, "r": factors.r},
            {"row_perm": factors.row_perm, "col_perm": factors.col_perm},
            {"rank": factors.rank, "residual": factors.residual},
        )
    return (
        {"q": factors.q, "b": factors.b},
        {},
        {
            "residual_norm": factors.residual_norm,
            "residual_history": list(factors.residual_history),
            "tolerance_reached": factors.tolerance_reached,
        },
    )


def save_factors(
    prefix: PathLike,
    factors: Factors,
    shape: Tuple[int, int],
    method: str = "",
    params: Optional[Mapping[str, Any]] = None,
    source: Optional[PathLike] = None,
) -> Path:
    """
    Write a factor bundle.

    Returns:
        Path of the JSON manifest
    """
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    kind = factor_kind(factors)
    matrices, permutations, meta = _matrices_and_meta(factors)

    matrix_entries: Dict[str, Dict[str, Any]] = {}
    for name, matrix in matrices.items():
        entry: Dict[str, Any] = {"shape": list(matrix.shape), "file": None}
        if matrix.size:
            target = prefix.with_name(f"{prefix.name}_{name}.bin")
            save_binary(target, matrix)
            entry["file"] = target.name
        matrix_entries[name] = entry

    index_entries: Dict[str, str] = {}
    for name, perm in permutations.items():
        target = prefix.with_name(f"{prefix.name}_{name}.txt")
        target.write_text("".join(f"{int(i)}\n" for i in perm.indices), encoding="ascii")
        index_entries[name] = target.name

    manifest = {
        "version": MANIFEST_VERSION,
        "kind": kind,
        "method": method or kind,
        "rank": factors.rank,
        "shape": list(shape),
        "params": dict(params or {}),
        "source": str(source) if source is not None else None,
        "matrices": matrix_entries,
        "indices": index_entries,
        "meta": meta,
    }
    path = manifest_path(prefix)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2)
    logger.info(f"Saved {kind} factors (rank {factors.rank}) to {path}")
    return path


def _load_matrix(base: Path, entry: Mapping[str, Any]) -> np.ndarray:
    shape = tuple(entry["shape"])
    if entry.get("file") is None:
        return freeze(np.zeros(shape))
    matrix = load_binary(base / entry["file"])
    if matrix.shape != shape:
        raise MatrixFormatError(str(base / entry["file"]), f"shape {matrix.shape} but manifest says {shape}")
    return matrix


def _load_indices(path: Path) -> Permutation:
    values: List[int] = []
    for number, line in enumerate(path.read_text(encoding="ascii").splitlines(), start=1):
        if line.strip():
            try:
                values.append(int(line))
            except ValueError:
                raise MatrixFormatError(str(path), f"line {number}: not an index: {line!r}") from None
    return Permutation(np.array(values, dtype=np.int64))


def load_factors(prefix: PathLike) -> FactorBundle:
    """
    Read a bundle written by ``save_factors``.

    Raises:
        FileNotFoundError: manifest or a listed file is missing
        MatrixFormatError: malformed manifest or factor file
    """
    path = manifest_path(prefix)
    try:
        with open(path, "r", encoding="utf-8") as f:
            manifest = json.load(f)
        kind = manifest["kind"]
        matrix_entries = manifest["matrices"]
        index_entries = manifest.get("indices", {})
        meta = manifest.get("meta", {})
        shape = tuple(manifest["shape"])
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise MatrixFormatError(str(path), f"invalid factor manifest: {e}") from None

    base = path.parent
    m = {name: _load_matrix(base, entry) for name, entry in matrix_entries.items()}
    perms = {name: _load_indices(base / file) for name, file in index_entries.items()}

    factors: Factors
    if kind == "svd":
        sigma = np.array(m["sigma"][:, 0])
        sigma.setflags(write=False)
        factors = SvdFactors(m["u"], sigma, m["v"], meta.get("tolerance_reached", True))
    elif kind in ("id", "id_rows"):
        factors = IdFactors(
            perm=perms["perm"], v=m["v"], rank=int(meta["rank"]), residual=float(meta["residual"]),
            stabilized=bool(meta.get("stabilized", False)),
            tolerance_reached=bool(meta.get("tolerance_reached", True)),
            axis=meta.get("axis", COLUMNS),
        )
    elif kind == "two_sided_id":
        factors = TwoSidedIdFactors(
            row_perm=perms["row_perm"], col_perm=perms["col_perm"], w=m["w"], v=m["v"],
            rank=int(meta["rank"]), residual=float(meta["residual"]),
        )
    elif kind == "cur":
        factors = CurFactors(
            c=m["c"], u=m["u"], r=m["r"], row_perm=perms["row_perm"], col_perm=perms["col_perm"],
            rank=int(meta["rank"]), residual=float(meta["residual"]),
        )
    elif kind == "qb":
        factors = QbFactors(
            q=m["q"], b=m["b"], residual_norm=float(meta["residual_norm"]),
            residual_history=tuple(meta.get("residual_history", ())),
            tolerance_reached=bool(meta.get("tolerance_reached", True)),
        )
    else:
        raise MatrixFormatError(str(path), f"unknown factor kind {kind!r}")

    logger.debug(f"Loaded {kind} factors from {path}")
    return FactorBundle(
        factors=factors,
        kind=kind,
        method=manifest.get("method", kind),
        shape=(int(shape[0]), int(shape[1])),
        params=manifest.get("params", {}),
        source=manifest.get("source"),
        manifest_path=path,
    )

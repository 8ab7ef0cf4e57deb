"""
Binary dense matrix files and spectrum sidecars.

Layout (little-endian):

    int32 num_rows
    int32 num_cols
    float64 x num_rows*num_cols, row by row (every entry, zeros included)

A generated matrix ``a.bin`` may carry ``a.spectrum.txt`` next to it with its
exact singular values, one per line.
"""

import logging
import os
import tempfile
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from ..core.constants import HEADER_BYTES, INT32_MAX, PAYLOAD_DTYPE
from ..core.dense import freeze
from ..core.errors import MatrixFormatError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
HEADER_DTYPE = np.dtype("<i4")
PAYLOAD = np.dtype(PAYLOAD_DTYPE)


def encode_matrix(a: np.ndarray) -> bytes:
    """Serialize a matrix to the file layout"""
    rows, cols = a.shape
    if not (1 <= rows <= INT32_MAX and 1 <= cols <= INT32_MAX):
        raise ValueError(f"matrix shape {a.shape} cannot be stored in the binary format")
    header = np.array([rows, cols], dtype=HEADER_DTYPE).tobytes()
    return header + np.asarray(a, dtype=PAYLOAD).tobytes(order="C")


def decode_matrix(data: bytes, source: str = "<bytes>") -> np.ndarray:
    """
    Parse the file layout into a column-major matrix.

    Raises:
        MatrixFormatError: truncated header, bad dimensions, length mismatch
            or a non-finite entry (with its byte offset)
    """
    if len(data) < HEADER_BYTES:
        raise MatrixFormatError(source, f"truncated header ({len(data)} of {HEADER_BYTES} bytes)", len(data))
    rows, cols = (int(v) for v in np.frombuffer(data, dtype=HEADER_DTYPE, count=2))
    if rows < 1:
        raise MatrixFormatError(source, f"invalid row count {rows}", 0)
    if cols < 1:
        raise MatrixFormatError(source, f"invalid column count {cols}", 4)

    expected = HEADER_BYTES + PAYLOAD.itemsize * rows * cols
    if len(data) < expected:
        raise MatrixFormatError(
            source, f"payload truncated: expected {expected} bytes for {rows}x{cols}, found {len(data)}",
            len(data),
        )
    if len(data) > expected:
        raise MatrixFormatError(
            source, f"{len(data) - expected} trailing bytes after {rows}x{cols} payload", expected
        )

    payload = np.frombuffer(data, dtype=PAYLOAD, count=rows * cols, offset=HEADER_BYTES)
    bad = np.flatnonzero(~np.isfinite(payload))
    if bad.size:
        index = int(bad[0])
        raise MatrixFormatError(
            source,
            f"non-finite value {payload[index]} at entry ({index // cols}, {index % cols})",
            HEADER_BYTES + PAYLOAD.itemsize * index,
        )
    return freeze(payload.reshape(rows, cols).astype(np.float64))


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(temp_name, path)
    except BaseException:
        Path(temp_name).unlink(missing_ok=True)
        raise


def save_binary(path: PathLike, a: np.ndarray) -> Path:
    """Write ``a`` to ``path`` in the binary layout"""
    target = Path(path)
    _atomic_write(target, encode_matrix(a))
    logger.debug(f"Wrote {a.shape[0]}x{a.shape[1]} matrix to {target}")
    return target


def load_binary(path: PathLike) -> np.ndarray:
    """Read a matrix written by ``save_binary`` (or any conforming writer)"""
    source = Path(path)
    matrix = decode_matrix(source.read_bytes(), str(source))
    logger.debug(f"Loaded {matrix.shape[0]}x{matrix.shape[1]} matrix from {source}")
    return matrix


# ----------------------------------------------------------------------------
# Spectrum sidecar
# ----------------------------------------------------------------------------

def spectrum_path(matrix_path: PathLike) -> Path:
    """``a.bin`` -> ``a.spectrum.txt``"""
    path = Path(matrix_path)
    return path.with_name(f"{path.stem}.spectrum.txt")


def save_spectrum(path: PathLike, sigma: Sequence[float]) -> Path:
    target = Path(path)
    text = "".join(f"{float(value)!r}\n" for value in sigma)
    _atomic_write(target, text.encode("ascii"))
    return target


def load_spectrum(path: PathLike) -> np.ndarray:
    """Read one singular value per line; blank lines are skipped"""
    source = Path(path)
    values = []
    for number, line in enumerate(source.read_text(encoding="ascii").splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise MatrixFormatError(str(source), f"line {number}: not a number: {line!r}") from None
    sigma = np.array(values, dtype=np.float64)
    if not np.all(np.isfinite(sigma)):
        raise MatrixFormatError(str(source), "spectrum contains non-finite values")
    return sigma

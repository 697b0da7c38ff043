"""
Field files, CSV tables and run manifests

Binary field file layout (little-endian):

    offset  size  content
    0       4     magic b"BSPF"
    4       4     format version, u32
    8       4     N, u32
    12      8     L, f64
    20      8     t, f64
    28      ...   N^3 f64 (real field) or 2 N^3 f64 interleaved re/im (spectral field)

Values follow the package-wide layout: [ix, iy, iz] in C order, z fastest.
"""

import json
import logging
import platform
import struct
import time
from pathlib import Path
from typing import Any, Dict, NamedTuple, Sequence, Union

import numpy as np

from .errors import FieldFileError, GridError
from .vgrid import RealField, SpectralField, VelocityGrid

logger = logging.getLogger(__name__)

MAGIC = b"BSPF"
FORMAT_VERSION = 1
HEADER = struct.Struct("<4sIIdd")

PathLike = Union[str, Path]


class FieldRecord(NamedTuple):
    field: Union[RealField, SpectralField]
    t: float


def write_field(path: PathLike, field: Union[RealField, SpectralField], t: float = 0.0) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    grid = field.grid
    if isinstance(field, SpectralField):
        payload = np.ascontiguousarray(field.data, dtype="<c16").view("<f8")
    else:
        payload = np.ascontiguousarray(field.data, dtype="<f8")
    with open(path, "wb") as handle:
        handle.write(HEADER.pack(MAGIC, FORMAT_VERSION, grid.N, grid.L, float(t)))
        handle.write(payload.tobytes(order="C"))
    logger.debug(f"Wrote {type(field).__name__} N={grid.N} t={t} to {path}")
    return path


def read_field(path: PathLike) -> FieldRecord:
    """Read a field file; real or spectral is inferred from the payload size.

    Raises:
        FieldFileError: On a bad magic, unknown version or truncated payload
    """
    raw = Path(path).read_bytes()
    if len(raw) < HEADER.size:
        raise FieldFileError(f"{path}: file is shorter than the {HEADER.size}-byte header")
    magic, version, n, half_width, t = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FieldFileError(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise FieldFileError(f"{path}: unsupported format version {version}")
    try:
        grid = VelocityGrid(L=half_width, N=n)
    except GridError as e:
        raise FieldFileError(f"{path}: invalid grid in header: {e}") from e

    if (len(raw) - HEADER.size) % 8:
        raise FieldFileError(f"{path}: payload is not a whole number of f64 values")
    values = np.frombuffer(raw, dtype="<f8", offset=HEADER.size)
    count = n ** 3
    if values.size == count:
        field = RealField(grid, values.astype(np.float64))
    elif values.size == 2 * count:
        field = SpectralField(grid, values.view("<c16").astype(np.complex128))
    else:
        raise FieldFileError(f"{path}: payload has {values.size} values, expected {count} or {2 * count}")
    return FieldRecord(field, t)


def write_table(path: PathLike, columns: Sequence[str], rows) -> Path:
    """Write a numeric table as CSV with a header line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    np.savetxt(path, data, delimiter=",", header=",".join(columns), comments="", fmt="%.17g")
    return path


def write_slice_csv(path: PathLike, coords: np.ndarray, values: np.ndarray, name: str = "Q", axis_name: str = "v_x") -> Path:
    """Axis slice with |value| and sign in separate columns, so cusps at sign
    changes survive a log-scale plot."""
    values = np.asarray(values, dtype=np.float64)
    rows = np.column_stack([coords, values, np.abs(values), np.sign(values)])
    return write_table(path, [axis_name, name, f"abs_{name}", f"sign_{name}"], rows)


def versions() -> Dict[str, str]:
    import numba
    import scipy

    from . import __version__

    return {
        "spectral_boltzmann": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
    }


def write_manifest(path: PathLike, payload: Dict[str, Any]) -> Path:
    """JSON run manifest with package versions and a timestamp added."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    manifest = {
        **payload,
        "versions": versions(),
        "written_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    path.write_text(json.dumps(manifest, indent=2, default=_jsonable))
    return path


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")

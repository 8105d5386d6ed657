"""Snapshot file formats.

Binary format (extension-agnostic, sniffed by magic):

    offset  size  field
    0       4     magic "BFSM" (0x42 0x46 0x53 0x4D)
    4       4     version, u32 little-endian, currently 1
    8       8     dim (rows), u64 little-endian
    16      8     n_samples (cols), u64 little-endian
    24      ...   dim * n_samples IEEE-754 f64 little-endian, column-major

Sample ids and provenance live in a JSON sidecar at ``<path>.json``; a
missing sidecar yields positional ids. Round-trips are bitwise exact.

CSV alternative: header row of sample ids, then one row per QoI component,
one column per sample. Numbers are written in shortest round-trip notation,
so values survive exactly. A NaN/Inf entry is rejected naming its row and
column.
"""

import csv
import json
import struct
from pathlib import Path

import numpy as np

from .errors import (
    BadMagic,
    DimensionMismatch,
    NonFiniteEntry,
    TruncatedPayload,
    VersionUnsupported,
)
from .interp import InterpDecomposition
from .snapshots import SnapshotMatrix

__all__ = [
    "read_snapshots",
    "write_snapshots",
    "read_id",
    "write_id",
]

MAGIC = b"BFSM"
VERSION = 1
_HEADER = struct.Struct("<4sIQQ")


def _sidecar_path(path) -> Path:
    return Path(str(path) + ".json")


def _write_sidecar(path, sample_ids, provenance) -> None:
    doc = {
        "sample_ids": list(sample_ids),
        "provenance": provenance or {},
    }
    _sidecar_path(path).write_text(
        json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n",
        encoding="utf-8",
    )


def _read_sidecar(path):
    sidecar = _sidecar_path(path)
    if not sidecar.exists():
        return None
    doc = json.loads(sidecar.read_text(encoding="utf-8"))
    return [str(s) for s in doc.get("sample_ids", [])]


def write_snapshots(matrix: SnapshotMatrix, path, fmt: str = "bfsm",
                    provenance: dict | None = None) -> None:
    """Write a snapshot matrix; ``fmt`` is ``bfsm`` (binary) or ``csv``."""
    if fmt == "bfsm":
        header = _HEADER.pack(MAGIC, VERSION, matrix.dim, matrix.n_samples)
        payload = np.asfortranarray(matrix.data).tobytes(order="F")
        Path(path).write_bytes(header + payload)
        _write_sidecar(path, matrix.sample_ids, provenance)
        return
    if fmt == "csv":
        lines = [",".join(matrix.sample_ids)]
        for row in matrix.data:
            lines.append(",".join(repr(float(v)) for v in row))
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
        _write_sidecar(path, matrix.sample_ids, provenance)
        return
    raise DimensionMismatch(f"unknown snapshot format {fmt!r}")


def _read_binary(raw: bytes, path) -> SnapshotMatrix:
    if len(raw) < _HEADER.size:
        raise TruncatedPayload(f"{path}: file shorter than the header")
    magic, version, dim, n_samples = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise BadMagic(f"{path}: expected magic {MAGIC!r}, found {magic!r}")
    if version != VERSION:
        raise VersionUnsupported(f"{path}: unsupported version {version}")
    expected = _HEADER.size + 8 * dim * n_samples
    if len(raw) < expected:
        raise TruncatedPayload(
            f"{path}: payload holds {len(raw) - _HEADER.size} bytes, "
            f"header promises {expected - _HEADER.size}"
        )
    if len(raw) > expected:
        raise TruncatedPayload(f"{path}: {len(raw) - expected} trailing bytes")
    flat = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    data = flat.reshape((dim, n_samples), order="F")
    bad = np.argwhere(~np.isfinite(data))
    if bad.size:
        i, j = bad[0]
        raise NonFiniteEntry(f"{path}: non-finite value at row {i}, column {j}")
    ids = _read_sidecar(path)
    if ids is None:
        ids = [f"col-{j:06d}" for j in range(n_samples)]
    if len(ids) != n_samples:
        raise DimensionMismatch(
            f"{path}: sidecar lists {len(ids)} ids for {n_samples} columns"
        )
    return SnapshotMatrix(data=data, sample_ids=tuple(ids))


def _read_csv(text: str, path) -> SnapshotMatrix:
    try:
        rows = list(csv.reader(text.splitlines()))
    except csv.Error as exc:
        raise BadMagic(f"{path}: neither BFSM binary nor parseable CSV") from exc
    rows = [r for r in rows if r]
    if len(rows) < 2:
        raise TruncatedPayload(f"{path}: CSV needs a header and at least one row")
    ids = tuple(s.strip() for s in rows[0])
    n = len(ids)
    data = np.empty((len(rows) - 1, n))
    for i, row in enumerate(rows[1:]):
        if len(row) != n:
            raise DimensionMismatch(
                f"{path}: row {i} has {len(row)} fields, header has {n}"
            )
        for j, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError as exc:
                raise NonFiniteEntry(
                    f"{path}: unparseable value at row {i}, column {ids[j]!r}"
                ) from exc
            if not np.isfinite(v):
                raise NonFiniteEntry(
                    f"{path}: non-finite value at row {i}, column {ids[j]!r}"
                )
            data[i, j] = v
    sidecar_ids = _read_sidecar(path)
    if sidecar_ids is not None and tuple(sidecar_ids) != ids:
        raise DimensionMismatch(f"{path}: sidecar ids disagree with the CSV header")
    return SnapshotMatrix(data=data, sample_ids=ids)


def read_snapshots(path, fmt: str | None = None) -> SnapshotMatrix:
    """Read a snapshot file; format sniffed by magic unless forced."""
    raw = Path(path).read_bytes()
    if fmt is None:
        fmt = "bfsm" if raw[:4] == MAGIC else "csv"
    if fmt == "bfsm":
        return _read_binary(raw, path)
    if fmt == "csv":
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise BadMagic(f"{path}: neither BFSM binary nor parseable CSV") from exc
        return _read_csv(text, path)
    raise DimensionMismatch(f"unknown snapshot format {fmt!r}")


# --------------------------------------------------------------------------
# interpolative-decomposition files (JSON, used by the CLI pipeline)
# --------------------------------------------------------------------------

ID_FORMAT = "bifidelity-id"
ID_VERSION = 1


def write_id(decomposition: InterpDecomposition, path,
             sample_ids=None) -> None:
    """Persist a decomposition as JSON.

    ``sample_ids`` are the column ids of the source ensemble; they let the
    file name its required high-fidelity samples.
    """
    ids = None if sample_ids is None else [str(s) for s in sample_ids]
    if ids is not None and len(ids) != decomposition.n_samples:
        raise DimensionMismatch(
            f"{len(ids)} sample ids for {decomposition.n_samples} columns"
        )
    doc = {
        "format": ID_FORMAT,
        "version": ID_VERSION,
        "rank": decomposition.rank,
        "selected": list(decomposition.selected),
        "residual_norm": decomposition.residual_norm,
        "sample_ids": ids,
        "required_sample_ids": None if ids is None
        else [ids[j] for j in decomposition.selected],
        "skeleton": [list(map(float, row)) for row in decomposition.skeleton],
        "coeffs": [list(map(float, row)) for row in decomposition.coeffs],
    }
    Path(path).write_text(
        json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n",
        encoding="utf-8",
    )


def read_id(path):
    """Load a decomposition file; returns (decomposition, sample_ids)."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != ID_FORMAT:
        raise BadMagic(f"{path}: not a {ID_FORMAT} file")
    if doc.get("version") != ID_VERSION:
        raise VersionUnsupported(f"{path}: unsupported version {doc.get('version')}")
    decomposition = InterpDecomposition(
        rank=int(doc["rank"]),
        selected=tuple(int(j) for j in doc["selected"]),
        skeleton=np.asarray(doc["skeleton"], dtype=np.float64),
        coeffs=np.asarray(doc["coeffs"], dtype=np.float64),
        residual_norm=float(doc["residual_norm"]),
    )
    ids = doc.get("sample_ids")
    return decomposition, None if ids is None else tuple(str(s) for s in ids)

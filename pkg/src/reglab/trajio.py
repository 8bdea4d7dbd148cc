"""Binary persistence for trajectories and ODE runs, plus report emission.

File layout (all little-endian):

    magic      4 bytes  b"RGLB"
    version    u32      currently 1
    kind       u32      0 = evolution trajectory, 1 = ODE run (w and v tracks)
    ndim       u32      1 or 2 spatial dimensions
    n_channels u32      1 for trajectories, 2 for ODE runs
    n_points   u32*ndim
    half_len   f64*ndim
    dt         f64
    alpha, lambda_re, lambda_im, theta   f64 each
    scheme     u32      0 = strang_exact_nl, 1 = rk4_pointwise
    flags      u32      bit0 blow-up present, bit1 odd projection, bit2 forcing
    blowup_t   f64      NaN when absent
    z0_re,z0_im f64     ODE runs only (zeros otherwise)
    n_times    u64
    times      f64 * n_times                       ("times" section)
    snapshots  c128 * n_times*n_channels*prod(n)   ("snapshots" section)

Snapshot payloads are written with numpy's little-endian complex128 codec,
so a save/load round trip is bit-exact.  A JSON sidecar (<path>.json)
duplicates the metadata for humans.  Writes are atomic
(write-temp-then-rename).
"""

from __future__ import annotations

import json
import math
import os
import struct

import numpy as np

from .errors import FormatError, IoError, VersionError
from .evolution import SCHEME_STRANG, Trajectory
from .grids import Grid1D
from .ode import NonlinearityParams, OdeRun

__all__ = [
    "save_trajectory",
    "load_trajectory",
    "write_report",
    "validate_report",
    "REPORT_PROVENANCES",
]

MAGIC = b"RGLB"
FORMAT_VERSION = 1
_KIND_TRAJECTORY = 0
_KIND_ODE_RUN = 1
_SCHEMES = {SCHEME_STRANG: 0, "rk4_pointwise": 1}
_SCHEMES_INV = {v: k for k, v in _SCHEMES.items()}

_FLAG_BLOWUP = 1
_FLAG_ODD_PROJECTION = 2
_FLAG_FORCING = 4


def _atomic_write(path: str, payload: bytes) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    try:
        with open(tmp, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except OSError as err:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise IoError(f"cannot write {path}: {err}") from err


def _atomic_write_text(path: str, text: str) -> None:
    _atomic_write(path, text.encode("utf-8"))


def _header_and_payload(obj) -> tuple[bytes, dict]:
    if isinstance(obj, Trajectory):
        kind = _KIND_TRAJECTORY
        grids = obj.grids
        data = obj.values.reshape(len(obj.times), 1, -1)
        n_channels = 1
        scheme = _SCHEMES[obj.scheme]
        flags = (_FLAG_BLOWUP if obj.blowup_time is not None else 0) \
            | (_FLAG_ODD_PROJECTION if obj.odd_projection else 0)
        blowup = obj.blowup_time if obj.blowup_time is not None else math.nan
        z0 = 0.0 + 0.0j
        dt = obj.dt
        params = obj.params
    elif isinstance(obj, OdeRun):
        kind = _KIND_ODE_RUN
        grids = (obj.grid,)
        data = np.stack([obj.w, obj.v], axis=1).reshape(len(obj.times), 2, -1)
        n_channels = 2
        scheme = _SCHEMES["rk4_pointwise"]
        flags = _FLAG_FORCING if obj.has_forcing else 0
        blowup = math.nan
        z0 = complex(obj.z0)
        dt = obj.dt
        params = obj.params
    else:
        raise IoError(f"cannot serialize object of type {type(obj).__name__}")

    header = bytearray()
    header += MAGIC
    header += struct.pack("<IIII", FORMAT_VERSION, kind, len(grids), n_channels)
    header += struct.pack(f"<{len(grids)}I", *(g.n_points for g in grids))
    header += struct.pack(f"<{len(grids)}d", *(g.half_length for g in grids))
    header += struct.pack("<5d", dt, params.alpha, params.lam.real,
                          params.lam.imag, params.theta)
    header += struct.pack("<II", scheme, flags)
    header += struct.pack("<3d", blowup, z0.real, z0.imag)
    header += struct.pack("<Q", len(obj.times))

    payload = bytes(header)
    payload += np.asarray(obj.times, dtype="<f8").tobytes()
    payload += np.ascontiguousarray(data, dtype="<c16").tobytes()

    meta = {
        "format_version": FORMAT_VERSION,
        "kind": "trajectory" if kind == _KIND_TRAJECTORY else "ode_run",
        "n_points": [int(g.n_points) for g in grids],
        "half_length": [float(g.half_length) for g in grids],
        "dt": float(dt),
        "alpha": float(params.alpha),
        "lambda": [params.lam.real, params.lam.imag],
        "theta": float(params.theta),
        "scheme": _SCHEMES_INV[scheme],
        "n_times": int(len(obj.times)),
        "blowup_time": None if math.isnan(blowup) else float(blowup),
    }
    return payload, meta


def save_trajectory(obj, path) -> None:
    """Persist a Trajectory or OdeRun with a JSON metadata sidecar."""
    path = os.fspath(path)
    payload, meta = _header_and_payload(obj)
    _atomic_write(path, payload)
    _atomic_write_text(path + ".json", json.dumps(meta, indent=2, sort_keys=True) + "\n")


class _Reader:
    def __init__(self, blob: bytes):
        self.blob = blob
        self.offset = 0

    def take(self, n: int, section: str) -> bytes:
        if self.offset + n > len(self.blob):
            raise FormatError(f"truncated file: missing section '{section}'",
                              offset=self.offset)
        out = self.blob[self.offset:self.offset + n]
        self.offset += n
        return out

    def unpack(self, fmt: str, section: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), section))


def load_trajectory(path):
    """Load a file written by :func:`save_trajectory` (bit-exact round trip)."""
    path = os.fspath(path)
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as err:
        raise IoError(f"cannot read {path}: {err}") from err

    r = _Reader(blob)
    magic = r.take(4, "magic")
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}", offset=0)
    (version,) = r.unpack("<I", "version")
    if version != FORMAT_VERSION:
        raise VersionError(
            f"unsupported format version {version} (expected {FORMAT_VERSION})"
        )
    kind, ndim, n_channels = r.unpack("<III", "dimensions")
    if ndim not in (1, 2):
        raise FormatError(f"invalid ndim {ndim}", offset=r.offset)
    n_points = r.unpack(f"<{ndim}I", "grid sizes")
    half_len = r.unpack(f"<{ndim}d", "grid lengths")
    dt, alpha, lam_re, lam_im, theta = r.unpack("<5d", "parameters")
    scheme_code, flags = r.unpack("<II", "scheme/flags")
    blowup, z0_re, z0_im = r.unpack("<3d", "blow-up/z0")
    (n_times,) = r.unpack("<Q", "n_times")

    times = np.frombuffer(r.take(8 * n_times, "times"), dtype="<f8").copy()
    space = int(np.prod(n_points))
    count = n_times * n_channels * space
    snaps = np.frombuffer(
        r.take(16 * count, "snapshots"), dtype="<c16"
    ).copy().reshape(n_times, n_channels, *n_points)
    if r.offset != len(blob):
        raise FormatError("trailing bytes after snapshots", offset=r.offset)

    grids = tuple(Grid1D(int(n), float(L)) for n, L in zip(n_points, half_len))
    params = NonlinearityParams(alpha=alpha, lam=complex(lam_re, lam_im), theta=theta)

    if kind == _KIND_TRAJECTORY:
        return Trajectory(
            params=params,
            grid=grids[0] if ndim == 1 else grids,
            times=times,
            values=snaps[:, 0, ...],
            dt=dt,
            scheme=_SCHEMES_INV.get(scheme_code, SCHEME_STRANG),
            blowup_time=None if math.isnan(blowup) else blowup,
            odd_projection=bool(flags & _FLAG_ODD_PROJECTION),
        )
    if kind == _KIND_ODE_RUN:
        return OdeRun(
            params=params,
            grid=grids[0],
            times=times,
            w=snaps[:, 0, ...],
            v=snaps[:, 1, ...],
            z0=complex(z0_re, z0_im),
            phi0=None,
            h_forcing=None,
            dt=dt,
            had_forcing=bool(flags & _FLAG_FORCING),
        )
    raise FormatError(f"unknown kind {kind}", offset=8)


# ---------------------------------------------------------------------------
# Reports

REPORT_PROVENANCES = ("paper-eq", "trivial", "derived-oracle")


def validate_report(report: dict) -> None:
    """Schema check: every expected-value entry must carry its provenance."""
    for key in ("experiment", "config", "checks", "passed", "tool_version"):
        if key not in report:
            raise FormatError(f"report missing required key '{key}'")
    for i, check in enumerate(report["checks"]):
        for key in ("name", "passed", "measured", "expected", "provenance", "tolerance"):
            if key not in check:
                raise FormatError(f"check #{i} missing key '{key}'")
        if check["provenance"] not in REPORT_PROVENANCES:
            raise FormatError(
                f"check #{i} has unknown provenance '{check['provenance']}'"
            )


def write_report(report: dict, out_dir, name: str) -> str:
    """Write the JSON report and CSV tables; returns the JSON path.

    The JSON is serialized with sorted keys and fixed separators so that
    identical configs and seeds produce byte-identical files; wall-clock
    data lives under the isolated top-level "timing" key.
    """
    validate_report(report)
    os.makedirs(out_dir, exist_ok=True)
    json_path = os.path.join(os.fspath(out_dir), f"{name}.json")
    _atomic_write_text(
        json_path,
        json.dumps(report, indent=2, sort_keys=True, separators=(",", ": ")) + "\n",
    )
    for table_name, table in report.get("tables", {}).items():
        rows = [",".join(str(c) for c in table["columns"])]
        for row in table["rows"]:
            rows.append(",".join(repr(c) if isinstance(c, float) else str(c)
                                 for c in row))
        csv_path = os.path.join(os.fspath(out_dir), f"{name}.{table_name}.csv")
        _atomic_write_text(csv_path, "\n".join(rows) + "\n")
    return json_path

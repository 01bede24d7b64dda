"""Reading and writing sampled functions, scans and reports.

Every writer goes through :func:`atomic_write`, so a reader never sees a
half-written file.  Sampled CSV uses the shortest decimal that round-trips
each float, which makes write-then-read bit exact.
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from . import funcgen
from .errors import InputFormatError

#: relative slack, in units of the grid spacing, for x columns written by other tools
X_TOL = 1e-6
SCAN_COLUMNS = ("k", "delta", "osc_sum", "grid_count", "lower_bound", "upper_bound")


def atomic_write(path, data) -> Path:
    """Write ``data`` (str or bytes) to ``path`` via a temp file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, (bytes, bytearray)) else "w"
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"newline": "", "encoding": "utf-8"})) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def format_float(v) -> str:
    """Shortest round-trip decimal, without a trailing ``.0``."""
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s


# ---------------------------------------------------------------------------
# sampled functions


def samples_to_csv(f: funcgen.SampledFunction) -> str:
    xs = map(format_float, f.x.tolist())
    ys = map(format_float, f.values.tolist())
    return "x,y\n" + "".join(f"{a},{b}\n" for a, b in zip(xs, ys))


def write_samples_csv(f: funcgen.SampledFunction, path) -> Path:
    return atomic_write(path, samples_to_csv(f))


def _grid_exponent(n_points, where):
    n = n_points - 1
    if n < 1 or n & (n - 1):
        raise InputFormatError(f"{where}: {n_points} samples is not 2^m + 1")
    m = n.bit_length() - 1
    if not funcgen.M_MIN <= m <= funcgen.M_MAX:
        raise InputFormatError(
            f"{where}: grid exponent m={m} outside [{funcgen.M_MIN}, {funcgen.M_MAX}]")
    return m


def read_samples_csv(path) -> funcgen.SampledFunction:
    """Load a two-column ``x,y`` CSV on the uniform dyadic grid of [0, 1].

    Raises
    ------
    InputFormatError
        Wrong header, unparsable or non-finite numbers, x not increasing,
        or x not the uniform grid ``i / 2**m``.
    """
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip().replace(" ", "")
            if header != "x,y":
                raise InputFormatError(f"{path}: header must be 'x,y', got {header!r}")
            data = np.loadtxt(fh, delimiter=",", dtype=np.float64, ndmin=2)
    except OSError as exc:
        raise InputFormatError(f"{path}: {exc.strerror or exc}") from None
    except ValueError as exc:
        raise InputFormatError(f"{path}: {exc}") from None
    if data.shape[1] != 2:
        raise InputFormatError(f"{path}: expected 2 columns, got {data.shape[1]}")
    if not np.isfinite(data).all():
        raise InputFormatError(f"{path}: non-finite value")
    x, y = data[:, 0], data[:, 1]
    steps = np.diff(x)
    if (steps <= 0).any():
        i = int(np.argmax(steps <= 0)) + 1
        raise InputFormatError(f"{path}: x is not strictly increasing at line {i + 2} (x={float(x[i])!r})")
    m = _grid_exponent(x.size, path)
    dev = np.abs(x - funcgen.grid(m))
    if dev.max() > X_TOL * 2.0**-m:
        i = int(np.argmax(dev))
        raise InputFormatError(
            f"{path}: x is not the uniform grid i/2^{m} (line {i + 2}: x={float(x[i])!r}, expected {i / 2**m!r})")
    return funcgen.SampledFunction(m, np.ascontiguousarray(y), path.name)


def write_samples_bin(f: funcgen.SampledFunction, path) -> Path:
    """Little-endian: an 8-byte unsigned ``m`` followed by float64 values."""
    payload = struct.pack("<Q", f.m) + f.values.astype("<f8").tobytes()
    return atomic_write(path, payload)


def read_samples_bin(path) -> funcgen.SampledFunction:
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < 8:
        raise InputFormatError(f"{path}: too short for the 8-byte header")
    (m,) = struct.unpack("<Q", raw[:8])
    if not funcgen.M_MIN <= m <= funcgen.M_MAX:
        raise InputFormatError(f"{path}: grid exponent m={m} outside [{funcgen.M_MIN}, {funcgen.M_MAX}]")
    body = raw[8:]
    if len(body) != 8 * (2**m + 1):
        raise InputFormatError(f"{path}: expected {2**m + 1} float64 values for m={m}, got {len(body) / 8:g}")
    values = np.frombuffer(body, dtype="<f8").astype(np.float64)
    return funcgen.SampledFunction(int(m), values, path.name)


def read_samples(path) -> funcgen.SampledFunction:
    """Dispatch on extension: ``.bin`` is raw binary, anything else CSV."""
    return read_samples_bin(path) if str(path).endswith(".bin") else read_samples_csv(path)


# ---------------------------------------------------------------------------
# scans and reports


def scan_to_csv(records) -> str:
    lines = [",".join(SCAN_COLUMNS)]
    for r in records:
        lines.append(",".join([
            str(r.k), format_float(r.delta), format_float(r.osc_sum), str(r.grid_count),
            format_float(r.lower_bound), format_float(r.upper_bound),
        ]))
    return "\n".join(lines) + "\n"


def write_scan_csv(records, path) -> Path:
    return atomic_write(path, scan_to_csv(records))


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(obj, path) -> Path:
    return atomic_write(path, dumps(obj))


def estimate_report(est) -> dict:
    """JSON object for a :class:`~graphdim.boxdim.Estimate`."""
    out = {
        "source": est.source,
        "m": est.m,
        "scan": [r.to_dict() for r in est.records],
        "sandwich_ok": est.sandwich_ok,
    }
    out.update(est.fit.to_dict())
    return out


def write_estimate_svg(est, path) -> Path:
    """Log-log plot of one estimate: counts, fitted line, local slopes."""
    import io

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fit = est.fit
    k = np.array([r.k for r in est.records], dtype=float)
    logn = np.log2([r.grid_count for r in est.records])
    with matplotlib.rc_context({"svg.hashsalt": "graphdim", "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(6.0, 4.5))
        ax.plot(k, logn, "o", color="tab:blue", label="log2 N")
        ax.plot(k, fit.intercept + fit.slope * k, "-", color="tab:red", label=f"fit, slope {fit.slope:.4f}")
        for ki, yi, s in zip((k[:-1] + k[1:]) / 2, (logn[:-1] + logn[1:]) / 2, fit.local_slopes):
            ax.annotate(f"{s:.2f}", (ki, yi), textcoords="offset points", xytext=(0, 8),
                        ha="center", fontsize=7, color="0.35")
        ax.set_xlabel("k  (delta = 2^-k)")
        ax.set_ylabel("log2 N")
        ax.set_title(f"{est.source[:60]}: slope {fit.slope:.4f}")
        ax.legend(loc="upper left")
        fig.tight_layout()
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
    return atomic_write(path, buf.getvalue())

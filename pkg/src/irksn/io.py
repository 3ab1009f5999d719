"""Plain-text serialization: instance files, condition reports and CSV.

Instance file layout (whitespace separated, ``#`` starts a comment)::

    n 3
    d 4
    delta 0.0
    seed 0
    X
    <n rows of d numbers>
    y_delta
    <n numbers>
    w_star            (optional)
    <d numbers>
    support           (optional, required with w_star)
    <indices>

The clean target is not stored; on load it is rebuilt as ``X @ w_star``.
Floats are written with ``repr`` so they round-trip exactly.
"""

import csv
import math
from pathlib import Path

import numpy as np

from .conditions import GroundTruth
from .exceptions import ConfigError, ParameterError
from .solvers import ProblemInstance

__all__ = [
    "save_instance",
    "load_instance",
    "format_report",
    "write_report",
    "parse_report",
    "write_csv",
    "read_csv",
]

_HEADER = ("n", "d", "delta", "seed")
_BLOCKS = ("X", "y_delta", "w_star", "support")


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if x is None:
        return "none"
    return str(x)


def save_instance(path, instance, truth=None, seed=0):
    lines = [f"n {instance.n}", f"d {instance.d}", f"delta {_fmt(instance.delta)}",
             f"seed {int(seed)}", "X"]
    lines += [" ".join(_fmt(v) for v in row) for row in instance.X]
    lines += ["y_delta", " ".join(_fmt(v) for v in instance.y_delta)]
    if truth is not None:
        lines += ["w_star", " ".join(_fmt(v) for v in truth.w_star)]
        lines += ["support", " ".join(str(int(i)) for i in truth.support)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_instance(path):
    """Read an instance file.

    Returns
    -------
    instance : ProblemInstance
    truth : GroundTruth or None
    seed : int
    """
    lines = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    header = {}
    i = 0
    while i < len(lines) and lines[i].split()[0] in _HEADER:
        key, *rest = lines[i].split()
        if len(rest) != 1:
            raise ConfigError(f"{path}: header line {key!r} needs exactly one value")
        header[key] = rest[0]
        i += 1
    missing = [key for key in _HEADER if key not in header]
    if missing:
        raise ConfigError(f"{path}: missing header field(s) {', '.join(missing)}")
    try:
        n, d = int(header["n"]), int(header["d"])
        delta, seed = float(header["delta"]), int(header["seed"])
    except ValueError as exc:
        raise ConfigError(f"{path}: malformed header: {exc}") from None

    blocks = {}
    current = None
    for line in lines[i:]:
        if line in _BLOCKS:
            current = line
            blocks[current] = []
            continue
        if current is None:
            raise ConfigError(f"{path}: data before the first block name: {line!r}")
        blocks[current].append(line.split())

    def numbers(name, dtype=float):
        try:
            return np.array([dtype(v) for row in blocks[name] for v in row])
        except ValueError as exc:
            raise ConfigError(f"{path}: bad number in block {name!r}: {exc}") from None

    for name in ("X", "y_delta"):
        if name not in blocks:
            raise ConfigError(f"{path}: missing block {name!r}")
    X = numbers("X")
    if X.size != n * d:
        raise ConfigError(f"{path}: X has {X.size} entries, expected {n}x{d}")
    y = numbers("y_delta")
    if y.size != n:
        raise ConfigError(f"{path}: y_delta has {y.size} entries, expected {n}")
    instance = ProblemInstance(X.reshape(n, d), y, delta)

    truth = None
    if "w_star" in blocks or "support" in blocks:
        if not ("w_star" in blocks and "support" in blocks):
            raise ConfigError(f"{path}: w_star and support must be given together")
        w_star = numbers("w_star")
        support = numbers("support", int)
        if w_star.size != d:
            raise ConfigError(f"{path}: w_star has {w_star.size} entries, expected {d}")
        if support.size and (support.min() < 0 or support.max() >= d):
            raise ConfigError(f"{path}: support index out of range")
        try:
            truth = GroundTruth(w_star, np.unique(support), instance.X @ w_star)
        except ParameterError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    return instance, truth, seed


def format_report(fields):
    """``key = value`` lines, one per field, in insertion order."""
    return "".join(f"{key} = {_fmt(value)}\n" for key, value in fields.items())


def write_report(path, fields):
    Path(path).write_text(format_report(fields), encoding="utf-8")


def _parse_value(text):
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    if low == "none":
        return None
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def parse_report(text):
    out = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"report line without '=': {line!r}")
        out[key.strip()] = _parse_value(value.strip())
    return out


def _cell(value):
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return repr(value) if math.isfinite(value) else str(value)
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return value


def write_csv(path, columns, rows):
    """Write dict rows with a header; floats use the shortest round-trip form."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row[c]) for c in columns])
    return path


def read_csv(path):
    with Path(path).open(encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))

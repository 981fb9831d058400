"""Presets, plain-text configuration, grid sweeps and table serialization.

Config format: one ``key = value`` per line, ``#`` starts a comment.  Rates
are in s^-1.  Recognized keys::

    gamma_m gamma_n gamma_g gamma_mn          level widths, m->n decay
    Gamma Gamma_gn Gamma_gm                   line half-widths
    spontaneous = true                        derive half-widths from widths
    gamma_gn                                  g->n decay, informational only
    dn_gn dn_mn                               unsaturated population differences
    x_min x_max x_count                       x grid
    kappa_min kappa_max kappa_count           kappa grid
    log_kappa = true|false                    log-spaced kappa grid
    x_values = a, b, c                        fixed x values for gain curves
    format = csv|json
    name                                      free-form label

Output rows always carry the columns in :data:`COLUMNS` order.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .critical import RegionLabel, classify_region, critical_x, spontaneous_halfwidths
from .errors import ConfigError, DomainError, InvariantError, ProbeGainError
from .model import Drive, GainEvaluation, Pumping, RelaxationSet, gain_ratio

__all__ = [
    "COLUMNS",
    "Preset",
    "PRESETS",
    "PRESET_DIR_ENV",
    "get_preset",
    "Range",
    "SweepSpec",
    "gain_vs_kappa_sweep",
    "RegionMap",
    "region_map",
    "load_config",
    "evaluation_row",
    "to_csv",
    "to_json",
    "parse_csv",
    "parse_json",
    "emit",
    "gnuplot_script",
]

COLUMNS = ("x", "kappa", "g_squared", "ratio", "splitting_factor", "bracket", "pop_diff", "region")
PRESET_DIR_ENV = "PROBEGAIN_PRESET_DIR"


@dataclass(frozen=True)
class Preset:
    name: str
    relaxation: RelaxationSet
    note: str = ""
    extras: Mapping[str, float] = field(default_factory=dict)


PRESETS: Dict[str, Preset] = {
    p.name: p
    for p in (
        Preset(
            "neon-case-1",
            spontaneous_halfwidths(3e7, 5e7, 1e7, 0.5e7),
            "Ne 3s2-2p4 strong, 2s2-2p4 probe; spontaneous half-widths",
            {"gamma_gn": 0.5e7},
        ),
        Preset(
            "neon-case-2",
            spontaneous_halfwidths(1e7, 5e7, 3e7, 0.5e7),
            "Ne with the strong and probe upper levels exchanged",
            {"gamma_gn": 0.5e7},
        ),
        Preset(
            "four-region",
            RelaxationSet(gamma_m=3e7, gamma_n=1e7, gamma_mn=0.0, Gamma=1e8, Gamma_gn=1e8, Gamma_gm=1e8),
            "broad lines, narrow common level; all four regions exist (x3 ~ 1.40)",
        ),
    )
}


def get_preset(name: str) -> Preset:
    """Built-in preset, else ``<$PROBEGAIN_PRESET_DIR>/<name>.cfg``."""
    if name in PRESETS:
        return PRESETS[name]
    directory = os.environ.get(PRESET_DIR_ENV)
    if directory:
        path = os.path.join(directory, name + ".cfg")
        if os.path.isfile(path):
            with open(path, encoding="utf-8") as fh:
                r, _, _ = load_config(fh.read())
            return Preset(name, r, f"loaded from {path}")
    known = ", ".join(sorted(PRESETS))
    raise KeyError(f"unknown preset {name!r} (built-in: {known})")


def shipped_config(name: str) -> str:
    """Text of a config file shipped inside the package."""
    return resources.files("probegain").joinpath("presets", name + ".cfg").read_text(encoding="utf-8")


# -- grids -------------------------------------------------------------------

@dataclass(frozen=True)
class Range:
    """Uniform (or log-spaced) grid ``count`` points from ``minimum`` to ``maximum``."""

    minimum: float
    maximum: float
    count: int
    log: bool = False

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 2:
            raise InvariantError("count", f"grid needs at least 2 points, got {self.count!r}")
        if not (math.isfinite(self.minimum) and math.isfinite(self.maximum)):
            raise InvariantError("range", "bounds must be finite")
        if not self.minimum < self.maximum:
            raise InvariantError("range", f"min ({self.minimum:g}) must be < max ({self.maximum:g})")
        if self.log and self.minimum <= 0:
            raise InvariantError("range", "log spacing needs min > 0")

    def values(self) -> List[float]:
        if self.log:
            return np.geomspace(self.minimum, self.maximum, self.count).tolist()
        return np.linspace(self.minimum, self.maximum, self.count).tolist()


def _kappa_range(rng: Range) -> Range:
    if rng.minimum < 0:
        raise InvariantError("kappa_min", f"must be >= 0, got {rng.minimum:g}")
    return rng


@dataclass(frozen=True)
class SweepSpec:
    x_range: Optional[Range] = None
    kappa_range: Optional[Range] = None
    x_values: Tuple[float, ...] = ()
    fmt: str = "csv"

    def __post_init__(self):
        if self.kappa_range is not None:
            _kappa_range(self.kappa_range)
        if self.fmt not in ("csv", "json"):
            raise InvariantError("format", f"must be csv or json, got {self.fmt!r}")


def gain_vs_kappa_sweep(r: RelaxationSet, x_values: Sequence[float], kappa_range: Range) -> List[GainEvaluation]:
    """Gain curves alpha/alpha0 versus kappa, one per fixed x (pumping dn_gn = 1)."""
    _kappa_range(kappa_range)
    kappas = kappa_range.values()
    crit = critical_x(r)
    rows = []
    for x in x_values:
        p = Pumping.from_ratio(x)
        for k in kappas:
            ev = gain_ratio(r, Drive.from_kappa(k, r), p, with_region=False)
            if x > 0:
                ev = _with_region(ev, classify_region(x, k, r, crit))
            rows.append(ev)
    return rows


def _with_region(ev: GainEvaluation, label: RegionLabel) -> GainEvaluation:
    return replace(ev, region=label)


@dataclass
class RegionMap:
    """Region labels on a grid; ``labels[i][j]`` is at ``kappas[i]``, ``xs[j]``."""

    relaxation: RelaxationSet
    xs: List[float]
    kappas: List[float]
    labels: List[List[RegionLabel]]

    def present(self) -> set:
        return {lab for row in self.labels for lab in row}

    def rows(self) -> List[GainEvaluation]:
        r = self.relaxation
        out = []
        for i, k in enumerate(self.kappas):
            d = Drive.from_kappa(k, r)
            for j, x in enumerate(self.xs):
                ev = gain_ratio(r, d, Pumping.from_ratio(x), with_region=False)
                out.append(_with_region(ev, self.labels[i][j]))
        return out


def region_map(r: RelaxationSet, x_range: Range, kappa_range: Range) -> RegionMap:
    """Classify every (x, kappa) cell of a row-major grid (rows are kappa)."""
    if x_range.minimum <= 0:
        raise DomainError(f"region map needs x > 0 throughout, got x_min = {x_range.minimum:g}")
    _kappa_range(kappa_range)
    crit = critical_x(r)
    xs, kappas = x_range.values(), kappa_range.values()
    labels = [[classify_region(x, k, r, crit) for x in xs] for k in kappas]
    return RegionMap(r, xs, kappas, labels)


# -- configuration -----------------------------------------------------------

_FLOAT_KEYS = {
    "gamma_m", "gamma_n", "gamma_g", "gamma_mn", "gamma_gn", "Gamma", "Gamma_gn", "Gamma_gm",
    "dn_gn", "dn_mn", "x_min", "x_max", "kappa_min", "kappa_max",
}
_INT_KEYS = {"x_count", "kappa_count"}
_BOOL_KEYS = {"spontaneous", "log_kappa"}
_STR_KEYS = {"format", "name"}
_LIST_KEYS = {"x_values"}
_ALL_KEYS = _FLOAT_KEYS | _INT_KEYS | _BOOL_KEYS | _STR_KEYS | _LIST_KEYS
REQUIRED_KEYS = ("gamma_m", "gamma_n", "gamma_mn", "Gamma, Gamma_gn, Gamma_gm (or spontaneous = true with gamma_g)")


def _parse_value(key, raw, line, col):
    try:
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _INT_KEYS:
            return int(raw)
        if key in _BOOL_KEYS:
            low = raw.lower()
            if low in ("true", "yes", "1"):
                return True
            if low in ("false", "no", "0"):
                return False
            raise ValueError(raw)
        if key in _LIST_KEYS:
            return tuple(float(v) for v in raw.split(",") if v.strip())
        return raw
    except ValueError:
        raise ConfigError(f"invalid value {raw!r} for key {key!r}", line, col) from None


def _parse_pairs(text: str) -> Dict[str, Tuple[object, int]]:
    values: Dict[str, Tuple[object, int]] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            col = len(line) - len(line.lstrip()) + 1
            raise ConfigError("expected 'key = value'", lineno, col)
        key_part, value_part = line.split("=", 1)
        key = key_part.strip()
        key_col = len(key_part) - len(key_part.lstrip()) + 1
        if not key:
            raise ConfigError("missing key before '='", lineno, key_col)
        if key not in _ALL_KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno, key_col)
        if key in values:
            raise ConfigError(f"duplicate key {key!r} (first on line {values[key][1]})", lineno, key_col)
        value = value_part.strip()
        value_col = len(key_part) + 2 + (len(value_part) - len(value_part.lstrip()))
        if not value:
            raise ConfigError(f"missing value for key {key!r}", lineno, value_col)
        values[key] = (_parse_value(key, value, lineno, value_col), lineno)
    return values


def _range_from(values, prefix, kappa=False, log=False) -> Optional[Range]:
    keys = (f"{prefix}_min", f"{prefix}_max", f"{prefix}_count")
    given = [k for k in keys if k in values]
    if not given:
        return None
    missing = [k for k in keys if k not in values]
    if missing:
        raise ConfigError(f"incomplete {prefix} range: missing {', '.join(missing)}", values[given[0]][1])
    lo, hi, n = (values[k][0] for k in keys)
    if kappa and lo < 0:
        raise InvariantError("kappa_min", f"must be >= 0, got {lo:g}")
    return Range(lo, hi, n, log=log)


def load_config(text: str) -> Tuple[RelaxationSet, Optional[Pumping], SweepSpec]:
    """Parse a config text into validated objects.

    Pumping is None when neither ``dn_gn`` nor ``dn_mn`` is given.

    Raises
    ------
    ConfigError
        Syntax errors, unknown or duplicate keys, missing required keys.
    InvariantError
        A parsed value breaks a parameter invariant; names the field.
    """
    values = _parse_pairs(text)
    if not values:
        raise ConfigError("empty configuration; required keys: " + "; ".join(REQUIRED_KEYS))
    v = {k: val for k, (val, _) in values.items()}

    missing = [k for k in ("gamma_m", "gamma_n", "gamma_mn") if k not in v]
    spontaneous = v.get("spontaneous", False)
    explicit = [k for k in ("Gamma", "Gamma_gn", "Gamma_gm") if k in v]
    if spontaneous:
        if explicit:
            raise ConfigError(f"spontaneous = true conflicts with explicit {', '.join(explicit)}", values[explicit[0]][1])
        if "gamma_g" not in v:
            missing.append("gamma_g")
    else:
        missing += [k for k in ("Gamma", "Gamma_gn", "Gamma_gm") if k not in v]
    if missing:
        raise ConfigError("missing required keys: " + ", ".join(missing))

    if v["gamma_mn"] > v["gamma_m"]:
        raise InvariantError(
            "gamma_mn",
            f"line {values['gamma_mn'][1]}: gamma_mn ({v['gamma_mn']:g}) must be <= gamma_m ({v['gamma_m']:g})",
        )
    if spontaneous:
        r = spontaneous_halfwidths(v["gamma_m"], v["gamma_n"], v["gamma_g"], v["gamma_mn"])
    else:
        r = RelaxationSet(
            gamma_m=v["gamma_m"], gamma_n=v["gamma_n"], gamma_mn=v["gamma_mn"],
            Gamma=v["Gamma"], Gamma_gn=v["Gamma_gn"], Gamma_gm=v["Gamma_gm"], gamma_g=v.get("gamma_g"),
        )

    pumping = None
    if "dn_gn" in v or "dn_mn" in v:
        if not ("dn_gn" in v and "dn_mn" in v):
            raise ConfigError("dn_gn and dn_mn must be given together")
        pumping = Pumping(v["dn_gn"], v["dn_mn"])

    spec = SweepSpec(
        x_range=_range_from(values, "x"),
        kappa_range=_range_from(values, "kappa", kappa=True, log=v.get("log_kappa", False)),
        x_values=v.get("x_values", ()),
        fmt=v.get("format", "csv"),
    )
    return r, pumping, spec


# -- serialization -----------------------------------------------------------

def evaluation_row(ev: GainEvaluation) -> Dict[str, object]:
    return {
        "x": ev.x,
        "kappa": ev.kappa,
        "g_squared": ev.g_squared,
        "ratio": ev.ratio,
        "splitting_factor": ev.splitting_factor,
        "bracket": ev.bracket,
        "pop_diff": ev.pop_diff,
        "region": None if ev.region is None else str(ev.region),
    }


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def to_csv(rows: Sequence[Mapping[str, object]], columns: Sequence[str] = COLUMNS) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def _jsonable(value):
    if isinstance(value, RegionLabel):
        return value.value
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def to_json(rows: Sequence[Mapping[str, object]], columns: Sequence[str] = COLUMNS) -> str:
    data = [{c: _jsonable(row.get(c)) for c in columns} for row in rows]
    return json.dumps(data, indent=2) + "\n"


def _uncell(text: str):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return float(text)
    except ValueError:
        return text


def parse_csv(text: str) -> List[Dict[str, object]]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        return []
    return [dict(zip(header, (_uncell(c) for c in line))) for line in reader]


def parse_json(text: str) -> List[Dict[str, object]]:
    return json.loads(text)


def emit(rows: Sequence[Mapping[str, object]], fmt: str = "csv", columns: Sequence[str] = COLUMNS) -> str:
    if fmt == "csv":
        return to_csv(rows, columns)
    if fmt == "json":
        return to_json(rows, columns)
    raise ProbeGainError(f"unknown format {fmt!r}")


def gnuplot_script(data_path: str, kind: str) -> str:
    """Plot script for a CSV written by ``map`` or ``sweep``."""
    head = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set xlabel 'x = dn_mn/dn_gn'" if kind == "map" else "set xlabel 'kappa'",
    ]
    if kind == "map":
        body = [
            "set ylabel 'kappa'",
            "set cblabel 'region'",
            "set palette maxcolors 4",
            "set cbrange [0.5:4.5]",
            "set cbtics ('I' 1, 'II' 2, 'III' 3, 'IV' 4)",
            "region(s) = s eq 'I' ? 1 : s eq 'II' ? 2 : s eq 'III' ? 3 : 4",
            f"plot '{data_path}' using 1:2:(region(strcol(8))) with points pt 5 ps 0.5 palette notitle",
        ]
    else:
        body = [
            "set ylabel 'alpha/alpha0'",
            "set cblabel 'x'",
            "set zeroaxis",
            f"plot '{data_path}' using 2:4:1 with points pt 7 ps 0.4 palette notitle",
        ]
    return "\n".join(head + body) + "\n"

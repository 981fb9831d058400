"""Numeric cross-checks of the closed forms.

Critical drives are recovered by bisection on the evaluated gain bracket and
population difference, the optimum drive by golden-section search on
``|alpha/alpha0|``, and the gain expressions themselves by exact rational
arithmetic.  :func:`verify_suite` runs everything over the presets plus a
reproducible set of random media and returns a :class:`VerificationReport`.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from scipy import optimize

from .critical import (
    RegionLabel,
    classify_region,
    critical_x,
    kappa_opt,
    limits_ground_n,
    limits_small_gamma_mn,
    spontaneous_halfwidths,
    x1_solid_limit,
)
from .errors import NoOptimumError, NoRootError
from .model import (
    Drive,
    Pumping,
    RelaxationSet,
    gain_inversion_condition,
    gain_ratio,
    interference_dominance,
    pop_inversion_condition,
    saturated_pop_diff,
    tau_squared,
)

__all__ = [
    "SplitMix64",
    "bisect_root",
    "golden_section_max",
    "root_kappa1",
    "root_kappa2",
    "root_kappa3",
    "grid_optimum",
    "Check",
    "VerificationReport",
    "verify_suite",
]

MAX_ITER = 200
MAX_KAPPA = 2.0**60

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """SplitMix64 generator; identical streams on every platform.

    state += 0x9E3779B97F4A7C15
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z ^= z >> 31

    ``uniform()`` returns the top 53 bits scaled into [0, 1).
    """

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        return low + (high - low) * ((self.next_u64() >> 11) * 2.0**-53)


# -- scalar searches ---------------------------------------------------------

def bisect_root(f: Callable[[float], float], tol: float = 1e-12) -> Tuple[float, int]:
    """Root of ``f`` on (0, inf) where ``f(0)`` and ``f(inf)`` differ in sign.

    The upper end starts at 1 and doubles until the sign changes; gives up
    past 2**60.  Returns ``(root, bisection_iterations)``.
    """
    f0 = f(0.0)
    if f0 == 0:
        return 0.0, 0
    lo, hi = 0.0, 1.0
    while (f(hi) > 0) == (f0 > 0):
        if hi >= MAX_KAPPA:
            raise NoRootError(f"no sign change on [0, 2**60] (f(0) = {f0:g})")
        lo, hi = hi, hi * 2.0
    rtol = max(tol / 4.0, 4.0 * 2.220446049250313e-16)
    root, info = optimize.bisect(f, lo, hi, xtol=1e-300, rtol=rtol, maxiter=MAX_ITER, full_output=True)
    return float(root), info.iterations


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f: Callable[[float], float], a: float, b: float, rtol: float = 1e-10) -> Tuple[float, float, int]:
    """Maximize a unimodal ``f`` on [a, b] by golden-section search.

    Stops once the bracket is narrower than ``rtol`` times its midpoint or
    after 200 iterations.  Returns ``(x_max, f_max, iterations)``.
    """
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while b - a > rtol * abs(0.5 * (a + b)) and it < MAX_ITER:
        it += 1
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    if fc > fd:
        return c, fc, it
    return d, fd, it


# -- oracles -----------------------------------------------------------------

def _exact_eval(r: RelaxationSet, d: Drive, p: Pumping, kappa: Optional[Fraction] = None) -> Tuple[Fraction, Fraction]:
    """Population difference and gain ratio in exact rational arithmetic.

    With ``kappa`` given the drive is taken as exactly that saturation
    parameter and ``d`` is ignored.
    """
    F = Fraction
    gm, gn, gmn = F(r.gamma_m), F(r.gamma_n), F(r.gamma_mn)
    G, Ggn, Ggm = F(r.Gamma), F(r.Gamma_gn), F(r.Gamma_gm)
    tau2 = (gm + gn - gmn) / (gm * gn * G)
    if kappa is None:
        g2 = F(d.g_squared)
        kappa = 2 * tau2 * g2
    else:
        g2 = kappa / (2 * tau2)
    sat = g2 / (G * G * (1 + kappa))
    pop_weight = (1 - gmn / gm) * 2 * G / gn
    pop = F(p.dn_gn) - F(p.dn_mn) * pop_weight * sat
    bracket = 1 - F(p.dn_mn) / F(p.dn_gn) * sat * (pop_weight + G / Ggm)
    return pop, Ggn / (Ggn + g2 / Ggm) * bracket


def _bracket(r: RelaxationSet, x: float) -> Callable[[float], float]:
    p = Pumping.from_ratio(x)
    return lambda k: gain_ratio(r, Drive.from_kappa(k, r), p, with_region=False).bracket


def _pop(r: RelaxationSet, x: float) -> Callable[[float], float]:
    p = Pumping.from_ratio(x)
    return lambda k: saturated_pop_diff(r, Drive.from_kappa(k, r), p)


def interference_term(r: RelaxationSet, d: Drive, p: Pumping) -> float:
    """dn_mn |G|^2 / (Gamma_gm Gamma (1 + kappa))."""
    return p.dn_mn * d.g_squared / (r.Gamma_gm * r.Gamma * (1.0 + d.kappa(r)))


def _balance(r: RelaxationSet, x: float) -> Callable[[float], float]:
    p = Pumping.from_ratio(x)

    def f(k):
        d = Drive.from_kappa(k, r)
        return saturated_pop_diff(r, d, p) + interference_term(r, d, p)

    return f


def root_kappa1(x: float, r: RelaxationSet, tol: float = 1e-12) -> float:
    """Drive at which the evaluated gain bracket crosses zero."""
    return bisect_root(_bracket(r, x), tol)[0]


def root_kappa2(x: float, r: RelaxationSet, tol: float = 1e-12) -> float:
    """Drive at which the evaluated n_g - rho_nn crosses zero."""
    return bisect_root(_pop(r, x), tol)[0]


def root_kappa3(x: float, r: RelaxationSet, tol: float = 1e-12) -> float:
    """Drive at which the inverted population balances the interference term."""
    return bisect_root(_balance(r, x), tol)[0]


def grid_optimum(x: float, r: RelaxationSet, tol: float = 1e-6) -> Tuple[float, float]:
    """Maximize |alpha/alpha0| over kappa > kappa_1(x) by golden-section search.

    Returns ``(kappa_at_max, max_abs_ratio)``.  The search stays right of the
    zero crossing, where the ratio is negative and smooth.  The objective is
    evaluated in exact rationals so that the flat top of the maximum does not
    drown in rounding noise.
    """
    crit = critical_x(r)
    if not x > crit.x1:
        raise NoOptimumError(f"an optimum drive exists only for x > x1 = {crit.x1:g}, got x = {x:g}")
    p = Pumping.from_ratio(x)

    def magnitude(k):
        return abs(_exact_eval(r, None, p, kappa=Fraction(k))[1])

    lo = root_kappa1(x, r)
    hi = 2.0 * lo + 1.0
    while magnitude(hi) >= magnitude(0.5 * (lo + hi)):
        if hi >= MAX_KAPPA:
            raise NoOptimumError("|ratio| did not start decreasing before kappa = 2**60")
        hi *= 2.0
    k, m, _ = golden_section_max(magnitude, lo, hi, rtol=max(tol * 1e-3, 1e-12))
    return k, float(m)


# -- verification report -----------------------------------------------------

@dataclass(frozen=True)
class Check:
    name: str
    closed_form: float
    oracle: float
    rel_error: float
    tolerance: float
    passed: bool


@dataclass
class VerificationReport:
    seed: int
    n_random: int
    checks: List[Check] = field(default_factory=list)

    @property
    def worst_rel_error(self) -> float:
        return max((c.rel_error for c in self.checks), default=0.0)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "n_random": self.n_random,
            "n_checks": len(self.checks),
            "passed": self.passed,
            "worst_rel_error": self.worst_rel_error,
            "checks": [asdict(c) for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _rel(a: float, b: float) -> float:
    if a == b:
        return 0.0
    scale = abs(b) if b != 0 else 1.0
    return abs(a - b) / scale


class _Collector:
    def __init__(self):
        self.checks: List[Check] = []

    def add(self, name, closed_form, oracle, tolerance, error=None):
        err = _rel(closed_form, oracle) if error is None else error
        self.checks.append(Check(name, float(closed_form), float(oracle), float(err), tolerance, err <= tolerance))

    def agree(self, name, mismatches, total):
        # boolean agreements: zero mismatches required
        self.checks.append(Check(name, float(total - mismatches), float(total), float(mismatches), 0.0, mismatches == 0))


def _x_points(rng: Optional[SplitMix64], x_i: float, defaults: Sequence[float]) -> List[float]:
    if rng is None:
        return [x_i * m for m in defaults]
    return [x_i * rng.uniform(1.01, 20.0)]


def _check_medium(out: _Collector, label: str, r: RelaxationSet, rng: Optional[SplitMix64], extra_x=()):
    crit = critical_x(r)
    tau2 = tau_squared(r)

    k = 2.0
    out.add(f"{label}/kappa_roundtrip", Drive.from_kappa(k, r).kappa(r), k, 1e-12)

    # closed-form critical ratios against the asymptotic form of the gain bracket
    g = r.Gamma
    pop_w = (1.0 - r.gamma_mn / r.gamma_m) * 2.0 * g / r.gamma_n
    out.add(f"{label}/x1_identity", crit.x1, 2.0 * tau2 * g * g / (pop_w + g / r.Gamma_gm), 1e-12)
    if not crit.cascade:
        out.add(f"{label}/x2_identity", crit.x2, 2.0 * tau2 * g * g / pop_w, 1e-12)
    if crit.x3 is not None:
        out.add(f"{label}/x3_identity", crit.x3, 2.0 * tau2 * g * g / (pop_w - g / r.Gamma_gm), 1e-12)
    dominant = interference_dominance(r)
    out.agree(f"{label}/condition5_vs_x3_absent", int(dominant != (crit.x3 is None)), 1)

    # gain ratio and population difference against exact rationals
    for i, (xx, kk) in enumerate([(0.5, 0.3), (crit.x1 * 2.0, 1.7), (crit.x1 * 5.0, 7.5)]):
        p = Pumping.from_ratio(xx)
        d = Drive.from_kappa(kk, r)
        ev = gain_ratio(r, d, p, with_region=False)
        pop_exact, ratio_exact = _exact_eval(r, d, p)
        out.add(f"{label}/exact_ratio_{i}", ev.ratio, float(ratio_exact), 1e-12, _abs_or_rel(ev.ratio, ratio_exact))
        out.add(f"{label}/exact_pop_{i}", ev.pop_diff, float(pop_exact), 1e-12, _abs_or_rel(ev.pop_diff, pop_exact))
        out.add(f"{label}/factorization_{i}", ev.ratio, ev.splitting_factor * ev.bracket, 1e-14)

    xs1 = list(extra_x) + _x_points(rng, crit.x1, (1.5, 2.0, 5.0, 20.0))
    for j, x in enumerate(xs1):
        tag = f"{label}/x1pt{j}"
        k1 = crit.kappa(1, x)
        out.add(f"{tag}/kappa1_root", k1, root_kappa1(x, r), 1e-9)
        out.add(f"{tag}/kappa1_zero", 0.0, _bracket(r, x)(k1), 1e-9, abs(_bracket(r, x)(k1)))
        out.add(f"{tag}/bracket_limit", _bracket(r, x)(1e9), 1.0 - x / crit.x1, 1e-6,
                abs(_bracket(r, x)(1e9) - (1.0 - x / crit.x1)) / max(abs(1.0 - x / crit.x1), 1e-300))
        k_opt = kappa_opt(x, r)
        k_grid, _ = grid_optimum(x, r)
        out.add(f"{tag}/kappa_opt", k_opt, k_grid, 1e-6)
        p = Pumping.from_ratio(x)
        mag = lambda kk: abs(gain_ratio(r, Drive.from_kappa(kk, r), p, with_region=False).ratio)
        m0 = mag(k_opt)
        out.agree(f"{tag}/kappa_opt_local_max", int(m0 < mag(k_opt * 0.999)) + int(m0 < mag(k_opt * 1.001)), 2)

    if not crit.cascade:
        for j, x in enumerate(_x_points(rng, crit.x2, (1.5, 2.0, 5.0))):
            tag = f"{label}/x2pt{j}"
            k2 = crit.kappa(2, x)
            out.add(f"{tag}/kappa2_root", k2, root_kappa2(x, r), 1e-9)
            out.add(f"{tag}/kappa2_zero", 0.0, _pop(r, x)(k2), 1e-9, abs(_pop(r, x)(k2)))

    if crit.x3 is not None:
        for j, x in enumerate(_x_points(rng, crit.x3, (1.5, 2.0, 5.0))):
            tag = f"{label}/x3pt{j}"
            k3 = crit.kappa(3, x)
            out.add(f"{tag}/kappa3_root", k3, root_kappa3(x, r), 1e-9)
            p = Pumping.from_ratio(x)
            d = Drive.from_kappa(k3, r)
            out.add(f"{tag}/kappa3_balance", abs(saturated_pop_diff(r, d, p)), interference_term(r, d, p), 1e-9)

    # sign conditions and regions against direct evaluation on a small grid
    n_bad3 = n_bad4 = n_badr = total = 0
    for x in (0.5, crit.x1 * 0.9, crit.x1 * 1.1, crit.x1 * 3.0, crit.x1 * 30.0):
        p = Pumping.from_ratio(x)
        for e in range(-6, 7):
            kk = 3.0**e
            d = Drive.from_kappa(kk, r)
            ev = gain_ratio(r, d, p, with_region=False)
            total += 1
            n_bad3 += pop_inversion_condition(r, d, p) != (ev.pop_diff < 0)
            n_bad4 += gain_inversion_condition(r, d, p) != (ev.bracket < 0)
            n_badr += classify_region(x, kk, r, crit) != _region_from_signs(ev, r, d, p)
    out.agree(f"{label}/condition3_vs_pop_sign", n_bad3, total)
    out.agree(f"{label}/condition4_vs_bracket_sign", n_bad4, total)
    out.agree(f"{label}/region_vs_signs", n_badr, total)

    if r.gamma_g is not None:
        _check_limits(out, label, r.gamma_m, r.gamma_n, r.gamma_g, r.Gamma_gm)


def _abs_or_rel(value: float, exact: Fraction) -> float:
    if exact == 0:
        return abs(value)
    return float(abs((Fraction(value) - exact) / exact))


def _region_from_signs(ev, r, d, p) -> RegionLabel:
    if ev.pop_diff < 0:
        if abs(ev.pop_diff) > interference_term(r, d, p):
            return RegionLabel.IV
        return RegionLabel.III
    if ev.ratio < 0:
        return RegionLabel.II
    return RegionLabel.I


def _check_limits(out: _Collector, label: str, gm: float, gn: float, gg: float, Ggm: float):
    general = critical_x(spontaneous_halfwidths(gm, gn, gg, 0.0))
    lim = limits_small_gamma_mn(gm, gn, gg)
    out.add(f"{label}/limit_small_gamma_mn_x1", lim.x1, general.x1, 1e-12)
    out.add(f"{label}/limit_small_gamma_mn_x2", lim.x2, general.x2, 1e-12)
    out.agree(f"{label}/limit_small_gamma_mn_x3_presence", int((lim.x3 is None) != (general.x3 is None)), 1)
    if lim.x3 is not None and general.x3 is not None:
        out.add(f"{label}/limit_small_gamma_mn_x3", lim.x3, general.x3, 1e-12)

    eps = 1e-8
    g_n = eps * gm
    near_ground = RelaxationSet(gamma_m=gm, gamma_n=g_n, gamma_mn=gm - g_n, Gamma=gm, Gamma_gn=gm, Gamma_gm=Ggm)
    gx1, gx2 = limits_ground_n(gm, Ggm)
    c = critical_x(near_ground)
    out.add(f"{label}/limit_ground_n_x1", gx1, c.x1, 1e-6)
    out.add(f"{label}/limit_ground_n_x2", gx2, c.x2, 1e-6)

    cascade = RelaxationSet(gamma_m=gm, gamma_n=gn, gamma_mn=gm, Gamma=gm, Gamma_gn=gm, Gamma_gm=Ggm)
    out.add(f"{label}/limit_solid_x1", x1_solid_limit(cascade), critical_x(cascade).x1, 1e-12)
    spont = spontaneous_halfwidths(gm, gn, gg, gm)
    out.add(f"{label}/limit_solid_spontaneous", x1_solid_limit(spont), 1.0 + gg / gm, 1e-12)


def random_medium(rng: SplitMix64) -> RelaxationSet:
    """Medium with every rate within a factor 10 of gamma_m = 1e7 s^-1."""
    gm = 1e7

    def spread():
        return gm * 10.0 ** rng.uniform(-1.0, 1.0)

    return RelaxationSet(
        gamma_m=gm,
        gamma_n=spread(),
        gamma_g=spread(),
        gamma_mn=gm * rng.uniform(0.0, 0.95),
        Gamma=spread(),
        Gamma_gn=spread(),
        Gamma_gm=spread(),
    )


def verify_suite(r_list: Optional[Iterable[Tuple[str, RelaxationSet]]] = None, seed: int = 42, n_random: int = 100) -> VerificationReport:
    """Run every closed-form cross-check.

    Parameters
    ----------
    r_list : iterable of (name, RelaxationSet), optional
        Named media checked at fixed points.  Defaults to the shipped presets.
    seed : int
        Seed for the SplitMix64 stream generating random media.
    n_random : int
        Number of random media.

    Failures are recorded in the report, never raised.
    """
    if r_list is None:
        from .sweep import PRESETS

        r_list = [(name, p.relaxation) for name, p in PRESETS.items()]
    out = _Collector()
    for name, r in r_list:
        _check_medium(out, f"preset:{name}", r, None, extra_x=(4.14,) if critical_x(r).x1 < 4.14 else ())
    rng = SplitMix64(seed)
    for i in range(n_random):
        _check_medium(out, f"random:{i:03d}", random_medium(rng), rng)
    report = VerificationReport(seed=seed, n_random=n_random, checks=sorted(out.checks, key=lambda c: c.name))
    return report

"""Critical population ratios, critical drive curves, limits and optimum drive.

With x = dn_mn/dn_gn > 0 the gain bracket is ``1 - (x/x1) kappa/(1+kappa)``
and the normalized saturated population difference is
``1 - (x/x2) kappa/(1+kappa)``, so every critical curve has the same shape
``kappa_i(x) = 1/(x/x_i - 1)``.  The regions of the (x, kappa) plane are:

I    no sign change of the probe gain;
II   probe gain inverted, n_g - rho_nn still positive;
III  n_g - rho_nn inverted;
IV   |n_g - rho_nn| exceeds the interference term (exists only when x3 does).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

from .errors import AbsentBranchError, CurveUndefinedError, DomainError, NoOptimumError
from .model import RelaxationSet, tau_squared

__all__ = [
    "RegionLabel",
    "CriticalSet",
    "CriticalLimits",
    "critical_x",
    "kappa_curve",
    "classify_region",
    "kappa_opt",
    "kappa_opt_asymptote",
    "spontaneous_halfwidths",
    "x1_solid_limit",
    "limits_small_gamma_mn",
    "limits_ground_n",
]


class RegionLabel(str, enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"

    @property
    def index(self) -> int:
        return ("I", "II", "III", "IV").index(self.value) + 1

    def __str__(self):
        return self.value


def _curve(x, x_i):
    return 1.0 / (x / x_i - 1.0)


@dataclass(frozen=True)
class CriticalSet:
    """Critical ratios x1 < x2 (< x3).

    ``x2`` is ``inf`` for a pure m->n cascade.  ``x3`` is None when the
    minus-branch denominator ``gamma_m - gamma_mn - gamma_n gamma_m/(2 Gamma_gm)``
    is not positive; region IV is then absent.
    """

    x1: float
    x2: float
    x3: Optional[float]
    x3_denominator: float
    cascade: bool

    @property
    def x3_present(self) -> bool:
        return self.x3 is not None

    def ratio(self, which: int) -> float:
        if which == 1:
            return self.x1
        if which == 2:
            return self.x2
        if which == 3:
            if self.x3 is None:
                raise AbsentBranchError(
                    "x3 is absent for this medium (minus-branch denominator "
                    f"{self.x3_denominator:g} <= 0), so kappa_3 does not exist"
                )
            return self.x3
        raise ValueError(f"which must be 1, 2 or 3, got {which!r}")

    def kappa(self, which: int, x: float) -> float:
        x_i = self.ratio(which)
        if not x > x_i:
            raise CurveUndefinedError(
                f"kappa_{which}(x) needs x > x{which} = {x_i:g}, got x = {x:g}"
            )
        return _curve(x, x_i)


class CriticalLimits(NamedTuple):
    x1: float
    x2: float
    x3: Optional[float]


def critical_x(r: RelaxationSet) -> CriticalSet:
    """Critical population-difference ratios of a medium.

    x2   = (gamma_m - gamma_mn + gamma_n) / (gamma_m - gamma_mn)
    x1,3 = (gamma_m - gamma_mn + gamma_n) / (gamma_m - gamma_mn +- gamma_n gamma_m / (2 Gamma_gm))
    """
    base = r.gamma_m - r.gamma_mn
    numerator = base + r.gamma_n
    interference = r.gamma_n * r.gamma_m / (2.0 * r.Gamma_gm)
    x1 = numerator / (base + interference)
    x2 = numerator / base if base > 0 else math.inf
    minus = base - interference
    x3 = numerator / minus if minus > 0 else None
    return CriticalSet(x1=x1, x2=x2, x3=x3, x3_denominator=minus, cascade=base == 0)


def kappa_curve(which: int, x: float, r: RelaxationSet) -> float:
    """Critical drive ``kappa_i(x) = 1/(x/x_i - 1)`` for branch 1, 2 or 3."""
    return critical_x(r).kappa(which, x)


def _classify(x: float, kappa: float, crit: CriticalSet) -> RegionLabel:
    if x <= crit.x1 or kappa <= _curve(x, crit.x1):
        return RegionLabel.I
    if x <= crit.x2 or kappa <= _curve(x, crit.x2):
        return RegionLabel.II
    if crit.x3 is None or x <= crit.x3 or kappa <= _curve(x, crit.x3):
        return RegionLabel.III
    return RegionLabel.IV


def classify_region(x: float, kappa: float, r: RelaxationSet, crit: Optional[CriticalSet] = None) -> RegionLabel:
    """Region of the (x, kappa) plane; boundary points go to the lower region.

    Pass a precomputed ``crit`` to avoid recomputing it on grids.
    """
    if not x > 0:
        raise DomainError(f"region analysis needs x > 0 (same-sign pumping), got x = {x!r}")
    if not kappa >= 0:
        raise DomainError(f"kappa must be >= 0, got {kappa!r}")
    return _classify(x, kappa, crit if crit is not None else critical_x(r))


def kappa_opt(x: float, r: RelaxationSet) -> float:
    """Drive maximizing |alpha/alpha0| at fixed x > x1.

    kappa_opt = k1 {1 + sqrt(1 + (2 tau^2 Gamma_gm Gamma_gn x + x1) / (x1 k1))}
    with k1 = kappa_1(x).
    """
    crit = critical_x(r)
    if not x > crit.x1:
        raise NoOptimumError(f"an optimum drive exists only for x > x1 = {crit.x1:g}, got x = {x:g}")
    k1 = _curve(x, crit.x1)
    s = 2.0 * tau_squared(r) * r.Gamma_gm * r.Gamma_gn
    return k1 * (1.0 + math.sqrt(1.0 + (s * x + crit.x1) / (crit.x1 * k1)))


def kappa_opt_asymptote(r: RelaxationSet) -> float:
    """Large-x limit of :func:`kappa_opt`: sqrt(2 tau^2 Gamma_gm Gamma_gn)."""
    return math.sqrt(2.0 * tau_squared(r) * r.Gamma_gm * r.Gamma_gn)


def spontaneous_halfwidths(gamma_m: float, gamma_n: float, gamma_g: float, gamma_mn: float = 0.0) -> RelaxationSet:
    """Medium with purely spontaneous relaxation: Gamma_ik = (gamma_i + gamma_k)/2."""
    return RelaxationSet(
        gamma_m=gamma_m,
        gamma_n=gamma_n,
        gamma_mn=gamma_mn,
        Gamma=(gamma_m + gamma_n) / 2.0,
        Gamma_gn=(gamma_g + gamma_n) / 2.0,
        Gamma_gm=(gamma_g + gamma_m) / 2.0,
        gamma_g=gamma_g,
    )


def x1_solid_limit(r: RelaxationSet) -> float:
    """x1 ~ 2 Gamma_gm / gamma_m, valid when gamma_m ~ gamma_mn (caller's regime)."""
    return 2.0 * r.Gamma_gm / r.gamma_m


def limits_small_gamma_mn(gamma_m: float, gamma_n: float, gamma_g: float) -> CriticalLimits:
    """Critical ratios for gamma_mn << gamma_m and spontaneous half-widths.

    x3 is None unless gamma_m + gamma_g > gamma_n.
    """
    x1 = 1.0 + gamma_n * gamma_g / (gamma_m * (gamma_m + gamma_n + gamma_g))
    x2 = 1.0 + gamma_n / gamma_m
    x3 = None
    if gamma_m + gamma_g > gamma_n:
        x3 = 1.0 + gamma_n * (2.0 * gamma_m + gamma_g) / (gamma_m * (gamma_m + gamma_g - gamma_n))
    return CriticalLimits(x1, x2, x3)


def limits_ground_n(gamma_m: float, Gamma_gm: float) -> Tuple[float, float]:
    """Critical ratios (x1, x2) when n is the ground level.

    Obtained from the general ratios with gamma_n -> 0, gamma_m - gamma_mn -> 0
    and (gamma_m - gamma_mn)/gamma_n -> 1.
    """
    return 1.0 + (2.0 * Gamma_gm - gamma_m) / (2.0 * Gamma_gm + gamma_m), 2.0

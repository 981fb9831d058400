"""Line-center probe gain for a three-level scheme with a common lower level.

Levels: ``m`` (upper level of the strong transition), ``n`` (the common lower
level) and ``g`` (upper level of the weak probe transition).  A strong field
drives ``m-n`` exactly on resonance; a weak probe sits at the center of the
``g-n`` line.  All rates are angular-frequency rates in s^-1.

Quantities returned here are dimensionless: the probe gain is reported as
the ratio to its value without the strong field, and population differences
are per-particle fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError, InvariantError, UndefinedRatioError

__all__ = [
    "RelaxationSet",
    "Drive",
    "Pumping",
    "GainEvaluation",
    "tau_squared",
    "saturation_kappa",
    "drive_from_kappa",
    "saturated_pop_diff",
    "gain_ratio",
    "pop_inversion_condition",
    "gain_inversion_condition",
    "interference_dominance",
    "interference_dominance_threshold",
]


def _check_positive(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise InvariantError(name, f"must be a finite positive rate, got {value!r}")


@dataclass(frozen=True)
class RelaxationSet:
    """Level widths, line half-widths and the m->n decay rate of the medium.

    Parameters
    ----------
    gamma_m, gamma_n : float
        Widths of levels m and n.
    gamma_mn : float
        Probability per unit time of relaxation from m to n.  ``0 <= gamma_mn
        <= gamma_m``; equality means m decays only to n.
    Gamma : float
        Half-width of the strong m-n line.
    Gamma_gn : float
        Half-width of the weak g-n line.
    Gamma_gm : float
        Half-width of the two-photon g-m line.
    gamma_g : float, optional
        Width of level g.  Only used by the limit formulas and constructors.
    """

    gamma_m: float
    gamma_n: float
    gamma_mn: float
    Gamma: float
    Gamma_gn: float
    Gamma_gm: float
    gamma_g: Optional[float] = None

    def __post_init__(self):
        for name in ("gamma_m", "gamma_n", "Gamma", "Gamma_gn", "Gamma_gm"):
            _check_positive(name, getattr(self, name))
        if self.gamma_g is not None:
            _check_positive("gamma_g", self.gamma_g)
        gmn = self.gamma_mn
        if not (isinstance(gmn, (int, float)) and math.isfinite(gmn) and gmn >= 0):
            raise InvariantError("gamma_mn", f"must be a finite non-negative rate, got {gmn!r}")
        if gmn > self.gamma_m:
            raise InvariantError(
                "gamma_mn",
                f"decay rate m->n ({gmn:g}) must not exceed the width of level m, "
                f"gamma_m ({self.gamma_m:g})",
            )

    @property
    def is_cascade(self) -> bool:
        """True when level m relaxes exclusively into n."""
        return self.gamma_mn == self.gamma_m


def tau_squared(r: RelaxationSet) -> float:
    """Return tau^2 = (gamma_m + gamma_n - gamma_mn) / (gamma_m gamma_n Gamma), in s^2."""
    return (r.gamma_m + r.gamma_n - r.gamma_mn) / (r.gamma_m * r.gamma_n * r.Gamma)


def saturation_kappa(g_squared: float, r: RelaxationSet) -> float:
    """Saturation parameter kappa = 2 tau^2 |G|^2 for a drive ``|G|^2`` (s^-2)."""
    if not g_squared >= 0:
        raise DomainError(f"g_squared must be >= 0, got {g_squared!r}")
    return 2.0 * tau_squared(r) * g_squared


def drive_from_kappa(kappa: float, r: RelaxationSet) -> float:
    """Inverse of :func:`saturation_kappa`: the ``|G|^2`` giving ``kappa``."""
    if not kappa >= 0:
        raise DomainError(f"kappa must be >= 0, got {kappa!r}")
    return kappa / (2.0 * tau_squared(r))


@dataclass(frozen=True)
class Drive:
    """Strong-field intensity, stored as ``|G|^2`` in s^-2."""

    g_squared: float

    def __post_init__(self):
        if not (math.isfinite(self.g_squared) and self.g_squared >= 0):
            raise InvariantError("g_squared", f"must be finite and >= 0, got {self.g_squared!r}")

    @classmethod
    def from_kappa(cls, kappa: float, r: RelaxationSet) -> "Drive":
        return cls(drive_from_kappa(kappa, r))

    def kappa(self, r: RelaxationSet) -> float:
        return saturation_kappa(self.g_squared, r)


@dataclass(frozen=True)
class Pumping:
    """Unsaturated population differences dn_gn = n_g - n_n and dn_mn = n_m - n_n."""

    dn_gn: float
    dn_mn: float

    def __post_init__(self):
        for name in ("dn_gn", "dn_mn"):
            if not math.isfinite(getattr(self, name)):
                raise InvariantError(name, "must be finite")

    @property
    def x(self) -> float:
        if self.dn_gn == 0:
            raise UndefinedRatioError("x = dn_mn/dn_gn is undefined for dn_gn = 0")
        return self.dn_mn / self.dn_gn

    @property
    def same_sign(self) -> bool:
        return self.dn_gn != 0 and self.dn_gn * self.dn_mn >= 0

    @classmethod
    def from_ratio(cls, x: float, dn_gn: float = 1.0) -> "Pumping":
        return cls(dn_gn, x * dn_gn)


@dataclass(frozen=True)
class GainEvaluation:
    """Probe gain and populations at one operating point.

    ``ratio == splitting_factor * bracket``.  ``region`` is None unless
    x > 0, i.e. the region analysis only covers same-sign pumping.
    """

    ratio: float
    pop_diff: float
    region: Optional[object]
    splitting_factor: float
    bracket: float
    x: float
    kappa: float
    g_squared: float


# The helpers below are shared by the closed forms and the inversion tests so
# that sign decisions agree bit-for-bit with the evaluated expressions.

def _drive_term(r: RelaxationSet, d: Drive) -> float:
    """2|G|^2 / (Gamma gamma_n (1 + kappa))."""
    kappa = d.kappa(r)
    return 2.0 * d.g_squared / (r.Gamma * r.gamma_n * (1.0 + kappa))


def _pop_coefficient(r: RelaxationSet, d: Drive) -> float:
    return (1.0 - r.gamma_mn / r.gamma_m) * _drive_term(r, d)


def _gain_coefficient(r: RelaxationSet, d: Drive) -> float:
    weight = 1.0 - r.gamma_mn / r.gamma_m + r.gamma_n / (2.0 * r.Gamma_gm)
    return weight * _drive_term(r, d)


def _splitting_factor(r: RelaxationSet, d: Drive) -> float:
    return r.Gamma_gn / (r.Gamma_gn + d.g_squared / r.Gamma_gm)


def _require_same_sign(p: Pumping):
    if p.dn_gn == 0:
        raise UndefinedRatioError("dn_gn = 0: inversion analysis needs a finite x")
    if not p.same_sign:
        raise DomainError(
            "inversion analysis requires dn_gn and dn_mn of the same sign, "
            f"got dn_gn={p.dn_gn!r}, dn_mn={p.dn_mn!r}"
        )


def saturated_pop_diff(r: RelaxationSet, d: Drive, p: Pumping) -> float:
    """Probe-transition population difference n_g - rho_nn under the strong drive.

    dn_gn - dn_mn (1 - gamma_mn/gamma_m) (2 Gamma/gamma_n) |G|^2 / (Gamma^2 (1 + kappa)).
    Independent of the drive when gamma_mn == gamma_m.
    """
    return p.dn_gn - p.dn_mn * _pop_coefficient(r, d)


def gain_ratio(r: RelaxationSet, d: Drive, p: Pumping, with_region: bool = True) -> GainEvaluation:
    """Evaluate alpha/alpha0 at line center in factored form.

    The splitting factor ``Gamma_gn / (Gamma_gn + |G|^2/Gamma_gm)`` carries the
    field splitting of the levels; the bracket

        1 - x |G|^2/(Gamma^2 (1+kappa)) [(1 - gamma_mn/gamma_m) 2 Gamma/gamma_n + Gamma/Gamma_gm]

    carries saturation of the common level plus the two-photon g<->m
    interference term.  ``with_region=False`` skips the region lookup.

    Raises
    ------
    UndefinedRatioError
        If ``p.dn_gn == 0``.
    """
    x = p.x
    kappa = d.kappa(r)
    split = _splitting_factor(r, d)
    bracket = 1.0 - x * _gain_coefficient(r, d)
    pop = saturated_pop_diff(r, d, p)
    region = None
    if with_region and p.same_sign and x > 0:
        from .critical import classify_region

        region = classify_region(x, kappa, r)
    return GainEvaluation(
        ratio=split * bracket,
        pop_diff=pop,
        region=region,
        splitting_factor=split,
        bracket=bracket,
        x=x,
        kappa=kappa,
        g_squared=d.g_squared,
    )


def pop_inversion_condition(r: RelaxationSet, d: Drive, p: Pumping) -> bool:
    """True when the drive inverts n_g - rho_nn.

    (1 - gamma_mn/gamma_m) (2|G|^2/(Gamma gamma_n)) / (1 + kappa) > dn_gn/dn_mn
    """
    _require_same_sign(p)
    return _pop_coefficient(r, d) * abs(p.dn_mn) > abs(p.dn_gn)


def gain_inversion_condition(r: RelaxationSet, d: Drive, p: Pumping) -> bool:
    """True when the probe gain changes sign (bracket of the gain ratio < 0).

    [1 - gamma_mn/gamma_m + gamma_n/(2 Gamma_gm)] (2|G|^2/(Gamma gamma_n)) / (1 + kappa) > dn_gn/dn_mn
    """
    _require_same_sign(p)
    return p.x * _gain_coefficient(r, d) > 1.0


def interference_dominance_threshold(r: RelaxationSet) -> float:
    """gamma_n / (2 (1 - gamma_mn/gamma_m)); infinite for a pure m->n cascade."""
    if r.is_cascade:
        return math.inf
    return r.gamma_n / (2.0 * (1.0 - r.gamma_mn / r.gamma_m))


def interference_dominance(r: RelaxationSet) -> bool:
    """True when Gamma_gm <= gamma_n / (2 (1 - gamma_mn/gamma_m)).

    In that regime the interference term flips the gain sign well before the
    populations invert.
    """
    return r.Gamma_gm <= interference_dominance_threshold(r)

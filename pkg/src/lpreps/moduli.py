"""Moduli of continuity, singularity moduli and Lp-moduli.

A :class:`Modulus` is a finite table followed by an affine tail ``a*n + b``,
which represents every eventually affine modulus exactly.  The validators
check the defining implications against exact ground truth:

* continuity: ``|x - y| <= 2**-mu(n)`` implies ``|f(x) - f(y)| < 2**-n``;
* singularity: the same hypothesis implies ``|integral of f over [x, y]| < 2**-n``;
* Lp: ``|h| <= 2**-mu(n)`` implies ``||f - tau_h f||_p < 2**-n``.

Shift lengths are sampled on the grid ``i * 2**(-mu(n) - 2)``; for each
shift length the supremum over the base point is computed exactly, so the
only sampling is in the length of the shift.  Every inequality is strict.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .dyadic import ceil_log2
from .symbolic import Enclosure, FunctionSpec, convolve, shift_diff_norm

KINDS = ("continuity", "singularity", "lp")


class ModulusError(ValueError):
    pass


class PreconditionError(ModulusError):
    """An input function lies outside the class a conversion is stated for."""


@dataclass(frozen=True)
class Modulus:
    kind: str
    table: tuple[int, ...] = ()
    tail_a: int = 0
    tail_b: int = 0
    p: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ModulusError(f"unknown modulus kind {self.kind!r}")
        if self.kind == "lp" and (self.p is None or self.p < 1):
            raise ModulusError("an Lp-modulus needs p >= 1")
        if self.tail_a < 0 or any(v < 0 for v in self.table):
            raise ModulusError("modulus values must be nonnegative")
        object.__setattr__(self, "table", tuple(int(v) for v in self.table))

    # -- constructors ----------------------------------------------------------
    @classmethod
    def affine(cls, a: int, b: int, kind: str = "lp", p: int | None = None) -> "Modulus":
        """``n -> a*n + b`` (values below zero are clamped to zero)."""
        if b < 0:
            first = -(-(-b) // a) if a else 0
            table = tuple(max(a * n + b, 0) for n in range(first))
            return cls(kind, table, a, b, p)
        return cls(kind, (), a, b, p)

    @classmethod
    def zero(cls, kind: str = "lp", p: int | None = None) -> "Modulus":
        return cls(kind, (), 0, 0, p if kind != "lp" else (p or 1))

    @classmethod
    def from_values(cls, values: Sequence[int], kind: str, p: int | None = None) -> "Modulus":
        """Table ``values`` followed by the tail ``n -> n + c`` continuing the last value."""
        values = list(values)
        if not values:
            return cls.zero(kind, p)
        last = values[-1]
        return cls(kind, tuple(values), 1, last + 1 - len(values), p)

    def __call__(self, n: int) -> int:
        if n < 0:
            n = 0
        if n < len(self.table):
            return self.table[n]
        return max(self.tail_a * n + self.tail_b, 0)

    def values(self, upto: int) -> list[int]:
        return [self(n) for n in range(upto + 1)]

    def with_kind(self, kind: str, p: int | None = None) -> "Modulus":
        return Modulus(kind, self.table, self.tail_a, self.tail_b, p)

    # -- transformations -----------------------------------------------------
    def shifted(self, c: int, kind: str | None = None, p: int | None = None) -> "Modulus":
        """``n -> mu(n + c)``."""
        kind = kind or self.kind
        p = p if p is not None else self.p
        end = max(len(self.table) - c, 0, -c + 1)
        table = tuple(self(n + c) for n in range(end))
        return Modulus(kind, table, self.tail_a, self.tail_a * c + self.tail_b, p)

    def maximum(self, other: "Modulus", kind: str | None = None, p: int | None = None) -> "Modulus":
        """Pointwise maximum, with the dominant affine tail beyond the crossing point."""
        kind = kind or self.kind
        p = p if p is not None else self.p
        a1, b1, a2, b2 = self.tail_a, self.tail_b, other.tail_a, other.tail_b
        start = max(len(self.table), len(other.table))
        if (a1, b1) == (a2, b2):
            cross, tail = start, (a1, b1)
        elif a1 == a2:
            cross, tail = start, (a1, max(b1, b2))
        else:
            hi, lo = ((a1, b1), (a2, b2)) if a1 > a2 else ((a2, b2), (a1, b1))
            n0 = max(-(-(lo[1] - hi[1]) // (hi[0] - lo[0])), 0)
            cross, tail = max(start, n0), hi
        table = tuple(max(self(n), other(n)) for n in range(cross))
        return Modulus(kind, table, tail[0], tail[1], p)

    def repaired(self) -> "Modulus":
        """Smallest pointwise-larger modulus that is strictly increasing once nonzero."""
        out: list[int] = []
        for v in self.table:
            if out and out[-1] > 0:
                v = max(v, out[-1] + 1)
            out.append(v)
        a, b = self.tail_a, self.tail_b
        n0 = len(out)
        last = out[-1] if out else 0
        if a == 0 and b <= 0 and last == 0:
            return Modulus(self.kind, tuple(out), 0, 0, self.p)
        if a == 0:
            a, b = 1, max(b, last + 1) - n0
        while last == 0 and a * n0 + b <= 0:
            out.append(0)
            n0 += 1
        if last > 0:
            b = max(b, last + 1 - a * n0)
        return Modulus(self.kind, tuple(out), a, b, self.p)

    def is_strict_when_nonzero(self, upto: int) -> bool:
        vals = self.values(upto + 1)
        if any(v and w <= v for v, w in zip(vals, vals[1:])):
            return False
        return self.tail_a >= 1 or self(upto + 1) == 0

    # -- serialisation -----------------------------------------------------------
    def to_json(self) -> dict:
        data = {"kind": self.kind, "table": list(self.table), "tail": {"a": self.tail_a, "b": self.tail_b}}
        if self.kind == "lp":
            data["p"] = self.p
        return data

    @classmethod
    def from_json(cls, data: dict) -> "Modulus":
        tail = data.get("tail", {"a": 0, "b": 0})
        return cls(
            data["kind"],
            tuple(data.get("table", ())),
            int(tail["a"]),
            int(tail["b"]),
            data.get("p"),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def ceil_lb(value) -> int:
    """``ceil(lb(value))``; used for the non-integer constants of the conversions."""
    return ceil_log2(value)


# -- validation ----------------------------------------------------------------------


@dataclass
class ModulusReport:
    ok: bool
    kind: str
    checked: int = 0
    witness: dict = field(default_factory=dict)
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _lp_pow_bound(n: int, p: int) -> Fraction:
    return Fraction(1, 2 ** (n * p))


def worst_shift_integral(f: FunctionSpec, h: Fraction) -> Enclosure:
    """Enclosure of ``sup_x |integral of f over [x, x + h]|``."""
    window = FunctionSpec.piecewise([((-h, Fraction(0)), [1])])
    return convolve(f, window).sup_abs()


def worst_continuity_gap(f: FunctionSpec, h: Fraction) -> Enclosure:
    """Enclosure of ``sup |f(x + h) - f(x)|`` over ``x, x + h`` in the domain hull."""
    (lo, hi), = f.bounding_box()
    if h >= hi - lo:
        return Enclosure.point(0)
    base = f.restricted(lo, hi - h)
    moved = f.shifted(h).restricted(lo, hi - h)
    return (moved - base).sup_abs()


def _check(kind: str, f: FunctionSpec, n: int, k: int, h: Fraction, p: int | None):
    """Return ``(value_enclosure, bound)`` for one grid shift."""
    if kind == "lp":
        hs = (h,) * 1 if f.d == 1 else h
        return shift_diff_norm(f, hs, p), _lp_pow_bound(n, p)
    if kind == "singularity":
        return worst_shift_integral(f, h), Fraction(1, 2**n)
    return worst_continuity_gap(f, h), Fraction(1, 2**n)


def _shift_grid(k: int, steps: int, d: int):
    unit = Fraction(1, 2**k) / steps
    if d == 1:
        return [i * unit for i in range(1, steps + 1)]
    grid = []
    for i in range(0, steps + 1):
        for j in range(-steps, steps + 1):
            if (i, j) > (0, 0):
                grid.append((i * unit, j * unit))
    return grid


def validate_modulus(
    mu: Modulus,
    f: FunctionSpec,
    kind: str | None = None,
    p: int | None = None,
    n_max: int = 10,
    steps: int = 4,
) -> ModulusReport:
    """Check the defining implication of ``kind`` for ``n <= n_max`` exactly.

    ``steps`` sets the shift resolution ``2**-mu(n) / steps``; at least 4 is
    required so the grid reaches ``2**(-mu(n) - 2)``.
    """
    kind = kind or mu.kind
    if kind == "lp":
        p = p if p is not None else mu.p
        if p is None:
            raise ModulusError("Lp validation needs p")
    if steps < 4:
        raise ModulusError("shift grid too coarse: need resolution 2^(-mu(n)-2)")
    if kind in ("continuity", "lp") and not mu.is_strict_when_nonzero(n_max):
        return ModulusReport(False, kind, 0, {}, "not strictly increasing where nonzero")
    if kind == "continuity" and not f.is_continuous_on_domain():
        return ModulusReport(False, kind, 0, {}, "function is not continuous on its domain")
    if kind == "singularity" and f.d > 1:
        for axis in range(f.d):
            sub = validate_modulus(mu, f.marginal(axis), kind, p, n_max, steps)
            if not sub.ok:
                sub.witness["axis"] = axis
                return sub
        return ModulusReport(True, kind, n_max + 1)
    if kind == "continuity" and f.d > 1:
        raise ModulusError("continuity moduli are checked in one dimension")
    checked = 0
    cache: dict = {}
    for n in range(n_max + 1):
        k = mu(n)
        for h in _shift_grid(k, steps, f.d):
            key = (h if f.d == 1 else tuple(h))
            if key not in cache:
                cache[key] = _check(kind, f, n, k, h, p)[0]
            value = cache[key]
            bound = Fraction(1, 2 ** (n * p)) if kind == "lp" else Fraction(1, 2**n)
            checked += 1
            if not value.below(bound):
                reason = "violated" if value.at_least(bound) else "undecided enclosure"
                return ModulusReport(
                    False, kind, checked, {"n": n, "mu": k, "h": h, "value": value, "bound": bound}, reason
                )
    return ModulusReport(True, kind, checked)


def search_modulus(
    f: FunctionSpec, kind: str, p: int | None = None, n_max: int = 10, steps: int = 4
) -> Modulus:
    """Smallest grid-validated values ``mu(0..n_max)``, then strictness repair."""
    values: list[int] = []
    k = 0
    for n in range(n_max + 1):
        while True:
            trial = Modulus.from_values(values + [k], kind, p if kind == "lp" else None)
            probe = validate_modulus_at(trial, f, kind, p, n, steps)
            if probe:
                break
            k += 1
        values.append(k)
    return Modulus.from_values(values, kind, p if kind == "lp" else None).repaired()


def validate_modulus_at(mu: Modulus, f: FunctionSpec, kind: str, p, n: int, steps: int = 4) -> bool:
    k = mu(n)
    bound = Fraction(1, 2 ** (n * p)) if kind == "lp" else Fraction(1, 2**n)
    for h in _shift_grid(k, steps, f.d):
        if not _check(kind, f, n, k, h, p)[0].below(bound):
            return False
    return True


# -- conversions -------------------------------------------------------------------------


def continuity_to_lp(
    mu: Modulus, nu: Modulus, sup_exponent: int, measure, p: int
) -> Modulus:
    """Lp-modulus ``max{mu(n + ceil lb measure + 1), nu(n + sup_exponent + 1)}``.

    ``nu`` is an Lp-modulus of the characteristic function of the domain and
    ``2**sup_exponent`` bounds the supremum norm.
    """
    first = mu.shifted(ceil_lb(measure) + 1, "lp", p)
    second = nu.shifted(sup_exponent + 1, "lp", p)
    return first.maximum(second, "lp", p).repaired()


def lp_to_singularity(mu: Modulus, measure, diameter, d: int = 1) -> Modulus:
    """Singularity modulus ``n -> mu(n + 1 + ceil lb measure + (d-1) ceil lb diameter)``."""
    shift = 1 + ceil_lb(measure) + (d - 1) * ceil_lb(diameter)
    return mu.shifted(shift, "singularity", None)


def lp_of_derivative_to_continuity(mu: Modulus) -> Modulus:
    """Modulus of continuity ``n -> mu(n + 1)`` from an Lp-modulus of the derivative."""
    return mu.shifted(1, "continuity", None).repaired()


@dataclass(frozen=True)
class NormBound:
    """``||f||_p < ceil(diam) * 2**(mu(0) - 1/p)``, stored through its p-th power."""

    p: int
    diameter_ceiling: int
    exponent: int

    @property
    def power(self) -> Fraction:
        """The p-th power of the bound: ``ceil(diam)**p * 2**(p*mu(0) - 1)``."""
        return Fraction(self.diameter_ceiling**self.p) * Fraction(2) ** (self.p * self.exponent - 1)

    def holds(self, norm_power: Enclosure | Fraction) -> bool:
        if isinstance(norm_power, Enclosure):
            return norm_power.below(self.power)
        return Fraction(norm_power) < self.power


def norm_bound_from_modulus(mu: Modulus, diameter, p: int) -> NormBound:
    diam = Fraction(diameter)
    ceiling = max(-(-diam.numerator // diam.denominator), 1)
    return NormBound(p, ceiling, mu(0))


def linear_singularity_modulus(p: int, norm_exponent: int, slope: int) -> Modulus:
    """``n -> D (n + C)`` for ``C > lb ||f||_p`` and ``D >= (1 - 1/p)**-1``."""
    if p <= 1:
        raise ModulusError("the linear singularity modulus needs p > 1")
    if Fraction(slope) < Fraction(p, p - 1):
        raise ModulusError("slope D must satisfy D >= (1 - 1/p)^-1")
    return Modulus.affine(slope, slope * norm_exponent, "singularity")


def check_vanishing_ends(f: FunctionSpec) -> None:
    """Raise unless ``f`` is weakly differentiable with continuous representative
    vanishing at both ends of its domain."""
    if f.d != 1:
        raise PreconditionError("one-dimensional functions only")
    if not f.is_continuous_on_domain():
        raise PreconditionError("function has a jump inside its domain")
    (lo, hi), = f.bounding_box()
    if f.limits(lo)[1] != 0 or f.limits(hi)[0] != 0:
        raise PreconditionError("continuous representative does not vanish at the boundary")


def lp_modulus_from_derivative_norm(
    c: int, p: int = 1, f: FunctionSpec | None = None
) -> Modulus:
    """``n -> n + C`` is an Lp-modulus once ``C > lb ||f'||_p`` and ``f`` vanishes at the ends.

    When ``f`` is supplied both preconditions are checked exactly.
    """
    if f is not None:
        from .symbolic import weak_derivative

        check_vanishing_ends(f)
        deriv_power = weak_derivative(f).lp_power(p)
        if not deriv_power.below(Fraction(2) ** (c * p)):
            raise PreconditionError("C must exceed lb of the derivative norm")
    return Modulus.affine(1, c, "lp", p)


def lq_shift(p: int, q: int, measure) -> int:
    """Shift turning an Lp-modulus into an Lq-modulus for ``q <= p``.

    ``f - tau_h f`` lives on a set of measure at most ``2 * measure``, so the
    Hoelder corollary costs a factor ``(2 measure)**(1/q - 1/p)``.
    """
    if q > p:
        raise ModulusError("need q <= p")
    if q == p:
        return 0
    e = ceil_lb(2 * Fraction(measure))
    num = e * (p - q)
    den = p * q
    return max(-(-num // den), 0)


def lq_from_lp(mu: Modulus, p: int, q: int, measure) -> Modulus:
    shift = lq_shift(p, q, measure)
    return mu.shifted(shift, "lp", q).repaired()


def characteristic_modulus(p: int) -> Modulus:
    """Lp-modulus ``m -> p m + 2`` of the characteristic function of ``[0, 1]``."""
    return Modulus.affine(p, 2, "lp", p)


def function_modulus(fn: Callable[[int], int], kind: str, upto: int, p: int | None = None) -> Modulus:
    """Tabulate ``fn`` on ``0..upto`` and continue with slope one."""
    return Modulus.from_values([fn(n) for n in range(upto + 1)], kind, p)


__all__ = [
    "KINDS",
    "Modulus",
    "ModulusError",
    "ModulusReport",
    "NormBound",
    "PreconditionError",
    "ceil_lb",
    "characteristic_modulus",
    "check_vanishing_ends",
    "continuity_to_lp",
    "function_modulus",
    "linear_singularity_modulus",
    "lp_modulus_from_derivative_norm",
    "lp_of_derivative_to_continuity",
    "lp_to_singularity",
    "lq_from_lp",
    "lq_shift",
    "norm_bound_from_modulus",
    "search_modulus",
    "validate_modulus",
    "worst_continuity_gap",
    "worst_shift_integral",
]

"""Exact ground truth: piecewise polynomials over dyadic boxes.

A :class:`FunctionSpec` is a finite list of pieces ``(box, polynomial)`` with
disjoint interiors, plus a domain ``Omega`` (a finite union of boxes).  The
function is extended by zero outside its pieces.  Every quantity here is
computed exactly with :class:`fractions.Fraction`; where an irrational root
makes an ``|f|**p`` integral irrational the result is a certified
:class:`Enclosure` of negligible width.

One-dimensional functions get the full toolbox (shifts, convolutions,
weak derivatives, sup norms).  Two-dimensional functions support integrals,
marginals and norms for even ``p`` or piecewise-constant data.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Sequence

from .dyadic import Box, Dyadic, as_fraction, format_literal, parse_literal
from .poly import Poly, horner, isolate_roots

Interval = tuple[Fraction, Fraction]
BoxLike = Sequence[Interval]

_ZERO = Fraction(0)
_TIGHT = Fraction(1, 1 << 96)


class SymbolicError(ValueError):
    """Raised for inputs outside the supported class of functions."""


class NotWeaklyDifferentiable(SymbolicError):
    pass


@dataclass(frozen=True)
class Enclosure:
    """Closed rational interval ``[lo, hi]`` holding an exact real value."""

    lo: Fraction
    hi: Fraction

    @classmethod
    def point(cls, value) -> "Enclosure":
        value = as_fraction(value)
        return cls(value, value)

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def value(self) -> Fraction:
        if not self.exact:
            raise SymbolicError("value is only known up to an enclosure")
        return self.lo

    def __add__(self, other: "Enclosure") -> "Enclosure":
        return Enclosure(self.lo + other.lo, self.hi + other.hi)

    def scale(self, factor: Fraction) -> "Enclosure":
        a, b = self.lo * factor, self.hi * factor
        return Enclosure(min(a, b), max(a, b))

    def below(self, bound) -> bool:
        """Certified ``value < bound``."""
        return self.hi < as_fraction(bound)

    def at_least(self, bound) -> bool:
        """Certified ``value >= bound``."""
        return self.lo >= as_fraction(bound)


def _interval(pair) -> Interval:
    a, b = pair
    a, b = as_fraction(a), as_fraction(b)
    if a > b:
        raise SymbolicError("interval endpoints out of order")
    return a, b


def as_box(box) -> tuple[Interval, ...]:
    if isinstance(box, Box):
        return box.intervals()
    return tuple(_interval(iv) for iv in box)


@dataclass(frozen=True)
class Piece:
    box: tuple[Interval, ...]
    poly: Poly


class FunctionSpec:
    """Piecewise polynomial on dyadic boxes, extended by zero."""

    def __init__(
        self,
        d: int,
        pieces: Iterable[tuple[BoxLike, Poly]],
        domain: Iterable[BoxLike] | None = None,
        name: str = "",
    ) -> None:
        self.d = d
        clean: list[Piece] = []
        for box, poly in pieces:
            box = as_box(box)
            if len(box) != d or poly.nvars != d:
                raise SymbolicError("piece dimension mismatch")
            if any(a == b for a, b in box):
                continue
            clean.append(Piece(box, poly))
        if d == 1:
            clean.sort(key=lambda pc: pc.box[0][0])
            for left, right in zip(clean, clean[1:]):
                if left.box[0][1] > right.box[0][0]:
                    raise SymbolicError("pieces overlap")
        else:
            for i, a in enumerate(clean):
                for b in clean[i + 1 :]:
                    if all(max(x[0], y[0]) < min(x[1], y[1]) for x, y in zip(a.box, b.box)):
                        raise SymbolicError("pieces overlap")
        self.pieces: tuple[Piece, ...] = tuple(clean)
        dom = [as_box(b) for b in domain] if domain is not None else [pc.box for pc in clean]
        self.domain: tuple[tuple[Interval, ...], ...] = tuple(dom)
        self.name = name

    # -- construction helpers -------------------------------------------------
    @classmethod
    def zero(cls, d: int = 1, domain: Iterable[BoxLike] | None = None) -> "FunctionSpec":
        if domain is None:
            domain = [((Fraction(0), Fraction(1)),) * d]
        return cls(d, [], domain, name="zero")

    @classmethod
    def piecewise(
        cls,
        pieces: Iterable[tuple[Interval, Sequence]],
        domain: Iterable[Interval] | None = None,
        name: str = "",
    ) -> "FunctionSpec":
        """One-dimensional shorthand: ``[((lo, hi), [c0, c1, ...]), ...]``."""
        items = [((_interval(iv),), Poly.univariate(c)) for iv, c in pieces]
        dom = None if domain is None else [(_interval(iv),) for iv in domain]
        return cls(1, items, dom, name=name)

    def with_name(self, name: str) -> "FunctionSpec":
        return FunctionSpec(self.d, [(p.box, p.poly) for p in self.pieces], self.domain, name)

    def __repr__(self) -> str:
        return f"FunctionSpec(d={self.d}, pieces={len(self.pieces)}, name={self.name!r})"

    # -- geometry of the domain ------------------------------------------------
    def domain_measure(self) -> Fraction:
        if self.d == 1:
            return sum((b - a for a, b in merge_intervals(box[0] for box in self.domain)), _ZERO)
        total = _ZERO
        for box in self.domain:
            vol = Fraction(1)
            for a, b in box:
                vol *= b - a
            total += vol
        return total

    def bounding_box(self) -> tuple[Interval, ...]:
        boxes = list(self.domain) + [pc.box for pc in self.pieces]
        if not boxes:
            return ((_ZERO, _ZERO),) * self.d
        return tuple(
            (min(b[i][0] for b in boxes), max(b[i][1] for b in boxes)) for i in range(self.d)
        )

    def domain_diameter(self) -> Fraction:
        """Supremum-norm diameter of the bounding box."""
        return max((b - a for a, b in self.bounding_box()), default=_ZERO)

    # -- one-dimensional fast paths -------------------------------------------
    def _require_1d(self) -> None:
        if self.d != 1:
            raise SymbolicError("operation implemented for d = 1 only")

    @cached_property
    def _tables(self):
        los = [pc.box[0][0] for pc in self.pieces]
        his = [pc.box[0][1] for pc in self.pieces]
        antis = [pc.poly.antiderivative(0).coeffs() for pc in self.pieces]
        base = [horner(a, lo) for a, lo in zip(antis, los)]
        prefix = [_ZERO]
        for a, lo, hi, b0 in zip(antis, los, his, base):
            prefix.append(prefix[-1] + horner(a, hi) - b0)
        return los, his, antis, base, prefix

    def breakpoints(self) -> list[Fraction]:
        self._require_1d()
        pts = set()
        for pc in self.pieces:
            pts.update(pc.box[0])
        return sorted(pts)

    def cumulative(self, x) -> Fraction:
        """``F(x) = integral of f over (-inf, x]``."""
        self._require_1d()
        x = as_fraction(x)
        los, his, antis, base, prefix = self._tables
        i = bisect.bisect_right(los, x) - 1
        if i < 0:
            return _ZERO
        if x >= his[i]:
            return prefix[i + 1]
        return prefix[i] + horner(antis[i], x) - base[i]

    def value(self, x) -> Fraction:
        """Point value, taking the piece that contains ``x`` with ``lo <= x < hi``
        and falling back to a piece ending at ``x``."""
        x = as_fraction(x)
        if self.d != 1:
            return self.value_at((x,))
        los, his, _, _, _ = self._tables
        i = bisect.bisect_right(los, x) - 1
        if i >= 0 and x < his[i]:
            return horner(self.pieces[i].poly.coeffs(), x)
        if i >= 0 and x == his[i]:
            return horner(self.pieces[i].poly.coeffs(), x)
        return _ZERO

    def value_at(self, point: Sequence) -> Fraction:
        pt = tuple(as_fraction(v) for v in point)
        if self.d == 1:
            return self.value(pt[0])
        for pc in self.pieces:
            if all(a <= x <= b for x, (a, b) in zip(pt, pc.box)):
                return pc.poly.evaluate(pt)
        return _ZERO

    def piece_at(self, x: Fraction) -> Poly | None:
        self._require_1d()
        los, his, _, _, _ = self._tables
        i = bisect.bisect_right(los, x) - 1
        if i >= 0 and x < his[i]:
            return self.pieces[i].poly
        return None

    def limits(self, x: Fraction) -> tuple[Fraction, Fraction]:
        """One-sided limits of the zero extension at ``x``."""
        self._require_1d()
        left = right = _ZERO
        for pc in self.pieces:
            a, b = pc.box[0]
            if a < x <= b:
                left = pc.poly(x)
            if a <= x < b:
                right = pc.poly(x)
        return left, right

    def max_degree(self) -> int:
        return max((pc.poly.degree() for pc in self.pieces), default=0)

    # -- algebra ---------------------------------------------------------------
    def scaled(self, factor) -> "FunctionSpec":
        factor = as_fraction(factor)
        return FunctionSpec(
            self.d, [(pc.box, pc.poly * factor) for pc in self.pieces], self.domain, self.name
        )

    def shifted(self, h) -> "FunctionSpec":
        """``x -> f(x + h)`` (the shift operator); the domain moves by ``-h``."""
        hs = [as_fraction(v) for v in (h if isinstance(h, (tuple, list)) else (h,))]
        if len(hs) != self.d:
            raise SymbolicError("shift dimension mismatch")

        def move(box):
            return tuple((a - s, b - s) for (a, b), s in zip(box, hs))

        pieces = []
        for pc in self.pieces:
            poly = pc.poly
            for i, s in enumerate(hs):
                if s:
                    poly = poly.affine(i, 1, s)
            pieces.append((move(pc.box), poly))
        return FunctionSpec(self.d, pieces, [move(b) for b in self.domain])

    def restricted(self, lo, hi) -> "FunctionSpec":
        """The one-dimensional function cut down to ``[lo, hi]`` (zero elsewhere)."""
        self._require_1d()
        lo, hi = as_fraction(lo), as_fraction(hi)
        pieces = []
        for pc in self.pieces:
            a, b = max(pc.box[0][0], lo), min(pc.box[0][1], hi)
            if a < b:
                pieces.append((((a, b),), pc.poly))
        domain = []
        for box in self.domain:
            a, b = max(box[0][0], lo), min(box[0][1], hi)
            if a < b:
                domain.append(((a, b),))
        return FunctionSpec(1, pieces, domain, self.name)

    def is_continuous_on_domain(self) -> bool:
        """No jumps at breakpoints inside the interior of the domain."""
        self._require_1d()
        domain = merge_intervals(box[0] for box in self.domain)
        for t in self.breakpoints():
            if any(a < t < b for a, b in domain):
                left, right = self.limits(t)
                if left != right:
                    return False
        return True

    def combine(self, other: "FunctionSpec", op: Callable[[Poly, Poly], Poly]) -> "FunctionSpec":
        """Pointwise ``op`` on the common refinement (zero where a function has no piece)."""
        if self.d != other.d:
            raise SymbolicError("dimension mismatch")
        zero = Poly(self.d)
        cells = _refine([pc.box for pc in self.pieces + other.pieces], self.d)
        pieces = []
        for cell in cells:
            mid = tuple((a + b) / 2 for a, b in cell)
            pa = self._poly_at(mid) or zero
            pb = other._poly_at(mid) or zero
            poly = op(pa, pb)
            if not poly.is_zero():
                pieces.append((cell, poly))
        return FunctionSpec(self.d, _merge_1d(pieces) if self.d == 1 else pieces,
                            list(self.domain) + list(other.domain))

    def _poly_at(self, mid: tuple[Fraction, ...]) -> Poly | None:
        if self.d == 1:
            return self.piece_at(mid[0])
        for pc in self.pieces:
            if all(a < x < b for x, (a, b) in zip(mid, pc.box)):
                return pc.poly
        return None

    def __sub__(self, other: "FunctionSpec") -> "FunctionSpec":
        return self.combine(other, lambda a, b: a - b)

    def __add__(self, other: "FunctionSpec") -> "FunctionSpec":
        return self.combine(other, lambda a, b: a + b)

    def __mul__(self, other: "FunctionSpec") -> "FunctionSpec":
        return self.combine(other, lambda a, b: a * b)

    # -- integrals ---------------------------------------------------------------
    def integral(self, box) -> Fraction:
        box = as_box(box)
        if self.d == 1:
            a, b = box[0]
            return self.cumulative(b) - self.cumulative(a)
        total = _ZERO
        for pc in self.pieces:
            inter = []
            for (a, b), (c, e) in zip(box, pc.box):
                lo, hi = max(a, c), min(b, e)
                if lo >= hi:
                    break
                inter.append((lo, hi))
            else:
                total += _box_integral(pc.poly, inter)
        return total

    def marginal(self, axis: int) -> "FunctionSpec":
        """The one-dimensional function obtained by integrating out all other axes."""
        if self.d == 1:
            return self
        cuts = sorted({v for pc in self.pieces for v in pc.box[axis]})
        pieces = []
        for a, b in zip(cuts, cuts[1:]):
            total = Poly(1)
            for pc in self.pieces:
                lo, hi = pc.box[axis]
                if lo <= a and b <= hi:
                    poly = pc.poly
                    for j in range(self.d):
                        if j != axis:
                            poly = poly.integrate(j, pc.box[j][0], pc.box[j][1])
                    rest = [j for j in range(self.d) if j != axis]
                    for j in sorted(rest, reverse=True):
                        poly = poly.drop(j)
                    total = total + poly
            if not total.is_zero():
                pieces.append((((a, b),), total))
        dom = [(box[axis],) for box in self.domain]
        return FunctionSpec(1, _merge_1d(pieces), dom)

    # -- norms --------------------------------------------------------------------
    def lp_power(self, p: int) -> Enclosure:
        """Certified enclosure of ``integral |f|**p``."""
        p = _check_p(p)
        total = Enclosure.point(0)
        for pc in self.pieces:
            total = total + _piece_power_integral(pc, p, self.d)
        return total

    def sup_abs(self) -> Enclosure:
        """Enclosure of the essential supremum of ``|f|``."""
        self._require_1d()
        lo = hi = _ZERO
        for pc in self.pieces:
            a, b = pc.box[0]
            coeffs = pc.poly.coeffs()
            vals = [abs(horner(coeffs, a)), abs(horner(coeffs, b))]
            extra_hi = _ZERO
            deriv = pc.poly.partial(0)
            if not deriv.is_zero():
                for root in isolate_roots(deriv.coeffs(), a, b, _TIGHT):
                    if root.exact:
                        vals.append(abs(horner(coeffs, root.lo)))
                    else:
                        v = max(abs(horner(coeffs, root.lo)), abs(horner(coeffs, root.hi)))
                        slope = _abs_bound(deriv.coeffs(), root.lo, root.hi)
                        vals.append(v)
                        extra_hi = max(extra_hi, v + slope * root.hi - slope * root.lo)
            lo = max(lo, max(vals))
            hi = max(hi, max(vals), extra_hi)
        return Enclosure(lo, hi)

    # -- serialisation ------------------------------------------------------------
    def to_json(self) -> dict:
        def poly_terms(poly: Poly):
            return [[_format_rational(c)] + list(exps) for exps, c in sorted(poly.terms.items())]

        return {
            "d": self.d,
            "domain": [[[format_literal(Dyadic.coerce(a)), format_literal(Dyadic.coerce(b))]
                        for a, b in box] for box in self.domain],
            "pieces": [
                {
                    "box": [[format_literal(Dyadic.coerce(a)), format_literal(Dyadic.coerce(b))]
                            for a, b in pc.box],
                    "poly": poly_terms(pc.poly),
                }
                for pc in self.pieces
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FunctionSpec":
        d = int(data["d"])
        pieces = []
        for item in data["pieces"]:
            box = tuple((parse_literal(a).to_fraction(), parse_literal(b).to_fraction())
                        for a, b in item["box"])
            terms = {}
            for term in item["poly"]:
                coeff = _parse_rational(term[0])
                exps = tuple(int(e) for e in term[1:]) + (0,) * (d - len(term) + 1)
                if len(exps) != d:
                    raise SymbolicError("monomial has too many exponents")
                terms[exps] = terms.get(exps, _ZERO) + coeff
            pieces.append((box, Poly(d, terms)))
        domain = None
        if "domain" in data:
            domain = [tuple((parse_literal(a).to_fraction(), parse_literal(b).to_fraction())
                            for a, b in box) for box in data["domain"]]
        return cls(d, pieces, domain, name=str(data.get("name", "")))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


# -- helpers ----------------------------------------------------------------------------


def _check_p(p) -> int:
    if isinstance(p, Fraction) and p.denominator == 1:
        p = int(p)
    if not isinstance(p, int) or p < 1:
        raise SymbolicError("exact norms need an integer exponent p >= 1")
    return p


def _format_rational(c: Fraction) -> str:
    if c.denominator & (c.denominator - 1) == 0:
        return format_literal(Dyadic.coerce(c))
    return f"{c.numerator}/{c.denominator}"


def _parse_rational(text) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    try:
        return parse_literal(text).to_fraction()
    except ValueError:
        return Fraction(str(text))


def merge_intervals(intervals: Iterable[Interval]) -> list[Interval]:
    out: list[list[Fraction]] = []
    for a, b in sorted(intervals):
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [(a, b) for a, b in out]


def _refine(boxes: Sequence[tuple[Interval, ...]], d: int) -> list[tuple[Interval, ...]]:
    """Grid cells of the common refinement that meet at least one box."""
    if d == 1:
        cuts = sorted({v for box in boxes for v in box[0]})
        cells = []
        for a, b in zip(cuts, cuts[1:]):
            mid = (a + b) / 2
            if any(box[0][0] < mid < box[0][1] for box in boxes):
                cells.append(((a, b),))
        return cells
    axes = [sorted({v for box in boxes for v in box[i]}) for i in range(d)]
    cells = []

    def rec(prefix):
        i = len(prefix)
        if i == d:
            mid = [(a + b) / 2 for a, b in prefix]
            if any(all(bx[j][0] < mid[j] < bx[j][1] for j in range(d)) for bx in boxes):
                cells.append(tuple(prefix))
            return
        for a, b in zip(axes[i], axes[i][1:]):
            rec(prefix + [(a, b)])

    rec([])
    return cells


def _merge_1d(pieces: list[tuple[tuple[Interval, ...], Poly]]):
    """Join adjacent one-dimensional pieces carrying the same polynomial."""
    out: list[tuple[tuple[Interval, ...], Poly]] = []
    for box, poly in sorted(pieces, key=lambda item: item[0][0][0]):
        if out and out[-1][0][0][1] == box[0][0] and out[-1][1] == poly:
            out[-1] = (((out[-1][0][0][0], box[0][1]),), poly)
        else:
            out.append((box, poly))
    return out


def _box_integral(poly: Poly, box: Sequence[Interval]) -> Fraction:
    for i, (a, b) in enumerate(box):
        poly = poly.integrate(i, a, b)
    return poly.constant_term()


def _abs_bound(coeffs: Sequence[Fraction], a: Fraction, b: Fraction) -> Fraction:
    r = max(abs(a), abs(b), Fraction(1))
    return sum((abs(c) * r**i for i, c in enumerate(coeffs)), _ZERO)


def _piece_power_integral(pc: Piece, p: int, d: int) -> Enclosure:
    poly = pc.poly
    if p % 2 == 0 or poly.is_constant():
        power = poly**p
        value = _box_integral(power, pc.box)
        return Enclosure.point(abs(value) if poly.is_constant() else value)
    if d != 1:
        raise SymbolicError("odd p with non-constant pieces is supported in one dimension only")
    a, b = pc.box[0]
    power = (poly**p).antiderivative(0).coeffs()
    coeffs = poly.coeffs()
    roots = isolate_roots(coeffs, a, b, _TIGHT)
    lo = hi = _ZERO
    start = a
    segments: list[tuple[Fraction, Fraction]] = []
    fuzzy: list[tuple[Fraction, Fraction]] = []
    for root in roots:
        segments.append((start, root.lo))
        if not root.exact:
            fuzzy.append((root.lo, root.hi))
        start = root.hi
    segments.append((start, b))
    for s, e in segments:
        if s >= e:
            continue
        mid = (s + e) / 2
        sign = 1 if horner(coeffs, mid) >= 0 else -1
        v = sign * (horner(power, e) - horner(power, s))
        lo += v
        hi += v
    for s, e in fuzzy:
        hi += (e - s) * _abs_bound(coeffs, s, e) ** p
    return Enclosure(lo, hi)


# -- module-level operations -------------------------------------------------------


def exact_integral(f: FunctionSpec, box) -> Fraction:
    """Integral of the zero extension of ``f`` over ``box``."""
    return f.integral(box)


def lp_norm_power(f: FunctionSpec, p: int) -> Enclosure:
    """Certified enclosure of ``||f||_p ** p``."""
    return f.lp_power(p)


def exact_lp_norm(f: FunctionSpec, p: int) -> Fraction:
    """``||f||_p ** p`` as an exact rational.

    Raises :class:`SymbolicError` when the value is irrational; use
    :func:`lp_norm_power` for a certified enclosure in that case.
    """
    return f.lp_power(p).value


def lp_distance_power(f: FunctionSpec, g: FunctionSpec, p: int) -> Enclosure:
    return (f - g).lp_power(p)


def shift_diff_norm(f: FunctionSpec, h, p: int) -> Enclosure:
    """Enclosure of ``||f - tau_h f||_p ** p`` with ``tau_h f(x) = f(x + h)``."""
    hs = h if isinstance(h, (tuple, list)) else (h,)
    if all(as_fraction(v) == 0 for v in hs):
        return Enclosure.point(0)
    return (f - f.shifted(hs)).lp_power(p)


def cell(x, m: int, d: int = 1) -> tuple[Interval, ...]:
    """``x + [-2**(-m-1), 2**(-m-1)]**d``."""
    xs = x if isinstance(x, (tuple, list)) else (x,) * d
    half = Fraction(1, 2 ** (m + 1)) if m >= -1 else Fraction(2 ** (-m - 1))
    return tuple((as_fraction(v) - half, as_fraction(v) + half) for v in xs)


def cell_average(f: FunctionSpec, x, m: int) -> Fraction:
    """``2**(d m)`` times the integral of ``f`` over ``cell(x, m)``."""
    return Fraction(2) ** (f.d * m) * f.integral(cell(x, m, f.d))


def convolve(f: FunctionSpec, g: FunctionSpec) -> FunctionSpec:
    """Exact convolution ``(g * f)(x) = integral g(y) f(x - y) dy`` in one dimension."""
    if f.d != 1 or g.d != 1:
        raise SymbolicError("convolution is implemented for d = 1")
    x, y = Poly.variable(0, 2), Poly.variable(1, 2)
    contributions: list[tuple[Interval, Poly]] = []
    for pf in f.pieces:
        a, b = pf.box[0]
        fxy = pf.poly.embed(2, [0]).substitute(0, x - y)
        for pg in g.pieces:
            c, e = pg.box[0]
            integrand = (fxy * pg.poly.embed(2, [1])).antiderivative(1)
            cuts = sorted({a + c, a + e, b + c, b + e})
            for lo, hi in zip(cuts, cuts[1:]):
                w = (lo + hi) / 2
                low_expr = Poly.constant(c, 2) if c >= w - b else x - b
                up_expr = Poly.constant(e, 2) if e <= w - a else x - a
                if low_expr(w, 0) >= up_expr(w, 0):
                    continue
                val = integrand.substitute(1, up_expr) - integrand.substitute(1, low_expr)
                contributions.append(((lo, hi), val.drop(1)))
    cuts = sorted({v for iv, _ in contributions for v in iv})
    pieces = []
    for lo, hi in zip(cuts, cuts[1:]):
        total = Poly(1)
        for (s, e), poly in contributions:
            if s <= lo and hi <= e:
                total = total + poly
        if not total.is_zero():
            pieces.append((((lo, hi),), total))
    lo_f, hi_f = f.bounding_box()[0]
    lo_g, hi_g = g.bounding_box()[0]
    return FunctionSpec(1, _merge_1d(pieces), [((lo_f + lo_g, hi_f + hi_g),)])


def continuous_approximation(f: FunctionSpec, m: int) -> FunctionSpec:
    """The cell averages ``x -> 2**m * integral of f over cell(x, m)`` as a function."""
    half = Fraction(1, 2 ** (m + 1))
    kernel = FunctionSpec.piecewise([((-half, half), [Fraction(2) ** m])])
    return convolve(f, kernel)


@dataclass(frozen=True)
class TentMollifier:
    """Tent kernel ``g_m(x) = height * max(1 - |2**m x|_inf, 0)`` on ``R**d``.

    With ``normalized=True`` the height is ``(d+1) 2**(d(m-1))`` so the kernel
    has unit mass; ``normalized=False`` keeps the constant ``d 2**(d(m-1))``.
    """

    d: int
    m: int
    normalized: bool = True

    @property
    def height(self) -> Fraction:
        factor = self.d + 1 if self.normalized else self.d
        return factor * Fraction(2) ** (self.d * (self.m - 1))

    @property
    def radius(self) -> Fraction:
        return Fraction(2) ** (-self.m)

    def integral(self) -> Fraction:
        """Layer-cake formula: the sup-norm ball of radius t has volume (2t)**d."""
        return self.height * self.radius**self.d * Fraction(2**self.d, self.d + 1)

    def gradient_sup(self) -> Fraction:
        """Largest supremum norm of a partial derivative."""
        return self.height / self.radius

    def value(self, point: Sequence) -> Fraction:
        r = max(abs(as_fraction(v)) for v in point) / self.radius
        return self.height * max(1 - r, _ZERO)

    def as_function(self) -> FunctionSpec:
        if self.d != 1:
            raise SymbolicError("tent kernel as a piecewise polynomial needs d = 1")
        r, h = self.radius, self.height
        return FunctionSpec.piecewise([((-r, _ZERO), [h, h / r]), ((_ZERO, r), [h, -h / r])])


def mollifier(d: int, m: int, normalized: bool = True) -> TentMollifier:
    return TentMollifier(d, m, normalized)


def convolve_mollifier(f: FunctionSpec, m: int) -> FunctionSpec:
    """``f^D_m = g_m * f`` with the unit-mass tent kernel."""
    if f.d != 1:
        raise SymbolicError("mollifier convolution is implemented for d = 1")
    return convolve(f, mollifier(1, m).as_function())


def weak_derivative(f: FunctionSpec) -> FunctionSpec:
    """Piecewise derivative after checking continuity inside the domain."""
    f._require_1d()
    if not f.is_continuous_on_domain():
        raise NotWeaklyDifferentiable("not weakly differentiable: jump inside the domain")
    pieces = [(pc.box, pc.poly.partial(0)) for pc in f.pieces]
    pieces = [(b, p) for b, p in pieces if not p.is_zero()]
    return FunctionSpec(1, _merge_1d(pieces), f.domain)


def load_function(path) -> FunctionSpec:
    with open(path, encoding="utf-8") as fh:
        return FunctionSpec.from_json(json.load(fh))

"""Constructors and validity checkers for every representation.

Representation kinds:

* ``xr``: reals, query ``1**n`` answered by a ``2**-n`` approximation;
* ``xc``: continuous functions on ``[0, 1]``, query ``<a, 1**n>``;
* ``xs``, ``xp``, ``xmp``: integral names, query ``<a, <b, 1**n>>`` answered by
  the integral over ``[a, b]`` within ``2**-n``; the declared length is a
  singularity modulus, an Lp-modulus, or an Lp-modulus of the ``m``-th
  derivative respectively;
* ``xpd``: query ``<a, <1**k, 1**n>>`` answered by the mollified function
  ``f^D_k(a)`` within ``2**-n``;
* ``cauchy``: query ``1**n`` answered by a dyadic step function within
  ``2**-n`` in Lp.

One-dimensional integral answers are ``G(b) - G(a)`` for a dyadic-coefficient
piecewise polynomial ``G`` with ``|G - F| <= 2**(-n-3)`` where ``F`` is the
exact antiderivative.  Because ``G`` is polynomial in the grid index on every
run of grid points, sums over exponentially large query grids have closed
forms; the per-query route stays available as an independent check.

Declared lengths are ``L(q) = max(mu(q), wire(q))`` where ``mu`` is the
modulus the name certifies and ``wire`` is an affine bound on the answer
encoding length.  ``L`` is itself a valid modulus because it is pointwise at
least ``mu`` and strictly increasing.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Sequence

from .dyadic import (
    BitString,
    Dyadic,
    EncodingError,
    as_fraction,
    ceil_log2,
    decode_dyadic,
    decode_vector,
    encode_dyadic,
    encode_vector,
    encoded_dyadic_length,
    encoded_vector_length,
    pair,
    pair_length,
    unary,
    unpair,
)
from .moduli import Modulus, ModulusReport, validate_modulus
from .names import InvariantViolation, Name, parse_unary, split_query
from .poly import Poly, horner, isolate_roots, sign_runs, sum_over_range
from .symbolic import (
    Enclosure,
    FunctionSpec,
    SymbolicError,
    convolve_mollifier,
    weak_derivative,
)

_ZERO = Fraction(0)


class RepresentationError(ValueError):
    pass


class RepKind(str, Enum):
    XR = "xr"
    XC = "xc"
    XS = "xs"
    XP = "xp"
    XMP = "xmp"
    XPD = "xpd"
    CAUCHY = "cauchy"


# -- dyadic piecewise approximants ----------------------------------------------------


Run = tuple[int, int, tuple[Fraction, ...]]


class LocalPiecewise:
    """Piecewise polynomial on the real line in local coordinates.

    On ``[cuts[i], cuts[i+1])`` the value is ``polys[i](x - cuts[i])``; left of
    ``cuts[0]`` it is ``left`` and from ``cuts[-1]`` on it is ``right``.
    """

    def __init__(self, cuts: Sequence[Fraction], polys: Sequence[Sequence[Fraction]],
                 left: Fraction = _ZERO, right: Fraction = _ZERO) -> None:
        self.cuts = [as_fraction(c) for c in cuts]
        self.polys = [tuple(as_fraction(c) for c in p) for p in polys]
        self.left = as_fraction(left)
        self.right = as_fraction(right)
        if len(self.polys) != max(len(self.cuts) - 1, 0):
            raise RepresentationError("need one polynomial per region")

    @classmethod
    def of_function(cls, f: FunctionSpec) -> "LocalPiecewise":
        """``f`` itself (zero outside its pieces)."""
        cuts = f.breakpoints()
        polys = []
        for lo, hi in zip(cuts, cuts[1:]):
            poly = f.piece_at((lo + hi) / 2)
            polys.append(poly.affine(0, 1, lo).coeffs() if poly is not None else ())
        return cls(cuts, polys)

    @classmethod
    def cumulative_of(cls, f: FunctionSpec) -> "LocalPiecewise":
        """``F(x) = integral of f over (-inf, x]``."""
        cuts = f.breakpoints()
        polys = []
        for lo, hi in zip(cuts, cuts[1:]):
            base = f.cumulative(lo)
            poly = f.piece_at((lo + hi) / 2)
            if poly is None:
                polys.append((base,))
            else:
                local = poly.affine(0, 1, lo).antiderivative(0)
                polys.append((local + base).coeffs())
        total = f.cumulative(cuts[-1]) if cuts else _ZERO
        return cls(cuts, polys, _ZERO, total)

    @property
    def degree(self) -> int:
        return max((len(p) - 1 for p in self.polys), default=0)

    def rounded(self, k: int) -> "LocalPiecewise":
        """Dyadic coefficients with ``|result - self| <= 2**(-k-4)`` everywhere."""
        polys = []
        for (lo, hi), coeffs in zip(zip(self.cuts, self.cuts[1:]), self.polys):
            width = hi - lo
            omega = max(ceil_log2(width), 0) if width > 0 else 0
            g = ceil_log2(len(coeffs)) if len(coeffs) > 1 else 0
            polys.append(tuple(
                Dyadic.round(c, k + 3 + g + i * omega).to_fraction() for i, c in enumerate(coeffs)
            ))
        return LocalPiecewise(
            self.cuts, polys,
            Dyadic.round(self.left, k + 4).to_fraction(),
            Dyadic.round(self.right, k + 4).to_fraction(),
        )

    def region(self, x: Fraction) -> int:
        """-1 for the left tail, ``len(polys)`` for the right tail."""
        return bisect.bisect_right(self.cuts, x) - 1 if self.cuts else -1

    def __call__(self, x) -> Fraction:
        x = as_fraction(x)
        if not self.cuts or x < self.cuts[0]:
            return self.left
        i = self.region(x)
        if i >= len(self.polys):
            return self.right
        return horner(self.polys[i], x - self.cuts[i])

    def runs(self, h: Fraction, shift: Fraction, first: int, last: int) -> list[Run]:
        """Polynomials in the index ``j`` of ``x_j = j h + shift`` for ``first <= j <= last``."""
        out: list[Run] = []

        def first_index(t: Fraction) -> int:
            q = (t - shift) / h
            return -((-q.numerator) // q.denominator)

        bounds = [first_index(t) for t in self.cuts]
        pieces: list[tuple[int, int, tuple[Fraction, ...]]] = []
        if not self.cuts:
            pieces.append((first, last, (self.left,)))
        else:
            pieces.append((first, bounds[0] - 1, (self.left,)))
            for i, coeffs in enumerate(self.polys):
                if not coeffs:
                    local = ()
                else:
                    local = tuple(Poly.univariate(coeffs).affine(0, h, shift - self.cuts[i]).coeffs())
                pieces.append((bounds[i], bounds[i + 1] - 1, local))
            pieces.append((bounds[-1], last, (self.right,)))
        for a, b, coeffs in pieces:
            a, b = max(a, first), min(b, last)
            if a <= b:
                out.append((a, b, coeffs))
        return out


def combine_runs(left: list[Run], right: list[Run], op: Callable[[Poly, Poly], Poly]) -> list[Run]:
    """Merge two run lists over the same index range, applying ``op`` pointwise."""
    out: list[Run] = []
    i = j = 0
    while i < len(left) and j < len(right):
        a0, a1, pa = left[i]
        b0, b1, pb = right[j]
        lo, hi = max(a0, b0), min(a1, b1)
        if lo <= hi:
            coeffs = tuple(op(Poly.univariate(pa), Poly.univariate(pb)).coeffs())
            if out and out[-1][1] == lo - 1 and out[-1][2] == coeffs:
                out[-1] = (out[-1][0], hi, coeffs)
            else:
                out.append((lo, hi, coeffs))
        if a1 <= b1:
            i += 1
        else:
            j += 1
    return out


def run_value(runs: list[Run], j: int) -> Fraction:
    for a, b, coeffs in runs:
        if a <= j <= b:
            return horner(coeffs, Fraction(j))
    raise IndexError(j)


# -- step functions -------------------------------------------------------------------


@dataclass(frozen=True)
class StepFunction:
    """Dyadic step function: boxes with dyadic values, zero elsewhere."""

    d: int
    items: tuple[tuple[tuple[tuple[Fraction, Fraction], ...], Fraction], ...]

    @classmethod
    def from_items(cls, d: int, items) -> "StepFunction":
        clean = []
        for box, value in items:
            box = tuple((as_fraction(a), as_fraction(b)) for a, b in box)
            value = Dyadic.coerce(as_fraction(value)).to_fraction()
            if value != 0:
                clean.append((box, value))
        return cls(d, tuple(clean))

    def to_function(self, domain=None) -> FunctionSpec:
        pieces = [(box, Poly.constant(v, self.d)) for box, v in self.items]
        return FunctionSpec(self.d, pieces, domain)

    def error_power(self, f: FunctionSpec, p: int) -> Enclosure:
        """``||f - self||_p ** p``, exactly or as a tight enclosure."""
        return (f - self.to_function(f.domain)).lp_power(p)

    def parameters(self) -> tuple[int, int, int]:
        """``(k, l, m)`` with at most ``2**k`` boxes of side at most ``2**l`` and values below ``2**m``."""
        if not self.items:
            return 0, 0, 0
        k = ceil_log2(len(self.items)) if len(self.items) > 1 else 0
        side = max(b - a for box, _ in self.items for a, b in box)
        l = ceil_log2(side)
        m = max(ceil_log2(abs(v)) for _, v in self.items)
        return k, l, max(m, 0)

    @staticmethod
    def _item_code(box, value) -> BitString:
        lower = encode_vector([a for a, _ in box])
        upper = encode_vector([b for _, b in box])
        return pair(lower, pair(upper, encode_dyadic(value)))

    def encode(self) -> BitString:
        """Each item is a doubled-bit block closed by ``01``; length is linear in the items."""
        return "".join(
            "".join(ch + ch for ch in self._item_code(box, value)) + "01" for box, value in self.items
        )

    @classmethod
    def decode(cls, bits: BitString, d: int) -> "StepFunction":
        items = []
        current: list[str] = []
        for i in range(0, len(bits) - 1, 2):
            chunk = bits[i:i + 2]
            if chunk == "01":
                lower, tail = unpair("".join(current))
                upper, value = unpair(tail)
                lo = decode_vector(lower, d)
                hi = decode_vector(upper, d)
                box = tuple((a.to_fraction(), b.to_fraction()) for a, b in zip(lo, hi))
                items.append((box, decode_dyadic(value).to_fraction()))
                current = []
            elif chunk in ("00", "11"):
                current.append(chunk[0])
            else:
                raise EncodingError("malformed step list")
        if "1" in "".join(current):
            raise EncodingError("unterminated step item")
        return cls(d, tuple(items))

    def encoded_length(self) -> int:
        total = 0
        for box, value in self.items:
            lower = encoded_vector_length([a for a, _ in box])
            upper = encoded_vector_length([b for _, b in box])
            total += 2 * pair_length(lower, pair_length(upper, encoded_dyadic_length(value))) + 2
        return total


@dataclass
class GridStepFunction:
    """Step function on the cells ``[j h - h/2, j h + h/2]``, ``h = 2**-M``, with
    value ``V(j)`` given by polynomial runs in ``j``, clipped to ``window`` when set."""

    exponent: int
    runs: list[Run]
    window: tuple[Fraction, Fraction] | None = None

    @property
    def h(self) -> Fraction:
        return Fraction(1, 2**self.exponent)

    @property
    def cell_count(self) -> int:
        return sum(b - a + 1 for a, b, _ in self.runs)

    @property
    def first(self) -> int:
        return self.runs[0][0] if self.runs else 0

    @property
    def last(self) -> int:
        return self.runs[-1][1] if self.runs else -1

    def value(self, j: int) -> Fraction:
        return run_value(self.runs, j)

    def cell(self, j: int) -> tuple[Fraction, Fraction]:
        h = self.h
        return j * h - h / 2, j * h + h / 2

    def clipped_cell(self, j: int) -> tuple[Fraction, Fraction]:
        lo, hi = self.cell(j)
        if self.window is not None:
            lo, hi = max(lo, self.window[0]), min(hi, self.window[1])
        return lo, hi

    def to_step_function(self, limit: int = 1 << 16) -> StepFunction:
        if self.cell_count > limit:
            raise RepresentationError("too many cells for an explicit step function")
        items = []
        for a, b, coeffs in self.runs:
            for j in range(a, b + 1):
                lo, hi = self.clipped_cell(j)
                if lo < hi:
                    items.append((((lo, hi),), horner(coeffs, Fraction(j))))
        return StepFunction.from_items(1, items)

    def error_power(self, f: FunctionSpec, p: int, cell_limit: int = 1 << 18) -> Enclosure:
        """Exact ``||f - self||_p ** p`` summed run by run in closed form."""
        return grid_error_power(self, f, p, cell_limit)


def _abs_integral_shifted(coeffs: Sequence[Fraction], v: Fraction, a: Fraction, b: Fraction,
                          p: int) -> Enclosure:
    """Enclosure of ``integral over [a, b] of |P(x) - v|**p``."""
    diff = list(coeffs) or [_ZERO]
    diff[0] = diff[0] - v
    poly = Poly.univariate(diff)
    spec = FunctionSpec(1, [(((a, b),), poly)])
    return spec.lp_power(p)


def _monotone_abs_integral(coeffs, v: Fraction, a: Fraction, b: Fraction) -> Enclosure:
    """``integral over [a, b] of |P - v|`` for ``P`` monotone on ``[a, b]``."""
    diff = list(coeffs) or [_ZERO]
    diff[0] = diff[0] - v
    anti = Poly.univariate(diff).antiderivative(0).coeffs()
    fa, fb = horner(diff, a), horner(diff, b)
    if (fa >= 0 and fb >= 0) or (fa <= 0 and fb <= 0):
        val = abs(horner(anti, b) - horner(anti, a))
        return Enclosure.point(val)
    if len(diff) == 2:
        r = -diff[0] / diff[1]
        val = abs(horner(anti, r) - horner(anti, a)) + abs(horner(anti, b) - horner(anti, r))
        return Enclosure.point(val)
    lo, hi = a, b
    target = (b - a) / 2**40
    while hi - lo > target:
        mid = (lo + hi) / 2
        fm = horner(diff, mid)
        if (fm >= 0) == (fa >= 0) and fm != 0:
            lo = mid
        else:
            hi = mid
    outer = abs(horner(anti, lo) - horner(anti, a)) + abs(horner(anti, b) - horner(anti, hi))
    slack = (hi - lo) * max(abs(horner(diff, lo)), abs(horner(diff, hi)))
    return Enclosure(outer, outer + slack)


def grid_error_power(grid: GridStepFunction, f: FunctionSpec, p: int, cell_limit: int) -> Enclosure:
    f._require_1d()
    h = grid.h
    total = Enclosure.point(0)
    if not grid.runs:
        return f.lp_power(p)
    start, end = grid.clipped_cell(grid.first)[0], grid.clipped_cell(grid.last)[1]
    (blo, bhi), = f.bounding_box()
    if blo < start:
        total = total + f.restricted(blo, start).lp_power(p)
    if end < bhi:
        total = total + f.restricted(end, bhi).lp_power(p)
    local = LocalPiecewise.of_function(f)
    cuts = local.cuts
    # cells whose interior meets a breakpoint of f are evaluated one by one
    special: set[int] = set()
    for t in cuts + (list(grid.window) if grid.window is not None else []):
        q = t / h + Fraction(1, 2)
        j = q.numerator // q.denominator
        for cand in (j - 1, j):
            lo_c, hi_c = grid.cell(cand)
            if lo_c < t < hi_c:
                special.add(cand)
    budget = [0]

    for a, b, vcoeffs in grid.runs:
        # split the run at special cells and at changes of the underlying piece of f
        segments: list[tuple[int, int]] = []
        marks = sorted(j for j in special if a <= j <= b)
        prev = a
        for j in marks:
            if j > prev:
                segments.append((prev, j - 1))
            segments.append((j, j))
            prev = j + 1
        if prev <= b:
            segments.append((prev, b))
        for s0, s1 in segments:
            if s0 == s1 and s0 in special:
                lo_c, hi_c = grid.clipped_cell(s0)
                if lo_c >= hi_c:
                    continue
                v = horner(vcoeffs, Fraction(s0))
                step = FunctionSpec(1, [(((lo_c, hi_c),), Poly.constant(v))])
                total = total + (f.restricted(lo_c, hi_c) - step).lp_power(p)
                continue
            # further split by regions of f (no breakpoint strictly inside these cells)
            for r0, r1, fco in _regions_in_cells(local, f, grid, s0, s1):
                total = total + _run_error(fco, vcoeffs, r0, r1, h, p, budget, cell_limit)
    return total


def _regions_in_cells(local: LocalPiecewise, f: FunctionSpec, grid: GridStepFunction, s0: int, s1: int):
    """Split cells ``s0..s1`` by the piece of f they lie in; yields global coefficients."""
    h = grid.h
    out = []
    j = s0
    while j <= s1:
        lo_c, hi_c = grid.cell(j)
        mid = (lo_c + hi_c) / 2
        i = local.region(mid)
        if i < 0 or i >= len(local.polys):
            nxt = local.cuts[0] if i < 0 and local.cuts else None
            coeffs: tuple = ()
        else:
            nxt = local.cuts[i + 1]
            poly = f.piece_at(mid)
            coeffs = poly.coeffs() if poly is not None else ()
        if nxt is None:
            last = s1
        else:
            q = nxt / h - Fraction(1, 2)
            last = max(min(s1, q.numerator // q.denominator), j)
        out.append((j, last, tuple(coeffs)))
        j = last + 1
    return out


def _run_error(fco, vco, j0: int, j1: int, h: Fraction, p: int, budget, cell_limit) -> Enclosure:
    """``sum over j in j0..j1 of integral over cell j of |P(x) - V(j)|**p``."""
    P = Poly.univariate(fco) if fco else Poly(1)
    V = Poly.univariate(vco) if vco else Poly(1)
    if p % 2 == 0:
        jv, tv = Poly.variable(0, 2), Poly.variable(1, 2)
        pj = P.embed(2, [0]).substitute(0, jv * h + tv)
        integrand = (pj - V.embed(2, [0])) ** p
        per_cell = integrand.integrate(1, -h / 2, h / 2).drop(1)
        return Enclosure.point(sum_over_range(per_cell.coeffs(), j0, j1))
    if P.is_constant():
        c = P.constant_term()
        diff = (Poly.constant(c) - V).coeffs()
        total = _ZERO
        for a, b, s in sign_runs(diff, j0, j1):
            if s:
                powered = (Poly.univariate(diff) ** p).coeffs() if diff else ()
                total += s * h * sum_over_range(powered, a, b)
        return Enclosure.point(total)
    if p != 1:
        raise SymbolicError("odd p > 1 with non-constant pieces is not supported on grids")
    budget[0] += j1 - j0 + 1
    if budget[0] > cell_limit:
        raise RepresentationError("too many cells for per-cell error evaluation")
    crit = []
    dP = P.partial(0)
    if not dP.is_zero():
        for root in isolate_roots(dP.coeffs(), j0 * h - h, j1 * h + h, Fraction(1, 2**64)):
            crit.append(root)
    coeffs = P.coeffs()
    lo_sum = hi_sum = _ZERO
    for j in range(j0, j1 + 1):
        a, b = j * h - h / 2, j * h + h / 2
        v = horner(vco, Fraction(j)) if vco else _ZERO
        if any(r.hi > a and r.lo < b for r in crit):
            enc = _abs_integral_shifted(coeffs, v, a, b, 1)
        else:
            enc = _monotone_abs_integral(coeffs, v, a, b)
        lo_sum += enc.lo
        hi_sum += enc.hi
    return Enclosure(lo_sum, hi_sum)


# -- names ------------------------------------------------------------------------------


def _bits_for(bound: Fraction) -> int:
    """Least ``B >= 0`` with ``bound < 2**B``."""
    b = 0
    while Fraction(2) ** b <= bound:
        b += 1
    return b


def _affine_length(slope: int, const: int) -> Callable[[int], int]:
    return lambda q: slope * q + const


class RealName(Name):
    """``xr`` name: ``1**n`` is answered by a ``2**-n`` approximation."""

    kind = RepKind.XR.value

    def __init__(self, approx: Callable[[int], Dyadic], magnitude_bits: int,
                 exact: Fraction | None = None, meta: dict | None = None) -> None:
        self._approx = approx
        self.exact = exact
        self.magnitude_bits = magnitude_bits
        length = _affine_length(2, 2 * magnitude_bits + 8)
        super().__init__(self._raw_answer, length, meta=meta)

    def _raw_answer(self, a: BitString) -> BitString:
        n = parse_unary(a)
        if n is None:
            return ""
        return encode_dyadic(self._approx(n))

    def approx(self, n: int, tag: str = "xr") -> Dyadic:
        value = self._approx(n)
        size = self.length(n)
        if encoded_dyadic_length(value) > size:
            raise InvariantViolation("real approximation longer than declared")
        self.trace.record(n, size, tag)
        return value


def make_xr_name(x, scheme: Callable[[int], Dyadic] | None = None, bound=None) -> RealName:
    """Name of a real number.

    ``x`` may be exact (int, Fraction, Dyadic); then answers are ``x`` rounded
    to ``2**(-n-1)``.  With ``scheme`` the answers come from the scheme and
    ``x`` (if given) is kept for validation.
    """
    exact = as_fraction(x) if x is not None else None
    if bound is None:
        bound = abs(exact) if exact is not None else Fraction(1)
    bits = _bits_for(as_fraction(bound))
    if scheme is None:
        if exact is None:
            raise RepresentationError("need a value or a scheme")

        def scheme(n: int, x=exact) -> Dyadic:
            return Dyadic.round(x, n + 1)

    return RealName(scheme, bits, exact, meta={"kind": "xr", "value": str(exact)})


class FunctionName(Name):
    """Common base of names that carry a ground-truth function and a modulus."""

    def __init__(self, function: FunctionSpec, modulus: Modulus, wire: Callable[[int], int],
                 meta: dict | None = None) -> None:
        self.function = function
        self.modulus = modulus
        self.wire = wire

        def length(q: int) -> int:
            return max(modulus(q), wire(q))

        super().__init__(self._raw_answer, length, meta=meta)
        self.answer_offset: Callable | None = None

    def _raw_answer(self, a: BitString) -> BitString:  # pragma: no cover - abstract
        raise NotImplementedError

    def _emit(self, value: Dyadic, query_len: int, tag: str) -> Dyadic:
        size = self.length(query_len)
        if encoded_dyadic_length(value) > size:
            raise InvariantViolation(
                f"{self.kind} answer of length {encoded_dyadic_length(value)} exceeds {size}"
            )
        self.trace.record(query_len, size, tag)
        return value


class ContinuousName(FunctionName):
    """``xc`` name: ``<a, 1**n>`` is answered by ``f(bin a)`` within ``2**-n``."""

    kind = RepKind.XC.value

    def __init__(self, function: FunctionSpec, modulus: Modulus) -> None:
        bits = _bits_for(function.sup_abs().hi)
        super().__init__(function, modulus, _affine_length(2, 2 * bits + 8),
                         meta={"kind": "xc", "function": function.name})

    def _exact(self, x: Fraction) -> Fraction:
        (lo, hi), = self.function.bounding_box()
        x = min(max(x, lo), hi)
        return self.function.value(x)

    def _compute(self, x: Fraction, n: int) -> Dyadic:
        value = Dyadic.round(self._exact(x), n + 1)
        if self.answer_offset is not None:
            value = Dyadic.coerce(value.to_fraction() + self.answer_offset(n))
        return value

    def _raw_answer(self, a: BitString) -> BitString:
        parts = split_query(a, 2)
        if parts is None:
            return ""
        n = parse_unary(parts[1])
        try:
            x = decode_dyadic(parts[0])
        except EncodingError:
            return ""
        if n is None:
            return ""
        return encode_dyadic(self._compute(x.to_fraction(), n))

    def value(self, x, n: int, tag: str = "xc") -> Dyadic:
        x = Dyadic.coerce(as_fraction(x))
        q = pair_length(encoded_dyadic_length(x), n)
        return self._emit(self._compute(x.to_fraction(), n), q, tag)


def make_xc_name(f: FunctionSpec, modulus: Modulus, check_upto: int | None = 6) -> ContinuousName:
    if check_upto is not None:
        report = validate_modulus(modulus, f, "continuity", n_max=check_upto)
        if not report:
            raise RepresentationError(f"modulus rejected: {report.reason} {report.witness}")
    return ContinuousName(f, modulus.with_kind("continuity"))


class IntegralName(FunctionName):
    """``xs``/``xp``/``xmp`` name answering ``<a, <b, 1**n>>`` by the integral over ``[a, b]``.

    In one dimension the integral is oriented (``b < a`` gives the negative).
    In two dimensions ``a`` and ``b`` are opposite corners of the box.
    """

    def __init__(self, function: FunctionSpec, modulus: Modulus, kind: str,
                 p: int | None = None, order: int = 0) -> None:
        self.kind = kind
        self.p = p
        self.order = order
        self.d = function.d
        self._approximants: dict[int, LocalPiecewise] = {}
        self._exact_cumulative = LocalPiecewise.cumulative_of(function) if function.d == 1 else None
        if not function.pieces:
            mass = _ZERO
        elif function.d == 1:
            mass = function.lp_power(1).hi
        else:
            # ||f||_1 <= sqrt(vol) ||f||_2 <= (vol + ||f||_2^2) / 2
            volume = Fraction(1)
            for lo, hi in function.bounding_box():
                volume *= hi - lo
            mass = (volume + function.lp_power(2).hi) / 2
        bits = _bits_for(mass + 1)
        if function.d == 1:
            degree = self._exact_cumulative.degree
            (lo, hi), = function.bounding_box()
            span = max(hi - lo, Fraction(1))
            omega = ceil_log2(span)
            slope = degree + 2
            const = 2 * bits + 2 * degree * omega + 2 * ceil_log2(degree + 1) + 24 + 2 * degree
            wire = _affine_length(slope, const)
        else:
            wire = _affine_length(2, 2 * bits + 12)
        super().__init__(function, modulus, wire,
                         meta={"kind": kind, "function": function.name, "p": p, "m": order,
                               "d": function.d})

    def approximant(self, n: int) -> LocalPiecewise:
        """Dyadic antiderivative ``G`` with ``|G - F| <= 2**(-n-3)``."""
        if n not in self._approximants:
            self._approximants[n] = self._exact_cumulative.rounded(n + 1)
        return self._approximants[n]

    def _compute(self, x, y, n: int) -> Dyadic:
        if self.d == 1:
            g = self.approximant(n)
            value = Dyadic.coerce(g(y) - g(x))
        else:
            box = tuple((min(a, b), max(a, b)) for a, b in zip(x, y))
            value = Dyadic.round(self.function.integral(box), n + 1)
        if self.answer_offset is not None:
            value = Dyadic.coerce(value.to_fraction() + self.answer_offset(n))
        return value

    def _decode_point(self, code: BitString):
        if self.d == 1:
            return decode_dyadic(code).to_fraction()
        return tuple(c.to_fraction() for c in decode_vector(code, self.d))

    def _raw_answer(self, a: BitString) -> BitString:
        parts = split_query(a, 3)
        if parts is None:
            return ""
        n = parse_unary(parts[2])
        if n is None:
            return ""
        try:
            x = self._decode_point(parts[0])
            y = self._decode_point(parts[1])
        except EncodingError:
            return ""
        return encode_dyadic(self._compute(x, y, n))

    def query_length(self, x, y, n: int) -> int:
        if self.d == 1:
            la, lb = encoded_dyadic_length(x), encoded_dyadic_length(y)
        else:
            la, lb = encoded_vector_length(x), encoded_vector_length(y)
        return pair_length(la, pair_length(lb, n))

    def integral(self, x, y, n: int, tag: str = "integral") -> Dyadic:
        if self.d == 1:
            x, y = Dyadic.coerce(as_fraction(x)).to_fraction(), Dyadic.coerce(as_fraction(y)).to_fraction()
        else:
            x = tuple(Dyadic.coerce(as_fraction(v)).to_fraction() for v in x)
            y = tuple(Dyadic.coerce(as_fraction(v)).to_fraction() for v in y)
        return self._emit(self._compute(x, y, n), self.query_length(x, y, n), tag)

    def grid_integrals(self, h: Fraction, low_shift: Fraction, high_shift: Fraction,
                       first: int, last: int, n: int, tag: str = "integral-grid") -> list[Run]:
        """Answers to all queries ``<j h + low_shift, <j h + high_shift, 1**n>>`` for
        ``first <= j <= last`` as polynomial runs in ``j``; logs one bulk trace record."""
        if self.d != 1:
            raise RepresentationError("grid queries are one-dimensional")
        if self.answer_offset is not None:
            raise RepresentationError("grid queries do not support fault injection")
        count = last - first + 1
        q = max(self.query_length(j * h + low_shift, j * h + high_shift, n) for j in (first, last))
        self.trace.record(q, self.length(q), tag, count)
        g = self.approximant(n)
        upper = g.runs(h, high_shift, first, last)
        lower = g.runs(h, low_shift, first, last)
        return combine_runs(upper, lower, lambda a, b: a - b)


def _check_modulus(mu: Modulus, f: FunctionSpec, kind: str, p, check_upto) -> None:
    if check_upto is None:
        return
    report = validate_modulus(mu, f, kind, p, n_max=check_upto)
    if not report:
        raise RepresentationError(f"modulus rejected: {report.reason} {report.witness}")


def make_xs_name(f: FunctionSpec, modulus: Modulus, check_upto: int | None = 6) -> IntegralName:
    _check_modulus(modulus, f, "singularity", None, check_upto)
    return IntegralName(f, modulus.with_kind("singularity"), RepKind.XS.value)


def make_xp_name(f: FunctionSpec, modulus: Modulus, p: int, check_upto: int | None = 6) -> IntegralName:
    _check_modulus(modulus, f, "lp", p, check_upto)
    return IntegralName(f, modulus.with_kind("lp", p), RepKind.XP.value, p)


def iterated_derivative(f: FunctionSpec, m: int) -> FunctionSpec:
    g = f
    for _ in range(m):
        g = weak_derivative(g)
    return g


def make_xmp_name(f: FunctionSpec, modulus: Modulus, m: int, p: int,
                  check_upto: int | None = 6) -> IntegralName:
    """``xmp`` name: integrals of ``f``, declared length an Lp-modulus of ``f^(m)``."""
    if m < 0:
        raise RepresentationError("m must be nonnegative")
    try:
        top = iterated_derivative(f, m)
    except SymbolicError as exc:
        raise RepresentationError(f"missing weak derivative: {exc}") from exc
    _check_modulus(modulus, top, "lp", p, check_upto)
    kind = RepKind.XP.value if m == 0 else RepKind.XMP.value
    return IntegralName(f, modulus.with_kind("lp", p), kind, p, m)


class MollifiedName(FunctionName):
    """``xpd`` name: ``<a, <1**k, 1**n>>`` is answered by ``f^D_k(bin a)`` within ``2**-n``."""

    kind = RepKind.XPD.value

    def __init__(self, function: FunctionSpec, modulus: Modulus, p: int) -> None:
        if function.d != 1:
            raise RepresentationError("xpd names are implemented for d = 1")
        self.p = p
        self.d = 1
        self._mollified: dict[int, FunctionSpec] = {}
        self._approximants: dict[tuple[int, int], LocalPiecewise] = {}
        bits = _bits_for(function.sup_abs().hi)
        degree = function.max_degree() + 2
        (lo, hi), = function.bounding_box()
        omega = ceil_log2(max(hi - lo + 2, Fraction(1)))
        wire = _affine_length(degree + 2, 2 * bits + 2 * degree * omega + 2 * ceil_log2(degree + 1) + 24)
        super().__init__(function, modulus, wire, meta={"kind": "xpd", "function": function.name, "p": p})

    def mollified(self, k: int) -> FunctionSpec:
        if k not in self._mollified:
            self._mollified[k] = convolve_mollifier(self.function, k)
        return self._mollified[k]

    def approximant(self, k: int, n: int) -> LocalPiecewise:
        """Dyadic ``Q`` with ``|Q - f^D_k| <= 2**(-n-2)``."""
        key = (k, n)
        if key not in self._approximants:
            self._approximants[key] = LocalPiecewise.of_function(self.mollified(k)).rounded(n)
        return self._approximants[key]

    def _compute(self, x: Fraction, k: int, n: int) -> Dyadic:
        value = Dyadic.coerce(self.approximant(k, n)(x))
        if self.answer_offset is not None:
            value = Dyadic.coerce(value.to_fraction() + self.answer_offset(n))
        return value

    def _raw_answer(self, a: BitString) -> BitString:
        parts = split_query(a, 3)
        if parts is None:
            return ""
        k, n = parse_unary(parts[1]), parse_unary(parts[2])
        if k is None or n is None:
            return ""
        try:
            x = decode_dyadic(parts[0]).to_fraction()
        except EncodingError:
            return ""
        return encode_dyadic(self._compute(x, k, n))

    def query_length(self, x, k: int, n: int) -> int:
        return pair_length(encoded_dyadic_length(x), pair_length(k, n))

    def point_value(self, x, k: int, n: int, tag: str = "xpd") -> Dyadic:
        x = Dyadic.coerce(as_fraction(x)).to_fraction()
        return self._emit(self._compute(x, k, n), self.query_length(x, k, n), tag)

    def grid_values(self, h: Fraction, first: int, last: int, k: int, n: int,
                    tag: str = "xpd-grid") -> list[Run]:
        """All answers at ``x_j = j h`` for ``first <= j <= last`` as runs in ``j``."""
        count = last - first + 1
        q = max(self.query_length(j * h, k, n) for j in (first, last))
        self.trace.record(q, self.length(q), tag, count)
        return self.approximant(k, n).runs(h, _ZERO, first, last)


def make_xpd_name(f: FunctionSpec, modulus: Modulus, p: int, d: int = 1,
                  check_upto: int | None = 6) -> MollifiedName:
    if d != 1:
        raise RepresentationError("xpd names are implemented for d = 1")
    _check_modulus(modulus, f, "lp", p, check_upto)
    return MollifiedName(f, modulus.with_kind("lp", p), p)


@dataclass(frozen=True)
class StepEnvelope:
    """Bounds on ``approximant(n)`` known without building it: at most ``2**k`` boxes of
    side at most ``2**l``, values at most ``2**m`` and encoding length at most ``length``."""

    k: int
    l: int
    m: int
    length: int


class CauchyName(Name):
    """``cauchy`` name: ``1**n`` is answered by a step function within ``2**-n`` in Lp.

    With an ``envelope`` the declared length and the step-function parameters
    are read from it; otherwise they come from the materialized approximants.
    """

    kind = RepKind.CAUCHY.value

    def __init__(self, function: FunctionSpec, p: int, approximant: Callable[[int], StepFunction],
                 envelope: Callable[[int], StepEnvelope] | None = None) -> None:
        self.function = function
        self.p = p
        self.d = function.d
        self._approximant = approximant
        self._envelope = envelope
        self._cache: dict[int, StepFunction] = {}
        self._lengths: list[int] = []
        super().__init__(self._raw_answer, self._declared, meta={"kind": "cauchy", "p": p,
                                                                 "function": function.name})

    def approximant(self, n: int) -> StepFunction:
        if n not in self._cache:
            self._cache[n] = self._approximant(n)
        return self._cache[n]

    def envelope(self, n: int) -> StepEnvelope:
        if self._envelope is not None:
            return self._envelope(n)
        step = self.approximant(n)
        k, l, m = step.parameters()
        return StepEnvelope(k, l, m, step.encoded_length())

    def _declared(self, q: int) -> int:
        while len(self._lengths) <= q:
            n = len(self._lengths)
            prev = self._lengths[-1] if self._lengths else 0
            self._lengths.append(max(prev, self.envelope(n).length))
        return self._lengths[q]

    def _raw_answer(self, a: BitString) -> BitString:
        n = parse_unary(a)
        if n is None:
            return ""
        return self.approximant(n).encode()

    def step_function(self, n: int, tag: str = "cauchy") -> StepFunction:
        step = self.approximant(n)
        self.trace.record(n, self.length(n), tag)
        return step

    def parameters(self, n: int, tag: str = "cauchy-header") -> tuple[int, int, int]:
        """``(k, l, m)`` of the ``n``-th approximant, as read from the answer."""
        env = self.envelope(n)
        self.trace.record(n, self.length(n), tag)
        return env.k, env.l, env.m


def _dyadic_length_bound(magnitude_bits: int, precision: int) -> int:
    """Encoding length bound for dyadics ``|x| <= 2**magnitude_bits`` of precision ``<= precision``."""
    return 2 * max(magnitude_bits, 0) + 2 * max(precision, 0) + 4


def cell_average_scheme(f: FunctionSpec, p: int, modulus: Modulus):
    """Cell averages of ``f`` on ``2**k`` equal cells of its bounding box with
    ``k = mu(n+2) + w`` for a box of width at most ``2**w``, values rounded to
    ``2**-(n+2+w)``; returns ``(scheme, envelope)``.

    Averaging over cells of width ``2**-mu(n+2)`` costs less than ``2**(1/p - n - 2)``
    in Lp and rounding at most ``2**-(n+2)``, so every approximant is within ``2**-n``.
    """
    (lo, hi), = f.bounding_box()
    w = max(ceil_log2(hi - lo), 0)
    sup = Dyadic.ceil(f.sup_abs().hi, 0).to_fraction()
    m = ceil_log2(sup) if sup > 0 else 0
    coord_bits = max(ceil_log2(max(abs(lo), abs(hi), Fraction(1))), 0)
    coord_precision = max(Dyadic.coerce(lo).exponent, Dyadic.coerce(hi).exponent)

    def level(n: int) -> int:
        return modulus(n + 2) + w

    def scheme(n: int) -> StepFunction:
        return staircase(f, level(n), n + 2 + w)

    def envelope(n: int) -> StepEnvelope:
        k = level(n)
        coord = _dyadic_length_bound(coord_bits, coord_precision + k)
        value = _dyadic_length_bound(m, n + 2 + w)
        item = 2 * pair_length(coord, pair_length(coord, value)) + 2
        return StepEnvelope(k, ceil_log2(hi - lo) - k if hi > lo else 0, m, 2**k * item)

    return scheme, envelope


def staircase(f: FunctionSpec, k: int, precision: int) -> StepFunction:
    """Cell averages of ``f`` on ``2**k`` equal cells of its bounding box, rounded to ``2**-precision``."""
    (lo, hi), = f.bounding_box()
    width = (hi - lo) / 2**k
    items = []
    for i in range(2**k):
        a, b = lo + i * width, lo + (i + 1) * width
        avg = f.integral(((a, b),)) / width
        items.append((((a, b),), Dyadic.round(avg, precision)))
    return StepFunction.from_items(1, items)


def staircase_scheme(f: FunctionSpec, p: int, max_k: int = 16) -> Callable[[int], StepFunction]:
    """For each ``n`` the coarsest staircase whose exact Lp error is below ``2**-n``,
    searching upward from the level found for the nearest smaller ``n`` already seen."""
    bound_cache: dict[int, StepFunction] = {}
    levels: dict[int, int] = {}

    def scheme(n: int) -> StepFunction:
        if n in bound_cache:
            return bound_cache[n]
        target = Fraction(1, 2 ** (n * p))
        k = max((levels[m] for m in levels if m < n), default=0)
        while k <= max_k:
            step = staircase(f, k, n + 3 + k)
            if step.error_power(f, p).below(target):
                bound_cache[n] = step
                levels[n] = k
                return step
            k += 1
        raise RepresentationError(f"no staircase within 2^-{n} up to 2^{max_k} cells")

    return scheme


def make_cauchy_name(f: FunctionSpec, p: int,
                     approximants: Callable[[int], StepFunction] | None = None,
                     check_upto: int | None = 4, modulus: Modulus | None = None) -> CauchyName:
    """Cauchy name of ``f``.

    With an Lp-``modulus`` the cell-average scheme is used and lengths come
    from its envelope; otherwise the coarsest staircase meeting each accuracy
    is searched for (``approximants`` overrides both).
    """
    envelope = None
    if approximants is not None:
        scheme = approximants
    elif modulus is not None:
        scheme, envelope = cell_average_scheme(f, p, modulus)
    else:
        scheme = staircase_scheme(f, p)
    name = CauchyName(f, p, scheme, envelope)
    if check_upto is not None:
        for n in range(check_upto + 1):
            if not name.approximant(n).error_power(f, p).below(Fraction(1, 2 ** (n * p))):
                raise RepresentationError(f"approximant {n} is not within 2^-{n}")
    return name


# -- validation ------------------------------------------------------------------------


@dataclass
class NameReport:
    ok: bool
    kind: str
    checks: int = 0
    failures: list = field(default_factory=list)
    modulus: ModulusReport | None = None

    def __bool__(self) -> bool:
        return self.ok


def _grid_points(lo: Fraction, hi: Fraction, spacing_exp: int, margin: Fraction) -> list[Fraction]:
    step = Fraction(1, 2**spacing_exp)
    start = (lo - margin) / step
    end = (hi + margin) / step
    a = start.numerator // start.denominator
    b = -((-end.numerator) // end.denominator)
    return [i * step for i in range(a, b + 1)]


def validate_name(kind: str, name: Name, f, n_max: int = 10, grid: int = 3,
                  bit_level: bool = True, k_max: int = 4) -> NameReport:
    """Check a name's answer contract exactly and its declared modulus.

    For ``xr`` pass the exact real as ``f``.  Answers are read through the
    bit-level interface when ``bit_level`` is set (decoding every answer).
    """
    kind = RepKind(kind).value
    report = NameReport(True, kind)

    def fail(**info):
        report.ok = False
        if len(report.failures) < 20:
            report.failures.append(info)

    if kind == RepKind.XR.value:
        exact = as_fraction(f)
        for n in range(n_max + 1):
            out = name.answer(unary(n))
            if len(out) != name.length(n):
                fail(n=n, reason="length")
            value = decode_dyadic(out).to_fraction()
            report.checks += 1
            if not abs(value - exact) < Fraction(1, 2**n):
                fail(n=n, value=value)
        return report

    if kind == RepKind.CAUCHY.value:
        for n in range(n_max + 1):
            out = name.answer(unary(n))
            step = StepFunction.decode(out, name.d)
            report.checks += 1
            if not step.error_power(f, name.p).below(Fraction(1, 2 ** (n * name.p))):
                fail(n=n, reason="approximation not within 2^-n")
        return report

    modulus_kind = {"xc": "continuity", "xs": "singularity", "xp": "lp", "xmp": "lp", "xpd": "lp"}[kind]
    target = f
    if kind == RepKind.XMP.value:
        try:
            target = iterated_derivative(f, name.order)
        except SymbolicError as exc:
            fail(reason=f"no weak derivative: {exc}")
            return report
    p = getattr(name, "p", None)
    mod_report = validate_modulus(name.modulus, target, modulus_kind, p, n_max=n_max)
    report.modulus = mod_report
    if not mod_report:
        fail(reason="modulus", detail=mod_report.reason, witness=mod_report.witness)
    declared = Modulus.from_values([name.length(q) for q in range(n_max + 2)], modulus_kind,
                                   p if modulus_kind == "lp" else None)
    if not declared.is_strict_when_nonzero(n_max):
        fail(reason="declared length not strictly increasing")

    (lo, hi), = f.bounding_box() if f.d == 1 else ((Fraction(0), Fraction(1)),)
    if kind == RepKind.XC.value:
        points = _grid_points(lo, hi, grid, Fraction(0))
        for n in range(n_max + 1):
            for x in points:
                report.checks += 1
                if bit_level:
                    value = decode_dyadic(name.answer(pair(encode_dyadic(x), unary(n)))).to_fraction()
                else:
                    value = name._compute(x, n).to_fraction()
                if not abs(value - f.value(x)) < Fraction(1, 2**n):
                    fail(n=n, x=x, value=value)
        return report

    if kind == RepKind.XPD.value:
        points = _grid_points(lo, hi, grid, Fraction(1, 4))
        for k in range(k_max + 1):
            smooth = convolve_mollifier(f, k)
            for n in range(n_max + 1):
                for x in points:
                    report.checks += 1
                    if bit_level:
                        q = pair(encode_dyadic(x), pair(unary(k), unary(n)))
                        value = decode_dyadic(name.answer(q)).to_fraction()
                    else:
                        value = name._compute(x, k, n).to_fraction()
                    if not abs(value - smooth.value(x)) < Fraction(1, 2**n):
                        fail(n=n, k=k, x=x, value=value)
        return report

    # integral names
    if f.d == 1:
        margin = Fraction(1, 4) if kind == RepKind.XS.value or kind == RepKind.XP.value else Fraction(0)
        points = _grid_points(lo, hi, grid, margin)
        for n in range(n_max + 1):
            for x in points:
                for y in points:
                    report.checks += 1
                    if bit_level:
                        q = pair(encode_dyadic(x), pair(encode_dyadic(y), unary(n)))
                        out = name.answer(q)
                        value = decode_dyadic(out).to_fraction()
                    else:
                        value = name._compute(x, y, n).to_fraction()
                    exact = f.integral(((min(x, y), max(x, y)),)) * (1 if x <= y else -1)
                    if not abs(value - exact) < Fraction(1, 2**n):
                        fail(n=n, a=x, b=y, value=value, exact=exact)
    else:
        pts = _grid_points(Fraction(0), Fraction(1), 1, Fraction(0))
        corners = [(u, v) for u in pts for v in pts]
        for n in range(min(n_max, 6) + 1):
            for x in corners:
                for y in corners:
                    report.checks += 1
                    value = name._compute(x, y, n).to_fraction()
                    box = tuple((min(a, b), max(a, b)) for a, b in zip(x, y))
                    if not abs(value - f.integral(box)) < Fraction(1, 2**n):
                        fail(n=n, a=x, b=y, value=value)
    return report


__all__ = [
    "CauchyName",
    "ContinuousName",
    "GridStepFunction",
    "IntegralName",
    "LocalPiecewise",
    "MollifiedName",
    "NameReport",
    "RealName",
    "RepKind",
    "RepresentationError",
    "StepEnvelope",
    "StepFunction",
    "cell_average_scheme",
    "combine_runs",
    "iterated_derivative",
    "make_cauchy_name",
    "make_xc_name",
    "make_xmp_name",
    "make_xp_name",
    "make_xpd_name",
    "make_xr_name",
    "make_xs_name",
    "run_value",
    "staircase",
    "staircase_scheme",
    "validate_name",
]

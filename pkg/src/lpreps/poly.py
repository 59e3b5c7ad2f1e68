"""Exact polynomials over the rationals and real-root isolation.

``Poly`` is a sparse multivariate polynomial (exponent tuple -> Fraction).
The free functions on coefficient lists (lowest degree first) serve the
univariate hot paths: Horner evaluation, Sturm-sequence root isolation and
integer sign runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Iterable, Mapping, Sequence, Union

Number = Union[int, Fraction]
Coeffs = list[Fraction]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    to_fraction = getattr(x, "to_fraction", None)
    if to_fraction is not None:
        return to_fraction()
    raise TypeError(f"not an exact number: {x!r}")


class Poly:
    """Sparse polynomial in ``nvars`` variables with Fraction coefficients."""

    __slots__ = ("nvars", "terms", "_dense")

    def __init__(self, nvars: int, terms: Mapping[tuple[int, ...], Number] | None = None) -> None:
        self.nvars = nvars
        clean: dict[tuple[int, ...], Fraction] = {}
        for exps, coeff in (terms or {}).items():
            if len(exps) != nvars:
                raise ValueError("exponent tuple does not match variable count")
            coeff = _frac(coeff)
            if coeff:
                clean[tuple(exps)] = clean.get(tuple(exps), _ZERO) + coeff
        self.terms = {k: v for k, v in clean.items() if v}
        self._dense: Coeffs | None = None

    # construction ------------------------------------------------------------
    @classmethod
    def constant(cls, value: Number, nvars: int = 1) -> "Poly":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, index: int, nvars: int = 1) -> "Poly":
        exps = [0] * nvars
        exps[index] = 1
        return cls(nvars, {tuple(exps): 1})

    @classmethod
    def univariate(cls, coeffs: Iterable[Number]) -> "Poly":
        return cls(1, {(i,): c for i, c in enumerate(coeffs)})

    # inspection --------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, index: int) -> int:
        return max((e[index] for e in self.terms), default=0)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, _ZERO)

    def coeffs(self) -> Coeffs:
        """Dense coefficients (lowest first) of a univariate polynomial."""
        if self.nvars != 1:
            raise ValueError("coeffs() needs a univariate polynomial")
        if self._dense is None:
            dense = [_ZERO] * (self.degree() + 1)
            for (e,), c in self.terms.items():
                dense[e] = c
            self._dense = dense
        return self._dense

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == Poly.constant(other, self.nvars).terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return "Poly(0)"
        parts = []
        for exps, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(f"x{i}^{e}" if e > 1 else f"x{i}" for i, e in enumerate(exps) if e)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return "Poly(" + " + ".join(parts) + ")"

    # arithmetic --------------------------------------------------------------
    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError("variable counts differ")
            return other
        return Poly.constant(_frac(other), self.nvars)

    def __add__(self, other) -> "Poly":
        other = self._lift(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, _ZERO) + v
        return Poly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(self.nvars, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Poly":
        return self._lift(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = _frac(other)
            return Poly(self.nvars, {k: v * c for k, v in self.terms.items()})
        other = self._lift(other)
        out: dict[tuple[int, ...], Fraction] = {}
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                k = tuple(x + y for x, y in zip(ka, kb))
                out[k] = out.get(k, _ZERO) + va * vb
        return Poly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "Poly":
        result = Poly.constant(1, self.nvars)
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    # calculus and substitution ----------------------------------------------
    def __call__(self, *point: Number) -> Fraction:
        return self.evaluate(point)

    def evaluate(self, point: Sequence[Number]) -> Fraction:
        if self.nvars == 1:
            return horner(self.coeffs(), _frac(point[0]))
        pt = [_frac(x) for x in point]
        total = _ZERO
        for exps, c in self.terms.items():
            term = c
            for x, e in zip(pt, exps):
                if e:
                    term *= x**e
            total += term
        return total

    def partial(self, index: int) -> "Poly":
        out = {}
        for exps, c in self.terms.items():
            e = exps[index]
            if e:
                k = list(exps)
                k[index] -= 1
                out[tuple(k)] = c * e
        return Poly(self.nvars, out)

    def antiderivative(self, index: int = 0) -> "Poly":
        out = {}
        for exps, c in self.terms.items():
            k = list(exps)
            k[index] += 1
            out[tuple(k)] = c / k[index]
        return Poly(self.nvars, out)

    def substitute(self, index: int, replacement) -> "Poly":
        """Replace variable ``index`` by a polynomial (or number) in the same variables."""
        replacement = self._lift(replacement)
        by_power: dict[int, dict[tuple[int, ...], Fraction]] = {}
        for exps, c in self.terms.items():
            k = list(exps)
            e = k[index]
            k[index] = 0
            by_power.setdefault(e, {})[tuple(k)] = c
        result = Poly(self.nvars)
        powers = {0: Poly.constant(1, self.nvars)}
        for e in sorted(by_power):
            if e not in powers:
                powers[e] = replacement**e
            result = result + Poly(self.nvars, by_power[e]) * powers[e]
        return result

    def affine(self, index: int, scale: Number, shift: Number) -> "Poly":
        """Substitute ``x_index -> scale * x_index + shift``."""
        repl = Poly.variable(index, self.nvars) * _frac(scale) + _frac(shift)
        return self.substitute(index, repl)

    def integrate(self, index: int, lower, upper) -> "Poly":
        """Definite integral in variable ``index``; limits may be polynomials."""
        anti = self.antiderivative(index)
        return anti.substitute(index, upper) - anti.substitute(index, lower)

    def drop(self, index: int) -> "Poly":
        """Remove a variable that does not occur."""
        out = {}
        for exps, c in self.terms.items():
            if exps[index]:
                raise ValueError("variable still occurs")
            out[exps[:index] + exps[index + 1 :]] = c
        return Poly(self.nvars - 1, out)

    def embed(self, nvars: int, positions: Sequence[int]) -> "Poly":
        """Reinterpret variable ``i`` as variable ``positions[i]`` of a larger ring."""
        out = {}
        for exps, c in self.terms.items():
            k = [0] * nvars
            for e, pos in zip(exps, positions):
                k[pos] += e
            out[tuple(k)] = c
        return Poly(nvars, out)

    def max_abs_coefficient(self) -> Fraction:
        return max((abs(c) for c in self.terms.values()), default=_ZERO)


# -- univariate helpers on dense coefficient lists -------------------------------


def trim(coeffs: Sequence[Fraction]) -> Coeffs:
    out = list(coeffs)
    while out and not out[-1]:
        out.pop()
    return out


def horner(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = _ZERO
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def derivative(coeffs: Sequence[Fraction]) -> Coeffs:
    return [c * i for i, c in enumerate(coeffs)][1:]


def poly_divmod(num: Sequence[Fraction], den: Sequence[Fraction]) -> tuple[Coeffs, Coeffs]:
    num, den = trim(num), trim(den)
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    quot = [_ZERO] * max(len(num) - len(den) + 1, 0)
    rem = list(num)
    lead = den[-1]
    while len(rem) >= len(den) and rem:
        shift = len(rem) - len(den)
        factor = rem[-1] / lead
        quot[shift] = factor
        for i, c in enumerate(den):
            rem[shift + i] -= factor * c
        rem = trim(rem)
    return quot, rem


def poly_gcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> Coeffs:
    a, b = trim(a), trim(b)
    while b:
        a, b = b, poly_divmod(a, b)[1]
    if not a:
        return []
    lead = a[-1]
    return [c / lead for c in a]


def squarefree(coeffs: Sequence[Fraction]) -> Coeffs:
    coeffs = trim(coeffs)
    if len(coeffs) <= 2:
        return coeffs
    g = poly_gcd(coeffs, derivative(coeffs))
    if len(g) <= 1:
        return coeffs
    return poly_divmod(coeffs, g)[0]


def _sturm_chain(coeffs: Coeffs) -> list[Coeffs]:
    chain = [coeffs, derivative(coeffs)]
    while trim(chain[-1]):
        rem = poly_divmod(chain[-2], chain[-1])[1]
        if not rem:
            break
        chain.append([-c for c in rem])
    return [trim(p) for p in chain if trim(p)]


def _sign_changes(chain: list[Coeffs], x: Fraction) -> int:
    count, last = 0, 0
    for p in chain:
        v = horner(p, x)
        if v:
            s = 1 if v > 0 else -1
            if last and s != last:
                count += 1
            last = s
    return count


@dataclass(frozen=True)
class RealRoot:
    """A real root known exactly (``lo == hi``) or inside the open interval (lo, hi)."""

    lo: Fraction
    hi: Fraction

    @property
    def exact(self) -> bool:
        return self.lo == self.hi


def _rational_quadratic_roots(coeffs: Coeffs) -> list[Fraction] | None:
    c, b, a = coeffs
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    num, den = disc.numerator, disc.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn != num or rd * rd != den:
        return None
    root = Fraction(rn, rd)
    return sorted({(-b - root) / (2 * a), (-b + root) / (2 * a)})


def isolate_roots(
    coeffs: Sequence[Number], lo: Number, hi: Number, width: Fraction = Fraction(1, 1 << 64)
) -> list[RealRoot]:
    """Roots in the open interval (lo, hi), sorted, each exact or isolated to ``width``.

    Multiple roots are reported once.  The polynomial must not vanish identically.
    """
    lo, hi = _frac(lo), _frac(hi)
    p = squarefree([_frac(c) for c in coeffs])
    if not p:
        raise ValueError("zero polynomial has no isolated roots")
    if len(p) == 1 or lo >= hi:
        return []
    if len(p) == 2:
        r = -p[0] / p[1]
        return [RealRoot(r, r)] if lo < r < hi else []
    if len(p) == 3:
        exact = _rational_quadratic_roots(p)
        if exact is not None:
            return [RealRoot(r, r) for r in exact if lo < r < hi]
    chain = _sturm_chain(p)

    def open_count(a: Fraction, b: Fraction) -> int:
        # for a square-free p, V(a) - V(b) counts the roots in (a, b]
        n = _sign_changes(chain, a) - _sign_changes(chain, b)
        return n - 1 if horner(p, b) == 0 else n

    roots: list[RealRoot] = []
    stack = [(lo, hi)]
    while stack:
        a, b = stack.pop()
        n = open_count(a, b)
        if n == 0:
            continue
        if n == 1:
            roots.append(_refine(p, open_count, a, b, width))
            continue
        mid = (a + b) / 2
        if horner(p, mid) == 0:
            roots.append(RealRoot(mid, mid))
        stack.append((a, mid))
        stack.append((mid, b))
    return sorted(roots, key=lambda r: r.lo)


def _refine(p: Coeffs, open_count, a: Fraction, b: Fraction, width: Fraction) -> RealRoot:
    """Shrink (a, b), known to hold exactly one simple root, to the requested width."""
    fa, fb = horner(p, a), horner(p, b)
    while (fa == 0 or fb == 0) and b - a > width:
        mid = (a + b) / 2
        fm = horner(p, mid)
        if fm == 0:
            return RealRoot(mid, mid)
        if open_count(a, mid) == 1:
            b, fb = mid, fm
        else:
            a, fa = mid, fm
    while b - a > width:
        mid = (a + b) / 2
        fm = horner(p, mid)
        if fm == 0:
            return RealRoot(mid, mid)
        if (fm > 0) == (fb > 0):
            b, fb = mid, fm
        else:
            a, fa = mid, fm
    return RealRoot(a, b)


def sign_runs(coeffs: Sequence[Number], first: int, last: int) -> list[tuple[int, int, int]]:
    """Maximal integer ranges ``[i, j]`` inside ``[first, last]`` on which the sign is constant.

    Returns ``(i, j, sign)`` triples covering ``first..last`` in order.
    """
    p = trim([_frac(c) for c in coeffs])
    if first > last:
        return []
    if not p:
        return [(first, last, 0)]
    cuts: set[int] = set()
    for root in isolate_roots(p, first - 1, last + 1, Fraction(1, 4)):
        # integers whose sign may differ from their neighbours
        lo = root.lo.numerator // root.lo.denominator
        hi = -((-root.hi.numerator) // root.hi.denominator)
        cuts.update(range(lo, hi + 1))
    points = sorted(c for c in cuts if first <= c <= last)
    segments: list[tuple[int, int]] = []
    prev = first
    for c in points:
        if c > prev:
            segments.append((prev, c - 1))
        segments.append((c, c))
        prev = c + 1
    if prev <= last:
        segments.append((prev, last))
    runs: list[tuple[int, int, int]] = []
    for i, j in segments:
        v = horner(p, Fraction(i))
        s = (v > 0) - (v < 0)
        if runs and runs[-1][2] == s:
            runs[-1] = (runs[-1][0], j, s)
        else:
            runs.append((i, j, s))
    return runs


def sum_over_range(coeffs: Sequence[Number], first: int, last: int) -> Fraction:
    """Exact ``sum(p(j) for j in first..last)`` via forward differences."""
    p = trim([_frac(c) for c in coeffs])
    count = last - first + 1
    if count <= 0 or not p:
        return _ZERO
    values = [horner(p, Fraction(first + i)) for i in range(len(p))]
    total = _ZERO
    binom = count  # C(count, i + 1) for i = 0
    for i in range(len(p)):
        total += values[0] * binom
        values = [b - a for a, b in zip(values, values[1:])]
        binom = binom * (count - i - 1) // (i + 2)
    return total

"""Independent brute-force oracles for the test suite.

Nothing here imports the package under test.  Functions are plain lists of
``(lo, hi, sympy expression in X)`` pieces; integrals and norms come from
sympy, codes from Python integers, encodings from ``bin``.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import sympy

X = sympy.Symbol("x", real=True)


def rat(value) -> sympy.Rational:
    value = Fraction(value)
    return sympy.Rational(value.numerator, value.denominator)


def frac(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


def exact(value):
    """Fraction when the value is rational, otherwise the exact sympy number."""
    value = sympy.sympify(value)
    return frac(value) if value.is_Rational else value


def inside(enclosure, value) -> bool:
    """``lo <= value <= hi`` decided exactly (sympy sign decision for algebraic values)."""
    if isinstance(value, Fraction):
        return enclosure.lo <= value <= enclosure.hi
    return _sign(value - rat(enclosure.lo)) >= 0 and _sign(rat(enclosure.hi) - value) >= 0


def _sign(expr) -> int:
    """Sign of a nonzero algebraic number by evaluation at growing precision."""
    for digits in (50, 200, 1000, 5000):
        approx = sympy.N(expr, digits)
        if abs(approx) > sympy.Float(10) ** (20 - digits):
            return 1 if approx > 0 else -1
    raise ValueError(f"cannot decide the sign of {expr}")


def _definite(expr, a, b):
    antiderivative = sympy.Poly(expr, X).integrate()
    return antiderivative.eval(b) - antiderivative.eval(a)


# -- encodings ------------------------------------------------------------------------------


def nat_code(n: int) -> str:
    return bin(n)[2:]


def int_code(z: int) -> str:
    return ("1" if z > 0 else "0") + bin(abs(z))[2:]


def dyadic_from_code(code: str) -> Fraction:
    """Read the interleaved comma grammar directly: pairs ``(bit, flag)``."""
    if len(code) % 2:
        code += "0"
    pairs = [(code[i], code[i + 1]) for i in range(0, len(code), 2)]
    before, after, seen_comma = [], [], False
    for bit, flag in pairs:
        (after if seen_comma else before).append(bit)
        if flag == "0":
            if seen_comma:
                break
            seen_comma = True
    digits = before + after
    if not digits or "1" not in digits[1:]:
        return Fraction(0)
    sign = 1 if digits[0] == "1" else -1
    magnitude = int("".join(digits[1:]), 2)
    return Fraction(sign * magnitude, 2 ** len(after))


def doubled_pair(a: str, b: str) -> str:
    """Both halves doubled so that ``01`` can only occur at the separator."""
    return "".join(ch * 2 for ch in a) + "01" + "".join(ch * 2 for ch in b)


# -- piecewise functions ------------------------------------------------------------------


def pieces(*items):
    return [(rat(lo), rat(hi), sympy.sympify(expr)) for lo, hi, expr in items]


CORPUS = {
    "zero": pieces(),
    "one": pieces((0, 1, 1)),
    "indicator_half": pieces((0, Fraction(1, 2), 1)),
    "identity": pieces((0, 1, X)),
    "half_square": pieces((0, 1, X**2 / 2)),
    "hat": pieces((0, Fraction(1, 2), 2 * X), (Fraction(1, 2), 1, 2 - 2 * X)),
    "hat_antiderivative": pieces((0, Fraction(1, 2), X**2),
                                 (Fraction(1, 2), 1, -X**2 + 2 * X - sympy.Rational(1, 2))),
}


def oscillator(m: int):
    width = Fraction(1, 2**m)
    return pieces(*[(k * width, (k + 1) * width, (-1) ** (k + 1)) for k in range(2**m)])


def integral(fn, a, b) -> Fraction:
    a, b = rat(a), rat(b)
    sign = 1
    if a > b:
        a, b, sign = b, a, -1
    total = sympy.Integer(0)
    for lo, hi, expr in fn:
        left, right = max(lo, a), min(hi, b)
        if left < right:
            total += _definite(expr, left, right)
    return sign * frac(total)


def value(fn, x) -> Fraction:
    x = rat(x)
    for lo, hi, expr in fn:
        if lo <= x <= hi:
            return frac(expr.subs(X, x))
    return Fraction(0)


def _breaks(fns, extra=()):
    points = set(extra)
    for fn in fns:
        for lo, hi, _ in fn:
            points.update((lo, hi))
    return sorted(points)


def _expr_at(fn, mid):
    for lo, hi, expr in fn:
        if lo < mid < hi:
            return expr
    return sympy.Integer(0)


def _abs_power_integral(expr, a, b, p) -> sympy.Expr:
    expr = sympy.expand(expr)
    if expr == 0:
        return sympy.Integer(0)
    cuts = [a, b]
    if expr.free_symbols:
        for root in sympy.Poly(expr, X).real_roots():
            if a < root < b:
                cuts.append(root)
    cuts.sort()
    total = sympy.Integer(0)
    for left, right in zip(cuts, cuts[1:]):
        mid = (left + right) / 2
        sign = 1 if expr.subs(X, mid) >= 0 else -1
        total += _definite((sign * expr) ** p, left, right)
    return total


def lp_power(fn, p: int):
    return distance_power(fn, [], p)


def distance_power(f, g, p: int):
    """``||f - g||_p ** p`` for functions extended by zero (a Fraction when rational)."""
    points = _breaks([f, g])
    total = sympy.Integer(0)
    for a, b in zip(points, points[1:]):
        mid = (a + b) / 2
        total += _abs_power_integral(_expr_at(f, mid) - _expr_at(g, mid), a, b, p)
    return exact(total)


def shifted(fn, h):
    """``x -> f(x + h)``."""
    h = rat(h)
    return [(lo - h, hi - h, expr.subs(X, X + h)) for lo, hi, expr in fn]


def shift_difference_power(fn, h, p: int) -> Fraction:
    return distance_power(fn, shifted(fn, h), p)


def cell_average(fn, x, m: int) -> Fraction:
    half = Fraction(1, 2 ** (m + 1))
    return integral(fn, Fraction(x) - half, Fraction(x) + half) * 2**m


def sup_distance_linear(f, g) -> Fraction:
    """Sup distance of two piecewise linear continuous functions (vertex check)."""
    points = _breaks([f, g])
    best = Fraction(0)
    for x in points:
        for side in (-1, 1):
            # one-sided limits at every breakpoint
            eps = sympy.Rational(1, 10**12)
            y = x + side * eps
            diff = abs(frac(_expr_at(f, y).subs(X, x)) - frac(_expr_at(g, y).subs(X, x)))
            best = max(best, diff)
    return best


def tent(center, half_width, height):
    c, w, h = rat(center), rat(half_width), rat(height)
    return [(c - w, c, h * (X - (c - w)) / w), (c, c + w, h * ((c + w) - X) / w)]


# -- codes ----------------------------------------------------------------------------------


def hamming(a: int, b: int) -> int:
    return bin(a ^ b).count("1")


def min_pairwise_distance(words) -> int:
    return min(hamming(a, b) for a, b in itertools.combinations(words, 2))


def greedy_code(length: int, distance: int) -> list[int]:
    """Lexicographic greedy code seeded with the all-zero and all-one words."""
    chosen = [0, (1 << length) - 1]
    if hamming(*chosen) < distance:
        chosen = [0]
    for word in range(1 << length):
        if all(hamming(word, c) >= distance for c in chosen):
            chosen.append(word)
    return sorted(chosen)


# -- second-order polynomials -------------------------------------------------------------


def nested_example(l, n: int) -> int:
    """``l(l(n^2 + 5) + l(l(n)^2))``."""
    return l(l(n * n + 5) + l(l(n) ** 2))

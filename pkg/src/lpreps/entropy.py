"""Quantitative compactness: covering nets, separated families, codes and tables.

Two canonical compact classes of functions on ``[0, 1]`` are handled:

* ``aa(l, C)``: continuous functions with modulus of continuity ``l`` and
  ``sup |f| <= 2**C``;
* ``fk(l, p)``: functions with Lp-modulus ``l``.

A third, ``lipschitz(L)``, is the subclass of ``aa(n + L, L)`` vanishing at
``0``.  Covering nets are indexed lazily (:class:`PathNet`), so their size can
be counted and single elements produced without enumerating them.  All
distances used for certification are computed exactly with rational
arithmetic.
"""

from __future__ import annotations

import bisect
import csv
import io
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import kernels
from .dyadic import Dyadic, decode_dyadic, encode_dyadic, pair, unary
from .moduli import Modulus, ceil_lb
from .names import BudgetExceeded, Name, check_exponential_bound, default_budget, parse_unary, split_query
from .symbolic import FunctionSpec, continuous_approximation, weak_derivative

ZERO = Fraction(0)
ONE = Fraction(1)
UNIT = [(ZERO, ONE)]


class EntropyError(ValueError):
    """A class or parameter choice outside what a construction supports."""


def _pow2(k: int) -> Fraction:
    return Fraction(2) ** k


def _ceil_lb_int(count: int) -> int:
    """``ceil(lb(count))`` for a positive integer."""
    return (count - 1).bit_length()


def min_excess(l: Modulus, start: int = 0) -> int | None:
    """``min over m >= start`` of ``l(m) - m``; ``None`` if the minimum is ``-inf``.

    The value is finite exactly when ``l`` has a tail of slope at least one.
    Past the table and past the zero-clamped region the difference
    ``l(m) - m`` is nondecreasing, so a finite range decides the minimum.
    """
    if l.tail_a == 0:
        return None
    start = max(start, 0)
    clamp_end = -(-(-l.tail_b) // l.tail_a) if l.tail_b < 0 else 0
    end = max(len(l.table), start, clamp_end) + 1
    return min(l(m) - m for m in range(start, end + 1))


# -- compact classes ------------------------------------------------------------------------


@dataclass(frozen=True)
class CompactClass:
    """``kind`` is ``"aa"``, ``"fk"`` or ``"lipschitz"``."""

    kind: str
    modulus: Modulus
    sup_exponent: int = 0
    p: int | None = None

    @classmethod
    def aa(cls, l: Modulus, sup_exponent: int) -> "CompactClass":
        return cls("aa", l.with_kind("continuity"), sup_exponent)

    @classmethod
    def fk(cls, l: Modulus, p: int) -> "CompactClass":
        return cls("fk", l.with_kind("lp", p), 0, p)

    @classmethod
    def lipschitz(cls, lipschitz_exponent: int) -> "CompactClass":
        """Functions vanishing at ``0`` with Lipschitz constant ``2**L``."""
        l = Modulus.affine(1, lipschitz_exponent, "continuity")
        return cls("lipschitz", l, max(lipschitz_exponent, 0))

    @property
    def anchored(self) -> bool:
        return self.kind == "lipschitz"

    @property
    def lipschitz_exponent(self) -> int:
        return self.modulus.tail_b

    def describe(self) -> dict:
        data = {"kind": self.kind, "modulus": self.modulus.to_json()}
        if self.kind == "aa":
            data["sup_exponent"] = self.sup_exponent
        if self.kind == "fk":
            data["p"] = self.p
        if self.kind == "lipschitz":
            data["lipschitz_exponent"] = self.lipschitz_exponent
        return data


# -- piecewise tables for exact segment errors ---------------------------------------------


def _horner(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = ZERO
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


class PieceTable:
    """A continuous one-dimensional function on ``[0, 1]`` as sorted polynomial pieces.

    Gaps between pieces are filled with zero, matching the zero extension.
    """

    def __init__(self, pieces: Sequence[tuple[Fraction, Fraction, tuple[Fraction, ...]]]) -> None:
        filled: list[tuple[Fraction, Fraction, tuple[Fraction, ...]]] = []
        cursor = ZERO
        for lo, hi, coeffs in sorted(pieces, key=lambda t: t[0]):
            lo, hi = max(lo, ZERO), min(hi, ONE)
            if hi <= lo:
                continue
            if lo > cursor:
                filled.append((cursor, lo, (ZERO,)))
            filled.append((lo, hi, tuple(coeffs)))
            cursor = hi
        if cursor < ONE:
            filled.append((cursor, ONE, (ZERO,)))
        self.pieces = filled
        self.starts = [lo for lo, _, _ in filled]

    @classmethod
    def of(cls, f) -> "PieceTable":
        if isinstance(f, PieceTable):
            return f
        if isinstance(f, LinearPath):
            return cls(f.pieces())
        if not isinstance(f, FunctionSpec) or f.d != 1:
            raise EntropyError("expected a one-dimensional function")
        return cls([(pc.box[0][0], pc.box[0][1], tuple(pc.poly.coeffs())) for pc in f.pieces])

    def _index(self, x: Fraction) -> int:
        return max(bisect.bisect_right(self.starts, x) - 1, 0)

    def value(self, x: Fraction) -> Fraction:
        lo, hi, coeffs = self.pieces[self._index(x)]
        return _horner(coeffs, x)

    def max_degree(self) -> int:
        return max(len(c) - 1 for _, _, c in self.pieces)

    def segment_error(self, a: Fraction, b: Fraction, va: Fraction, vb: Fraction) -> Fraction:
        """``max |f(x) - line(x)|`` over ``[a, b]`` where the line joins ``(a, va)`` and ``(b, vb)``.

        Exact for pieces of degree at most two; for higher degree the value is
        a certified upper bound.
        """
        slope = (vb - va) / (b - a)
        worst = ZERO
        i = self._index(a)
        while i < len(self.pieces) and self.pieces[i][0] < b:
            lo, hi, coeffs = self.pieces[i]
            s, e = max(lo, a), min(hi, b)
            if e > s or (e == s == a):
                points = [s, e]
                degree = len(coeffs) - 1
                if degree == 2:
                    c2 = coeffs[2]
                    if c2:
                        x = (slope - coeffs[1]) / (2 * c2)
                        if s < x < e:
                            points.append(x)
                elif degree > 2:
                    diff = list(coeffs)
                    diff[0] -= va - slope * a
                    diff[1] -= slope
                    piece = FunctionSpec.piecewise([((s, e), diff)])
                    worst = max(worst, piece.sup_abs().hi)
                    i += 1
                    continue
                for x in points:
                    worst = max(worst, abs(_horner(coeffs, x) - va - slope * (x - a)))
            i += 1
        return worst


@dataclass(frozen=True)
class LinearPath:
    """Continuous piecewise-linear function through ``(xs[i], values[i])``."""

    xs: tuple[Fraction, ...]
    values: tuple[Fraction, ...]

    def pieces(self):
        out = []
        for (x0, v0), (x1, v1) in zip(zip(self.xs, self.values), zip(self.xs[1:], self.values[1:])):
            slope = (v1 - v0) / (x1 - x0)
            out.append((x0, x1, (v0 - slope * x0, slope)))
        return out

    def slopes(self) -> list[Fraction]:
        return [(v1 - v0) / (x1 - x0) for x0, x1, v0, v1 in
                zip(self.xs, self.xs[1:], self.values, self.values[1:])]

    def value(self, x: Fraction) -> Fraction:
        i = max(bisect.bisect_right(self.xs, x) - 1, 0)
        if i >= len(self.xs) - 1:
            return self.values[-1]
        x0, x1 = self.xs[i], self.xs[i + 1]
        return self.values[i] + (self.values[i + 1] - self.values[i]) * (x - x0) / (x1 - x0)

    def sup_abs(self) -> Fraction:
        return max(abs(v) for v in self.values)

    def to_function(self, name: str = "") -> FunctionSpec:
        pieces = [((x0, x1), list(c)) for x0, x1, c in self.pieces()]
        return FunctionSpec.piecewise(pieces, UNIT, name=name)


def linear_sup_distance(f: LinearPath, g: LinearPath) -> Fraction:
    """Exact ``sup |f - g|`` for two piecewise-linear paths on the same interval."""
    points = sorted(set(f.xs) | set(g.xs))
    return max(abs(f.value(x) - g.value(x)) for x in points)


# -- the lazy covering net of piecewise-linear paths -----------------------------------------

_DIGIT = {0: 0, 1: 1, -1: 2}
_STEP = (0, 1, -1)


@dataclass(frozen=True)
class PathIndex:
    """Start level ``start`` (in units of ``2**-n``) and the steps ``-1, 0, 1`` per cell."""

    start: int
    steps: tuple[int, ...]


class PathNet:
    """Net of cumulative lattice paths covering ``aa(l, C)`` at radius ``2**-n``.

    The element with index ``(s0, s1, ..., sK)``, ``K = 2**l(n)``, takes the
    value ``2**-n * (s0 + s1 + ... + sj)`` at ``x = j 2**-l(n)`` and is linear
    in between.  ``anchored=True`` fixes ``s0 = 0`` (functions vanishing at 0).
    """

    def __init__(self, l: Modulus, sup_exponent: int, anchored: bool = False) -> None:
        self.modulus = l
        self.sup_exponent = sup_exponent
        self.anchored = anchored

    @classmethod
    def for_class(cls, compact: CompactClass) -> "PathNet":
        if compact.kind == "fk":
            raise EntropyError("use fk_cover for Lp classes")
        return cls(compact.modulus, compact.sup_exponent, compact.anchored)

    def cells(self, n: int) -> int:
        return 2 ** self.modulus(n)

    def start_radius(self, n: int) -> int:
        return 0 if self.anchored else 2 ** (n + self.sup_exponent)

    def count(self, n: int) -> int:
        return (2 * self.start_radius(n) + 1) * 3 ** self.cells(n)

    def index_width(self, n: int) -> int:
        return _ceil_lb_int(self.count(n))

    # index <-> rank
    def rank(self, n: int, index: PathIndex) -> int:
        k = self.cells(n)
        if len(index.steps) != k or abs(index.start) > self.start_radius(n):
            raise EntropyError("index does not belong to this level")
        value = index.start + self.start_radius(n)
        for s in index.steps:
            value = value * 3 + _DIGIT[s]
        return value

    def unrank(self, n: int, rank: int) -> PathIndex:
        if not 0 <= rank < self.count(n):
            raise EntropyError("rank out of range")
        k = self.cells(n)
        steps = []
        for _ in range(k):
            rank, digit = divmod(rank, 3)
            steps.append(_STEP[digit])
        return PathIndex(rank - self.start_radius(n), tuple(reversed(steps)))

    def path(self, n: int, index: PathIndex | int) -> LinearPath:
        if isinstance(index, int):
            index = self.unrank(n, index)
        step = _pow2(-n)
        width = _pow2(-self.modulus(n))
        level = index.start
        values = [level * step]
        for s in index.steps:
            level += s
            values.append(level * step)
        xs = tuple(j * width for j in range(len(values)))
        return LinearPath(xs, tuple(values))

    def element(self, n: int, index: PathIndex | int) -> FunctionSpec:
        return self.path(n, index).to_function()

    def enumerate(self, n: int, budget: int | None = None) -> list[PathIndex]:
        budget = default_budget() if budget is None else budget
        total = self.count(n)
        if total > budget:
            raise BudgetExceeded(f"net of size {total} exceeds the budget of {budget}")
        return [self.unrank(n, r) for r in range(total)]

    def distance(self, n: int, i: int, j: int) -> Fraction:
        """Exact supremum distance between elements ``i`` and ``j`` of level ``n``."""
        return linear_sup_distance(self.path(n, i), self.path(n, j))

    def nearest(self, f, n: int) -> tuple[PathIndex, Fraction] | None:
        """Element minimising the supremum distance to ``f`` among lattice-consistent paths.

        Dynamic programming over the node values: node ``j`` may take any
        lattice value within ``2**-n`` of ``f(x_j)``, neighbouring nodes
        differ by at most one lattice step, and the cost of a path is its
        largest segment error.  Returns ``None`` when no element lies within
        ``2**-n`` at the nodes.
        """
        table = PieceTable.of(f)
        step = _pow2(-n)
        k = self.cells(n)
        width = _pow2(-self.modulus(n))
        xs = [j * width for j in range(k + 1)]
        radius = self.start_radius(n)

        def candidates(j: int) -> list[int]:
            fx = table.value(xs[j])
            base = math.floor(fx / step)
            out = [c for c in (base - 1, base, base + 1, base + 2) if abs(c * step - fx) < step]
            if j == 0:
                out = [c for c in out if abs(c) <= radius]
            return out

        first = candidates(0)
        if not first:
            return None
        fx0 = table.value(ZERO)
        cost = {c: abs(c * step - fx0) for c in first}
        back: list[dict[int, int]] = []
        for j in range(k):
            nxt = candidates(j + 1)
            new: dict[int, Fraction] = {}
            choice: dict[int, int] = {}
            for c2 in nxt:
                for c1 in sorted(cost, key=lambda c: (cost[c], abs(c), c)):
                    if abs(c2 - c1) > 1:
                        continue
                    err = max(cost[c1], table.segment_error(xs[j], xs[j + 1], c1 * step, c2 * step))
                    if c2 not in new or err < new[c2]:
                        new[c2], choice[c2] = err, c1
            if not new:
                return None
            cost = new
            back.append(choice)
        end = min(cost, key=lambda c: (cost[c], abs(c), c))
        levels = [end]
        for choice in reversed(back):
            levels.append(choice[levels[-1]])
        levels.reverse()
        steps = tuple(b - a for a, b in zip(levels, levels[1:]))
        return PathIndex(levels[0], steps), cost[end]


# -- membership ---------------------------------------------------------------------------------


def aa_slope_exponent(l: Modulus) -> int | None:
    """``c`` such that every Lipschitz function with constant below ``2**c`` has modulus ``l``."""
    return min_excess(l, 0)


def aa_member(path: LinearPath, compact: CompactClass) -> bool:
    """Exact membership certificate for a piecewise-linear path.

    ``max |slope| < 2**c`` with ``c = min (l(m) - m)`` gives
    ``|f(x) - f(y)| < 2**(c - l(m)) <= 2**-m`` whenever ``|x - y| <= 2**-l(m)``.
    """
    c = aa_slope_exponent(compact.modulus)
    slopes = path.slopes()
    if c is None:
        if any(slopes):
            return False
    elif any(abs(s) >= _pow2(c) for s in slopes):
        return False
    if compact.anchored:
        return path.values[0] == 0
    return path.sup_abs() <= _pow2(compact.sup_exponent)


def sample_aa_members(
    compact: CompactClass, n: int, count: int, seed: int = 0, extra_resolution: int = 2
) -> list[LinearPath]:
    """Random piecewise-linear members on the grid ``2**-(l(n) + extra_resolution)``."""
    rng = random.Random(seed)
    c = aa_slope_exponent(compact.modulus)
    r = compact.modulus(n) + extra_resolution
    cells = 2**r
    xs = tuple(Fraction(j, cells) for j in range(cells + 1))
    bound = _pow2(compact.sup_exponent)
    out = []
    for _ in range(count):
        if c is None:
            increments = [ZERO] * cells
        else:
            increments = [Fraction(rng.randint(-63, 63), 64) * _pow2(c - r) for _ in range(cells)]
        levels = [ZERO]
        for inc in increments:
            levels.append(levels[-1] + inc)
        if compact.anchored:
            out.append(LinearPath(xs, tuple(levels)))
            continue
        while max(levels) - min(levels) > 2 * bound:
            levels = [v / 2 for v in levels]
        lo, hi = -bound - min(levels), bound - max(levels)
        grain = 2 ** (n + 4)
        start = Fraction(rng.randint(math.ceil(lo * grain), math.floor(hi * grain)), grain)
        out.append(LinearPath(xs, tuple(start + v for v in levels)))
    return out


def extreme_aa_members(compact: CompactClass, n: int) -> list[LinearPath]:
    """Steepest admissible ramps and zigzags at and below the net resolution."""
    c = aa_slope_exponent(compact.modulus)
    bound = _pow2(compact.sup_exponent)
    paths = []
    base_levels = [ZERO] if compact.anchored else [-bound, ZERO, bound]
    if c is None:
        return [LinearPath((ZERO, ONE), (v, v)) for v in base_levels]
    slope = _pow2(c) * Fraction(63, 64)
    for period_exponent in (compact.modulus(n), compact.modulus(n) + 1, compact.modulus(n) + 3):
        cells = 2**period_exponent
        xs = tuple(Fraction(j, cells) for j in range(cells + 1))
        for pattern in ("up", "down", "zigzag", "zagzig"):
            levels = [ZERO]
            for j in range(cells):
                sign = {"up": 1, "down": -1, "zigzag": (-1) ** j, "zagzig": -((-1) ** j)}[pattern]
                levels.append(levels[-1] + sign * slope / cells)
            for start in base_levels:
                shifted = [start + v for v in levels]
                top, bottom = max(shifted), min(shifted)
                if top > bound:
                    shifted = [v - (top - bound) for v in shifted]
                elif bottom < -bound:
                    shifted = [v + (-bound - bottom) for v in shifted]
                path = LinearPath(xs, tuple(shifted))
                if aa_member(path, compact):
                    paths.append(path)
    return paths


# -- covering net --------------------------------------------------------------------------------


def aa_cover_count(l: Modulus, sup_exponent: int, n: int) -> int:
    """``(2**(n + C + 1) + 1) * 3**(2**l(n))``."""
    return (2 ** (n + sup_exponent + 1) + 1) * 3 ** (2 ** l(n))


def aa_cover_bound_exponent(l: Modulus, sup_exponent: int, n: int) -> int:
    """``2**(l(n) + 1) + n + C + 2``: the exponent bounding the net size."""
    return 2 ** (l(n) + 1) + n + sup_exponent + 2


def aa_cover(l: Modulus, sup_exponent: int, n: int, budget: int | None = None) -> list[FunctionSpec]:
    """All elements of the covering net at radius ``2**-n``, in rank order."""
    net = PathNet(l, sup_exponent)
    return [net.element(n, index) for index in net.enumerate(n, budget)]


@dataclass
class CoverReport:
    count: int
    bound_exponent: int
    count_ok: bool
    radius: Fraction
    members: int
    worst_distance: Fraction
    covered: bool
    failures: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "bound_exponent": self.bound_exponent,
            "count_ok": self.count_ok,
            "radius": str(self.radius),
            "members": self.members,
            "worst_distance": str(self.worst_distance),
            "covered": self.covered,
            "failures": self.failures,
        }


def certify_aa_cover(
    compact: CompactClass, n: int, samples: int = 200, seed: int = 0,
    members: Sequence[LinearPath] | None = None,
) -> CoverReport:
    """Check the net count and cover sampled and extreme members exactly.

    For every member the chosen net element is rebuilt from its index and
    the supremum distance is recomputed on the union of breakpoints.
    """
    net = PathNet.for_class(compact)
    count = net.count(n)
    bound = aa_cover_bound_exponent(compact.modulus, compact.sup_exponent, n)
    if members is None:
        members = sample_aa_members(compact, n, samples, seed) + extreme_aa_members(compact, n)
    radius = _pow2(-n)
    worst = ZERO
    failures = []
    for i, member in enumerate(members):
        if not aa_member(member, compact):
            raise EntropyError(f"sampled member {i} is not in the class")
        found = net.nearest(member, n)
        if found is None:
            failures.append({"member": i, "reason": "no element within the radius at the nodes"})
            continue
        index, _ = found
        distance = linear_sup_distance(member, net.path(n, index))
        worst = max(worst, distance)
        if not distance < radius:
            failures.append({"member": i, "distance": str(distance)})
    count_ok = count == aa_cover_count(compact.modulus, compact.sup_exponent, n) or compact.anchored
    count_ok = count_ok and count <= 2**bound
    return CoverReport(count, bound, count_ok, radius, len(members), worst, not failures, failures)


# -- separated families ---------------------------------------------------------------------------


def bump_slot_exponent(l: Modulus, n: int) -> int | None:
    """Largest ``k >= 0`` such that tents of height ``2**(-n-1)`` on cells of width
    ``2**-k`` have modulus ``l``; ``None`` when no such cell width exists.

    A tent of that height on a cell of width ``2**-k`` has slope ``2**(k - n)``.
    Its variation over ``2**-l(m)`` is below ``2**-m`` for ``m <= n`` by the
    height, and for ``m > n`` iff ``k < l(m) - m + n``.
    """
    excess = min_excess(l, n + 1)
    if excess is None:
        return None
    k = excess + n - 1
    return k if k >= 0 else None


@dataclass
class SpanningFamily:
    """A family of class members with pairwise distance at least ``separation``."""

    functions: list[FunctionSpec]
    labels: list[tuple]
    separation: Fraction
    exponent: int
    details: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.functions)


def _bump_path(level: Fraction, pattern: Sequence[int], slot_exponent: int | None, height: Fraction) -> LinearPath:
    if slot_exponent is None or not any(pattern):
        return LinearPath((ZERO, ONE), (level, level))
    width = _pow2(-slot_exponent)
    xs, vs = [ZERO], [level]
    for j, bit in enumerate(pattern):
        mid, end = (j + Fraction(1, 2)) * width, (j + 1) * width
        xs += [mid, end]
        vs += [level + (height if bit else ZERO), level]
    return LinearPath(tuple(xs), tuple(vs))


def aa_spanning(
    l: Modulus, sup_exponent: int, n: int, budget: int | None = None, anchored: bool = False
) -> SpanningFamily:
    """Members with pairwise supremum distance at least ``2**(-n-1)``.

    Each member is a base level ``j 2**(-n-1)`` plus tents of height
    ``2**(-n-1)`` on a chosen subset of the ``2**k`` cells, with ``k`` from
    :func:`bump_slot_exponent`.  Distinct members differ by at least the
    level gap at ``x = 0`` or by a full tent height.
    """
    budget = default_budget() if budget is None else budget
    height = _pow2(-n - 1)
    k = bump_slot_exponent(l, n)
    slots = 0 if k is None else 2**k
    if anchored:
        levels = [0]
    else:
        half = 2 ** (n + sup_exponent + 1)
        levels = list(range(-half, half))
    total = len(levels) * 2**slots
    if total > budget:
        raise BudgetExceeded(f"spanning family of size {total} exceeds the budget of {budget}")
    functions, labels = [], []
    for j in levels:
        for mask in range(2**slots):
            pattern = [(mask >> (slots - 1 - i)) & 1 for i in range(slots)]
            path = _bump_path(j * height, pattern, k, height)
            functions.append(path.to_function(name=f"bump_{j}_{mask}"))
            labels.append((j, mask))
    exponent = (slots + (0 if anchored else n + sup_exponent + 2))
    return SpanningFamily(functions, labels, height, exponent,
                          {"slot_exponent": k, "slots": slots, "levels": len(levels),
                           "reference_slots": 2 ** l(n)})


def spanning_distance(family: SpanningFamily, a: int, b: int) -> Fraction:
    """Closed-form supremum distance between two bump-family members."""
    (ja, ma), (jb, mb) = family.labels[a], family.labels[b]
    gap = abs(ja - jb) * family.separation
    if ja == jb:
        return family.separation if ma != mb else ZERO
    if ma == mb:
        return gap
    # a tent on the higher member where the lower one is flat adds its height
    higher_extra = (ma & ~mb) if ja > jb else (mb & ~ma)
    return gap + (family.separation if higher_extra else ZERO)


def aa_family_member(fn: FunctionSpec, compact: CompactClass) -> bool:
    path = LinearPath(
        tuple([fn.pieces[0].box[0][0]] + [pc.box[0][1] for pc in fn.pieces]),
        tuple([fn.value(fn.pieces[0].box[0][0])] + [fn.value(pc.box[0][1]) for pc in fn.pieces]),
    ) if fn.pieces else LinearPath((ZERO, ONE), (ZERO, ZERO))
    if path.xs[0] != 0 or path.xs[-1] != 1:
        return False
    return aa_member(path, compact)


# -- codes ----------------------------------------------------------------------------------------


@dataclass
class CodeSet:
    length: int
    min_distance: int
    words: list[str]
    backend: str = ""

    def __len__(self) -> int:
        return len(self.words)

    def as_ints(self) -> list[int]:
        return [int(w, 2) for w in self.words]

    def verified_min_distance(self) -> int:
        """Smallest pairwise Hamming distance, recomputed over all pairs."""
        return kernels.min_pairwise_distance(self.as_ints())

    def to_json(self) -> dict:
        return {"N": self.length, "M": self.min_distance, "size": len(self.words),
                "backend": self.backend, "words": self.words}


def greedy_code(length: int, min_distance: int) -> CodeSet:
    """Greedy code: start from the all-zero and all-one words, then add every
    word (in increasing binary order) that keeps the pairwise distance at least
    ``min_distance``."""
    if length < 1 or min_distance < 1 or min_distance > length:
        raise EntropyError("need 1 <= M <= N")
    if length > 30:
        raise EntropyError("block lengths above 30 are out of reach for the exhaustive search")
    seeds = [0, (1 << length) - 1]
    words = kernels.greedy_code(length, min_distance, seeds)
    return CodeSet(length, min_distance, [format(w, f"0{length}b") for w in words], kernels.BACKEND)


# -- hat families in Lp ---------------------------------------------------------------------------


@dataclass
class HatFamily:
    p: int
    n: int
    height: Fraction
    width_exponent: int
    code: CodeSet
    words: list[str]

    @property
    def width(self) -> Fraction:
        return _pow2(-self.width_exponent)

    def function(self, word: str) -> FunctionSpec:
        return hat_function(word, self.height, self.width)

    def functions(self) -> list[FunctionSpec]:
        return [self.function(w) for w in self.words]

    def distance_power(self, a: str, b: str) -> Fraction:
        """``||f_a - f_b||_p ** p = D h**p w / (p + 1)`` for ``D`` disagreements."""
        disagreements = sum(x != y for x, y in zip(a, b))
        return disagreements * self.height**self.p * self.width / (self.p + 1)

    def derivative_norm_power(self, word: str) -> Fraction:
        """``||f'||_p ** p = (#hats) * w * (2h / w)**p``."""
        return word.count("1") * self.width * (2 * self.height / self.width) ** self.p


def hat_function(word: str, height: Fraction, width: Fraction) -> FunctionSpec:
    pieces = []
    for i, bit in enumerate(word):
        if bit != "1":
            continue
        lo, mid, hi = i * width, (i + Fraction(1, 2)) * width, (i + 1) * width
        slope = height / (mid - lo)
        pieces.append(((lo, mid), [-slope * lo, slope]))
        pieces.append(((mid, hi), [slope * hi, -slope]))
    return FunctionSpec.piecewise(pieces, UNIT, name="hats_" + word)


def hat_width_exponent(l: Modulus, n: int) -> int | None:
    """Largest ``k`` such that hats of height ``2**(3-n)`` on cells ``2**-k`` stay in ``fk(l, p)``.

    For ``m <= n - 4`` the shift bound ``2 ||f||_p < 2**(4-n) <= 2**-m`` holds.
    Otherwise ``||f - tau_y f||_p <= |y| ||f'||_p <= 2**(-l(m)) 2**(4-n+k)``,
    which is below ``2**-m`` iff ``k < l(m) - m + n - 4``.
    """
    excess = min_excess(l, n - 3)
    if excess is None:
        return None
    return excess + n - 5


def fk_spanning(l: Modulus, p: int, n: int, max_words: int | None = None) -> HatFamily:
    """Hat functions indexed by a greedy code, pairwise at least ``2**-n`` apart in Lp.

    Hats of height ``h = 2**(3-n)`` sit on ``N = 2**k`` cells of width
    ``2**-k`` (``k`` from :func:`hat_width_exponent`); the code has
    minimum distance ``N/4``, so two members differ in at least ``N/4`` hats
    and ``||f_a - f_b||_p >= h (1 / (4 (p+1)))**(1/p) >= 2**-n``.
    """
    if n < 3:
        raise EntropyError("the hat family needs n >= 3")
    k = hat_width_exponent(l.with_kind("lp", p), n)
    if k is None or k < 2:
        raise EntropyError(f"modulus too small at n={n}: fewer than four hat cells fit")
    length = 2**k
    code = greedy_code(length, length // 4)
    words = code.words if max_words is None else code.words[:max_words]
    return HatFamily(p, n, _pow2(3 - n), k, code, words)


def fk_member_certificate(family: HatFamily, word: str, l: Modulus, horizon: int = 64) -> bool:
    """Exact check of the derivative route for one member over ``m <= horizon``.

    Beyond the table of ``l`` both sides scale the same way, so a horizon past
    the table decides all ``m``.
    """
    p = family.p
    deriv = family.derivative_norm_power(word)
    norm_bound = family.height**p  # ||f||_p**p <= h**p * (#hats) w / (p+1) < h**p
    for m in range(max(horizon, len(l.table) + 2)):
        target = _pow2(-m * p)
        if 2**p * norm_bound < target:
            continue
        if not _pow2(-l(m) * p) * deriv < target:
            return False
    return True


def reference_hat_parameters(l: Modulus, p: int, n: int) -> dict:
    """The unadjusted parameters ``h = (p+1)**(1/p) 2**(1-n)`` and ``w = 2**-l(n-3)`` for p = 1.

    Returns the exact L1 distance of two members differing in ``N/4`` hats
    and the largest derivative norm, for comparison with the adjusted family.
    """
    if p != 1:
        raise EntropyError("the unadjusted height is rational only for p = 1")
    height = 2 * _pow2(1 - n)
    width = _pow2(-l(n - 3))
    cells = 2 ** l(n - 3)
    quarter = cells // 4
    return {
        "height": height,
        "width": width,
        "cells": cells,
        "distance_at_quarter": quarter * height * width / 2,
        "max_derivative_norm": cells * 2 * height,
        "derivative_threshold": _pow2(l(n - 3) - n + 3),
    }


# -- Lp covering via continuous approximations ----------------------------------------------------


def sample_hat_members(l: Modulus, p: int, count: int, seed: int = 0, cell_exponent: int = 4) -> list[FunctionSpec]:
    """Random hat combinations with ``||f'||_p < 2**c``, ``c = min (l(m) - m)``.

    Such a function has Lp-modulus ``l``: ``||f - tau_y f||_p <= |y| ||f'||_p``.
    """
    c = min_excess(l, 0)
    if c is None:
        raise EntropyError("only the zero function has a bounded Lp-modulus of slope zero")
    rng = random.Random(seed)
    cells = 2**cell_exponent
    width = Fraction(1, cells)
    target_power = (_pow2(c) * Fraction(63, 64)) ** p
    out = []
    for s in range(count):
        heights = [Fraction(rng.randint(-8, 8)) for _ in range(cells)]
        if not any(heights):
            out.append(FunctionSpec.zero(1, [((ZERO, ONE),)]))
            continue
        deriv_power = sum(width * abs(2 * h / width) ** p for h in heights)
        scale = Fraction(1)
        while scale**p * deriv_power >= target_power:
            scale /= 2
        while (scale * Fraction(5, 4)) ** p * deriv_power < target_power:
            scale *= Fraction(5, 4)
        pieces = []
        for i, h in enumerate(heights):
            if not h:
                continue
            h = h * scale
            lo, mid, hi = i * width, (i + Fraction(1, 2)) * width, (i + 1) * width
            slope = h / (mid - lo)
            pieces.append(((lo, mid), [-slope * lo, slope]))
            pieces.append(((mid, hi), [slope * hi, -slope]))
        out.append(FunctionSpec.piecewise(pieces, UNIT, name=f"hat_member_{s}"))
    return out


def hat_member_derivative_power(f: FunctionSpec, p: int) -> Fraction:
    return weak_derivative(f).lp_power(p).value


@dataclass
class FKCoverReport:
    n: int
    p: int
    approximation_index: int
    derived_modulus: Modulus
    sup_exponent: int
    net_count_exponent: int
    members: int
    worst_lp_power: Fraction
    worst_sup: Fraction
    covered: bool
    upper_formula: int
    upper_formula_holds: bool
    failures: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "n": self.n, "p": self.p, "approximation_index": self.approximation_index,
            "derived_modulus": self.derived_modulus.to_json(), "sup_exponent": self.sup_exponent,
            "net_count_exponent": self.net_count_exponent, "members": self.members,
            "worst_lp_power": str(self.worst_lp_power), "worst_sup": str(self.worst_sup),
            "covered": self.covered, "upper_formula": self.upper_formula,
            "upper_formula_holds": self.upper_formula_holds, "failures": self.failures,
        }


def fk_net(l: Modulus, p: int, n: int, d: int = 1) -> tuple[PathNet, int]:
    """The supremum-norm net that covers ``fk(l, p)`` at Lp radius ``2**-n``.

    Members are first replaced by cell averages at index ``m = l(n+1)``,
    which lie within ``2**(-n-1)`` in Lp, have modulus of continuity
    ``j -> j + 1 + ceil(d/p) m`` and supremum below ``2**(ceil(d m / p) + l(0))``.
    The returned net works at level ``n + 1``.
    """
    m = l(n + 1)
    shift = -(-d // p)
    derived = Modulus.affine(1, 1 + shift * m, "continuity")
    sup_exponent = -(-(d * m) // p) + l(0)
    return PathNet(derived, sup_exponent), m


def fk_upper_formula(l: Modulus, p: int, n: int, d: int = 1) -> int:
    """``2**(l(n + 2 + ceil(d/p) l(n+1)) + 1) + n + l(1 + ceil(d/p) l(1)) + 2``."""
    shift = -(-d // p)
    return 2 ** (l(n + 2 + shift * l(n + 1)) + 1) + n + l(1 + shift * l(1)) + 2


def fk_cover(
    l: Modulus, p: int, n: int, d: int = 1, members: Sequence[FunctionSpec] | None = None,
    samples: int = 100, seed: int = 0,
) -> FKCoverReport:
    """Cover members of ``fk(l, p)`` and certify ``||f - g||_p < 2**-n`` exactly."""
    if d != 1:
        raise EntropyError("the covering construction is implemented for d = 1")
    l = l.with_kind("lp", p)
    net, m = fk_net(l, p, n, d)
    if members is None:
        members = sample_hat_members(l, p, samples, seed)
    level = n + 1
    bound = _pow2(-n * p)
    worst_power, worst_sup = ZERO, ZERO
    failures = []
    for i, f in enumerate(members):
        smooth = continuous_approximation(f, m).restricted(ZERO, ONE)
        found = net.nearest(smooth, level)
        if found is None:
            failures.append({"member": i, "reason": "no net element within the radius"})
            continue
        index, sup_error = found
        g = net.element(level, index)
        power = (f - g).lp_power(p)
        worst_power = max(worst_power, power.hi)
        worst_sup = max(worst_sup, sup_error)
        if not power.below(bound):
            failures.append({"member": i, "lp_power": str(power.hi)})
    exponent = net.index_width(level)
    upper = fk_upper_formula(l, p, n, d)
    return FKCoverReport(n, p, m, net.modulus, net.sup_exponent, exponent, len(members),
                         worst_power, worst_sup, not failures, upper, exponent <= upper, failures)


def fit_exponential_constants(exponents: dict[int, int], l: Modulus, d: int = 1) -> dict:
    """Smallest ``(A, B, C)`` with ``nu(n) <= 2**(A l(n+d+1) + l(0) + B) + n + C`` on the data."""
    def slack(a: int, b: int) -> int:
        return max(0, max(nu - (2 ** max(a * l(n + d + 1) + l(0) + b, 0) + n)
                          for n, nu in exponents.items()))

    for a in range(1, 7):
        for b in range(-8, 9):
            if slack(a, b) == 0:
                return {"A": a, "B": b, "C": 0}
    return {"A": 6, "B": 8, "C": slack(6, 8)}


# -- representation from a net ---------------------------------------------------------------------


class TableNet:
    """Finite nets per level with an exact pairwise distance table."""

    def __init__(self, levels: Sequence[Sequence[FunctionSpec]], distance: Callable | None = None) -> None:
        self.levels = [list(level) for level in levels]
        measure = distance or (lambda f, g: (f - g).sup_abs().value)
        self.table = [
            [[measure(f, g) for g in level] for f in level] for level in self.levels
        ]
        self.sup_exponent = max(
            (ceil_lb(max(v for row in t for v in row) + 1) for t in self.table if t), default=0
        )
        self._measure = measure

    def count(self, n: int) -> int:
        return len(self.levels[min(n, len(self.levels) - 1)])

    def index_width(self, n: int) -> int:
        return max(_ceil_lb_int(self.count(n)), 1)

    def distance(self, n: int, i: int, j: int) -> Fraction:
        return self.table[min(n, len(self.levels) - 1)][i][j]

    def nearest(self, f, n: int):
        level = self.levels[min(n, len(self.levels) - 1)]
        scores = [self._measure(f, g) for g in level]
        best = min(range(len(level)), key=lambda i: (scores[i], i))
        return best, scores[best]


@dataclass
class NetRepresentation:
    """Cauchy-style representation over a net, with a distance oracle.

    A name answers ``1**n`` with the index (fixed width, binary) of a net
    element within ``2**-n``.  The distance oracle answers
    ``<1**n, <i, j>>`` with the distance of elements ``i, j`` of level ``n``,
    rounded to ``2**(-n-2)``.
    """

    net: object
    length: Callable[[int], int]

    def index_width(self, n: int) -> int:
        return self.net.index_width(n)

    def declared_length(self, q: int) -> int:
        return max(self.index_width(q), self.length(q))

    def _rank(self, f, n: int) -> int:
        found = self.net.nearest(f, n)
        if found is None:
            raise EntropyError("function is not covered by the net")
        index, _ = found
        return self.net.rank(n, index) if isinstance(self.net, PathNet) else index

    def name_of(self, f) -> Name:
        cache: dict[int, str] = {}

        def raw(a: str) -> str:
            n = parse_unary(a)
            if n is None:
                return ""
            if n not in cache:
                cache[n] = format(self._rank(f, n), f"0{self.index_width(n)}b")
            return cache[n]

        return Name(raw, self.declared_length, meta={"kind": "net"})

    def oracle_length(self, q: int) -> int:
        magnitude = self.net.sup_exponent + 2
        return 2 * magnitude + 2 * (q + 2) + 4

    def distance_oracle(self) -> Name:
        def raw(a: str) -> str:
            parts = split_query(a, 3)
            if parts is None:
                return ""
            n = parse_unary(parts[0])
            if n is None:
                return ""
            width = self.index_width(n)
            i, j = int(parts[1][:width] or "0", 2), int(parts[2][:width] or "0", 2)
            if max(i, j) >= self.net.count(n):
                return ""
            return encode_dyadic(Dyadic.round(self.net.distance(n, i, j), n + 2))

        return Name(raw, self.oracle_length, meta={"kind": "distance-oracle"})

    def metric(self, phi: Name, psi: Name, oracle: Name, n: int) -> tuple[Fraction, dict]:
        """Distance of the named functions within ``2**-n``: three oracle queries."""
        k = n + 2
        width = self.index_width(k)
        a = phi.query(unary(k), tag="name")[:width]
        b = psi.query(unary(k), tag="name")[:width]
        answer = oracle.query(pair(unary(k), pair(a, b)), tag="distance")
        value = decode_dyadic(answer).to_fraction()
        traces = [phi.trace, psi.trace, oracle.trace]
        summary = {
            "queries": sum(t.queries for t in traces),
            "answer_bits": sum(t.answer_bits for t in traces),
            "max_answer_len": max(t.summary()["max_answer_len"] for t in traces),
        }
        return value, summary


def cauchy_rep_from_net(net, length: Callable[[int], int] | Modulus | None = None) -> NetRepresentation:
    """Representation whose names list net indices, padded to ``length``."""
    if length is None:
        length = net.index_width
    return NetRepresentation(net, length)


def metric_query_bound(rep: NetRepresentation, trace, n: int, a: int = 1, b: int = 2, c: int = 0):
    """Compare a trace against ``2**(A L(n + B) + C n)`` for the declared length ``L``."""
    return check_exponential_bound(trace, a, b, c, rep.declared_length, n)


# -- entropy tables ----------------------------------------------------------------------------


TABLE_COLUMNS = (
    "n", "spanning_exponent", "net_exponent", "lower_formula", "upper_formula",
    "spanning_le_net", "formula_sandwich",
)


@dataclass
class EntropyTable:
    compact: CompactClass
    rows: list[dict]

    @property
    def ok(self) -> bool:
        return all(r["spanning_le_net"] and r["formula_sandwich"] for r in self.rows)

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.DictWriter(out, fieldnames=TABLE_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: (int(v) if isinstance(v, bool) else v) for k, v in row.items()})
        return out.getvalue()


def _aa_spanning_exponent(compact: CompactClass, n: int) -> int:
    """Exponent of a witnessed family with pairwise distance at least ``2**(-n+1)``."""
    if n >= 2:
        k = bump_slot_exponent(compact.modulus, n - 2)
        slots = 0 if k is None else 2**k
        return slots if compact.anchored else slots + n + compact.sup_exponent
    # constants spaced 2**(1-n) inside [-2**C, 2**C]
    return 0 if compact.anchored else compact.sup_exponent + n


def lipschitz_size_formula(lipschitz_exponent: int, n: int) -> int:
    """``ceil(lb(3) 2**(n + L))`` computed exactly as ``ceil(lb(3**(2**(n + L))))``."""
    return _ceil_lb_int(3 ** (2 ** (n + lipschitz_exponent)))


def entropy_table(compact: CompactClass, n_range: Sequence[int]) -> EntropyTable:
    """Witnessed spanning exponent, net exponent and the reference formulas per ``n``."""
    rows = []
    for n in n_range:
        if compact.kind == "fk":
            rows.append(_fk_row(compact, n))
            continue
        net = PathNet.for_class(compact)
        nu = net.index_width(n)
        eta = _aa_spanning_exponent(compact, n)
        l, c = compact.modulus, compact.sup_exponent
        if compact.anchored:
            lower = upper = lipschitz_size_formula(compact.lipschitz_exponent, n)
        else:
            lower = 2 ** (l(max(n - 2, 0)) + min(n - 2, 0)) + n + c if n >= 2 else n + c
            upper = aa_cover_bound_exponent(l, c, n)
        rows.append({
            "n": n, "spanning_exponent": eta, "net_exponent": nu,
            "lower_formula": lower, "upper_formula": upper,
            "spanning_le_net": eta <= nu, "formula_sandwich": lower <= nu <= upper,
        })
    return EntropyTable(compact, rows)


def _fk_row(compact: CompactClass, n: int) -> dict:
    l, p = compact.modulus, compact.p
    net, _ = fk_net(l, p, n)
    nu = net.index_width(n + 1)
    eta = 0
    if n >= 3:
        k = hat_width_exponent(l, n)
        if k is not None and k >= 2:
            size = len(greedy_code(2**k, 2**k // 4)) if 2**k <= 24 else None
            eta = (size.bit_length() - 1) if size else 0
    lower = max(2 ** (l(n - 3) - 4) - 1, 0) if n >= 3 else 0
    upper = fk_upper_formula(l, p, n)
    return {
        "n": n, "spanning_exponent": eta, "net_exponent": nu,
        "lower_formula": lower, "upper_formula": upper,
        "spanning_le_net": eta <= nu, "formula_sandwich": lower <= nu <= upper,
    }


__all__ = [
    "CodeSet",
    "CompactClass",
    "CoverReport",
    "EntropyError",
    "EntropyTable",
    "FKCoverReport",
    "HatFamily",
    "LinearPath",
    "NetRepresentation",
    "PathIndex",
    "PathNet",
    "PieceTable",
    "SpanningFamily",
    "TableNet",
    "aa_cover",
    "aa_cover_bound_exponent",
    "aa_cover_count",
    "aa_family_member",
    "aa_member",
    "aa_spanning",
    "bump_slot_exponent",
    "cauchy_rep_from_net",
    "certify_aa_cover",
    "entropy_table",
    "extreme_aa_members",
    "fit_exponential_constants",
    "fk_cover",
    "fk_member_certificate",
    "fk_net",
    "fk_spanning",
    "fk_upper_formula",
    "greedy_code",
    "hat_function",
    "hat_width_exponent",
    "linear_sup_distance",
    "lipschitz_size_formula",
    "metric_query_bound",
    "min_excess",
    "reference_hat_parameters",
    "sample_aa_members",
    "sample_hat_members",
    "spanning_distance",
]

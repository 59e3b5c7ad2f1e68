"""Algorithms on names: integration, evaluation, translations, Sobolev
embeddings, differentiation and the exponential-time norm.

Every algorithm reads the function only through the oracle interface of its
input names; the ground-truth :class:`FunctionSpec` a name carries is used
solely to label output names for later validation.  Query accounting is
recorded on the traces of the names that were asked.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .corpus import oscillator
from .dyadic import (
    Dyadic,
    as_fraction,
    ceil_log2,
    iter_bitstrings,
    pair,
    encode_dyadic,
    unary,
)
from .moduli import (
    Modulus,
    ceil_lb,
    characteristic_modulus,
    continuity_to_lp,
    lp_of_derivative_to_continuity,
    lp_to_singularity,
)
from .names import BudgetExceeded, Trace
from .poly import Poly, sign_runs, sum_over_range
from .representations import (
    CauchyName,
    ContinuousName,
    FunctionName,
    GridStepFunction,
    IntegralName,
    MollifiedName,
    RealName,
    RepKind,
    Run,
    make_xr_name,
)
from .symbolic import FunctionSpec, SymbolicError, weak_derivative


class OperatorError(ValueError):
    pass


class TranslationError(OperatorError):
    pass


@dataclass
class Certificate:
    """Machine-readable record of what an operator claims and what it cost."""

    operator: str
    claimed_error_exponent: int | None
    trace_summary: dict
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "operator": self.operator,
            "claimed_error_exponent": self.claimed_error_exponent,
            "trace_summary": self.trace_summary,
            "details": {k: _jsonable(v) for k, v in self.details.items()},
        }


@dataclass
class Result:
    value: object
    certificate: Certificate


def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, Dyadic):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def merged_summary(traces: Sequence[Trace]) -> dict:
    """Sum of several trace summaries."""
    out = {"queries": 0, "answer_bits": 0, "query_bits": 0, "max_answer_len": 0,
           "max_query_len": 0, "tags": {}}
    for trace in traces:
        s = trace.summary()
        for key in ("queries", "answer_bits", "query_bits"):
            out[key] += s[key]
        for key in ("max_answer_len", "max_query_len"):
            out[key] = max(out[key], s[key])
        for tag, count in s["tags"].items():
            out["tags"][tag] = out["tags"].get(tag, 0) + count
    return out


def _clamp(x: Fraction, lo: Fraction, hi: Fraction) -> Fraction:
    return min(max(x, lo), hi)


UNIT_LO, UNIT_HI = Fraction(0), Fraction(1)


# -- integration and evaluation -------------------------------------------------------


def _real_names(point, d: int) -> list[RealName]:
    if d == 1 and not isinstance(point, (list, tuple)):
        point = [point]
    if len(point) != d:
        raise OperatorError(f"expected a point with {d} coordinates")
    return [p if isinstance(p, RealName) else make_xr_name(as_fraction(p)) for p in point]


def singularity_modulus(phi: IntegralName) -> Modulus:
    """A singularity modulus readable from an integral name."""
    if phi.kind == RepKind.XS.value:
        return phi.modulus
    if phi.kind == RepKind.XP.value and phi.order == 0:
        f = phi.function
        return lp_to_singularity(phi.modulus, f.domain_measure(), f.domain_diameter(), phi.d)
    raise OperatorError("integration needs an xs or xp name; embed Sobolev names first")


def integrate(phi: IntegralName, x, y, n: int) -> Result:
    """``2**-n`` approximation of the integral of ``f`` over the box spanned by ``x`` and ``y``.

    Endpoints are real names (or exact values, which get wrapped); each is
    asked once at precision ``sigma(n + 2 + ceil lb d)`` and the name is asked
    once at precision ``n + 1``.
    """
    if phi.kind in (RepKind.XMP.value,) or (phi.kind == RepKind.XP.value and phi.order > 0):
        phi = sobolev_to_lp(phi)
    sigma = singularity_modulus(phi)
    d = phi.d
    xs, ys = _real_names(x, d), _real_names(y, d)
    precision = sigma(n + 2 + ceil_log2(d) if d > 1 else n + 2)
    xa = [r.approx(precision, tag="endpoint").to_fraction() for r in xs]
    ya = [r.approx(precision, tag="endpoint").to_fraction() for r in ys]
    before = phi.trace.queries
    if d == 1:
        value = phi.integral(xa[0], ya[0], n + 1)
    else:
        value = phi.integral(tuple(xa), tuple(ya), n + 1)
    cert = Certificate(
        "integrate", n, merged_summary([phi.trace] + [r.trace for r in xs + ys]),
        {"endpoint_precision": precision, "name_queries": phi.trace.queries - before,
         "endpoint_queries": 2 * d},
    )
    return Result(value, cert)


def evaluate(phi: ContinuousName, x, n: int) -> Result:
    """``2**-n`` approximation of ``f(x)`` from an ``xc`` name and a real name."""
    mu = phi.modulus
    (xr,) = _real_names(x, 1)
    precision = mu(n + 1)
    xa = xr.approx(precision, tag="endpoint").to_fraction()
    value = phi.value(xa, n + 1)
    cert = Certificate("evaluate", n, merged_summary([phi.trace, xr.trace]),
                       {"point_precision": precision})
    return Result(value, cert)


# -- names computed from other names -----------------------------------------------------


class ComputedContinuousName(ContinuousName):
    """``xc`` name whose answers come from a callback."""

    def __init__(self, function: FunctionSpec, modulus: Modulus, magnitude_bits: int,
                 compute: Callable[[Fraction, int], Dyadic], meta: dict) -> None:
        self._callback = compute
        FunctionName.__init__(self, function, modulus,
                              lambda q: 2 * q + 2 * magnitude_bits + 12, meta=meta)

    def _compute(self, x: Fraction, n: int) -> Dyadic:
        value = self._callback(x, n)
        if self.answer_offset is not None:
            value = Dyadic.coerce(value.to_fraction() + self.answer_offset(n))
        return value


class ComputedIntegralName(IntegralName):
    """Integral name whose answers come from a callback; no grid queries."""

    def __init__(self, function: FunctionSpec, modulus: Modulus, kind: str, p: int | None,
                 order: int, wire: Callable[[int], int],
                 compute: Callable[[object, object, int], Dyadic], meta: dict) -> None:
        self.kind = kind
        self.p = p
        self.order = order
        self.d = function.d
        self._approximants = {}
        self._exact_cumulative = None
        self._callback = compute
        FunctionName.__init__(self, function, modulus, wire, meta=meta)

    def approximant(self, n: int):
        raise OperatorError("computed names answer point queries only")

    def grid_integrals(self, *args, **kwargs):
        raise OperatorError("computed names answer point queries only")

    def _compute(self, x, y, n: int) -> Dyadic:
        value = self._callback(x, y, n)
        if self.answer_offset is not None:
            value = Dyadic.coerce(value.to_fraction() + self.answer_offset(n))
        return value


# -- Cauchy translations ---------------------------------------------------------------


def _ceil_p(p: int) -> int:
    return int(p)


def cauchy_to_xp(phi: CauchyName, p: int | None = None, measure=None) -> ComputedIntegralName:
    """Translate a Cauchy name into an ``xp`` name of the same function.

    The output's Lp-modulus at ``n`` is the running maximum (made strictly
    increasing) of ``r(n) = ceil(p)(d-1)max(l,0) + k + ceil lb d + ceil(p)(m+n+2) + 1``
    where ``2**k`` boxes of side ``2**l`` with values ``2**m`` describe the
    approximant ``phi(1**(n+2))``.
    """
    p = phi.p if p is None else p
    d = phi.d
    f = phi.function
    box = f.bounding_box()
    lam = as_fraction(measure) if measure is not None else f.domain_measure()
    c_shift = max(ceil_lb(lam), 0) if lam > 0 else 0
    cp = _ceil_p(p)
    lb_d = ceil_log2(d) if d > 1 else 0
    mu_values: list[int] = []
    m_values: list[int] = []

    def r_value(n: int) -> int:
        k, l, m = phi.envelope(n + 2).k, phi.envelope(n + 2).l, phi.envelope(n + 2).m
        return cp * (d - 1) * max(l, 0) + k + lb_d + cp * (m + n + 2) + 1

    def mu(q: int) -> int:
        while len(mu_values) <= q:
            n = len(mu_values)
            r = r_value(n)
            if mu_values:
                r = max(r, mu_values[-1] + 1)
            mu_values.append(r)
        return mu_values[q]

    def max_value_bits(n: int) -> int:
        while len(m_values) <= n:
            prev = m_values[-1] if m_values else 0
            m_values.append(max(prev, phi.envelope(len(m_values)).m))
        return m_values[n]

    def wire(q: int) -> int:
        bits = c_shift + max_value_bits(q + 1 + c_shift) + 1
        return 2 * bits + 2 * (q + 2) + 4

    steps: dict[int, FunctionSpec] = {}

    def step_spec(level: int) -> FunctionSpec:
        if level not in steps:
            step = phi.step_function(level, tag="cauchy")
            if step.d != d:
                raise TranslationError("step function has the wrong dimension")
            try:
                steps[level] = step.to_function()
            except SymbolicError as exc:
                raise TranslationError(f"malformed step function: {exc}") from exc
        return steps[level]

    def compute(x, y, n: int) -> Dyadic:
        spec = step_spec(n + 1 + c_shift)
        if d == 1:
            lo, hi = box[0]
            a, b = _clamp(x, lo, hi), _clamp(y, lo, hi)
            value = spec.integral(((min(a, b), max(a, b)),))
            value = value if a <= b else -value
        else:
            clipped = tuple((_clamp(min(u, v), lo, hi), _clamp(max(u, v), lo, hi))
                            for u, v, (lo, hi) in zip(x, y, box))
            value = spec.integral(clipped)
        return Dyadic.round(value, n + 2)

    table = [mu(q) for q in range(13)]
    modulus = Modulus.from_values(table, "lp", p)
    name = ComputedIntegralName(
        f, modulus, RepKind.XP.value, p, 0, wire, compute,
        meta={"kind": "xp", "from": "cauchy", "function": f.name, "p": p},
    )
    name._length = lambda q: max(mu(q), wire(q))
    base_integral = name.integral

    def integral(x, y, n: int, tag: str = "integral") -> Dyadic:
        q = name.query_length(Dyadic.coerce(as_fraction(x)).to_fraction() if d == 1 else x,
                              Dyadic.coerce(as_fraction(y)).to_fraction() if d == 1 else y, n)
        phi.trace.record(q + 2, phi.length(q + 2), "cauchy-header", q + 1)
        return base_integral(x, y, n, tag)

    name.integral = integral
    return name


def translation_constants(phi: IntegralName, n: int, measure=None) -> dict:
    """``C, N, k, M`` of the translation into step functions."""
    f = phi.function
    lam = as_fraction(measure) if measure is not None else f.domain_measure()
    c = ceil_lb(lam)
    d = phi.d
    mu = phi.modulus
    big_n = mu(n + 1)
    k = d * big_n + n + 2
    spread = -(-(d * (big_n + c)) // phi.p)
    big_m = mu(n + spread + 2)
    return {"C": c, "N": big_n, "k": k, "M": big_m}


def _grid_range(lo: Fraction, hi: Fraction, h: Fraction) -> tuple[int, int]:
    """Indices ``j`` whose cell ``[j h - h/2, j h + h/2]`` meets ``(lo, hi)``."""
    a = lo / h - Fraction(1, 2)
    first = a.numerator // a.denominator + 1
    b = hi / h + Fraction(1, 2)
    last = -((-b.numerator) // b.denominator) - 1
    return first, last


def xp_to_cauchy(phi: IntegralName, n: int, measure=None, route: str = "bulk",
                 max_points: int = 1 << 16, budget: int | None = None) -> Result:
    """Step function ``F`` with ``||f - F||_p < 2**-n`` built from cell integrals.

    The value on the cell of ``z = j 2**-M`` is ``2**(dN)`` times the answer to
    ``<z - 2**(-N-1), <z + 2**(-N-1), 1**k>>``.  ``route="bulk"`` obtains all
    answers as polynomial runs in ``j``; ``route="pointwise"`` asks one query per cell.
    The trace counts one query per cell either way; ``budget`` replaces the
    name's budget for this call (a fresh trace is used).
    """
    if phi.d != 1:
        raise OperatorError("step-function translation is implemented for d = 1")
    if phi.kind != RepKind.XP.value or phi.order != 0:
        raise OperatorError("need an xp name")
    if budget is not None:
        phi = phi.fresh(budget)
    consts = translation_constants(phi, n, measure)
    big_n, k, big_m = consts["N"], consts["k"], consts["M"]
    h = Fraction(1, 2**big_m)
    delta = Fraction(1, 2 ** (big_n + 1))
    (lo, hi), = phi.function.bounding_box()
    first, last = _grid_range(lo, hi, h)
    scale = Fraction(2**big_n)
    if route == "bulk":
        runs = phi.grid_integrals(h, -delta, delta, first, last, k, tag="cell-integral")
        runs = [(a, b, tuple(scale * c for c in coeffs)) for a, b, coeffs in runs]
    elif route == "pointwise":
        if last - first + 1 > max_points:
            raise BudgetExceeded(f"{last - first + 1} cells exceed the pointwise cap {max_points}")
        runs: list[Run] = []
        for j in range(first, last + 1):
            z = j * h
            v = scale * phi.integral(z - delta, z + delta, k, tag="cell-integral").to_fraction()
            if runs and runs[-1][2] == (v,) and runs[-1][1] == j - 1:
                runs[-1] = (runs[-1][0], j, (v,))
            else:
                runs.append((j, j, (v,)))
    else:
        raise OperatorError(f"unknown route {route!r}")
    grid = GridStepFunction(big_m, runs, (lo, hi))
    cert = Certificate("xp_to_cauchy", n, phi.trace.summary(),
                       dict(consts, cells=last - first + 1, route=route))
    return Result(grid, cert)


# -- Sobolev spaces ---------------------------------------------------------------------


def _require_sobolev(phi: IntegralName, order: int | None = None) -> None:
    if phi.d != 1:
        raise OperatorError("Sobolev names are one-dimensional")
    if phi.order < 1:
        raise OperatorError("need a Sobolev name of order at least one")
    if order is not None and phi.order != order:
        raise OperatorError(f"need order {order}, got {phi.order}")


def _unit_clamp(x) -> Fraction:
    return _clamp(as_fraction(x), UNIT_LO, UNIT_HI)


def _first_order(phi: IntegralName) -> IntegralName:
    """Embed down to order one, where the modulus concerns the first derivative."""
    _require_sobolev(phi)
    while phi.order > 1:
        phi = sobolev_embed(phi)
    return phi


def sup_norm_bound(phi: IntegralName) -> Result:
    """Integer ``Q'`` with ``sup |f| <= 2**Q'`` from a name of order one or more."""
    first = _first_order(phi)
    mu_c = lp_of_derivative_to_continuity(first.modulus)
    v = first.integral(UNIT_LO, UNIT_HI, 0, tag="sup-bound").to_fraction()
    q = ceil_log2(abs(v) + 1)
    bound = max(mu_c(0), q) + 1
    cert = Certificate("sup_norm_bound", None, first.trace.summary(),
                       {"Q": q, "continuity_at_0": mu_c(0), "bound_exponent": bound})
    return Result(bound, cert)


def sobolev_to_continuous(phi: IntegralName) -> ComputedContinuousName:
    """``xc`` name of the continuous representative of a Sobolev function.

    With ``t = mu_c(n+1)`` the answer is ``2**t`` times the integral over an
    interval of length ``2**-t`` containing ``x`` inside ``[0, 1]``, asked at
    precision ``t + n + 3`` and rounded to ``2**-(n+2)``.
    """
    first = _first_order(phi)
    mu_c = lp_of_derivative_to_continuity(first.modulus)
    bound = sup_norm_bound(first).value

    def compute(x: Fraction, n: int) -> Dyadic:
        t = mu_c(n + 1)
        width = Fraction(1, 2**t)
        x = _unit_clamp(x)
        a = _clamp(x - width / 2, UNIT_LO, UNIT_HI - width)
        v = first.integral(a, a + width, t + n + 3, tag="mean-value").to_fraction()
        return Dyadic.round(v * 2**t, n + 2)

    return ComputedContinuousName(
        phi.function, mu_c, bound + 1, compute,
        meta={"kind": "xc", "from": "sobolev", "function": phi.function.name},
    )


def _clamped_integral(source: IntegralName, tag: str):
    def compute(x, y, n: int) -> Dyadic:
        return source.integral(_unit_clamp(x), _unit_clamp(y), n, tag=tag)
    return compute


def sobolev_to_lp(phi: IntegralName) -> ComputedIntegralName:
    """``xp`` name of a function given by a name of order one.

    Lp-modulus ``max{mu_c(n + 1), nu(n + Q' + 1)}`` with ``mu_c(n) = mu(n+1)``,
    ``nu(m) = p m + 2`` for the characteristic function of ``[0, 1]`` and
    ``2**Q'`` the supremum bound.
    """
    first = _first_order(phi)
    p = first.p
    mu_c = lp_of_derivative_to_continuity(first.modulus)
    bound = sup_norm_bound(first).value
    eta = continuity_to_lp(mu_c, characteristic_modulus(p), bound, 1, p)
    return ComputedIntegralName(
        phi.function, eta, RepKind.XP.value, p, 0, first.length,
        _clamped_integral(first, "integral"),
        meta={"kind": "xp", "from": "sobolev", "function": phi.function.name, "p": p,
              "sup_exponent": bound},
    )


def mean_value_bound(m: int, c) -> Fraction:
    """Bound ``2**(m*m - 1) C`` on ``|f^(m-1)(z)|`` at some point ``z``."""
    return Fraction(2) ** (m * m - 1) * as_fraction(c)


def sobolev_embed(phi: IntegralName) -> ComputedIntegralName:
    """Name of order ``m - 1`` from a name of order ``m``.

    For ``m = 1`` this is :func:`sobolev_to_lp`.  For ``m >= 2`` the averages
    over the ``2**(m-1)`` intervals ``[2i 2**-m, (2i+1) 2**-m]`` bound ``|f|``
    at points of pairwise distance at least ``2**-m``; the mean-value bound and
    the modulus of continuity ``mu(n+1)`` of ``f^(m-1)`` then bound its
    supremum by ``2**Q`` and ``max{mu(n+2), nu(n+Q+1)}`` is its Lp-modulus.
    """
    _require_sobolev(phi)
    m = phi.order
    if m == 1:
        return sobolev_to_lp(phi)
    p = phi.p
    mu_c = lp_of_derivative_to_continuity(phi.modulus)
    width = Fraction(1, 2**m)
    c = Fraction(0)
    for i in range(2 ** (m - 1)):
        v = phi.integral(2 * i * width, (2 * i + 1) * width, 0, tag="mean-value").to_fraction()
        c = max(c, 2**m * (abs(v) + 1))
    top = mean_value_bound(m, c)
    q = max(mu_c(0), ceil_log2(top)) + 1
    eta = continuity_to_lp(mu_c, characteristic_modulus(p), q, 1, p)
    kind = RepKind.XMP.value if m - 1 >= 1 else RepKind.XP.value
    return ComputedIntegralName(
        phi.function, eta, kind, p, m - 1, phi.length, _clamped_integral(phi, "integral"),
        meta={"kind": kind, "from": "embed", "function": phi.function.name, "p": p,
              "m": m - 1, "C": str(c), "sup_exponent": q},
    )


def sobolev_to_lp_any(phi: IntegralName) -> IntegralName:
    """Repeated embedding down to an ``xp`` name."""
    while phi.order > 0:
        phi = sobolev_embed(phi)
    return phi


def differentiate(phi: IntegralName, k: int = 1) -> IntegralName:
    """Name of order ``m - k`` of the ``k``-th weak derivative."""
    if k < 0 or k > phi.order:
        raise OperatorError(f"cannot differentiate {k} times a name of order {phi.order}")
    for _ in range(k):
        phi = _differentiate_once(phi)
    return phi


def _differentiate_once(phi: IntegralName) -> ComputedIntegralName:
    values = sobolev_to_continuous(phi)
    bound = sup_norm_bound(phi).value
    try:
        derivative = weak_derivative(phi.function)
    except SymbolicError:
        derivative = phi.function
    magnitude = bound + 2

    def compute(x, y, n: int) -> Dyadic:
        a, b = _unit_clamp(x), _unit_clamp(y)
        return values.value(b, n + 1) - values.value(a, n + 1)

    kind = RepKind.XMP.value if phi.order - 1 >= 1 else RepKind.XP.value
    return ComputedIntegralName(
        derivative, phi.modulus, kind, phi.p, phi.order - 1,
        lambda q: 2 * magnitude + 2 * (q + 3) + 4, compute,
        meta={"kind": kind, "from": "differentiate", "function": derivative.name, "p": phi.p,
              "m": phi.order - 1},
    )


# -- the norm from mollified approximations -----------------------------------------------


def minimal_a(box) -> int:
    """Least ``A >= 0`` such that the domain is at distance more than one from
    the complement of ``[-2**A, 2**A]**d``."""
    reach = max(max(abs(Fraction(lo)), abs(Fraction(hi))) for lo, hi in box)
    a = 0
    while Fraction(2) ** a - reach <= 1:
        a += 1
    return a


def norm_constants(mu: Modulus, p: int, a: int, n: int, d: int = 1) -> dict:
    """Mollifier index ``N``, answer precision ``k`` and grid exponent ``M``.

    ``M_reference = d(N-1) + N + A + mu(0) + ceil lb d`` is the textbook grid
    exponent; ``M`` adds what a strict ``2**-n`` bound needs: the precision
    ``n``, the measure of the grid region and the L1 bound ``2**B`` obtained
    from the norm estimate.
    """
    lb_d = ceil_log2(d) if d > 1 else 0
    big_n = mu(n + d + 1)
    mu0 = mu(0)
    b1 = mu0 + (a + 1) + lb_d + d * (a + 1)
    region = -(-(d * (a + 2)) // p)
    big_m = d * (big_n - 1) + big_n + b1 + ceil_log2(d * (d + 1)) + n + 3 + region
    k = n + 4 + region
    reference = d * (big_n - 1) + big_n + a + mu0 + lb_d
    return {"N": big_n, "k": k, "M": big_m, "M_reference": reference, "A": a, "B": b1,
            "points": 2 ** (d * (a + big_m + 1)) + 1 if d == 1 else (2 ** (a + big_m + 1) + 1) ** d}


def dyadic_root(value: Fraction, p: int, precision: int) -> Dyadic:
    """Largest ``r`` on the ``2**-precision`` grid with ``r**p <= value`` (certified bisection)."""
    if value < 0:
        raise OperatorError("root of a negative number")
    scale = 2**precision
    lo, hi = 0, 1
    while Fraction(hi, scale) ** p <= value:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if Fraction(mid, scale) ** p <= value:
            lo = mid
        else:
            hi = mid
    return Dyadic.coerce(Fraction(lo, scale))


def _power_sum(runs: list[Run], p: int) -> Fraction:
    total = Fraction(0)
    for a, b, coeffs in runs:
        if not coeffs:
            continue
        powered = (Poly.univariate(coeffs) ** p).coeffs()
        if p % 2 == 0:
            total += sum_over_range(powered, a, b)
        else:
            for s0, s1, sign in sign_runs(coeffs, a, b):
                if sign:
                    total += sign * sum_over_range(powered, s0, s1)
    return total


def norm_xpd(phi: MollifiedName, n: int, a: int | None = None, route: str = "bulk",
             budget: int | None = None, max_points: int = 1 << 17) -> Result:
    """``2**-n`` approximation of ``||f||_p`` from an ``xpd`` name.

    Sums ``|Q(z)|**p 2**-M`` over the grid ``z = j 2**-M`` in ``[-2**A, 2**A]``,
    where ``Q(z)`` answers ``<z, <1**N, 1**k>>``, and takes the p-th root by
    bisection to ``2**-(n+2)``.  The trace records one query per grid point;
    ``budget`` (default: the name's trace budget) caps that count.
    """
    if phi.d != 1:
        raise OperatorError("the norm algorithm is implemented for d = 1")
    name = phi.fresh(budget) if budget is not None else phi
    p = phi.p
    if a is None:
        a = minimal_a(phi.function.bounding_box())
    consts = norm_constants(phi.modulus, p, a, n)
    big_n, k, big_m = consts["N"], consts["k"], consts["M"]
    h = Fraction(1, 2**big_m)
    first, last = -(2 ** (a + big_m)), 2 ** (a + big_m)
    if route == "bulk":
        runs = name.grid_values(h, first, last, big_n, k, tag="norm-grid")
        total = _power_sum(runs, p)
    elif route == "pointwise":
        if last - first + 1 > max_points:
            raise BudgetExceeded(f"{last - first + 1} grid points exceed the pointwise cap {max_points}")
        total = Fraction(0)
        for j in range(first, last + 1):
            v = name.point_value(j * h, big_n, k, tag="norm-point").to_fraction()
            total += abs(v) ** p
    else:
        raise OperatorError(f"unknown route {route!r}")
    power = total * h
    value = dyadic_root(power, p, n + 2)
    cert = Certificate("norm_xpd", n, name.trace.summary(),
                       dict(consts, route=route, power=power))
    return Result(value, cert)


# -- the discontinuity witness -----------------------------------------------------------


def witness_modulus(m: int) -> Modulus:
    """Singularity modulus of the oscillator ``f_m``: zero below ``m``, then ``n + 1``."""
    return Modulus.from_values([0] * m + [m + 1], "singularity")


class ShortQueryZeroName(IntegralName):
    """``xs`` name answering zero to every query shorter than ``cutoff``."""

    def __init__(self, function: FunctionSpec, modulus: Modulus, cutoff: int,
                 length: Callable[[int], int] | None = None) -> None:
        super().__init__(function, modulus, RepKind.XS.value)
        self.cutoff = cutoff
        if length is not None:
            self._length = length

    def _raw_answer(self, a: str) -> str:
        if len(a) < self.cutoff:
            return ""
        return super()._raw_answer(a)


def discontinuity_demo(m_max: int = 6) -> dict:
    """Names of the oscillators ``f_m`` that agree with a name of zero on all
    queries shorter than ``m`` while ``||f_m||_1 = 1``."""
    rows = []
    for m in range(1, m_max + 1):
        f = oscillator(m)
        sigma = witness_modulus(m)
        phi = ShortQueryZeroName(f, sigma, m)
        zero = ShortQueryZeroName(FunctionSpec.zero(1, f.domain), sigma, 0, phi.length)
        checked = 0
        agree = True
        for c in iter_bitstrings(m - 1):
            checked += 1
            if phi.answer(c) != zero.answer(c):
                agree = False
        width = Fraction(1, 2**m)
        witness = pair(encode_dyadic(0), pair(encode_dyadic(width), unary(m + 1)))
        differs = phi.answer(witness) != zero.answer(witness)
        norm = f.lp_power(1)
        rows.append({
            "m": m,
            "agreement_prefix": m - 1,
            "queries_checked": checked,
            "agree": agree,
            "witness_query_len": len(witness),
            "witness_differs": differs,
            "norm_l1": str(norm.value) if norm.exact else None,
            "norm_is_one": norm.exact and norm.value == 1,
            "integral": str(f.integral(((Fraction(0), Fraction(1)),))),
        })
    return {"rows": rows, "ok": all(r["agree"] and r["norm_is_one"] and r["witness_differs"]
                                    for r in rows)}


__all__ = [
    "Certificate",
    "ComputedContinuousName",
    "ComputedIntegralName",
    "OperatorError",
    "Result",
    "ShortQueryZeroName",
    "TranslationError",
    "cauchy_to_xp",
    "differentiate",
    "discontinuity_demo",
    "dyadic_root",
    "evaluate",
    "integrate",
    "mean_value_bound",
    "merged_summary",
    "minimal_a",
    "norm_constants",
    "norm_xpd",
    "singularity_modulus",
    "sobolev_embed",
    "sobolev_to_continuous",
    "sobolev_to_lp",
    "sobolev_to_lp_any",
    "sup_norm_bound",
    "translation_constants",
    "witness_modulus",
    "xp_to_cauchy",
]

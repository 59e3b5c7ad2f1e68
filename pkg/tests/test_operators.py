import random
from fractions import Fraction

import pytest

import oracles
from lpreps.corpus import (
    build_corpus,
    constant_one,
    half_square,
    hat,
    hat_antiderivative,
    identity,
    indicator_half,
    zero,
)
from lpreps.dyadic import Dyadic
from lpreps.moduli import Modulus, characteristic_modulus
from lpreps.names import BudgetExceeded, check_query_bound
from lpreps.operators import (
    OperatorError,
    cauchy_to_xp,
    differentiate,
    discontinuity_demo,
    dyadic_root,
    evaluate,
    integrate,
    mean_value_bound,
    minimal_a,
    norm_constants,
    norm_xpd,
    sobolev_embed,
    sobolev_to_continuous,
    sobolev_to_lp,
    sobolev_to_lp_any,
    sup_norm_bound,
    translation_constants,
    xp_to_cauchy,
)
from lpreps.representations import (
    make_cauchy_name,
    make_xc_name,
    make_xmp_name,
    make_xp_name,
    make_xpd_name,
    make_xr_name,
    make_xs_name,
    run_value,
    validate_name,
)

HALF, QUARTER = Fraction(1, 2), Fraction(1, 4)
chi = indicator_half()
BIG = 2**80


def within(value, exact, n):
    return abs(Fraction(value) - exact) < Fraction(1, 2**n)


def third(n):
    return Dyadic(round(Fraction(2**n, 3)), n)


# -- integration and evaluation ------------------------------------------------------------


def test_integrate_indicator_over_a_box():
    phi = make_xp_name(chi, Modulus.affine(1, 2, "lp", 1), 1)
    result = integrate(phi, QUARTER, 3 * QUARTER, 6)
    assert within(result.value.to_fraction(), Fraction(1, 4), 6)
    assert result.certificate.trace_summary["queries"] <= 3


def test_integrate_with_non_dyadic_endpoints():
    phi = make_xs_name(constant_one(), Modulus.affine(1, 1, "singularity"))
    x = make_xr_name(Fraction(1, 3), scheme=third)
    y = make_xr_name(Fraction(2, 3), scheme=lambda n: Dyadic(round(Fraction(2 ** (n + 1), 3)), n))
    result = integrate(phi, x, y, 8)
    assert within(result.value.to_fraction(), Fraction(1, 3), 8)
    assert result.certificate.details["name_queries"] == 1
    assert result.certificate.details["endpoint_queries"] == 2


def test_integrate_zero():
    phi = make_xs_name(zero(), Modulus.zero("singularity"))
    for n in range(8):
        assert integrate(phi, -1, 2, n).value.to_fraction() == 0


@pytest.mark.parametrize("n", range(11))
def test_integration_query_count_is_constant(n):
    phi = make_xp_name(hat(), Modulus.affine(1, 2, "lp", 1), 1).fresh()
    result = integrate(phi, Fraction(1, 8), Fraction(7, 8), n)
    summary = result.certificate.trace_summary
    assert summary["queries"] == 3
    assert within(result.value.to_fraction(), oracles.integral(oracles.CORPUS["hat"], Fraction(1, 8), Fraction(7, 8)), n)
    assert check_query_bound(phi.trace, "1", lambda k: k, n, bits_poly=f"{summary['max_answer_len']}").ok


def test_evaluate_examples():
    ident = make_xc_name(identity(), Modulus.affine(1, 1, "continuity"))
    assert within(evaluate(ident, HALF, 5).value.to_fraction(), HALF, 5)
    flat = make_xc_name(zero(), Modulus.zero("continuity"))
    assert evaluate(flat, Fraction(3, 8), 4).value.to_fraction() == 0
    tent = make_xc_name(hat(), Modulus.affine(1, 2, "continuity"))
    x = make_xr_name(Fraction(1, 3), scheme=third)
    result = evaluate(tent, x, 6)
    assert within(result.value.to_fraction(), Fraction(2, 3), 6)
    assert result.certificate.trace_summary["queries"] == 2


# -- translations --------------------------------------------------------------------------


def test_xp_to_cauchy_indicator_constants_and_error():
    phi = make_xp_name(chi, Modulus.affine(1, 2, "lp", 1), 1)
    assert translation_constants(phi, 3) == {"C": 0, "N": 6, "k": 11, "M": 13}
    grid = xp_to_cauchy(phi, 3).value
    error = grid.error_power(chi, 1)
    assert error.hi < Fraction(1, 8)
    merged = []
    for ((lo, hi),), v in grid.to_step_function().items:
        if merged and merged[-1][1] == lo and merged[-1][2] == v:
            merged[-1] = (merged[-1][0], hi, v)
        else:
            merged.append((lo, hi, v))
    oracle_step = [(oracles.rat(lo), oracles.rat(hi), oracles.rat(v)) for lo, hi, v in merged]
    assert error.value == oracles.distance_power(oracles.CORPUS["indicator_half"], oracle_step, 1)


def test_xp_to_cauchy_routes_agree():
    phi = make_xp_name(hat(), Modulus.affine(1, 2, "lp", 2), 2)
    bulk = xp_to_cauchy(phi.fresh(), 2, route="bulk")
    pointwise = xp_to_cauchy(phi.fresh(), 2, route="pointwise")
    assert bulk.certificate.trace_summary["queries"] == pointwise.certificate.trace_summary["queries"]
    for j in range(bulk.value.first, bulk.value.last + 1):
        assert bulk.value.value(j) == pointwise.value.value(j)
    assert bulk.value.error_power(hat(), 2).hi < Fraction(1, 16)


def test_xp_to_cauchy_zero_and_budget():
    phi = make_xp_name(zero(), Modulus.zero("lp", 1), 1)
    grid = xp_to_cauchy(phi, 2).value
    assert all(grid.value(j) == 0 for j in range(grid.first, grid.last + 1))
    with pytest.raises(BudgetExceeded):
        xp_to_cauchy(make_xp_name(chi, Modulus.affine(1, 2, "lp", 1), 1), 3, budget=100)


def test_cauchy_to_xp_outputs_validate():
    constant = cauchy_to_xp(make_cauchy_name(constant_one(), 1), 1)
    assert validate_name("xp", constant, constant_one(), n_max=5, bit_level=False)
    for f, mu in ((zero(), Modulus.zero("lp", 1)), (identity(), Modulus.affine(1, 2, "lp", 1))):
        out = cauchy_to_xp(make_cauchy_name(f, 1, modulus=mu), 1)
        assert validate_name("xp", out, f, n_max=5, bit_level=False), f.name
    # 2n is the least L2-modulus of the identity found by search
    averaged = cauchy_to_xp(make_cauchy_name(identity(), 2, modulus=Modulus.affine(2, 0, "lp", 2)), 2)
    for n in range(4):
        assert within(averaged.integral(0, HALF, n).to_fraction(), Fraction(1, 8), n)


# -- Sobolev spaces --------------------------------------------------------------------------


def sobolev_name(f, modulus=None, order=1, p=1):
    return make_xmp_name(f, modulus or Modulus.affine(1, 2, "lp", p), order, p)


def test_sobolev_to_continuous_examples():
    name = sobolev_to_continuous(sobolev_name(half_square()))
    assert within(name.value(HALF, 5).to_fraction(), Fraction(1, 8), 5)
    assert validate_name("xc", name, half_square(), n_max=8, bit_level=False)
    anti = sobolev_to_continuous(sobolev_name(hat_antiderivative()))
    assert within(anti.value(QUARTER, 6).to_fraction(), Fraction(1, 16), 6)
    flat = sobolev_to_continuous(sobolev_name(zero(), Modulus.zero("lp", 1)))
    assert flat.value(QUARTER, 6).to_fraction() == 0


def test_sup_norm_bounds_are_certified():
    for f in (half_square(), hat_antiderivative(), zero()):
        bound = sup_norm_bound(sobolev_name(f)).value
        assert f.sup_abs().hi <= Fraction(2) ** bound
    assert sup_norm_bound(sobolev_name(zero())).value <= 4


def test_mean_value_bound_example():
    # f(x) = x - 1/2 has |f| = 1/4 at the points 1/4 and 3/4, and f' = 1
    assert mean_value_bound(2, QUARTER) == 2
    assert 1 <= mean_value_bound(2, QUARTER)


def test_sobolev_to_lp_validates():
    name = sobolev_to_lp(sobolev_name(half_square()))
    assert validate_name("xp", name, half_square(), n_max=6, bit_level=False)


def test_zero_through_the_full_embedding_chain():
    second = make_xmp_name(zero(), Modulus.zero("lp", 2), 2, 2)
    first = sobolev_embed(second)
    assert first.order == 1
    assert validate_name("xmp", first, zero(), n_max=5, bit_level=False)
    last = sobolev_to_lp_any(second)
    assert last.order == 0
    assert validate_name("xp", last, zero(), n_max=5, bit_level=False)


def test_second_order_embedding_of_half_square():
    second = make_xmp_name(half_square(), Modulus.affine(1, 2, "lp", 1), 2, 1)
    first = sobolev_embed(second)
    assert validate_name("xmp", first, half_square(), n_max=5, bit_level=False)


def test_differentiate_examples():
    derivative = differentiate(sobolev_name(half_square()))
    for n in range(11):
        assert within(derivative.integral(0, HALF, n).to_fraction(), Fraction(1, 8), n)
    hat_again = differentiate(sobolev_name(hat_antiderivative()))
    for n in range(8):
        value = hat_again.integral(QUARTER, 3 * QUARTER, n).to_fraction()
        assert within(value, oracles.integral(oracles.CORPUS["hat"], QUARTER, 3 * QUARTER), n)
    flat = differentiate(sobolev_name(zero(), Modulus.zero("lp", 1)))
    assert flat.integral(0, 1, 5).to_fraction() == 0
    with pytest.raises(OperatorError):
        differentiate(sobolev_name(half_square()), 2)


def test_differentiate_then_integrate_recovers_differences():
    f = hat_antiderivative()
    derivative = differentiate(sobolev_name(f))
    rng = random.Random(5)
    for _ in range(20):
        x, y = sorted(Fraction(rng.randint(0, 16), 16) for _ in range(2))
        n = rng.randint(0, 10)
        value = derivative.integral(x, y, n).to_fraction()
        assert abs(value - (f.value(y) - f.value(x))) < Fraction(2, 2**n)


# -- norm ---------------------------------------------------------------------------------


def test_dyadic_root():
    r = dyadic_root(HALF, 2, 10).to_fraction()
    assert r**2 <= HALF < (r + Fraction(1, 1024)) ** 2
    assert dyadic_root(Fraction(0), 3, 5).to_fraction() == 0


def test_minimal_a():
    assert minimal_a(((0, 1),)) == 2
    assert minimal_a(((-3, 1),)) == 3


def test_norm_of_constant_one():
    name = make_xpd_name(constant_one(), characteristic_modulus(1), 1)
    result = norm_xpd(name, 3, budget=BIG)
    assert within(result.value.to_fraction(), Fraction(1), 3)
    details = result.certificate.details
    assert details["M"] >= details["M_reference"]
    assert result.certificate.trace_summary["queries"] >= 2 ** details["M_reference"]


def test_norm_of_indicator_in_l2():
    name = make_xpd_name(chi, Modulus.affine(2, 3, "lp", 2), 2)
    value = norm_xpd(name, 3, budget=BIG).value.to_fraction()
    # |value - sqrt(1/2)| < 1/8, decided without roots
    assert (value - Fraction(1, 8)) ** 2 < HALF < (value + Fraction(1, 8)) ** 2


def test_norm_of_zero_and_budget():
    name = make_xpd_name(zero(), Modulus.zero("lp", 1), 1)
    assert norm_xpd(name, 3, budget=BIG).value.to_fraction() == 0
    with pytest.raises(BudgetExceeded):
        norm_xpd(make_xpd_name(constant_one(), characteristic_modulus(1), 1), 3, budget=10**6)


def test_norm_query_count_grows_exponentially():
    mu = characteristic_modulus(1)
    counts = [norm_constants(mu, 1, 2, n)["points"] for n in range(4)]
    for n in range(3):
        assert counts[n + 1] >= 2 * counts[n]


def test_norm_grid_routes_agree():
    name = make_xpd_name(chi, Modulus.affine(1, 2, "lp", 1), 1)
    h = Fraction(1, 64)
    runs = name.fresh().grid_values(h, -80, 80, 4, 7)
    for j in range(-80, 81):
        assert run_value(runs, j) == name.point_value(j * h, 4, 7).to_fraction()


def test_norm_pointwise_route_on_zero():
    name = make_xpd_name(zero(), Modulus.zero("lp", 1), 1)
    bulk = norm_xpd(name.fresh(), 0, a=0, route="bulk", budget=BIG)
    pointwise = norm_xpd(name.fresh(), 0, a=0, route="pointwise", budget=BIG)
    assert bulk.value == pointwise.value
    assert bulk.certificate.trace_summary["queries"] == pointwise.certificate.trace_summary["queries"]


# -- discontinuity witness ------------------------------------------------------------------


def test_discontinuity_demo():
    report = discontinuity_demo(3)
    assert report["ok"]
    row = report["rows"][2]
    assert row["m"] == 3 and row["agreement_prefix"] == 2 and row["norm_l1"] == "1"
    assert report["rows"][0]["integral"] == "0"


def test_zero_name_baseline_validates():
    assert validate_name("xs", make_xs_name(zero(), Modulus.zero("singularity")), zero())


def test_corpus_operator_contracts_at_small_precision():
    for key, entry in build_corpus(oscillators=(2,)).items():
        f = entry.function
        phi = make_xp_name(f, entry.lp_modulus(1), 1)
        for n in (0, 4, 8):
            value = integrate(phi, QUARTER, Fraction(7, 8), n).value.to_fraction()
            assert within(value, f.integral(((QUARTER, Fraction(7, 8)),)), n), key

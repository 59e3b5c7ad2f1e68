import random
from fractions import Fraction

import pytest

import oracles
from lpreps.corpus import build_corpus, constant_one, half_square, hat, identity, indicator_half, oscillator, zero
from lpreps.dyadic import Dyadic, decode_dyadic, encode_dyadic, pair, unpair
from lpreps.moduli import Modulus, characteristic_modulus, search_modulus
from lpreps.names import pair_names
from lpreps.representations import (
    RepresentationError,
    StepFunction,
    iterated_derivative,
    make_cauchy_name,
    make_xc_name,
    make_xmp_name,
    make_xp_name,
    make_xpd_name,
    make_xr_name,
    make_xs_name,
    staircase,
    validate_name,
)
from lpreps.symbolic import convolve_mollifier

HALF, QUARTER = Fraction(1, 2), Fraction(1, 4)
chi = indicator_half()


def unary(n):
    return "1" * n


def third_scheme(n):
    return Dyadic(round(Fraction(2**n, 3)), n)


# -- reals ------------------------------------------------------------------------------------


def test_real_name_of_a_dyadic_point():
    name = make_xr_name(HALF)
    for n in range(12):
        assert decode_dyadic(name.answer(unary(n))) == HALF
    assert validate_name("xr", name, HALF)


def test_real_name_from_an_approximation_scheme():
    name = make_xr_name(Fraction(1, 3), scheme=third_scheme)
    for n in range(30):
        assert abs(third_scheme(n).to_fraction() - Fraction(1, 3)) < Fraction(1, 2**n)
    assert validate_name("xr", name, Fraction(1, 3), n_max=30)
    assert not validate_name("xr", name, Fraction(1, 3) + Fraction(1, 2**20), n_max=30)


def test_paired_real_names_give_a_point_of_the_plane():
    x = make_xr_name(Fraction(1, 3), scheme=third_scheme)
    y = make_xr_name(Fraction(2, 3), scheme=lambda n: Dyadic(round(Fraction(2 ** (n + 1), 3)), n))
    both = pair_names(x, y)
    for n in range(16):
        left, right = unpair(both.answer(unary(n)))
        assert abs(decode_dyadic(left).to_fraction() - Fraction(1, 3)) < Fraction(1, 2**n)
        assert abs(decode_dyadic(right).to_fraction() - Fraction(2, 3)) < Fraction(1, 2**n)
    assert validate_name("xr", y, Fraction(2, 3), n_max=16)


# -- continuous functions ----------------------------------------------------------------------


def test_continuous_name_of_identity():
    name = make_xc_name(identity(), Modulus.affine(1, 1, "continuity"))
    out = name.answer(pair(encode_dyadic(HALF), unary(4)))
    assert abs(decode_dyadic(out).to_fraction() - HALF) < Fraction(1, 16)
    assert validate_name("xc", name, identity(), n_max=10)


def test_continuous_names_of_zero_and_hat():
    assert validate_name("xc", make_xc_name(zero(), Modulus.zero("continuity")), zero())
    name = make_xc_name(hat(), Modulus.affine(1, 2, "continuity"))
    assert validate_name("xc", name, hat(), n_max=10)
    for k in range(9):
        x = Fraction(k, 8)
        assert abs(name.value(x, 7).to_fraction() - oracles.value(oracles.CORPUS["hat"], x)) < Fraction(1, 128)


def test_continuity_modulus_is_checked_at_construction():
    with pytest.raises(RepresentationError):
        make_xc_name(hat(), Modulus.affine(1, 0, "continuity"))


# -- integral names -------------------------------------------------------------------------


def test_singular_name_of_indicator():
    name = make_xs_name(chi, Modulus.affine(1, 1, "singularity"))
    q = pair(encode_dyadic(QUARTER), pair(encode_dyadic(3 * QUARTER), unary(6)))
    value = decode_dyadic(name.answer(q)).to_fraction()
    assert abs(value - oracles.integral(oracles.CORPUS["indicator_half"], QUARTER, 3 * QUARTER)) < Fraction(1, 64)
    assert validate_name("xs", name, chi, n_max=10)


def test_singular_names_of_zero_and_oscillators():
    assert validate_name("xs", make_xs_name(zero(), Modulus.zero("singularity")), zero())
    for m in (1, 3):
        name = make_xs_name(oscillator(m), Modulus.affine(1, 1, "singularity"))
        assert validate_name("xs", name, oscillator(m), n_max=6)


def test_lp_names():
    name = make_xp_name(chi, Modulus.affine(1, 2, "lp", 1), 1)
    assert validate_name("xp", name, chi, n_max=10)
    assert validate_name("xp", make_xp_name(zero(), Modulus.zero("lp", 2), 2), zero())


def test_sobolev_name_of_half_square():
    derivative = iterated_derivative(half_square(), 1)
    mu = search_modulus(derivative, "lp", 2, n_max=6)
    assert mu == search_modulus(identity(), "lp", 2, n_max=6)
    name = make_xmp_name(half_square(), mu, 1, 2)
    assert validate_name("xmp", name, half_square(), n_max=6)
    with pytest.raises(Exception):
        make_xmp_name(chi, Modulus.affine(1, 2, "lp", 1), 1, 1)


def test_order_zero_sobolev_names_coincide_with_lp_names():
    mu = Modulus.affine(1, 2, "lp", 1)
    plain = make_xp_name(hat(), mu, 1)
    order_zero = make_xmp_name(hat(), mu, 0, 1)
    rng = random.Random(3)
    for _ in range(40):
        a, b = (Fraction(rng.randint(-8, 40), 32) for _ in range(2))
        n = rng.randint(0, 10)
        q = pair(encode_dyadic(a), pair(encode_dyadic(b), unary(n)))
        assert plain.answer(q) == order_zero.answer(q)


def test_mollified_names():
    one = make_xpd_name(constant_one(), characteristic_modulus(1), 1)
    q = pair(encode_dyadic(HALF), pair(unary(3), unary(5)))
    assert abs(decode_dyadic(one.answer(q)).to_fraction() - 1) < Fraction(1, 32)
    assert validate_name("xpd", one, constant_one(), n_max=6)
    assert validate_name("xpd", make_xpd_name(zero(), Modulus.zero("lp", 1), 1), zero(), n_max=4)
    name = make_xpd_name(chi, Modulus.affine(1, 2, "lp", 1), 1)
    for n in range(10):
        assert abs(name.point_value(QUARTER, 4, n).to_fraction() - 1) < Fraction(1, 2**n)
    assert convolve_mollifier(chi, 4).value(QUARTER) == 1
    with pytest.raises(RepresentationError):
        make_xpd_name(chi, Modulus.affine(1, 2, "lp", 1), 1, d=2)


# -- Cauchy names -----------------------------------------------------------------------------


def test_cauchy_name_of_a_step_function_is_constant():
    name = make_cauchy_name(chi, 1)
    answers = {name.answer(unary(n)) for n in range(6)}
    assert StepFunction.decode(name.answer(unary(5)), 1).error_power(chi, 1).value == 0
    assert len({StepFunction.decode(a, 1).to_function().integral(((0, 1),)) for a in answers}) == 1


def test_cauchy_staircase_of_identity():
    # the L2 error of the 2^k staircase of x is 12^(-1/2) 2^-k, so k = n - 1 suffices
    for k in range(6):
        step = staircase(identity(), k, 30)
        assert step.error_power(identity(), 2).value == Fraction(1, 12 * 4**k)
    name = make_cauchy_name(identity(), 2)
    assert validate_name("cauchy", name, identity(), n_max=6)
    for n in range(1, 7):
        assert len(name.approximant(n).items) <= 2 ** (n - 1)


def test_cauchy_names_of_hat_and_moduli():
    assert validate_name("cauchy", make_cauchy_name(hat(), 1), hat(), n_max=6)
    with_modulus = make_cauchy_name(hat(), 1, modulus=Modulus.affine(1, 2, "lp", 1))
    assert validate_name("cauchy", with_modulus, hat(), n_max=4)
    with pytest.raises(RepresentationError):
        make_cauchy_name(hat(), 1, approximants=lambda n: staircase(hat(), 0, 8))


# -- validation and mutations -----------------------------------------------------------------


def test_off_by_exactly_the_tolerance_is_rejected():
    name = make_xs_name(chi, Modulus.affine(1, 1, "singularity"))
    name.answer_offset = lambda n: Fraction(1, 2**n)
    assert not validate_name("xs", name, chi, n_max=6)
    name.answer_offset = lambda n: Fraction(1, 2 ** (n + 2))
    assert validate_name("xs", name, chi, n_max=6)
    cont = make_xc_name(identity(), Modulus.affine(1, 1, "continuity"))
    cont.answer_offset = lambda n: -Fraction(1, 2**n)
    assert not validate_name("xc", cont, identity(), n_max=6)


def test_declared_length_below_the_modulus_is_rejected():
    short = make_xp_name(chi, Modulus.affine(1, 1, "lp", 1), 1, check_upto=None)
    report = validate_name("xp", short, chi, n_max=6)
    assert not report
    assert report.failures[0]["reason"] == "modulus"


def test_every_corpus_entry_has_valid_names():
    for key, entry in build_corpus(oscillators=(1, 2)).items():
        f = entry.function
        assert validate_name("xs", make_xs_name(f, entry.singularity), f, n_max=10), key
        for p in (1, 2):
            assert validate_name("xp", make_xp_name(f, entry.lp_modulus(p), p), f, n_max=10), (key, p)
        if entry.continuity is not None:
            assert validate_name("xc", make_xc_name(f, entry.continuity), f, n_max=10), key


def test_exhaustive_name_invariants_on_short_queries():
    names = [
        make_xs_name(chi, Modulus.affine(1, 1, "singularity")),
        make_xc_name(hat(), Modulus.affine(1, 2, "continuity")),
        make_xpd_name(chi, Modulus.affine(1, 2, "lp", 1), 1),
        make_xr_name(Fraction(1, 3), scheme=third_scheme),
    ]
    exhaustive = [format(v, f"0{k}b") if k else "" for k in range(11) for v in range(2**k)]
    rng = random.Random(11)
    randoms = ["".join(rng.choice("01") for _ in range(rng.randint(0, 200))) for _ in range(100)]
    for name in names:
        name.check_invariants(exhaustive)
        name.check_invariants(randoms)


def test_two_dimensional_product_name():
    from lpreps.poly import Poly
    from lpreps.symbolic import FunctionSpec

    x, y = Poly.variable(0, 2), Poly.variable(1, 2)
    f = FunctionSpec(2, [(((0, 1), (0, 1)), x * y)])
    name = make_xs_name(f, Modulus.affine(1, 2, "singularity"), check_upto=None)
    assert abs(name.integral((0, 0), (HALF, 1), 8).to_fraction() - Fraction(1, 16)) < Fraction(1, 256)
    assert validate_name("xs", name, f, n_max=5)

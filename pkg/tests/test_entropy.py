import itertools
import random
from fractions import Fraction

import pytest

import oracles
from lpreps.entropy import (
    CompactClass,
    PathNet,
    aa_cover,
    aa_cover_bound_exponent,
    aa_family_member,
    aa_cover_count,
    aa_member,
    aa_spanning,
    cauchy_rep_from_net,
    certify_aa_cover,
    entropy_table,
    fk_cover,
    fk_member_certificate,
    fk_spanning,
    greedy_code,
    lipschitz_size_formula,
    linear_sup_distance,
    metric_query_bound,
    reference_hat_parameters,
    sample_aa_members,
    spanning_distance,
)
from lpreps.moduli import Modulus, validate_modulus
from lpreps.names import Trace
from lpreps.symbolic import lp_distance_power

identity_l = Modulus.affine(1, 0, "continuity")
fk_l = Modulus.affine(1, 5, "lp", 1)


def merged_trace(*traces):
    out = Trace(budget=10**9)
    for trace in traces:
        for r in trace.records:
            out.record(r.query_len, r.answer_len, r.tag, r.count)
    return out


# -- covering nets ------------------------------------------------------------------------


@pytest.mark.parametrize("n,c", [(1, 0), (2, 0), (2, 1)])
def test_aa_cover_count_matches_formula(n, c):
    cover = aa_cover(identity_l, c, n)
    expected = (2 ** (n + c + 1) + 1) * 3 ** (2**n)
    assert len(cover) == aa_cover_count(identity_l, c, n) == expected
    assert expected <= 2 ** aa_cover_bound_exponent(identity_l, c, n)
    assert aa_cover_bound_exponent(identity_l, c, n) == 2 ** (n + 1) + n + c + 2


def test_smallest_cover_example():
    assert aa_cover_count(identity_l, 0, 1) == 45 <= 2**7


def test_constant_class_has_constant_net():
    flat = Modulus.zero("continuity")
    cover = aa_cover(flat, 0, 2)
    assert len(cover) == (2**3 + 1) * 3
    compact = CompactClass.aa(flat, 0)
    members = sample_aa_members(compact, 2, 5)
    assert all(len(set(m.values)) == 1 for m in members)


def test_random_members_are_covered():
    compact = CompactClass.aa(identity_l, 0)
    report = certify_aa_cover(compact, 2, samples=200, seed=1)
    assert report.covered and report.count_ok
    assert report.worst_distance < Fraction(1, 4)


def test_net_distances_are_exact_sup_distances():
    net = PathNet(identity_l, 0)
    rng = random.Random(2)
    for _ in range(30):
        i, j = rng.randrange(net.count(2)), rng.randrange(net.count(2))
        f = [(oracles.rat(a), oracles.rat(b), expr) for a, b, expr in _linear_pieces(net.path(2, i))]
        g = [(oracles.rat(a), oracles.rat(b), expr) for a, b, expr in _linear_pieces(net.path(2, j))]
        assert net.distance(2, i, j) == oracles.sup_distance_linear(f, g)


def _linear_pieces(path):
    out = []
    for (x0, x1), (y0, y1) in zip(zip(path.xs, path.xs[1:]), zip(path.values, path.values[1:])):
        slope = (y1 - y0) / (x1 - x0)
        out.append((x0, x1, oracles.rat(y0) + oracles.rat(slope) * (oracles.X - oracles.rat(x0))))
    return out


# -- spanning families ----------------------------------------------------------------------


def test_aa_spanning_pairwise_distances():
    family = aa_spanning(identity_l, 0, 2)
    compact = CompactClass.aa(identity_l, 0)
    threshold = Fraction(1, 8)
    for a, b in itertools.combinations(range(len(family.functions)), 2):
        distance = spanning_distance(family, a, b)
        assert distance >= threshold
    for fn in family.functions[:8]:
        assert validate_modulus(identity_l, fn, "continuity", n_max=6)
        assert fn.sup_abs().hi <= 1
        assert aa_family_member(fn, compact)
    assert family.separation == threshold


def test_single_bump_against_no_bump():
    family = aa_spanning(identity_l, 0, 2)
    zero_index = next(i for i, f in enumerate(family.functions) if not f.pieces or f.sup_abs().hi == 0)
    distances = [spanning_distance(family, zero_index, j) for j in range(len(family.functions)) if j != zero_index]
    assert min(distances) == Fraction(1, 8)


def test_greedy_code_examples():
    assert greedy_code(4, 4).words == ["0000", "1111"]
    code = greedy_code(16, 5)
    assert code.verified_min_distance() >= 5
    assert sorted(code.as_ints()) == oracles.greedy_code(16, 5)
    assert oracles.min_pairwise_distance(code.as_ints()) >= 5


def test_greedy_size_is_monotone_in_distance():
    sizes = [len(greedy_code(16, m).words) for m in range(3, 9)]
    assert sizes == sorted(sizes, reverse=True)
    for m in (3, 6, 8):
        assert sorted(greedy_code(12, m).as_ints()) == oracles.greedy_code(12, m)


def test_reference_hat_height():
    params = reference_hat_parameters(fk_l, 1, 3)
    assert params["height"] == Fraction(1, 2)


@pytest.mark.parametrize("n", [3, 4])
def test_fk_spanning_members_and_distances(n):
    family = fk_spanning(fk_l, 1, n)
    words = family.words
    rng = random.Random(n)
    for word in rng.sample(words, 6) + [words[0]]:
        assert fk_member_certificate(family, word, fk_l)
    for a, b in [tuple(rng.sample(words, 2)) for _ in range(20)]:
        exact = lp_distance_power(family.function(a), family.function(b), 1).value
        assert exact == family.distance_power(a, b)
        assert exact >= Fraction(1, 2**n)


def test_hat_distance_for_m_disagreements():
    family = fk_spanning(fk_l, 1, 3)
    m = family.code.min_distance
    a = "0" * len(family.words[0])
    b = "1" * m + "0" * (len(a) - m)
    expected = m * family.height * family.width / 2
    assert family.distance_power(a, b) == expected
    mirror_a = [(lo, hi, e) for lo, hi, e in oracles.pieces()]
    mirror_b = []
    for i in range(m):
        c = (i + Fraction(1, 2)) * family.width
        mirror_b += oracles.tent(c, family.width / 2, family.height)
    assert oracles.distance_power(mirror_a, mirror_b, 1) == expected >= Fraction(1, 8)


def test_zero_word_is_zero_function():
    family = fk_spanning(fk_l, 1, 3)
    zero_word = "0" * len(family.words[0])
    assert family.function(zero_word).lp_power(1).value == 0


def test_fk_members_validate_as_lp_moduli():
    family = fk_spanning(fk_l, 1, 3)
    for word in family.words[:2]:
        assert validate_modulus(fk_l, family.function(word), "lp", 1, n_max=5)


def test_fk_cover_small():
    report = fk_cover(Modulus.affine(1, 2, "lp", 1), 1, 2, samples=10, seed=3)
    assert report.covered


# -- tables and the net representation ----------------------------------------------------


def test_lipschitz_size_formula():
    assert lipschitz_size_formula(0, 2) == 7


@pytest.mark.parametrize(
    "compact",
    [CompactClass.aa(identity_l, 0), CompactClass.aa(Modulus.zero("continuity"), 0), CompactClass.lipschitz(0)],
    ids=["aa", "constant", "lipschitz"],
)
def test_entropy_tables_sandwich(compact):
    table = entropy_table(compact, range(0, 3))
    assert table.ok
    for row in table.rows:
        assert row["spanning_le_net"]
    assert table.to_csv().splitlines()[0].startswith("n,")


def test_lower_formula_example():
    row = entropy_table(CompactClass.aa(identity_l, 0), [2]).rows[0]
    assert row["lower_formula"] <= row["net_exponent"]


def test_net_representation_metric():
    compact = CompactClass.lipschitz(0)
    rep = cauchy_rep_from_net(PathNet.for_class(compact))
    oracle = rep.distance_oracle()
    members = sample_aa_members(compact, 3, 10, seed=4)
    for f, g in zip(members, members[1:]):
        phi, psi, dist = rep.name_of(f), rep.name_of(g), oracle.fresh(budget=10**6)
        value, summary = rep.metric(phi, psi, dist, 3)
        assert abs(value - linear_sup_distance(f, g)) < Fraction(1, 8)
        assert summary["queries"] == 3
        assert metric_query_bound(rep, merged_trace(phi.trace, psi.trace, dist.trace), 3).ok
    same, _ = rep.metric(rep.name_of(members[0]), rep.name_of(members[0]), oracle, 3)
    assert same < Fraction(1, 8)


def test_sampled_members_are_in_the_class():
    compact = CompactClass.aa(identity_l, 0)
    for path in sample_aa_members(compact, 2, 20, seed=9):
        assert aa_member(path, compact)

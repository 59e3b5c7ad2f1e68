import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from lpreps.dyadic import decode_dyadic, encode_dyadic, pair, unpair
from lpreps.names import (
    Apply,
    BudgetExceeded,
    FirstOrder,
    InvariantViolation,
    Name,
    Product,
    Sum,
    Trace,
    check_exponential_bound,
    check_query_bound,
    eval_sop,
    exponential_bound,
    pad_name,
    pair_names,
    parse_sop,
    parse_unary,
    query_hex,
    split_query,
)


def value_oracle(a: str) -> str:
    """Raw oracle answering the dyadic (number of ones in a) / 2^|a|, unpadded."""
    return encode_dyadic(Fraction(a.count("1"), 2 ** len(a)))


def random_strings(count, max_length, seed=7):
    rng = random.Random(seed)
    for _ in range(count):
        length = rng.randint(0, max_length)
        yield "".join(rng.choice("01") for _ in range(length))


def test_padding_a_constant_oracle():
    name = pad_name(lambda a: "1", lambda n: n + 4)
    for a in ["", "0", "0110", "1" * 9]:
        assert len(name.answer(a)) == len(a) + 4
        assert name.answer(a).startswith("1")


def test_padding_preserves_decoded_values():
    target = lambda n: 4 * n + 8  # noqa: E731
    name = pad_name(value_oracle, target)
    for a in random_strings(100, 40):
        assert decode_dyadic(name.answer(a)) == decode_dyadic(value_oracle(a))
        assert oracles.dyadic_from_code(name.answer(a)) == Fraction(a.count("1"), 2 ** len(a))


def test_padding_is_idempotent():
    target = lambda n: 4 * n + 8  # noqa: E731
    once = pad_name(value_oracle, target)
    twice = pad_name(once, target)
    for a in random_strings(50, 30):
        assert once.answer(a) == twice.answer(a)


def test_padding_below_the_raw_length_is_rejected():
    name = pad_name(lambda a: "1111", lambda n: 2)
    with pytest.raises(InvariantViolation):
        name.answer("0")


def test_answers_have_the_declared_length():
    name = pad_name(value_oracle, lambda n: 4 * n + 8)
    exhaustive = [format(v, f"0{k}b") if k else "" for k in range(11) for v in range(2**k)]
    name.check_invariants(exhaustive)
    name.check_invariants(random_strings(50, 200))
    for a in random_strings(30, 20):
        b = "".join("1" if ch == "0" else "0" for ch in a)
        assert len(name.answer(a)) == len(name.answer(b))


def test_check_invariants_detects_non_monotone_length():
    name = Name(lambda a: "", lambda n: 10 - n)
    with pytest.raises(InvariantViolation):
        name.check_invariants(["", "0"])


def test_pairing_names_recovers_components():
    phi = pad_name(value_oracle, lambda n: 4 * n + 8)
    psi = pad_name(lambda a: a, lambda n: n + 1)
    both = pair_names(phi, psi)
    for a in random_strings(60, 24):
        left, right = unpair(both.answer(a))
        assert left == phi.answer(a)
        assert right == psi.answer(a)
        assert len(both.answer(a)) >= max(len(phi.answer(a)), len(psi.answer(a)))


def test_query_records_the_trace():
    name = pad_name(value_oracle, lambda n: 4 * n + 8)
    name.query("0101")
    name.query("11", tag="other")
    summary = name.trace.summary()
    assert summary["queries"] == 2
    assert summary["answer_bits"] == 24 + 16
    assert summary["tags"] == {"query": 1, "other": 1}
    lines = [json.loads(line) for line in name.trace.to_jsonl().splitlines()]
    assert lines[0] == {"query_len": 4, "answer_len": 24, "tag": "query"}


def test_budget_is_enforced_and_fresh_traces_are_independent():
    name = pad_name(value_oracle, lambda n: 4 * n + 8).fresh(budget=2)
    name.query("0")
    name.query("1")
    with pytest.raises(BudgetExceeded):
        name.query("")
    other = name.fresh(budget=5)
    other.query("0")
    assert len(other.trace) == 1 and len(name.trace) == 2
    trace = Trace(budget=10)
    trace.record(3, 4, "bulk", count=10)
    with pytest.raises(BudgetExceeded):
        trace.record(3, 4, "bulk")


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv("LPREPS_BUDGET", "17")
    assert Trace().budget == 17


def test_unary_and_query_splitting():
    assert parse_unary("111") == 3
    assert parse_unary("") == 0
    assert parse_unary("101") is None
    query = pair("10", pair("0", "111"))
    assert split_query(query, 3) == ["10", "0", "111"]
    assert split_query("0", 3) is None


def test_hex_bridge():
    name = pad_name(lambda a: a, lambda n: n + 3)
    assert query_hex(name, "4:5") == "7:28"  # 0101 then three padding zeros
    assert query_hex(name, "0:0") == "3:0"


# -- second-order polynomials -------------------------------------------------------------


def test_sop_examples():
    assert eval_sop("n^2", lambda k: 10**9, 3) == 9
    assert eval_sop("l(n^2+5)", lambda k: k + 1, 2) == 10
    nested = "l(l(n^2+5)+l(l(n)^2))"
    assert eval_sop(nested, lambda k: k, 1) == 7
    for n in range(6):
        for l in (lambda k: k, lambda k: 2 * k + 1, lambda k: k * k):
            assert eval_sop(nested, l, n) == oracles.nested_example(l, n)


def test_sop_parse_errors():
    for text in ["", "n+", "l n", "(n", "n^0", "n)"]:
        with pytest.raises(ValueError):
            parse_sop(text)
    with pytest.raises(ValueError):
        FirstOrder((1, -1))


def sops(depth=3):
    leaves = st.builds(lambda c: FirstOrder(tuple(c)), st.lists(st.integers(0, 3), min_size=1, max_size=3))
    return st.recursive(
        leaves,
        lambda inner: st.one_of(
            st.builds(Sum, inner, inner), st.builds(Product, inner, inner), st.builds(Apply, inner)
        ),
        max_leaves=6,
    )


monotone_lengths = [lambda k: k, lambda k: k + 3, lambda k: 2 * k, lambda k: k * k + 1]


@settings(max_examples=100, deadline=None)
@given(sops(), st.sampled_from(monotone_lengths), st.integers(0, 6))
def test_sop_is_monotone_in_n(poly, l, n):
    assert eval_sop(poly, l, n) <= eval_sop(poly, l, n + 1)
    assert str(poly)


def test_empty_trace_meets_every_bound():
    trace = Trace()
    assert check_query_bound(trace, "0", lambda k: k, 0).ok
    assert check_exponential_bound(trace, 0, 0, 0, lambda k: 0, 0).ok


@settings(max_examples=60, deadline=None)
@given(sops(), sops(), st.lists(st.tuples(st.integers(0, 8), st.integers(0, 8)), max_size=8), st.integers(0, 4))
def test_enlarging_the_bound_never_rejects(poly, extra, records, n):
    trace = Trace()
    for q, a in records:
        trace.record(q, a, "x")
    l = lambda k: k + 1  # noqa: E731
    if check_query_bound(trace, poly, l, n).ok:
        assert check_query_bound(trace, Sum(poly, extra), l, n).ok


def test_query_bound_report():
    trace = Trace()
    for size in (3, 9, 5):
        trace.record(size, 2 * size, "q")
    report = check_query_bound(trace, "3", lambda k: k, 0, bits_poly="l(n+40)")
    assert report.ok and report.queries == 3 and report.answer_bits == 34
    assert report.worst == {"query_len": 9, "answer_len": 18, "tag": "q"}
    assert not check_query_bound(trace, "2", lambda k: k, 0, bits_poly="100").ok
    assert not check_query_bound(trace, "5", lambda k: k, 0, bits_poly="33").ok


def test_exponential_bound_shape():
    assert exponential_bound(1, 2, 3, lambda k: k, 1) == 2 ** (3 + 3)

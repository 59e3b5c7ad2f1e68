"""Names: length-monotone query oracles with declared length and tracing.

A :class:`Name` answers bit-string queries.  Every answer is zero-padded to
the declared length ``L(|a|)``, which makes the name length-monotone and
gives ``|answer(a)| = L(|a|)`` exactly.  Representations also expose a
semantic fast path (exact numbers in, :class:`~lpreps.dyadic.Dyadic` out)
that shares the answer computation with the bit path and records the same
query and answer lengths in the :class:`Trace`.

Complexity is accounted by oracle queries and bits read, and compared with
second-order polynomials (:class:`SecondOrderPoly`) or with the exponential
bound ``2**(A * l(n + B) + C * n)``.

A traced name is not thread safe: concurrent use of one instance has to be
serialised by the caller.  Call :meth:`Name.fresh` to get an independent
trace per worker.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .dyadic import BitString, EncodingError, pair, pair_length, unpair

DEFAULT_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    """An operation needed more oracle queries than its budget allows."""


class InvariantViolation(RuntimeError):
    """A name produced an answer longer than its declared length."""


def default_budget() -> int:
    value = os.environ.get("LPREPS_BUDGET")
    return int(value) if value else DEFAULT_BUDGET


@dataclass(frozen=True)
class TraceRecord:
    query_len: int
    answer_len: int
    tag: str
    count: int = 1

    def to_json(self) -> dict:
        data = {"query_len": self.query_len, "answer_len": self.answer_len, "tag": self.tag}
        if self.count != 1:
            data["count"] = self.count
        return data


class Trace:
    """Append-only query log with a query budget.

    A bulk record stands for ``count`` queries of at most the recorded lengths;
    the counters always equal the number of queries the log represents.
    """

    def __init__(self, budget: int | None = None) -> None:
        self.budget = default_budget() if budget is None else budget
        self.records: list[TraceRecord] = []
        self.queries = 0
        self.answer_bits = 0
        self.query_bits = 0

    def record(self, query_len: int, answer_len: int, tag: str, count: int = 1) -> None:
        if self.queries + count > self.budget:
            raise BudgetExceeded(
                f"{tag}: {self.queries + count} queries exceed the budget of {self.budget}"
            )
        self.records.append(TraceRecord(query_len, answer_len, tag, count))
        self.queries += count
        self.answer_bits += answer_len * count
        self.query_bits += query_len * count

    def __len__(self) -> int:
        return self.queries

    def worst(self) -> TraceRecord | None:
        return max(self.records, key=lambda r: (r.answer_len, r.query_len), default=None)

    def summary(self) -> dict:
        tags: dict[str, int] = {}
        for r in self.records:
            tags[r.tag] = tags.get(r.tag, 0) + r.count
        return {
            "queries": self.queries,
            "answer_bits": self.answer_bits,
            "query_bits": self.query_bits,
            "max_answer_len": max((r.answer_len for r in self.records), default=0),
            "max_query_len": max((r.query_len for r in self.records), default=0),
            "tags": tags,
        }

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r.to_json(), sort_keys=True) + "\n" for r in self.records)


class Name:
    """A total, length-monotone string function.

    ``raw`` computes an unpadded answer; ``length`` is the declared length
    function.  Subclasses in :mod:`lpreps.representations` add semantic
    accessors on top of :meth:`query`.
    """

    kind = "raw"

    def __init__(
        self,
        raw: Callable[[BitString], BitString],
        length: Callable[[int], int],
        trace: Trace | None = None,
        meta: dict | None = None,
    ) -> None:
        self._raw = raw
        self._length = length
        self.trace = trace if trace is not None else Trace()
        self.meta = dict(meta or {})

    def length(self, n: int) -> int:
        return self._length(n)

    def fresh(self, budget: int | None = None) -> "Name":
        """Same oracle, new empty trace."""
        clone = object.__new__(type(self))
        clone.__dict__.update(self.__dict__)
        clone.trace = Trace(budget)
        return clone

    def answer(self, a: BitString) -> BitString:
        """Padded answer without touching the trace."""
        raw = self._raw(a)
        target = self._length(len(a))
        if len(raw) > target:
            raise InvariantViolation(
                f"answer of length {len(raw)} exceeds declared length {target} for |a|={len(a)}"
            )
        return raw + "0" * (target - len(raw))

    def query(self, a: BitString, tag: str = "query") -> BitString:
        out = self.answer(a)
        self.trace.record(len(a), len(out), tag)
        return out

    def __call__(self, a: BitString) -> BitString:
        return self.query(a)

    def check_invariants(self, queries: Iterable[BitString]) -> None:
        """Raise :class:`InvariantViolation` unless answer lengths match ``L`` and
        ``L`` is monotone on the lengths seen."""
        seen: dict[int, int] = {}
        for a in queries:
            out = self.answer(a)
            if len(out) != self._length(len(a)):
                raise InvariantViolation("answer length differs from declared length")
            seen[len(a)] = len(out)
        lengths = sorted(seen)
        for x, y in zip(lengths, lengths[1:]):
            if seen[x] > seen[y]:
                raise InvariantViolation("declared length is not monotone")


def pad_name(raw: Callable[[BitString], BitString], target: Callable[[int], int], meta=None) -> Name:
    """Pad a raw oracle to the declared length ``target``.

    Raises :class:`InvariantViolation` on the first query where ``raw`` answers
    longer than ``target`` allows.
    """
    if isinstance(raw, Name):
        inner = raw

        def raw_fn(a: BitString) -> BitString:
            return inner.answer(a)

        return Name(raw_fn, target, meta=meta or inner.meta)
    return Name(raw, target, meta=meta)


def pair_names(phi: Name, psi: Name) -> Name:
    """``<phi, psi>(a) = <phi(a), psi(a)>``."""

    def raw(a: BitString) -> BitString:
        return pair(phi.answer(a), psi.answer(a))

    def length(n: int) -> int:
        return pair_length(phi.length(n), psi.length(n))

    return Name(raw, length, meta={"pair": [phi.meta, psi.meta]})


def split_pair_answer(answer: BitString) -> tuple[BitString, BitString]:
    return unpair(answer)


def parse_unary(a: BitString) -> int | None:
    """``n`` for ``a = 1**n``, otherwise ``None``."""
    if a.strip("1"):
        return None
    return len(a)


def split_query(a: BitString, parts: int) -> list[BitString] | None:
    """Undo right-nested pairing into ``parts`` components; ``None`` if malformed."""
    out: list[BitString] = []
    try:
        for _ in range(parts - 1):
            head, a = unpair(a)
            out.append(head)
    except EncodingError:
        return None
    out.append(a)
    return out


# -- second-order polynomials -----------------------------------------------------------


class SecondOrderPoly:
    """Abstract syntax tree of a second-order polynomial in ``l`` and ``n``."""

    def evaluate(self, l: Callable[[int], int], n: int) -> int:  # pragma: no cover - abstract
        raise NotImplementedError

    def __add__(self, other: "SecondOrderPoly") -> "SecondOrderPoly":
        return Sum(self, other)

    def __mul__(self, other: "SecondOrderPoly") -> "SecondOrderPoly":
        return Product(self, other)

    def depth(self) -> int:
        return 0


@dataclass(frozen=True)
class FirstOrder(SecondOrderPoly):
    """Integer polynomial in ``n`` with nonnegative coefficients ``c0 + c1 n + ...``."""

    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(c < 0 for c in self.coeffs):
            raise ValueError("first-order clause needs nonnegative coefficients")

    def evaluate(self, l, n):
        return sum(c * n**i for i, c in enumerate(self.coeffs))

    def __str__(self) -> str:
        terms = [f"{c}" if i == 0 else (f"{c}*n^{i}" if c != 1 else f"n^{i}")
                 for i, c in enumerate(self.coeffs) if c]
        return "+".join(terms) or "0"


@dataclass(frozen=True)
class Sum(SecondOrderPoly):
    left: SecondOrderPoly
    right: SecondOrderPoly

    def evaluate(self, l, n):
        return self.left.evaluate(l, n) + self.right.evaluate(l, n)

    def depth(self) -> int:
        return max(self.left.depth(), self.right.depth())

    def __str__(self) -> str:
        return f"({self.left}+{self.right})"


@dataclass(frozen=True)
class Product(SecondOrderPoly):
    left: SecondOrderPoly
    right: SecondOrderPoly

    def evaluate(self, l, n):
        return self.left.evaluate(l, n) * self.right.evaluate(l, n)

    def depth(self) -> int:
        return max(self.left.depth(), self.right.depth())

    def __str__(self) -> str:
        return f"({self.left}*{self.right})"


@dataclass(frozen=True)
class Apply(SecondOrderPoly):
    """``l(P)``."""

    inner: SecondOrderPoly

    def evaluate(self, l, n):
        return l(self.inner.evaluate(l, n))

    def depth(self) -> int:
        return 1 + self.inner.depth()

    def __str__(self) -> str:
        return f"l({self.inner})"


_TOKEN = re.compile(r"\s*(\d+|n|l|\(|\)|\+|\*|\^)")


def parse_sop(text: str) -> SecondOrderPoly:
    """Parse e.g. ``"l(l(n^2+5)+l(l(n)^2))"``.  Powers expand to products."""
    tokens: list[str] = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"unexpected input at {text[pos:]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    index = 0

    def peek():
        return tokens[index] if index < len(tokens) else None

    def take(expected=None):
        nonlocal index
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise ValueError(f"expected {expected!r}, got {tok!r}")
        index += 1
        return tok

    def expr():
        node = term()
        while peek() == "+":
            take("+")
            node = Sum(node, term())
        return node

    def term():
        node = factor()
        while peek() == "*":
            take("*")
            node = Product(node, factor())
        return node

    def factor():
        node = base()
        if peek() == "^":
            take("^")
            power = int(take())
            if power < 1:
                raise ValueError("powers must be positive")
            out = node
            for _ in range(power - 1):
                out = Product(out, node)
            node = out
        return node

    def base():
        tok = take()
        if tok == "n":
            return FirstOrder((0, 1))
        if tok == "l":
            take("(")
            inner = expr()
            take(")")
            return Apply(inner)
        if tok == "(":
            inner = expr()
            take(")")
            return inner
        if tok.isdigit():
            return FirstOrder((int(tok),))
        raise ValueError(f"unexpected token {tok!r}")

    node = expr()
    if index != len(tokens):
        raise ValueError("trailing input")
    return node


def eval_sop(poly: SecondOrderPoly | str, l: Callable[[int], int], n: int) -> int:
    if isinstance(poly, str):
        poly = parse_sop(poly)
    return poly.evaluate(l, n)


@dataclass
class BoundReport:
    ok: bool
    bound: int
    queries: int
    answer_bits: int
    worst: dict | None = field(default=None)


def check_query_bound(
    trace: Trace, poly: SecondOrderPoly | str, l: Callable[[int], int], n: int,
    bits_poly: SecondOrderPoly | str | None = None,
) -> BoundReport:
    """True iff the query count and the answer bits are at most the bound.

    ``bits_poly`` bounds the answer bits separately; by default the same
    polynomial bounds both counters.
    """
    bound = eval_sop(poly, l, n)
    bits_bound = bound if bits_poly is None else eval_sop(bits_poly, l, n)
    worst = trace.worst()
    ok = trace.queries <= bound and trace.answer_bits <= bits_bound
    return BoundReport(ok, bound, trace.queries, trace.answer_bits, worst.to_json() if worst else None)


def exponential_bound(a: int, b: int, c: int, l: Callable[[int], int], n: int) -> int:
    """``2**(A * l(n + B) + C * n)``."""
    return 2 ** (a * l(n + b) + c * n)


def check_exponential_bound(trace: Trace, a: int, b: int, c: int, l, n: int) -> BoundReport:
    bound = exponential_bound(a, b, c, l, n)
    worst = trace.worst()
    return BoundReport(trace.queries <= bound, bound, trace.queries, trace.answer_bits,
                       worst.to_json() if worst else None)


def query_hex(name: Name, request: str) -> str:
    """Hex bridge for cross-process harnesses: ``"<bitlength>:<hex>"`` in and out."""
    length_text, _, digits = request.partition(":")
    length = int(length_text)
    bits = format(int(digits or "0", 16), "b").rjust(length, "0")[-length:] if length else ""
    answer = name.query(bits)
    return f"{len(answer)}:{int(answer, 2):x}" if answer else "0:0"


__all__ = [
    "Apply",
    "BoundReport",
    "BudgetExceeded",
    "FirstOrder",
    "InvariantViolation",
    "Name",
    "Product",
    "SecondOrderPoly",
    "Sum",
    "Trace",
    "TraceRecord",
    "check_exponential_bound",
    "check_query_bound",
    "default_budget",
    "eval_sop",
    "exponential_bound",
    "pad_name",
    "pair_names",
    "parse_sop",
    "parse_unary",
    "query_hex",
    "split_query",
]

"""The test corpus of one-dimensional functions on ``[0, 1]`` with known moduli.

Each :class:`CorpusEntry` bundles a :class:`FunctionSpec` with moduli that
the validators confirm (see ``tests/test_acceptance.py``).  Lp-moduli are given
for ``p`` in ``{1, 2}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .moduli import Modulus
from .symbolic import FunctionSpec

HALF = Fraction(1, 2)
UNIT = [(Fraction(0), Fraction(1))]


@dataclass(frozen=True)
class CorpusEntry:
    key: str
    function: FunctionSpec
    lp_moduli: dict = field(default_factory=dict)
    singularity: Modulus | None = None
    continuity: Modulus | None = None
    sup: Fraction = Fraction(0)
    derivative: str | None = None
    vanishing_ends: bool = False

    def lp_modulus(self, p: int) -> Modulus:
        return self.lp_moduli[p]

    @property
    def sup_exponent(self) -> int:
        """Least integer ``C >= 0`` with ``sup |f| <= 2**C``."""
        c = 0
        while Fraction(2) ** c < self.sup:
            c += 1
        return c


def _lp(a_of_p, b_of_p) -> dict:
    return {p: Modulus.affine(a_of_p(p), b_of_p(p), "lp", p) for p in (1, 2)}


def zero() -> FunctionSpec:
    return FunctionSpec.zero(1, [((Fraction(0), Fraction(1)),)])


def constant_one() -> FunctionSpec:
    return FunctionSpec.piecewise([((0, 1), [1])], UNIT, name="one")


def indicator_half() -> FunctionSpec:
    return FunctionSpec.piecewise([((0, HALF), [1])], UNIT, name="indicator_half")


def identity() -> FunctionSpec:
    return FunctionSpec.piecewise([((0, 1), [0, 1])], UNIT, name="identity")


def half_square() -> FunctionSpec:
    return FunctionSpec.piecewise([((0, 1), [0, 0, HALF])], UNIT, name="half_square")


def hat() -> FunctionSpec:
    """``max(0, 1 - 2|x - 1/2|)``."""
    return FunctionSpec.piecewise([((0, HALF), [0, 2]), ((HALF, 1), [2, -2])], UNIT, name="hat")


def hat_antiderivative() -> FunctionSpec:
    """``x -> integral of hat over [0, x]``: ``x**2`` then ``-x**2 + 2x - 1/2``."""
    return FunctionSpec.piecewise(
        [((0, HALF), [0, 0, 1]), ((HALF, 1), [-HALF, 2, -1])], UNIT, name="hat_antiderivative"
    )


def oscillator(m: int) -> FunctionSpec:
    """``f_m(x) = (-1)**k`` on ``((k-1) 2**-m, k 2**-m]``: alternating signs on cells of width ``2**-m``."""
    width = Fraction(1, 2**m)
    pieces = [(((k - 1) * width, k * width), [(-1) ** k]) for k in range(1, 2**m + 1)]
    return FunctionSpec.piecewise(pieces, UNIT, name=f"oscillator_{m}")


def hat_on(lo, hi, height) -> FunctionSpec:
    """Symmetric tent of the given height supported on ``[lo, hi]``."""
    lo, hi, height = Fraction(lo), Fraction(hi), Fraction(height)
    mid = (lo + hi) / 2
    slope = height / (mid - lo)
    return FunctionSpec.piecewise(
        [((lo, mid), [-slope * lo, slope]), ((mid, hi), [slope * hi, -slope])], UNIT, name="tent"
    )


def build_corpus(oscillators=range(1, 7)) -> dict[str, CorpusEntry]:
    """The eight-function corpus: zero, one, indicator, identity, half square,
    hat, hat antiderivative and the oscillators ``f_1 .. f_6``."""
    jump_lp = _lp(lambda p: p, lambda p: 2)
    entries = [
        CorpusEntry("zero", zero(), {p: Modulus.zero("lp", p) for p in (1, 2)},
                    Modulus.zero("singularity"), Modulus.zero("continuity"), Fraction(0),
                    "zero", True),
        CorpusEntry("one", constant_one(), jump_lp, Modulus.affine(1, 1, "singularity"),
                    Modulus.zero("continuity"), Fraction(1), "zero"),
        CorpusEntry("indicator_half", indicator_half(), jump_lp,
                    Modulus.affine(1, 1, "singularity"), None, Fraction(1)),
        CorpusEntry("identity", identity(), jump_lp, Modulus.affine(1, 1, "singularity"),
                    Modulus.affine(1, 1, "continuity"), Fraction(1), "one"),
        CorpusEntry("half_square", half_square(), jump_lp, Modulus.affine(1, 1, "singularity"),
                    Modulus.affine(1, 1, "continuity"), HALF, "identity"),
        CorpusEntry("hat", hat(), {p: Modulus.affine(1, 2, "lp", p) for p in (1, 2)},
                    Modulus.affine(1, 1, "singularity"), Modulus.affine(1, 2, "continuity"),
                    Fraction(1), None, True),
        CorpusEntry("hat_antiderivative", hat_antiderivative(), jump_lp,
                    Modulus.affine(1, 1, "singularity"), Modulus.affine(1, 1, "continuity"),
                    HALF, "hat"),
    ]
    for m in oscillators:
        entries.append(
            CorpusEntry(
                f"oscillator_{m}", oscillator(m), _lp(lambda p: p, lambda p, m=m: p + m + 1),
                Modulus.affine(1, 1, "singularity"), None, Fraction(1),
            )
        )
    return {e.key: e for e in entries}


CORPUS_KEYS = (
    "zero",
    "one",
    "indicator_half",
    "identity",
    "half_square",
    "hat",
    "hat_antiderivative",
) + tuple(f"oscillator_{m}" for m in range(1, 7))

"""Yes/no propositions as packed bitmasks over the configuration enumeration.

The idempotent observables are exactly the indicators of subsets of the phase
space, so questions are stored as arbitrary-precision integer bitmasks (bit k
<-> configuration k).  Meets, joins and complements over huge families reduce
to word-parallel integer operations, which keeps the completeness properties
cheap to test.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import LatticeError, PhaseSpaceMismatch, UnknownConfiguration
from .observables import Observable, indicator_from_mask, is_idempotent
from .phase import PhaseSpace


def _mask_to_bits(mask: np.ndarray) -> int:
    packed = np.packbits(mask.astype(np.uint8), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def _bits_to_mask(bits: int, n: int) -> np.ndarray:
    raw = bits.to_bytes((n + 7) // 8 or 1, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:n].astype(bool)


@dataclass(frozen=True)
class Question:
    """An element of the Boolean algebra of propositions: a subset of X."""

    space: PhaseSpace
    bits: int

    def __post_init__(self):
        if not 0 <= self.bits < (1 << self.space.size):
            raise UnknownConfiguration("question bitmask references configurations out of range")

    @property
    def members(self) -> frozenset[int]:
        return phi(self)

    def mask(self) -> np.ndarray:
        return _bits_to_mask(self.bits, self.space.size)

    def count(self) -> int:
        return self.bits.bit_count()

    def is_zero(self) -> bool:
        return self.bits == 0

    def is_unit(self) -> bool:
        return self.bits == (1 << self.space.size) - 1

    def as_observable(self) -> Observable:
        return indicator_from_mask(self.space, self.mask())

    def __and__(self, other: "Question") -> "Question":
        return meet(self, other)

    def __or__(self, other: "Question") -> "Question":
        return join(self, other)

    def __invert__(self) -> "Question":
        return complement(self)

    def __le__(self, other: "Question") -> bool:
        _check(self, other)
        return self.bits & other.bits == self.bits

    def __lt__(self, other: "Question") -> bool:
        return self <= other and self.bits != other.bits

    def __repr__(self) -> str:
        n = self.count()
        if n <= 8:
            return f"Question({sorted(self.members)})"
        return f"Question(<{n} of {self.space.size} configs>)"


def _check(q1: Question, q2: Question) -> None:
    if q1.space != q2.space:
        raise PhaseSpaceMismatch("questions live on different phase spaces")


def chi(space: PhaseSpace, members: Iterable[int]) -> Question:
    """The question with the given member configuration indices."""
    bits = 0
    for k in members:
        k = int(k)
        if not 0 <= k < space.size:
            raise UnknownConfiguration(f"configuration index {k} out of range [0, {space.size})")
        bits |= 1 << k
    return Question(space, bits)


def chi_mask(space: PhaseSpace, mask: np.ndarray) -> Question:
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (space.size,):
        raise UnknownConfiguration(f"mask has shape {mask.shape}, expected ({space.size},)")
    return Question(space, _mask_to_bits(mask))


def zero(space: PhaseSpace) -> Question:
    return Question(space, 0)


def unit(space: PhaseSpace) -> Question:
    return Question(space, (1 << space.size) - 1)


def phi(q: Question) -> frozenset[int]:
    """The subset of X a question corresponds to; inverse of ``chi``."""
    out, bits, k = [], q.bits, 0
    while bits:
        low = bits & -bits
        k = low.bit_length() - 1
        out.append(k)
        bits ^= low
    return frozenset(out)


def meet(q1: Question, q2: Question) -> Question:
    _check(q1, q2)
    return Question(q1.space, q1.bits & q2.bits)


def join(q1: Question, q2: Question) -> Question:
    _check(q1, q2)
    return Question(q1.space, q1.bits | q2.bits)


def complement(q: Question) -> Question:
    return Question(q.space, q.bits ^ ((1 << q.space.size) - 1))


def join_all(space: PhaseSpace, qs: Iterable[Question]) -> Question:
    """Join of an arbitrary family; the empty family gives the zero question."""
    bits = 0
    for q in qs:
        if q.space != space:
            raise PhaseSpaceMismatch("questions live on different phase spaces")
        bits |= q.bits
    return Question(space, bits)


def meet_all(space: PhaseSpace, qs: Iterable[Question]) -> Question:
    bits = (1 << space.size) - 1
    for q in qs:
        if q.space != space:
            raise PhaseSpaceMismatch("questions live on different phase spaces")
        bits &= q.bits
    return Question(space, bits)


def question_from_observable(f: Observable, tol: float = 0.0) -> Question:
    """Interpret an idempotent observable as a question."""
    if not is_idempotent(f, tol):
        raise LatticeError("observable is not an idempotent (values must be 0/1)")
    return chi_mask(f.space, np.abs(f.values - 1.0) <= tol)


def question_to_json(q: Question) -> list[int]:
    return sorted(q.members)


def question_from_json(space: PhaseSpace, obj) -> Question:
    """Build a question from a sorted index list or a predicate document.

    Predicate form: ``{"question": {"observable": NAME, "in": [lo, hi]}}``
    (also ``"eq": v`` or ``"values": [...]``); the wrapper key is optional.
    """
    from .observables import observable_from_name

    if isinstance(obj, dict) and "question" in obj:
        obj = obj["question"]
    if isinstance(obj, list):
        return chi(space, obj)
    if not isinstance(obj, dict) or "observable" not in obj:
        raise LatticeError(f"cannot interpret question document {obj!r}")
    f = observable_from_name(space, obj["observable"])
    v = f.values
    if "in" in obj:
        lo, hi = (float(p) for p in obj["in"])
        mask = (v >= lo) & (v <= hi)
    elif "eq" in obj:
        mask = v == float(obj["eq"])
    elif "values" in obj:
        mask = np.isin(v, np.asarray([float(p) for p in obj["values"]]))
    else:
        raise LatticeError("question document needs one of 'in', 'eq', 'values'")
    return chi_mask(space, mask)

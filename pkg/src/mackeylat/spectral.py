"""Borel sets of the line, spectral measures, and the finite functional calculus.

Every observable has a finite spectrum, so a Borel set only matters through
its intersection with that spectrum.  Borel sets are therefore represented
exactly as canonical finite lists of disjoint intervals, and the spectral
decomposition collapses to a finite sum over level sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InvalidSpectralMeasure, UndefinedOnSpectrum
from .observables import Observable
from .phase import PhaseSpace
from .questions import Question, chi_mask, join_all, question_to_json, zero

# Spectrum grouping tolerance: 0 in exact mode (integer-valued tables),
# TAU_SPEC_FLOAT for observables arriving from floating arithmetic.
TAU_SPEC = 0.0
TAU_SPEC_FLOAT = 1e-9

_INF = math.inf


@dataclass(frozen=True)
class Interval:
    """One real interval with open/closed endpoint flags."""

    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        lo_closed, hi_closed = bool(self.lo_closed), bool(self.hi_closed)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval endpoints cannot be NaN")
        if lo == -_INF:
            lo_closed = False
        if hi == _INF:
            hi_closed = False
        if hi < lo or (lo == hi and not (lo_closed and hi_closed)):
            raise ValueError(f"empty interval ({lo}, {hi}) with closures {lo_closed}/{hi_closed}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "lo_closed", lo_closed)
        object.__setattr__(self, "hi_closed", hi_closed)

    def contains(self, x: float) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.lo_closed:
            return False
        if x == self.hi and not self.hi_closed:
            return False
        return True

    def __repr__(self) -> str:
        return f"{'[' if self.lo_closed else '('}{self.lo:g}, {self.hi:g}{']' if self.hi_closed else ')'}"


def _touches(a: Interval, b: Interval) -> bool:
    # b is known to start at or after a: mergeable when they overlap or meet
    # at a point covered by at least one side.
    if b.lo < a.hi:
        return True
    if b.lo == a.hi and (a.hi_closed or b.lo_closed):
        return True
    return False


def _hi_key(iv: Interval) -> tuple[float, bool]:
    return (iv.hi, iv.hi_closed)


@dataclass(frozen=True)
class BorelSet:
    """A finite union of disjoint intervals in canonical (merged, sorted) form."""

    intervals: tuple[Interval, ...]

    def __post_init__(self):
        ivs = sorted(self.intervals, key=lambda iv: (iv.lo, not iv.lo_closed))
        merged: list[Interval] = []
        for iv in ivs:
            if merged and _touches(merged[-1], iv):
                prev = merged[-1]
                if _hi_key(iv) > _hi_key(prev):
                    merged[-1] = Interval(prev.lo, iv.hi, prev.lo_closed, iv.hi_closed)
            else:
                merged.append(iv)
        object.__setattr__(self, "intervals", tuple(merged))

    # -- constructors --------------------------------------------------------

    @staticmethod
    def empty() -> "BorelSet":
        return BorelSet(())

    @staticmethod
    def all() -> "BorelSet":
        return BorelSet((Interval(-_INF, _INF, False, False),))

    @staticmethod
    def interval(lo: float, hi: float, lo_closed: bool = True, hi_closed: bool = True) -> "BorelSet":
        return BorelSet((Interval(lo, hi, lo_closed, hi_closed),))

    @staticmethod
    def point(v: float) -> "BorelSet":
        return BorelSet((Interval(v, v, True, True),))

    @staticmethod
    def from_values(vs: Iterable[float]) -> "BorelSet":
        return BorelSet(tuple(Interval(v, v, True, True) for v in vs))

    # -- membership ----------------------------------------------------------

    def is_empty(self) -> bool:
        return not self.intervals

    def contains(self, x: float) -> bool:
        return any(iv.contains(x) for iv in self.intervals)

    def contains_array(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        mask = np.zeros(xs.shape, dtype=bool)
        for iv in self.intervals:
            lo_ok = xs >= iv.lo if iv.lo_closed else xs > iv.lo
            hi_ok = xs <= iv.hi if iv.hi_closed else xs < iv.hi
            mask |= lo_ok & hi_ok
        return mask

    # -- set algebra ---------------------------------------------------------

    def union(self, other: "BorelSet") -> "BorelSet":
        return BorelSet(self.intervals + other.intervals)

    def complement(self) -> "BorelSet":
        out: list[Interval] = []
        cursor, cursor_closed = -_INF, False  # next gap starts here
        for iv in self.intervals:
            try:
                out.append(Interval(cursor, iv.lo, cursor_closed, not iv.lo_closed))
            except ValueError:
                pass  # empty gap between touching intervals
            cursor, cursor_closed = iv.hi, not iv.hi_closed
        try:
            out.append(Interval(cursor, _INF, cursor_closed, False))
        except ValueError:
            pass
        return BorelSet(tuple(out))

    def intersect(self, other: "BorelSet") -> "BorelSet":
        out = []
        for a in self.intervals:
            for b in other.intervals:
                lo, lo_c = max((a.lo, not a.lo_closed), (b.lo, not b.lo_closed))
                hi, hi_c = min((a.hi, a.hi_closed), (b.hi, b.hi_closed))
                try:
                    out.append(Interval(lo, hi, not lo_c, hi_c))
                except ValueError:
                    continue
        return BorelSet(tuple(out))

    def __repr__(self) -> str:
        if not self.intervals:
            return "BorelSet(empty)"
        return "BorelSet(" + " u ".join(repr(iv) for iv in self.intervals) + ")"

    # -- serialization -------------------------------------------------------

    def to_json(self) -> list[dict]:
        def enc(v: float):
            if v == _INF:
                return "inf"
            if v == -_INF:
                return "-inf"
            return v

        return [
            {"lo": enc(iv.lo), "hi": enc(iv.hi), "lo_closed": iv.lo_closed, "hi_closed": iv.hi_closed}
            for iv in self.intervals
        ]

    @staticmethod
    def from_json(obj: Sequence[dict]) -> "BorelSet":
        def dec(v) -> float:
            if isinstance(v, str):
                return float(v)
            return float(v)

        return BorelSet(
            tuple(
                Interval(dec(d["lo"]), dec(d["hi"]), d.get("lo_closed", True), d.get("hi_closed", True))
                for d in obj
            )
        )


# ---------------------------------------------------------------------------
# Spectral measures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralMeasure:
    """Finite proposition-valued measure: (value, level-set) atoms partitioning X."""

    space: PhaseSpace
    atoms: tuple[tuple[float, Question], ...]
    tau: float = TAU_SPEC

    def __post_init__(self):
        lams = [lam for lam, _ in self.atoms]
        if any(b <= a for a, b in zip(lams, lams[1:])):
            raise InvalidSpectralMeasure("atom values must be strictly ascending")
        covered = 0
        for _, q in self.atoms:
            if q.space != self.space:
                raise InvalidSpectralMeasure("atom question lives on a different phase space")
            if covered & q.bits:
                raise InvalidSpectralMeasure("atom level sets overlap")
            covered |= q.bits
        if covered != (1 << self.space.size) - 1:
            raise InvalidSpectralMeasure("atom level sets do not cover the phase space")

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([lam for lam, _ in self.atoms])

    def to_json(self) -> list[dict]:
        return [{"lambda": lam, "members": question_to_json(q)} for lam, q in self.atoms]


def spectrum(f: Observable, tau: float = TAU_SPEC) -> list[float]:
    """Distinct values of the table, ascending, grouped within ``tau``."""
    vals = np.unique(f.values)
    if tau <= 0.0 or len(vals) < 2:
        return [float(v) for v in vals]
    groups: list[list[float]] = [[float(vals[0])]]
    for v in vals[1:]:
        if float(v) - groups[-1][-1] <= tau:
            groups[-1].append(float(v))
        else:
            groups.append([float(v)])
    return [float(np.mean(g)) for g in groups]


def spectral_measure(f: Observable, tau: float = TAU_SPEC) -> SpectralMeasure:
    """Level-set decomposition of an observable."""
    if tau <= 0.0:
        vals, inverse = np.unique(f.values, return_inverse=True)
        atoms = tuple(
            (float(vals[i]), chi_mask(f.space, inverse == i)) for i in range(len(vals))
        )
        return SpectralMeasure(f.space, atoms, tau=0.0)
    lams = spectrum(f, tau)
    atoms = []
    for lam in lams:
        mask = np.abs(f.values - lam) <= tau
        atoms.append((lam, chi_mask(f.space, mask)))
    return SpectralMeasure(f.space, tuple(atoms), tau=tau)


def apply_measure(Q: SpectralMeasure, B: BorelSet) -> Question:
    """Join of the level sets whose value lies in ``B``."""
    hits = [q for lam, q in Q.atoms if B.contains(lam)]
    if not hits:
        return zero(Q.space)
    return join_all(Q.space, hits)


def reconstruct(Q: SpectralMeasure) -> Observable:
    """Rebuild the observable as the weighted sum of its level-set indicators."""
    values = np.zeros(Q.space.size)
    for lam, q in Q.atoms:
        values[q.mask()] = lam
    return Observable(Q.space, values)


def resolution(Q: SpectralMeasure, lam: float) -> Question:
    """The question 'outcome <= lam'; nondecreasing in lam."""
    return apply_measure(Q, BorelSet.interval(-_INF, lam, False, True))


def functional_calculus(g: Callable[[float], float], f: Observable, tau: float = TAU_SPEC) -> Observable:
    """Apply a real function through the spectral decomposition of ``f``.

    Computes both the level-set route (sum of g(value) over atoms) and plain
    pointwise composition, and checks they agree before returning.
    """
    Q = spectral_measure(f, tau)
    via_measure = np.zeros(f.space.size)
    for lam, q in Q.atoms:
        try:
            y = float(g(lam))
        except Exception as exc:
            raise UndefinedOnSpectrum(f"g is undefined at spectral value {lam}: {exc}") from exc
        if not math.isfinite(y):
            raise UndefinedOnSpectrum(f"g({lam}) = {y} is not a finite real")
        via_measure[q.mask()] = y
    pointwise = np.array([float(g(v)) for v in f.values])
    if tau <= 0.0:
        agree = np.array_equal(via_measure, pointwise)
    else:
        agree = float(np.max(np.abs(via_measure - pointwise))) <= max(tau, 1e-9)
    if not agree:
        raise InvalidSpectralMeasure("level-set route disagrees with pointwise composition")
    return Observable(f.space, via_measure)


def measure_from_json(space: PhaseSpace, obj: Sequence[dict]) -> SpectralMeasure:
    from .questions import chi

    atoms = tuple((float(d["lambda"]), chi(space, d["members"])) for d in obj)
    return SpectralMeasure(space, atoms)

"""Outcome probabilities of individual measurements, and seeded sampling.

The probability that measuring ``f`` in state ``zeta`` lands in a Borel set B
is the state's mass on the level sets with value in B.  A measurement draw
isolates one configuration from the ensemble and reports the stored value
there; draws use inverse-CDF over the canonical configuration order with a
PCG64 generator, so a (command, seed) pair reproduces bit-identical output.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import LatticeError, PhaseSpaceMismatch, WeightSumError
from .observables import Observable
from .questions import Question
from .spectral import BorelSet, apply_measure, spectral_measure
from .states import TAU_NORM, State, pair


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities of each spectral value, ascending, summing to one."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        lams = [lam for lam, _ in self.points]
        if any(b <= a for a, b in zip(lams, lams[1:])):
            raise LatticeError("outcome values must be strictly ascending")
        ps = np.array([p for _, p in self.points])
        if np.any(ps < 0.0):
            raise WeightSumError("outcome probabilities must be nonnegative")
        if abs(float(ps.sum()) - 1.0) > TAU_NORM:
            raise WeightSumError(f"outcome probabilities sum to {ps.sum()!r}")

    def prob(self, lam: float) -> float:
        for v, p in self.points:
            if v == lam:
                return p
        return 0.0

    def mean(self) -> float:
        return float(sum(lam * p for lam, p in self.points))

    def __iter__(self):
        return iter(self.points)


def probability(f: Observable, zeta: State, B: BorelSet) -> float:
    """Mass the state puts on {x : f(x) in B}, via the spectral measure of f."""
    if f.space != zeta.space:
        raise PhaseSpaceMismatch("observable and state live on different phase spaces")
    q = apply_measure(spectral_measure(f), B)
    return pair(zeta, q.as_observable())


def outcome_distribution(f: Observable, zeta: State, tau: float = 0.0) -> OutcomeDistribution:
    """Distribution of a single measurement of ``f`` over its spectrum."""
    if f.space != zeta.space:
        raise PhaseSpaceMismatch("observable and state live on different phase spaces")
    Q = spectral_measure(f, tau)
    points = tuple((lam, pair(zeta, q.as_observable())) for lam, q in Q.atoms)
    return OutcomeDistribution(points)


def sample_configurations(zeta: State, n: int, seed: int) -> np.ndarray:
    """Draw configuration indices i.i.d. from the state, deterministically."""
    if n < 1:
        raise LatticeError(f"need at least one draw, got {n}")
    rng = np.random.default_rng(seed)
    cdf = np.cumsum(zeta.weights)
    u = rng.random(n)
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, zeta.space.size - 1)


def sample_measurements(f: Observable, zeta: State, n: int, seed: int) -> np.ndarray:
    """Measure ``f`` on ``n`` independently drawn configurations."""
    if f.space != zeta.space:
        raise PhaseSpaceMismatch("observable and state live on different phase spaces")
    return f.values[sample_configurations(zeta, n, seed)]


def transmission(F: Question, zeta: State) -> float:
    """Probability that the filter passing exactly the members of F transmits.

    Computed both as the state's pairing with the indicator and as the
    outcome probability of that indicator landing in (1/2, 3/2); the two
    routes must agree exactly.
    """
    chi_f = F.as_observable()
    direct = pair(zeta, chi_f)
    via_filter = probability(chi_f, zeta, BorelSet.interval(0.5, 1.5, False, False))
    if direct != via_filter:
        raise LatticeError(f"transmission routes disagree: {direct!r} vs {via_filter!r}")
    return direct


# ---------------------------------------------------------------------------
# CSV emission (lambda, probability) and (draw_index, outcome)
# ---------------------------------------------------------------------------

def write_distribution_csv(dist: OutcomeDistribution, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["lambda", "probability"])
        for lam, p in dist.points:
            writer.writerow([f"{lam:.17g}", f"{p:.17g}"])


def read_distribution_csv(path: str) -> OutcomeDistribution:
    points = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:2] != ["lambda", "probability"]:
            raise LatticeError(f"{path}: expected header lambda,probability")
        for row in reader:
            points.append((float(row[0]), float(row[1])))
    return OutcomeDistribution(tuple(points))


def write_samples_csv(outcomes: np.ndarray, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["draw_index", "outcome"])
        for k, v in enumerate(outcomes):
            writer.writerow([k, f"{v:.17g}"])


def read_samples_csv(path: str) -> np.ndarray:
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:2] != ["draw_index", "outcome"]:
            raise LatticeError(f"{path}: expected header draw_index,outcome")
        for row in reader:
            out.append(float(row[1]))
    return np.asarray(out)

"""Separation of states by observables, weak equivalence, and ensemble trends.

Two distinct states are always told apart by the question carrying their
total-variation witness set; two distinct observables are told apart by a
Dirac state at a configuration where they differ.  Weak equivalence relaxes
this: states whose expectations agree within ``epsilon`` on a finite probe
set are indistinguishable at that measurement accuracy.

The convergence experiments compare the microcanonical, canonical and
grand-canonical ensembles on a family of growing boxes by exact enumeration:
per (size, ensemble) they record the expectation of an intensive probe and
the probability of deviating from it by more than ``delta``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidEventRule, LatticeError, PhaseSpaceMismatch
from .observables import Observable, energy, magnetization, occupation
from .phase import DEFAULT_ENUM_CAP, ModelSpec, PhaseSpace, build_phase_space
from .questions import Question, chi, chi_mask
from .spectral import BorelSet, spectrum
from .states import (
    TAU_NORM,
    State,
    dirac,
    gibbs,
    grand_canonical,
    microcanonical,
    pair,
    uniform,
)
from .measurement import probability

ENSEMBLE_ORDER = ("canonical", "grand-canonical", "microcanonical")


# ---------------------------------------------------------------------------
# Separation
# ---------------------------------------------------------------------------

def separating_observable(zeta1: State, zeta2: State) -> Observable | None:
    """An indicator observable with different expectations in the two states.

    Returns the indicator of {x : w1(x) > w2(x)} (the total-variation witness
    set), or None when the weight tables agree within ``TAU_NORM``.
    """
    if zeta1.space != zeta2.space:
        raise PhaseSpaceMismatch("states live on different phase spaces")
    diff = zeta1.weights - zeta2.weights
    if float(np.max(np.abs(diff))) <= TAU_NORM:
        return None
    witness = chi_mask(zeta1.space, diff > 0)
    return witness.as_observable().with_name("tv-witness")


def states_separate_observables(f: Observable, g: Observable) -> State | None:
    """A Dirac state at a configuration where the two tables differ, or None."""
    if f.space != g.space:
        raise PhaseSpaceMismatch("observables live on different phase spaces")
    diff = np.abs(f.values - g.values)
    if float(np.max(diff)) <= TAU_NORM:
        return None
    return dirac(f.space, int(np.argmax(diff)))


# ---------------------------------------------------------------------------
# Weak equivalence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProbeSet:
    """A finite family of probe observables and a measurement accuracy."""

    observables: tuple[Observable, ...]
    epsilon: float

    def __post_init__(self):
        if not self.observables:
            raise LatticeError("probe set must be nonempty")
        if not self.epsilon > 0:
            raise LatticeError(f"epsilon must be positive, got {self.epsilon}")


@dataclass(frozen=True)
class EquivalenceReport:
    """Per-probe expectation gaps and the resulting verdict."""

    equivalent: bool
    epsilon: float
    gaps: tuple[tuple[str, float], ...]

    def __bool__(self) -> bool:
        return self.equivalent


def weakly_equivalent(zeta1: State, zeta2: State, probes: ProbeSet) -> EquivalenceReport:
    """True when every probe expectation agrees within epsilon."""
    gaps = []
    for k, f in enumerate(probes.observables):
        gap = abs(pair(zeta1, f) - pair(zeta2, f))
        gaps.append((f.name or f"probe{k}", gap))
    ok = all(gap < probes.epsilon for _, gap in gaps)
    return EquivalenceReport(ok, probes.epsilon, tuple(gaps))


# ---------------------------------------------------------------------------
# Ensemble-equivalence experiment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceRow:
    size: int
    ensemble: str
    probe_mean: float
    deviation_prob: float
    energy_per_site: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.deviation_prob <= 1.0 + TAU_NORM:
            raise LatticeError(f"deviation probability {self.deviation_prob} outside [0, 1]")


@dataclass(frozen=True)
class ConvergenceReport:
    rows: tuple[ConvergenceRow, ...]

    def sizes(self) -> list[int]:
        return sorted({r.size for r in self.rows})

    def row(self, size: int, ensemble: str) -> ConvergenceRow:
        for r in self.rows:
            if r.size == size and r.ensemble == ensemble:
                return r
        raise LatticeError(f"no report row for size {size}, ensemble {ensemble!r}")

    def series(self, ensemble: str) -> list[float]:
        """Deviation probabilities of one ensemble, in size order."""
        return [self.row(n, ensemble).deviation_prob for n in self.sizes()]

    def cross_gap(self, size: int, ens_a: str, ens_b: str) -> float:
        """Absolute gap between two ensembles' probe expectations at one size."""
        return abs(self.row(size, ens_a).probe_mean - self.row(size, ens_b).probe_mean)


def nearest_shell_energy(H: Observable, target: float) -> float:
    """The attainable energy level closest to ``target``."""
    levels = np.asarray(spectrum(H))
    return float(levels[np.argmin(np.abs(levels - target))])


def per_site(f: Observable) -> Observable:
    from .observables import pointwise_combine

    out = pointwise_combine("scale", f, 1.0 / f.space.n_sites)
    return out.with_name(f"{f.name or 'probe'}/n")


def ensemble_convergence(
    specs: Sequence[ModelSpec],
    h_builder: Callable[[PhaseSpace], Observable] = energy,
    probe_builder: Callable[[PhaseSpace], Observable] = lambda sp: per_site(magnetization(sp)),
    delta: float = 0.1,
    beta: float = 1.0,
    mu_chem: float = 0.0,
    n_builder: Callable[[PhaseSpace], Observable] = occupation,
    shell_width: float = 0.0,
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> ConvergenceReport:
    """Compare the three standard ensembles across a family of growing boxes.

    Matching rule: the canonical ensemble is fixed by ``beta``; the
    microcanonical target energy is the canonical mean energy rounded to the
    nearest attainable shell; the grand-canonical ensemble shares ``beta``
    and uses ``mu_chem`` with the caller's particle-count observable.

    For every (size, ensemble) cell the report records the probe expectation
    m and the deviation probability P(|probe - m| > delta).
    """
    sizes = [spec.n_sites for spec in specs]
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise LatticeError(f"model sizes must be strictly ascending, got {sizes}")
    rows = []
    for spec in specs:
        space = build_phase_space(spec, enum_cap=enum_cap)
        H = h_builder(space)
        probe = probe_builder(space)
        canonical = gibbs(H, beta)
        e_target = pair(canonical, H)
        e_shell = nearest_shell_energy(H, e_target)
        cells = {
            "canonical": canonical,
            "grand-canonical": grand_canonical(H, n_builder(space), beta, mu_chem),
            "microcanonical": microcanonical(H, e_shell, shell_width),
        }
        for name in ENSEMBLE_ORDER:
            zeta = cells[name]
            m = pair(zeta, probe)
            window = BorelSet.interval(m - delta, m + delta)
            dev = probability(probe, zeta, window.complement())
            rows.append(
                ConvergenceRow(
                    size=space.n_sites,
                    ensemble=name,
                    probe_mean=m,
                    deviation_prob=dev,
                    energy_per_site=pair(zeta, H) / space.n_sites,
                )
            )
    return ConvergenceReport(tuple(rows))


# ---------------------------------------------------------------------------
# Dominated-convergence demonstration
# ---------------------------------------------------------------------------

def _all_up_event(space: PhaseSpace) -> Question:
    # Largest symbol at every site = last configuration in lexicographic order.
    return chi(space, [space.size - 1])


def dominated_convergence_demo(
    n_list: Sequence[int],
    c_rule: Callable[[PhaseSpace, float], float] | None = None,
    a_rule: Callable[[PhaseSpace], Question] = _all_up_event,
    state_builder: Callable[[PhaseSpace], State] = uniform,
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> ConvergenceReport:
    """Spike observables that converge to zero in probability but not in mean.

    For each size, f = c * indicator(A) with default c = 1/P(A), so the
    expectation stays exactly 1 while P(f != 0) = P(A) shrinks.  Passing
    ``c_rule = lambda space, p: 1.0`` gives the bounded control, whose
    expectations do vanish (dominating function 1).
    """
    if c_rule is None:
        c_rule = lambda space, p_event: 1.0 / p_event
    rows = []
    for n in n_list:
        spec = ModelSpec(dims=(int(n),), alphabet=(-1.0, 1.0))
        space = build_phase_space(spec, enum_cap=enum_cap)
        zeta = state_builder(space)
        event = a_rule(space)
        p_event = pair(zeta, event.as_observable())
        if p_event == 0.0:
            raise InvalidEventRule(f"event rule gives a probability-zero event at size {n}")
        c = float(c_rule(space, p_event))
        spike = (event.as_observable() * c).with_name(f"spike(c={c:g})")
        mean = pair(zeta, spike)
        nonzero = probability(spike, zeta, BorelSet.point(0.0).complement())
        rows.append(
            ConvergenceRow(size=space.n_sites, ensemble="uniform", probe_mean=mean, deviation_prob=nonzero)
        )
    return ConvergenceReport(tuple(rows))


# ---------------------------------------------------------------------------
# Report emission
# ---------------------------------------------------------------------------

REPORT_HEADER = ["size", "ensemble", "probe_mean", "deviation_prob", "energy_per_site"]


def write_report_csv(report: ConvergenceReport, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPORT_HEADER)
        for r in report.rows:
            writer.writerow(
                [
                    r.size,
                    r.ensemble,
                    f"{r.probe_mean:.17g}",
                    f"{r.deviation_prob:.17g}",
                    "" if r.energy_per_site is None else f"{r.energy_per_site:.17g}",
                ]
            )


def read_report_csv(path: str) -> ConvergenceReport:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != REPORT_HEADER:
            raise LatticeError(f"{path}: expected header {','.join(REPORT_HEADER)}")
        for row in reader:
            rows.append(
                ConvergenceRow(
                    size=int(row[0]),
                    ensemble=row[1],
                    probe_mean=float(row[2]),
                    deviation_prob=float(row[3]),
                    energy_per_site=None if row[4] == "" else float(row[4]),
                )
            )
    return ConvergenceReport(tuple(rows))

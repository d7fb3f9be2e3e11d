"""States as probability weight tables, with ensemble constructors and threads.

A state assigns one nonnegative weight per configuration, summing to one
within ``TAU_NORM``.  Pairing a state with an observable is the weighted sum
over configurations; Dirac states are the extreme points and every state is
their convex combination with its own weights.

Local states are marginals on regions; a thread collects the marginals on
every sub-box and must be consistent under further marginalization.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    EmptyEnergyShell,
    InconsistentThread,
    LatticeError,
    PhaseSpaceMismatch,
    TableLengthMismatch,
    UnknownConfiguration,
    WeightSumError,
)
from .observables import Observable
from .phase import PhaseSpace, Region, enumerate_regions, region_pairs_nested

TAU_NORM = 1e-12


def _validated_weights(weights, size: int) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (size,):
        raise TableLengthMismatch(f"weight table has shape {w.shape}, expected ({size},)")
    if np.any(w < 0.0):
        raise WeightSumError(f"negative weight {w.min()!r}")
    total = float(np.sum(w))
    if abs(total - 1.0) > TAU_NORM:
        raise WeightSumError(f"weights sum to {total!r}, not 1 within {TAU_NORM}")
    w = w.copy()
    w.flags.writeable = False
    return w


@dataclass(frozen=True)
class State:
    """A probability distribution over the configurations of a phase space."""

    space: PhaseSpace
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", _validated_weights(self.weights, self.space.size))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, State)
            and self.space == other.space
            and np.array_equal(self.weights, other.weights)
        )

    def __hash__(self) -> int:
        return hash((self.space, self.weights.tobytes()))

    def close_to(self, other: "State", tol: float = TAU_NORM) -> bool:
        return self.space == other.space and bool(np.max(np.abs(self.weights - other.weights)) <= tol)

    def support_size(self) -> int:
        return int(np.count_nonzero(self.weights))

    def is_pure(self) -> bool:
        """Extreme points of the state set are exactly the Dirac weights."""
        return self.support_size() == 1

    def __repr__(self) -> str:
        return f"<State on {self.space.size} configs, support {self.support_size()}>"


def pair(state: State, f: Observable) -> float:
    """Expectation of ``f`` in ``state``: the weighted sum over configurations."""
    if state.space != f.space:
        raise PhaseSpaceMismatch("state and observable live on different phase spaces")
    return float(np.sum(state.weights * f.values))


def dirac(space: PhaseSpace, x) -> State:
    """Unit mass on a single configuration (tuple or index)."""
    idx = int(x) if isinstance(x, (int, np.integer)) else space.index_of(x)
    if not 0 <= idx < space.size:
        raise UnknownConfiguration(f"configuration index {idx} out of range")
    w = np.zeros(space.size)
    w[idx] = 1.0
    return State(space, w)


def uniform(space: PhaseSpace) -> State:
    return State(space, np.full(space.size, 1.0 / space.size))


def mix(ts: Sequence[float], states: Sequence[State]) -> State:
    """Convex combination of states with the given coefficients."""
    if len(ts) != len(states):
        raise TableLengthMismatch(f"{len(ts)} coefficients for {len(states)} states")
    if not states:
        raise TableLengthMismatch("mix needs at least one state")
    ts_arr = np.asarray(ts, dtype=np.float64)
    if np.any(ts_arr < 0.0) or abs(float(ts_arr.sum()) - 1.0) > TAU_NORM:
        raise WeightSumError(f"mixture coefficients must be nonnegative and sum to 1, got sum {ts_arr.sum()!r}")
    space = states[0].space
    w = np.zeros(space.size)
    for t, s in zip(ts_arr, states):
        if s.space != space:
            raise PhaseSpaceMismatch("mixed states live on different phase spaces")
        w += t * s.weights
    total = float(np.sum(w))
    if abs(total - 1.0) > TAU_NORM:  # renormalize only on real drift, keeping identities exact
        w = w / total
    return State(space, w)


def microcanonical(H: Observable, E: float, dE: float = 0.0) -> State:
    """Uniform distribution on the energy shell {x : |H(x) - E| <= dE}."""
    if dE < 0:
        raise LatticeError(f"shell width must be nonnegative, got {dE}")
    mask = np.abs(H.values - float(E)) <= dE
    if not mask.any():
        levels = np.unique(H.values)
        nearest = float(levels[np.argmin(np.abs(levels - float(E)))])
        raise EmptyEnergyShell(
            f"no configuration within {dE} of energy {E}; nearest attainable energy is {nearest}",
            nearest_energy=nearest,
        )
    w = mask.astype(np.float64)
    return State(H.space, w / np.sum(w))


def gibbs(H: Observable, beta: float) -> State:
    """Canonical weights exp(-beta H), max-shifted before exponentiation."""
    beta = float(beta)
    if not math.isfinite(beta):
        raise LatticeError(f"beta must be finite, got {beta}")
    a = -beta * H.values
    a = a - np.max(a)
    w = np.exp(a)
    return State(H.space, w / np.sum(w))


def grand_canonical(H: Observable, N: Observable, beta: float, mu_chem: float) -> State:
    """Weights exp(-beta (H - mu N)) for a caller-designated particle count N."""
    beta, mu_chem = float(beta), float(mu_chem)
    if not (math.isfinite(beta) and math.isfinite(mu_chem)):
        raise LatticeError("beta and mu_chem must be finite")
    if N.space != H.space:
        raise PhaseSpaceMismatch("H and N live on different phase spaces")
    a = -beta * (H.values - mu_chem * N.values)
    a = a - np.max(a)
    w = np.exp(a)
    return State(H.space, w / np.sum(w))


# ---------------------------------------------------------------------------
# Local states and threads
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LocalState:
    """Marginal distribution on the local configurations of a region."""

    space: PhaseSpace
    region: Region
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "weights", _validated_weights(self.weights, self.space.local_size(self.region))
        )

    def configurations(self):
        return self.space.local_configurations(self.region)

    def __repr__(self) -> str:
        return f"<LocalState on {self.region!r}, {len(self.weights)} local configs>"


def marginalize(state: State, region: Region) -> LocalState:
    """Sum the weights over the fibers of restriction to ``region``."""
    ranks = state.space.local_rank_column(region)
    local = np.bincount(ranks, weights=state.weights, minlength=state.space.local_size(region))
    return LocalState(state.space, region, local)


def _local_marginal(ls: LocalState, sub: Region) -> np.ndarray:
    """Marginal weights of a local state on a subregion of its region."""
    space = ls.space
    positions = [ls.region.sites.index(s) for s in sub.sites]
    base, k_sub = space.base, len(sub)
    n_local = len(ls.weights)
    ranks = np.zeros(n_local, dtype=np.int64)
    idx = np.arange(n_local, dtype=np.int64)
    for j, pos in enumerate(positions):
        digit = (idx // base ** (len(ls.region) - 1 - pos)) % base
        ranks += digit * base ** (k_sub - 1 - j)
    return np.bincount(ranks, weights=ls.weights, minlength=space.local_size(sub))


@dataclass(frozen=True)
class Thread:
    """One local state per sub-box, consistent under marginalization.

    Consistency is checked at construction: for every nested pair r1 < r2 the
    marginal of the r2 entry onto r1 must reproduce the r1 entry within
    ``TAU_NORM``, else ``InconsistentThread`` names the first violated pair.
    """

    space: PhaseSpace
    entries: tuple[LocalState, ...]

    def __post_init__(self):
        regions = [e.region for e in self.entries]
        expected = enumerate_regions(self.space.spec)
        if regions != expected:
            raise InconsistentThread(
                f"thread must carry one entry per sub-box in canonical order "
                f"({len(regions)} given, {len(expected)} expected)"
            )
        by_region = {e.region: e for e in self.entries}
        for r1, r2 in region_pairs_nested(regions):
            got = _local_marginal(by_region[r2], r1)
            want = by_region[r1].weights
            if float(np.max(np.abs(got - want))) > TAU_NORM:
                raise InconsistentThread(
                    f"marginal of {r2!r} onto {r1!r} disagrees with the {r1!r} entry"
                )

    def local(self, region: Region) -> LocalState:
        for e in self.entries:
            if e.region == region:
                return e
        raise LatticeError(f"thread has no entry for {region!r}")


def thread_of(state: State) -> Thread:
    """Collect the marginals of a state on every sub-box."""
    entries = tuple(marginalize(state, r) for r in enumerate_regions(state.space.spec))
    return Thread(state.space, entries)


def state_of(thread: Thread) -> State:
    """Recover the global state from the entry on the maximal region."""
    top = thread.entries[-1]
    # The maximal sub-box is the full lattice; its local enumeration is the
    # global one, so the weights carry over unchanged.
    return State(thread.space, top.weights)


def total_variation(s1: State, s2: State) -> float:
    """Half the L1 distance between weight tables."""
    if s1.space != s2.space:
        raise PhaseSpaceMismatch("states live on different phase spaces")
    return 0.5 * float(np.sum(np.abs(s1.weights - s2.weights)))


# ---------------------------------------------------------------------------
# Construction from JSON documents and CSV round-trips
# ---------------------------------------------------------------------------

def state_from_json(space: PhaseSpace, obj: dict) -> State:
    """Build a state from ``{"kind": ..., ...}`` (or wrapped under "state").

    Kinds: uniform, gibbs(beta), microcanonical(E, dE), grand-canonical(beta,
    mu), dirac(index).  Ensembles use the built-in energy/occupation
    observables.
    """
    from .observables import energy, occupation

    if "state" in obj:
        obj = obj["state"]
    kind = obj.get("kind")
    if kind == "uniform":
        return uniform(space)
    if kind == "gibbs":
        return gibbs(energy(space), obj["beta"])
    if kind == "microcanonical":
        return microcanonical(energy(space), obj["E"], obj.get("dE", 0.0))
    if kind in ("grand-canonical", "grand_canonical"):
        return grand_canonical(energy(space), occupation(space), obj["beta"], obj.get("mu", 0.0))
    if kind == "dirac":
        return dirac(space, int(obj["index"]))
    raise LatticeError(f"unknown state kind {kind!r}")


def write_state_csv(state: State, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["config_index", "weight"])
        for k, w in enumerate(state.weights):
            writer.writerow([k, f"{w:.17g}"])


def read_state_csv(space: PhaseSpace, path: str) -> State:
    w = np.zeros(space.size)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:2] != ["config_index", "weight"]:
            raise LatticeError(f"{path}: expected header config_index,weight")
        for row in reader:
            w[int(row[0])] = float(row[1])
    return State(space, w)

"""Built-in property suite exercised by the ``selftest`` CLI verb.

Runs the structural identities of the question logic, the state set, the
spectral decomposition and the separation results on small models with a
seeded generator.  Mirrors the pytest acceptance suite at reduced counts so
an installed copy can be checked without a test harness.
"""

from __future__ import annotations

import numpy as np

from . import equivalence, measurement, observables, questions, spectral, states
from .phase import build_phase_space, ising_chain


def _random_question(rng, space) -> questions.Question:
    return questions.chi_mask(space, rng.random(space.size) < rng.random())


def _random_state(rng, space) -> states.State:
    w = rng.random(space.size) + 1e-9
    return states.State(space, w / w.sum())


def _check_question_logic(rng, space) -> None:
    full = frozenset(range(space.size))
    for _ in range(200):
        e, f = _random_question(rng, space), _random_question(rng, space)
        E, F = questions.phi(e), questions.phi(f)
        assert questions.phi(questions.meet(e, f)) == E & F
        assert questions.phi(questions.join(e, f)) == E | F
        assert questions.phi(questions.complement(e)) == full - E
        assert questions.chi(space, questions.phi(e)) == e
    family = [_random_question(rng, space) for _ in range(64)]
    union = frozenset().union(*(questions.phi(q) for q in family))
    assert questions.join_all(space, family) == questions.chi(space, union)
    q = _random_question(rng, space)
    lhs = questions.meet(q, questions.join_all(space, family))
    rhs = questions.join_all(space, [questions.meet(q, qi) for qi in family])
    assert lhs == rhs


def _check_states(rng, space) -> None:
    diracs = [states.dirac(space, k) for k in range(space.size)]
    for _ in range(100):
        e, f = _random_question(rng, space), _random_question(rng, space)
        chi_e, chi_f = e.as_observable(), f.as_observable()
        dominated = all(states.pair(d, chi_e) <= states.pair(d, chi_f) for d in diracs)
        assert dominated == (e <= f)
    members = [_random_state(rng, space) for _ in range(16)]
    ts = rng.random(16)
    ts /= ts.sum()
    mixed = states.mix(ts, members)
    assert abs(float(np.sum(mixed.weights)) - 1.0) <= states.TAU_NORM
    probe = observables.magnetization(space)
    expected = sum(t * states.pair(s, probe) for t, s in zip(ts, members))
    assert abs(states.pair(mixed, probe) - expected) <= 1e-12


def _check_spectral(rng, space) -> None:
    for _ in range(50):
        f = observables.Observable(space, rng.integers(-3, 4, space.size).astype(float))
        Q = spectral.spectral_measure(f)
        assert spectral.reconstruct(Q) == f
        sq = spectral.functional_calculus(lambda v: v * v, f)
        assert np.array_equal(sq.values, f.values**2)
        b1 = spectral.BorelSet.interval(float(rng.uniform(-3, 0)), float(rng.uniform(0, 3)))
        b2 = spectral.BorelSet.interval(float(rng.uniform(-3, 0)), float(rng.uniform(0, 3)))
        assert spectral.apply_measure(Q, b1.intersect(b2)) == questions.meet(
            spectral.apply_measure(Q, b1), spectral.apply_measure(Q, b2)
        )
        assert spectral.apply_measure(Q, b1.union(b2)) == questions.join(
            spectral.apply_measure(Q, b1), spectral.apply_measure(Q, b2)
        )
        assert spectral.apply_measure(Q, b1.complement()) == questions.complement(
            spectral.apply_measure(Q, b1)
        )
    f = observables.magnetization(space)
    Q = spectral.spectral_measure(f)
    assert spectral.apply_measure(Q, spectral.BorelSet.empty()).is_zero()
    assert spectral.apply_measure(Q, spectral.BorelSet.all()).is_unit()


def _check_measurement(rng, space) -> None:
    f = observables.magnetization(space)
    for _ in range(50):
        zeta = _random_state(rng, space)
        dist = measurement.outcome_distribution(f, zeta)
        assert abs(dist.mean() - states.pair(zeta, f)) <= 1e-12
        cut = float(rng.uniform(-2, 2))
        below = measurement.probability(f, zeta, spectral.BorelSet.interval(-np.inf, cut, False, True))
        above = measurement.probability(f, zeta, spectral.BorelSet.interval(cut, np.inf, False, False))
        assert abs(below + above - 1.0) <= 1e-12
        q = _random_question(rng, space)
        assert measurement.transmission(q, zeta) == states.pair(zeta, q.as_observable())


def _check_separation(rng, space) -> None:
    for _ in range(50):
        z1, z2 = _random_state(rng, space), _random_state(rng, space)
        witness = equivalence.separating_observable(z1, z2)
        assert witness is not None
        assert abs(states.pair(z1, witness) - states.pair(z2, witness)) > 0
        f = observables.Observable(space, rng.random(space.size))
        g = observables.Observable(space, rng.random(space.size))
        d = equivalence.states_separate_observables(f, g)
        assert d is not None
        k = int(np.argmax(d.weights))
        assert f.values[k] != g.values[k]
    z = _random_state(rng, space)
    assert equivalence.separating_observable(z, z) is None


_SUITES = [
    ("question logic: lattice isomorphism, completeness, distributivity", _check_question_logic),
    ("states: fullness over all Diracs, convex mixtures, linear pairing", _check_states),
    ("spectral: round trips, functional calculus, measure homomorphism", _check_spectral),
    ("measurement: outcome distributions, additivity, transmission", _check_measurement),
    ("separation: states by observables and observables by states", _check_separation),
]


def run_selftest(seed: int = 0, emit=print) -> bool:
    space = build_phase_space(ising_chain(4))
    ok = True
    for label, check in _SUITES:
        rng = np.random.default_rng(seed)
        try:
            check(rng, space)
        except AssertionError as exc:
            ok = False
            emit(f"FAIL  {label}  ({exc or 'assertion failed'})")
        else:
            emit(f"PASS  {label}")
    return ok

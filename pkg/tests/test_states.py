import math

import numpy as np
import pytest

import mackeylat as ml
from mackeylat.errors import (
    EmptyEnergyShell,
    InconsistentThread,
    PhaseSpaceMismatch,
    TableLengthMismatch,
    WeightSumError,
)
from mackeylat.states import LocalState, Thread

import oracle


# -- pairing -------------------------------------------------------------------

def test_pair_uniform_magnetization_vanishes(chain2):
    assert ml.pair(ml.uniform(chain2), ml.magnetization(chain2)) == 0.0


def test_pair_dirac_evaluates(chain2):
    M = ml.magnetization(chain2)
    for k in range(4):
        assert ml.pair(ml.dirac(chain2, k), M) == M.eval(k)


def test_pair_infinite_temperature_gibbs(chain2):
    zeta = ml.gibbs(ml.energy(chain2), 0.0)
    q = ml.question_from_json(chain2, {"observable": "magnetization", "eq": 2})
    assert ml.pair(zeta, q.as_observable()) == 0.25


def test_pair_unit_observable_is_one(chain2):
    for k in range(4):
        assert ml.pair(ml.dirac(chain2, k), ml.constant(chain2, 1.0)) == 1.0


def test_pair_space_mismatch(chain2, chain3):
    with pytest.raises(PhaseSpaceMismatch):
        ml.pair(ml.uniform(chain2), ml.magnetization(chain3))


# -- dirac ---------------------------------------------------------------------

def test_dirac_examples(chain2):
    assert ml.pair(ml.dirac(chain2, (1.0, 1.0)), ml.magnetization(chain2)) == 2.0
    h_is_one = ml.question_from_json(chain2, {"observable": "energy", "eq": 1}).as_observable()
    assert ml.pair(ml.dirac(chain2, (-1.0, 1.0)), h_is_one) == 1.0


def test_dirac_unknown_configuration(chain2):
    with pytest.raises(ml.UnknownConfiguration):
        ml.dirac(chain2, (0.0, 1.0))
    with pytest.raises(ml.UnknownConfiguration):
        ml.dirac(chain2, 4)


# -- mixtures --------------------------------------------------------------------

def test_mix_identity_is_exact(chain2):
    zeta = ml.gibbs(ml.energy(chain2), 0.7)
    assert ml.mix([1.0], [zeta]) == zeta


def test_mix_two_diracs(chain2):
    mixed = ml.mix([0.5, 0.5], [ml.dirac(chain2, 0), ml.dirac(chain2, 3)])
    assert ml.pair(mixed, ml.chi(chain2, [0]).as_observable()) == 0.5


def test_mix_three_diracs_normalized(chain2):
    mixed = ml.mix([0.2, 0.3, 0.5], [ml.dirac(chain2, k) for k in (0, 1, 2)])
    assert ml.pair(mixed, ml.constant(chain2, 1.0)) == 1.0
    assert list(mixed.weights) == [0.2, 0.3, 0.5, 0.0]


def test_mix_errors(chain2):
    d = ml.dirac(chain2, 0)
    with pytest.raises(WeightSumError):
        ml.mix([0.5, 0.4], [d, d])
    with pytest.raises(TableLengthMismatch):
        ml.mix([0.5, 0.5], [d])
    with pytest.raises(TableLengthMismatch):
        ml.mix([], [])


def test_mix_linearity_of_pairing(chain4):
    rng = np.random.default_rng(11)
    states = []
    for _ in range(8):
        w = rng.random(chain4.size)
        states.append(ml.State(chain4, w / w.sum()))
    ts = rng.random(8)
    ts /= ts.sum()
    f = ml.Observable(chain4, rng.normal(size=chain4.size))
    expected = sum(t * ml.pair(s, f) for t, s in zip(ts, states))
    assert abs(ml.pair(ml.mix(ts, states), f) - expected) <= 1e-12


def test_state_validation():
    space = ml.build_phase_space(ml.ising_chain(2))
    with pytest.raises(WeightSumError):
        ml.State(space, [0.5, 0.5, 0.5, -0.5])
    with pytest.raises(WeightSumError):
        ml.State(space, [0.5, 0.25, 0.25, 0.25])


# -- ensembles --------------------------------------------------------------------

def test_microcanonical_ground_shell(chain2):
    zeta = ml.microcanonical(ml.energy(chain2), -1.0, 0.0)
    assert list(zeta.weights) == [0.5, 0.0, 0.0, 0.5]
    assert ml.pair(zeta, ml.magnetization(chain2)) == 0.0


def test_microcanonical_excited_shell(chain2):
    zeta = ml.microcanonical(ml.energy(chain2), 1.0, 0.0)
    assert list(zeta.weights) == [0.0, 0.5, 0.5, 0.0]


def test_microcanonical_wide_shell_is_uniform(chain2):
    zeta = ml.microcanonical(ml.energy(chain2), 0.0, 10.0)
    assert zeta == ml.uniform(chain2)


def test_microcanonical_empty_shell_reports_nearest(chain2):
    with pytest.raises(EmptyEnergyShell) as err:
        ml.microcanonical(ml.energy(chain2), 99.0, 0.0)
    assert err.value.nearest_energy == 1.0
    with pytest.raises(EmptyEnergyShell) as err:
        ml.microcanonical(ml.energy(chain2), 0.0, 0.5)
    assert err.value.nearest_energy in (-1.0, 1.0)


def test_gibbs_infinite_temperature_is_uniform(chain2):
    assert ml.gibbs(ml.energy(chain2), 0.0) == ml.uniform(chain2)


def test_gibbs_two_site_closed_form(chain2):
    beta = 1.0
    zeta = ml.gibbs(ml.energy(chain2), beta)
    expected = math.exp(beta) / (2 * math.exp(beta) + 2 * math.exp(-beta))
    q = ml.question_from_json(chain2, {"observable": "magnetization", "eq": 2})
    assert abs(ml.pair(zeta, q.as_observable()) - expected) <= 1e-15


def test_gibbs_concentrates_on_ground_shell(chain2):
    zeta = ml.gibbs(ml.energy(chain2), 50.0)
    ground = ml.chi(chain2, [0, 3]).as_observable()
    assert abs(ml.pair(zeta, ground) - 1.0) <= 1e-9


def test_gibbs_matches_bruteforce(chain4):
    configs = oracle.enumerate_configs((4,), (-1, 1))
    energies = [oracle.ising_energy(x, (4,), "open") for x in configs]
    for beta in (0.3, 1.0, 2.5):
        zeta = ml.gibbs(ml.energy(chain4), beta)
        expected = oracle.gibbs_weights(energies, beta)
        assert np.allclose(zeta.weights, expected, rtol=0, atol=1e-15)


def test_gibbs_rejects_non_finite_beta(chain2):
    with pytest.raises(ml.LatticeError):
        ml.gibbs(ml.energy(chain2), math.inf)


def test_grand_canonical_matches_bruteforce(chain3):
    configs = oracle.enumerate_configs((3,), (-1, 1))
    energies = [oracle.ising_energy(x, (3,), "open") for x in configs]
    counts = [oracle.occupation(x, (-1, 1)) for x in configs]
    zeta = ml.grand_canonical(ml.energy(chain3), ml.occupation(chain3), 1.2, 0.7)
    expected = oracle.grand_canonical_weights(energies, counts, 1.2, 0.7)
    assert np.allclose(zeta.weights, expected, rtol=0, atol=1e-15)


def test_overflow_safe_exponentials(chain2):
    zeta = ml.gibbs(ml.energy(chain2), 500.0)  # exp(500) would overflow unshifted
    assert np.all(np.isfinite(zeta.weights))
    assert abs(float(zeta.weights.sum()) - 1.0) <= 1e-12


# -- marginals and threads ----------------------------------------------------------

def test_marginalize_uniform_is_uniform(chain3):
    for region in ml.enumerate_regions(chain3.spec):
        local = ml.marginalize(ml.uniform(chain3), region)
        assert np.allclose(local.weights, 1.0 / len(local.weights), rtol=0, atol=0)


def test_marginalize_dirac_is_dirac_of_restriction(chain3):
    region = ml.Region.of(0, 2)
    x = (-1.0, 1.0, 1.0)
    local = ml.marginalize(ml.dirac(chain3, x), region)
    locals_ = chain3.local_configurations(region)
    expected = ml.restrict_configuration(chain3, x, region)
    assert [w for w in local.weights] == [1.0 if lc == expected else 0.0 for lc in locals_]


def test_marginalize_gibbs_single_site_symmetry(chain2):
    local = ml.marginalize(ml.gibbs(ml.energy(chain2), 1.0), ml.Region.of(0))
    assert abs(local.weights[1] - 0.5) <= 1e-15


def test_marginalize_matches_bruteforce(triple):
    rng = np.random.default_rng(5)
    w = rng.random(triple.size)
    zeta = ml.State(triple, w / w.sum())
    configs = oracle.enumerate_configs((3,), (-1.0, 0.0, 1.0))
    for region, positions in [(ml.Region.of(0), [0]), (ml.Region.of(1, 2), [1, 2]), (ml.Region.of(0, 2), [0, 2])]:
        local = ml.marginalize(zeta, region)
        expected = oracle.marginal(configs, zeta.weights, positions)
        for lc, lw in zip(triple.local_configurations(region), local.weights):
            assert abs(lw - expected.get(lc, 0.0)) <= 1e-15


def test_thread_of_uniform_all_entries_uniform(chain3):
    thread = ml.thread_of(ml.uniform(chain3))
    for entry in thread.entries:
        assert np.allclose(entry.weights, 1.0 / len(entry.weights), rtol=0, atol=0)


def test_thread_roundtrip_exact(chain3):
    zeta = ml.gibbs(ml.energy(chain3), 1.0)
    assert ml.state_of(ml.thread_of(zeta)) == zeta


def test_inconsistent_thread_rejected(chain2):
    good = ml.thread_of(ml.uniform(chain2))
    tampered = list(good.entries)
    tampered[0] = LocalState(chain2, tampered[0].region, [0.3, 0.7])
    with pytest.raises(InconsistentThread) as err:
        Thread(chain2, tuple(tampered))
    assert "Region(0)" in str(err.value)


def test_thread_requires_all_regions(chain2):
    good = ml.thread_of(ml.uniform(chain2))
    with pytest.raises(InconsistentThread):
        Thread(chain2, good.entries[:-1])


# -- structural properties of the state set ------------------------------------------

def test_fullness_over_all_diracs(chain3):
    rng = np.random.default_rng(23)
    diracs = [ml.dirac(chain3, k) for k in range(chain3.size)]
    for _ in range(100):
        E = set(np.nonzero(rng.random(chain3.size) < 0.5)[0].tolist())
        F = set(np.nonzero(rng.random(chain3.size) < 0.5)[0].tolist())
        chi_e, chi_f = ml.chi(chain3, E).as_observable(), ml.chi(chain3, F).as_observable()
        dominated = all(ml.pair(d, chi_e) <= ml.pair(d, chi_f) for d in diracs)
        assert dominated == (E <= F)


def test_extreme_points_are_diracs(chain2):
    for k in range(4):
        assert ml.dirac(chain2, k).is_pure()
    assert not ml.uniform(chain2).is_pure()
    two_point = ml.mix([0.5, 0.5], [ml.dirac(chain2, 0), ml.dirac(chain2, 1)])
    assert not two_point.is_pure()
    assert two_point.support_size() == 2


def test_every_state_decomposes_over_diracs(chain3):
    zeta = ml.gibbs(ml.energy(chain3), 0.8)
    diracs = [ml.dirac(chain3, k) for k in range(chain3.size)]
    assert ml.mix(zeta.weights, diracs) == zeta


def test_total_variation(chain2):
    d0, d3 = ml.dirac(chain2, 0), ml.dirac(chain2, 3)
    assert ml.total_variation(d0, d3) == 1.0
    assert ml.total_variation(d0, d0) == 0.0


# -- serialization ---------------------------------------------------------------------

def test_state_csv_roundtrip(chain3, tmp_path):
    from mackeylat.states import read_state_csv, write_state_csv

    zeta = ml.gibbs(ml.energy(chain3), 1.3)
    path = str(tmp_path / "state.csv")
    write_state_csv(zeta, path)
    assert read_state_csv(chain3, path) == zeta


def test_state_from_json_kinds(chain2):
    assert ml.states.state_from_json(chain2, {"state": {"kind": "uniform"}}) == ml.uniform(chain2)
    assert ml.states.state_from_json(chain2, {"kind": "gibbs", "beta": 1.0}) == ml.gibbs(
        ml.energy(chain2), 1.0
    )
    assert ml.states.state_from_json(chain2, {"kind": "dirac", "index": 2}) == ml.dirac(chain2, 2)
    mc = ml.states.state_from_json(chain2, {"kind": "microcanonical", "E": -1.0})
    assert mc == ml.microcanonical(ml.energy(chain2), -1.0)
    gc = ml.states.state_from_json(chain2, {"kind": "grand-canonical", "beta": 1.0, "mu": 0.5})
    assert gc == ml.grand_canonical(ml.energy(chain2), ml.occupation(chain2), 1.0, 0.5)
    with pytest.raises(ml.LatticeError):
        ml.states.state_from_json(chain2, {"kind": "thermal"})

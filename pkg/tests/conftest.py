import pytest

import mackeylat as ml


@pytest.fixture(scope="session")
def chain2():
    """Two-spin open chain: |X| = 4, the standard desk example."""
    return ml.build_phase_space(ml.ising_chain(2))


@pytest.fixture(scope="session")
def chain3():
    return ml.build_phase_space(ml.ising_chain(3))


@pytest.fixture(scope="session")
def chain4():
    return ml.build_phase_space(ml.ising_chain(4))


@pytest.fixture(scope="session")
def triple():
    """Three sites over a three-symbol alphabet: |X| = 27."""
    return ml.build_phase_space(ml.ModelSpec(dims=(3,), alphabet=(-1.0, 0.0, 1.0)))


@pytest.fixture(scope="session")
def grid22():
    return ml.build_phase_space(ml.ModelSpec(dims=(2, 2), alphabet=(-1.0, 1.0)))

import json

import numpy as np
import pytest

import mackeylat as ml
from mackeylat.errors import (
    EnumerationCapExceeded,
    InvalidModelSpec,
    UnknownConfiguration,
    UnknownSite,
)

import oracle


def test_single_configuration_model():
    space = ml.build_phase_space(ml.ModelSpec(dims=(1,), alphabet=(1.0,)))
    assert space.size == 1
    assert space.configuration(0) == (1.0,)


def test_chain2_lexicographic_order(chain2):
    got = [chain2.configuration(k) for k in range(chain2.size)]
    assert got == [(-1, -1), (-1, 1), (1, -1), (1, 1)]


def test_triple_enumeration_matches_bruteforce(triple):
    expected = oracle.enumerate_configs((3,), (-1.0, 0.0, 1.0))
    assert triple.size == len(expected) == 27
    assert [triple.configuration(k) for k in range(27)] == expected


def test_alphabet_is_canonicalized_sorted():
    a = ml.ModelSpec(dims=(2,), alphabet=(1.0, -1.0))
    b = ml.ModelSpec(dims=(2,), alphabet=(-1.0, 1.0))
    assert a == b
    assert a.alphabet == (-1.0, 1.0)


def test_index_is_a_bijection(triple):
    for k in range(triple.size):
        assert triple.index_of(triple.configuration(k)) == k


def test_build_is_deterministic():
    spec = ml.ModelSpec(dims=(2, 2), alphabet=(-1.0, 1.0))
    s1, s2 = ml.build_phase_space(spec), ml.build_phase_space(spec)
    assert s1 == s2
    assert [s1.configuration(k) for k in range(s1.size)] == [
        s2.configuration(k) for k in range(s2.size)
    ]
    assert np.array_equal(s1.configs, s2.configs)


def test_invalid_specs_rejected():
    with pytest.raises(InvalidModelSpec):
        ml.ModelSpec(dims=(2,), alphabet=())
    with pytest.raises(InvalidModelSpec):
        ml.ModelSpec(dims=(2,), alphabet=(1.0, 1.0))
    with pytest.raises(InvalidModelSpec):
        ml.ModelSpec(dims=(0,), alphabet=(1.0,))
    with pytest.raises(InvalidModelSpec):
        ml.ModelSpec(dims=(2,), alphabet=(1.0,), boundary="twisted")


def test_enumeration_cap():
    spec = ml.ModelSpec(dims=(30,), alphabet=(-1.0, 1.0))
    with pytest.raises(EnumerationCapExceeded):
        ml.build_phase_space(spec)
    ml.build_phase_space(ml.ising_chain(4), enum_cap=16)  # exactly at the cap
    with pytest.raises(EnumerationCapExceeded):
        ml.build_phase_space(ml.ising_chain(4), enum_cap=15)


# -- restriction -------------------------------------------------------------

def test_restrict_projection(chain2):
    assert ml.restrict_configuration(chain2, (-1.0, 1.0), ml.Region.of(0)) == (-1.0,)


def test_restrict_full_lattice_is_identity(chain2):
    assert ml.restrict_configuration(chain2, (-1.0, 1.0), chain2.full_region) == (-1.0, 1.0)


def test_restrict_picks_coordinates(chain3):
    assert ml.restrict_configuration(chain3, (-1.0, 1.0, 1.0), ml.Region.of(0, 2)) == (-1.0, 1.0)


def test_restrict_unknown_site(chain2):
    with pytest.raises(UnknownSite):
        ml.restrict_configuration(chain2, (-1.0, 1.0), ml.Region.of(5))


def test_restrict_wrong_length(chain2):
    with pytest.raises(UnknownConfiguration):
        ml.restrict_configuration(chain2, (-1.0, 1.0, 1.0), ml.Region.of(0))


def test_restriction_composes(triple):
    r1 = ml.Region.of(1)
    r2 = ml.Region.of(0, 1)
    for k in range(triple.size):
        x = triple.configuration(k)
        via_r2 = ml.restrict_configuration(triple, x, r2)
        # restrict the restriction: site 1 sits at position 1 inside r2
        assert (via_r2[1],) == ml.restrict_configuration(triple, x, r1)


# -- regions -----------------------------------------------------------------

def test_regions_1d():
    regions = ml.enumerate_regions(ml.ModelSpec(dims=(2,), alphabet=(-1.0, 1.0)))
    assert [r.sites for r in regions] == [((0,),), ((1,),), ((0,), (1,))]
    assert len(ml.enumerate_regions(ml.ModelSpec(dims=(1,), alphabet=(1.0,)))) == 1


def test_regions_match_bruteforce_subboxes():
    for dims in [(3,), (2, 2), (3, 2)]:
        spec = ml.ModelSpec(dims=dims, alphabet=(-1.0, 1.0))
        got = {frozenset(r.sites) for r in ml.enumerate_regions(spec)}
        assert got == set(oracle.subboxes(dims))


def test_regions_dims3_count_and_shape():
    regions = ml.enumerate_regions(ml.ModelSpec(dims=(3,), alphabet=(-1.0, 1.0)))
    assert len(regions) == 6
    sizes = sorted(len(r) for r in regions)
    assert sizes == [1, 1, 1, 2, 2, 3]


def test_region_order_is_inclusion_compatible_with_full_box_last():
    spec = ml.ModelSpec(dims=(2, 2), alphabet=(-1.0, 1.0))
    regions = ml.enumerate_regions(spec)
    space = ml.build_phase_space(spec)
    assert regions[-1] == space.full_region
    for i, r1 in enumerate(regions):
        for j, r2 in enumerate(regions):
            if r1 < r2:
                assert i < j


def test_region_partial_order():
    a, b, c = ml.Region.of(0), ml.Region.of(0, 1), ml.Region.of(1, 2)
    assert a < b and a <= b and b > a
    assert not (b <= c) and not (c <= b)


def test_bonds_match_bruteforce():
    for dims in [(2,), (4,), (2, 3)]:
        for boundary in ("open", "periodic"):
            space = ml.build_phase_space(ml.ModelSpec(dims=dims, alphabet=(-1.0, 1.0), boundary=boundary))
            got = {frozenset(b) for b in space.bonds()}
            assert got == oracle.bonds(dims, boundary)


# -- JSON --------------------------------------------------------------------

def test_model_spec_json_roundtrip(tmp_path):
    spec = ml.ModelSpec(dims=(2, 3), alphabet=(-1.0, 0.0, 1.0), boundary="periodic")
    path = tmp_path / "model.json"
    path.write_text(json.dumps(spec.to_json()))
    assert ml.ModelSpec.from_json_file(str(path)) == spec


def test_model_spec_json_missing_key():
    with pytest.raises(InvalidModelSpec):
        ml.ModelSpec.from_json({"dims": [2]})

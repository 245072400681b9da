import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from icelab.core import (
    BoundaryData, ConfigurationError, SingularParameterError, SixVertexConfig, SpectralParams,
    VertexType, WeightTable, asm_count, boltzmann_weight, delta, gauge_transform, weights_from_spectral,
)
from icelab.enumeration import enumerate_configs


def test_stochastic_weights_half_half():
    w = weights_from_spectral(SpectralParams(0.5, 0.5))
    assert np.allclose([w.b1, w.b2, w.c1, w.c2], [2 / 3, 1 / 3, 1 / 3, 2 / 3], atol=1e-15)
    assert abs(w.b1 + w.c1 - 1) < 1e-14 and abs(w.b2 + w.c2 - 1) < 1e-14


def test_u_zero_kills_c1():
    w = weights_from_spectral(SpectralParams(0.0, 0.3))
    assert np.allclose(w.as_array(), [1, 1, 1, 0.3, 0, 0.7])


def test_singular_parameters():
    with pytest.raises(SingularParameterError):
        SpectralParams(2.0, 0.5)


def test_free_fermion_point():
    assert abs(delta(weights_from_spectral(SpectralParams(1j, -1)))) < 1e-14


@pytest.mark.parametrize("w, expected", [
    (WeightTable.uniform(), 0.5),
    (WeightTable.symmetric(1, 1, math.sqrt(2)), 0.0),
])
def test_delta_values(w, expected):
    assert abs(delta(w) - expected) < 1e-14


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_delta_depends_on_t_only(u1, u2, t):
    d1 = delta(weights_from_spectral(SpectralParams(u1, t)))
    d2 = delta(weights_from_spectral(SpectralParams(u2, t)))
    assert abs(d1 - d2) < 1e-12
    assert abs(abs(d1) - 0.5 * (math.sqrt(t) + 1 / math.sqrt(t))) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.floats(0.01, 2 * math.pi - 0.01),
       st.floats(0.01, 2 * math.pi - 0.01))
def test_gauge_invariants_positive_in_both_regimes(u, t, a, b):
    for p in (SpectralParams(u, t), SpectralParams(np.exp(1j * a), np.exp(1j * b))):
        if abs(1 - p.t * p.u) < 1e-3 or abs(1 - p.u) < 1e-3 or abs(1 - p.t) < 1e-3:
            continue
        for r in weights_from_spectral(p).gauge_invariants():
            assert abs(r.imag) < 1e-9 * abs(r) and r.real > 0


def test_gauge_transform_examples():
    w = gauge_transform(WeightTable.uniform(), "c-tilt", 2)
    assert np.allclose(w.as_array(), [1, 1, 1, 1, 2, 0.5])
    assert w.gauge_invariants() == WeightTable.uniform().gauge_invariants()
    w0 = weights_from_spectral(SpectralParams(0.3, 0.6))
    assert abs(delta(gauge_transform(w0, "global-scale", 3)) - delta(w0)) < 1e-14
    with pytest.raises(ValueError):
        gauge_transform(w0, "a-tilt", 0)


def test_gauge_preserves_probabilities(rng):
    w = weights_from_spectral(SpectralParams(0.3, 0.6))
    g = w
    for kind in ("global-scale", "c-tilt", "a-tilt", "b-tilt"):
        g = gauge_transform(g, kind, complex(rng.uniform(0.5, 2), rng.uniform(-1, 1)))
    for bd in (BoundaryData.dwbc(3), BoundaryData((1, 0, 1), (1, 0, 0), (0, 1, 1), (0, 0, 1))):
        p1 = enumerate_configs(3, 3, bd, w, keep_configs=True).probabilities()
        p2 = enumerate_configs(3, 3, bd, g, keep_configs=True).probabilities()
        assert np.max(np.abs(p1 - p2)) < 1e-12


def test_vertex_types_are_six_conserving_states():
    for vt in VertexType:
        b, l, t, r = vt.edges
        assert b + l == t + r
        assert VertexType.from_edges(*vt.edges) is vt
    with pytest.raises(ConfigurationError):
        VertexType.from_edges(1, 1, 0, 1)


def test_conservation_enforced():
    v = np.zeros((1, 2), dtype=np.int8)
    h = np.zeros((2, 1), dtype=np.int8)
    v[0, 0] = 1
    with pytest.raises(ConfigurationError):
        SixVertexConfig(1, 1, v, h)


def test_boundary_flow_check():
    with pytest.raises(ConfigurationError):
        BoundaryData((1, 1), (0, 0), (0, 0), (1, 0))


def test_boltzmann_weight_examples():
    v = np.zeros((2, 3), dtype=np.int8)
    h = np.zeros((3, 2), dtype=np.int8)
    assert boltzmann_weight(SixVertexConfig(2, 2, v, h), WeightTable.uniform()) == 1
    w = weights_from_spectral(SpectralParams(0.4, 0.3))
    one = SixVertexConfig.dwbc_identity(1)
    assert abs(boltzmann_weight(one, w) - w.c1) < 1e-15
    assert enumerate_configs(2, 2, BoundaryData.dwbc(2), WeightTable.uniform()).partition_function == 2


def test_asm_counts():
    assert [asm_count(n) for n in range(1, 6)] == [1, 2, 7, 42, 429]


def test_text_round_trip():
    cfg = SixVertexConfig.dwbc_identity(4)
    text = cfg.to_text()
    assert text.splitlines()[0] == "6VX 4 4"
    back = SixVertexConfig.from_text(text)
    assert np.array_equal(back.vertical, cfg.vertical) and np.array_equal(back.horizontal, cfg.horizontal)
    with pytest.raises(ConfigurationError):
        SixVertexConfig.from_text("6VX 2 1\n17\n")


def test_height_function_corner_counts_top_exits():
    cfg = SixVertexConfig.dwbc_identity(5)
    H = cfg.height_function()
    assert H[-1, -1] - H[0, -1] == cfg.top_exits() == 0
    assert H[-1, 0] == 5

import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from farfield import (
    ContainmentError,
    CurrentEnsemble,
    GridMismatchError,
    SampledField,
    dipole_at_origin,
    ensemble_from_dict,
    ensemble_to_dict,
    field_norm,
    inner_product,
    load_ensemble,
    random_current_ensemble,
    save_ensemble,
    sphere_grid,
)
from farfield.specfun import sh_index, sh_table

FOUR_PI = 4.0 * math.pi


# --- sphere grid ------------------------------------------------------------


def test_grid_degenerate():
    g = sphere_grid(0)
    assert len(g) == 1
    assert g.weights[0] == pytest.approx(FOUR_PI, rel=1e-15)


def test_grid_counts_and_weights():
    g = sphere_grid(10)
    assert len(g) == 11 * 21
    assert g.weights.sum() == pytest.approx(FOUR_PI, abs=1e-12)
    assert np.all(g.weights > 0)
    assert g.exactness_degree == 20


def test_grid_orthonormality():
    g = sphere_grid(10)
    table = sh_table(10, g.theta, g.phi)
    # <Y_3^2, Y_3^2> = 1
    y32 = table[sh_index(3, 2)]
    assert np.sum(g.weights * y32 * np.conj(y32)).real == pytest.approx(1.0, abs=1e-11)
    # full pairwise check across a degree/order sample
    pairs = [(0, 0), (1, -1), (2, 0), (3, 2), (5, -4), (7, 7), (10, -9), (10, 10)]
    for i, (l1, m1) in enumerate(pairs):
        for l2, m2 in pairs[i:]:
            ip = np.sum(g.weights * table[sh_index(l1, m1)] * np.conj(table[sh_index(l2, m2)]))
            expected = 1.0 if (l1, m1) == (l2, m2) else 0.0
            assert abs(ip - expected) < 1e-11


def test_grid_node_objects():
    g = sphere_grid(2)
    nodes = g.nodes
    assert len(nodes) == len(g)
    assert_allclose(
        np.array([n.unit_vector() for n in nodes]), g.unit_vectors, atol=1e-15
    )


def test_grid_rejects_negative_band():
    with pytest.raises(ValueError):
        sphere_grid(-1)


# --- inner product ----------------------------------------------------------


def _scalar_along(grid, values_1d, axis_field):
    return SampledField(grid=grid, values=values_1d[:, None] * axis_field)


def test_inner_product_unit_harmonic():
    g = sphere_grid(6)
    y00 = sh_table(0, g.theta, g.phi)[0]
    u = _scalar_along(g, y00, g.theta_hat)
    assert inner_product(u, u).real == pytest.approx(1.0, abs=1e-11)


def test_inner_product_orthogonal_harmonics():
    g = sphere_grid(6)
    table = sh_table(4, g.theta, g.phi)
    u = _scalar_along(g, table[sh_index(2, 1)], g.theta_hat)
    v = _scalar_along(g, table[sh_index(4, -2)], g.theta_hat)
    assert abs(inner_product(u, v)) < 1e-11


def test_inner_product_zero_and_symmetry(rng):
    g = sphere_grid(4)
    z = SampledField(grid=g, values=np.zeros((len(g), 3), dtype=complex))
    assert inner_product(z, z) == 0
    u = SampledField(grid=g, values=rng.normal(size=(len(g), 3)) + 1j * rng.normal(size=(len(g), 3)))
    v = SampledField(grid=g, values=rng.normal(size=(len(g), 3)) + 1j * rng.normal(size=(len(g), 3)))
    assert inner_product(u, v) == pytest.approx(np.conj(inner_product(v, u)), rel=1e-15)


def test_inner_product_grid_mismatch():
    u = SampledField(grid=sphere_grid(3), values=np.zeros((4 * 7, 3), dtype=complex))
    v = SampledField(grid=sphere_grid(4), values=np.zeros((5 * 9, 3), dtype=complex))
    with pytest.raises(GridMismatchError):
        inner_product(u, v)


# --- current ensembles --------------------------------------------------------


def test_random_ensemble_contained_and_deterministic():
    a = 0.35
    e1 = random_current_ensemble(a, 50, seed=11)
    e2 = random_current_ensemble(a, 50, seed=11)
    assert np.array_equal(e1.positions, e2.positions)
    assert np.array_equal(e1.moments, e2.moments)
    assert np.array_equal(e1.weights, e2.weights)
    assert np.all(np.linalg.norm(e1.positions, axis=1) <= a)
    assert_allclose(np.linalg.norm(e1.moments, axis=1), 1.0, atol=1e-14)
    assert_allclose(e1.weights, FOUR_PI / 3 * a**3 / 50)


def test_random_ensemble_mean_position():
    a = 1.0
    n = 1000
    ens = random_current_ensemble(a, n, seed=5)
    assert np.linalg.norm(ens.positions.mean(axis=0)) <= 3.0 * a / math.sqrt(n)


def test_random_ensemble_single_source():
    ens = random_current_ensemble(0.2, 1, seed=0)
    assert len(ens) == 1
    assert np.linalg.norm(ens.positions[0]) <= 0.2


def test_dipole_at_origin():
    ens = dipole_at_origin([0, 0, 1])
    assert len(ens) == 1
    assert_allclose(ens.positions[0], 0.0)
    assert ens.weights[0] == 1.0
    assert ens.norm() == pytest.approx(1.0)
    complex_moment = dipole_at_origin([1j, 0, 1])
    assert complex_moment.norm() == pytest.approx(math.sqrt(2))


def test_ensemble_rejects_escapees():
    with pytest.raises(ContainmentError):
        CurrentEnsemble(
            positions=np.array([[0.0, 0.0, 2.0]]),
            moments=np.array([[1.0, 0, 0]], dtype=complex),
            weights=np.ones(1),
            radius=1.0,
        )


def test_ensemble_rejects_bad_weights():
    with pytest.raises(ValueError):
        CurrentEnsemble(
            positions=np.zeros((1, 3)),
            moments=np.ones((1, 3), dtype=complex),
            weights=np.zeros(1),
            radius=1.0,
        )


def test_ensemble_json_round_trip(tmp_path):
    ens = random_current_ensemble(0.4, 7, seed=2)
    doc = ensemble_to_dict(ens)
    # document layout
    assert set(doc) == {"radius", "sources"}
    assert set(doc["sources"][0]) == {"pos", "moment_re", "moment_im", "weight"}
    back = ensemble_from_dict(json.loads(json.dumps(doc)))
    assert np.array_equal(back.positions, ens.positions)
    assert np.array_equal(back.moments, ens.moments)
    assert np.array_equal(back.weights, ens.weights)
    assert back.radius == ens.radius
    path = tmp_path / "ens.json"
    save_ensemble(ens, path)
    loaded = load_ensemble(path)
    assert np.array_equal(loaded.moments, ens.moments)


def test_field_norm_matches_inner_product(rng):
    g = sphere_grid(3)
    u = SampledField(grid=g, values=rng.normal(size=(len(g), 3)) + 0j)
    assert field_norm(u) == pytest.approx(math.sqrt(inner_product(u, u).real), rel=1e-15)

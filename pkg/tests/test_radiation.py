import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from farfield import (
    ContainmentError,
    CurrentEnsemble,
    Direction,
    SampledField,
    SphereQuadrature,
    dipole_at_origin,
    direct_far_field,
    em_far_field,
    empty_ensemble,
    field_from_csv,
    field_norm,
    field_to_csv,
    make_context,
    random_current_ensemble,
    sphere_grid,
)
from farfield.radiation import radiation_scale

from conftest import context_for_ka, random_rotation


def test_zero_ensemble_radiates_nothing():
    ctx = make_context(1e9, 0.1)
    g = sphere_grid(4)
    fld = direct_far_field(empty_ensemble(radius=0.1), g, ctx)
    assert np.all(fld.values == 0)


def test_dipole_closed_form():
    ctx = make_context(1e9, 0.0)
    g = sphere_grid(8)
    fld = direct_far_field(dipole_at_origin([0, 0, 1]), g, ctx)
    scale = radiation_scale(ctx)
    zhat = np.array([0.0, 0.0, 1.0])
    rhat = g.unit_vectors
    expected = scale * (zhat[None, :] - np.cos(g.theta)[:, None] * rhat)
    assert_allclose(fld.values, expected, rtol=1e-13, atol=1e-20)
    # |f| tracks |sin(theta)| and peaks at the node closest to the equator
    mags = np.linalg.norm(fld.values, axis=1)
    assert_allclose(mags, abs(scale) * np.abs(np.sin(g.theta)), rtol=1e-13)
    assert np.argmax(mags) == np.argmin(np.abs(g.theta - np.pi / 2))


def test_homogeneity_is_exact():
    ctx = make_context(2e9, 0.2)
    ens = random_current_ensemble(0.2, 12, seed=4)
    doubled = CurrentEnsemble(
        positions=ens.positions,
        moments=2.0 * ens.moments,
        weights=ens.weights,
        radius=ens.radius,
    )
    g = sphere_grid(6)
    f1 = direct_far_field(ens, g, ctx)
    f2 = direct_far_field(doubled, g, ctx)
    assert np.array_equal(f2.values, 2.0 * f1.values)


def test_linearity(rng):
    ctx = make_context(2e9, 0.2)
    g = sphere_grid(6)
    e1 = random_current_ensemble(0.2, 9, seed=1)
    e2 = random_current_ensemble(0.2, 5, seed=2)
    merged = CurrentEnsemble(
        positions=np.vstack([e1.positions, e2.positions]),
        moments=np.vstack([e1.moments, e2.moments]),
        weights=np.concatenate([e1.weights, e2.weights]),
        radius=0.2,
    )
    f12 = direct_far_field(merged, g, ctx)
    f1 = direct_far_field(e1, g, ctx)
    f2 = direct_far_field(e2, g, ctx)
    scale = np.max(np.abs(f12.values))
    assert np.max(np.abs(f12.values - (f1.values + f2.values))) <= 1e-14 * scale


def test_tangency():
    ctx = context_for_ka(5.0)
    ens = random_current_ensemble(1.0, 60, seed=9)
    g = sphere_grid(12)
    fld = direct_far_field(ens, g, ctx)
    radial = np.abs(np.sum(g.unit_vectors * fld.values, axis=1))
    norms = np.linalg.norm(fld.values, axis=1)
    assert np.all(radial <= 1e-13 * norms)


def test_rotation_equivariance(rng):
    ctx = context_for_ka(2.0)
    ens = random_current_ensemble(1.0, 25, seed=21)
    g = sphere_grid(16)
    rot = random_rotation(rng)
    rotated = CurrentEnsemble(
        positions=ens.positions @ rot.T,
        moments=ens.moments @ rot.T,
        weights=ens.weights,
        radius=ens.radius,
    )
    fld = direct_far_field(ens, g, ctx)
    # rotated grid: same weights, nodes moved by the rotation
    xyz = g.unit_vectors @ rot.T
    theta_r = np.arccos(np.clip(xyz[:, 2], -1, 1))
    phi_r = np.mod(np.arctan2(xyz[:, 1], xyz[:, 0]), 2 * np.pi)
    g_rot = SphereQuadrature(theta_r, phi_r, g.weights, g.exactness_degree)
    fld_rot = direct_far_field(rotated, g_rot, ctx)
    expected = fld.values @ rot.T
    scale = np.max(np.linalg.norm(fld.values, axis=1))
    assert np.max(np.linalg.norm(fld_rot.values - expected, axis=1)) < 1e-10 * scale
    # norm invariance on the fixed grid
    fld_rot_fixed = direct_far_field(rotated, g, ctx)
    assert field_norm(fld_rot_fixed) == pytest.approx(field_norm(fld), rel=1e-10)


def test_containment_checked_against_context():
    ctx = make_context(1e9, 0.05)  # analysis ball smaller than the sources
    ens = random_current_ensemble(0.2, 5, seed=3)
    with pytest.raises(ContainmentError):
        direct_far_field(ens, sphere_grid(4), ctx)


# --- E/H reconstruction -------------------------------------------------------


def test_em_far_field_zero():
    ctx = make_context(1e9, 0.1)
    s = em_far_field([0, 0, 0], Direction(1.0, 0.5), 10.0, ctx)
    assert np.all(s.E == 0) and np.all(s.H == 0)


def test_em_far_field_decay_and_identities():
    ctx = make_context(1e9, 0.1)
    d = Direction(1.2, 0.4)
    rhat, that, phat = d.frame()
    f = (0.3 - 0.1j) * that + (0.2 + 0.7j) * phat
    s1 = em_far_field(f, d, 5.0, ctx)
    s2 = em_far_field(f, d, 10.0, ctx)
    assert np.linalg.norm(s2.E) == pytest.approx(np.linalg.norm(s1.E) / 2, rel=1e-14)
    assert abs(rhat @ s1.E) <= 1e-14 * np.linalg.norm(s1.E)
    assert ctx.Z0 * np.linalg.norm(s1.H) == pytest.approx(np.linalg.norm(s1.E), rel=1e-12)
    assert_allclose(s1.H, np.cross(rhat, s1.E) / ctx.Z0, rtol=1e-12, atol=1e-20)


def test_em_far_field_rejects_bad_radius():
    ctx = make_context(1e9, 0.1)
    with pytest.raises(ValueError):
        em_far_field([1, 0, 0], Direction(0.3, 0.0), 0.0, ctx)


def _exact_point_source_E(position, moment_total, point, ctx):
    """Full spherical-wave E field of an infinitesimal current element."""
    rvec = point - position
    dist = np.linalg.norm(rvec)
    rhat = rvec / dist
    k = ctx.k
    g = np.exp(-1j * k * dist) / dist
    u = -(1.0 / (4 * np.pi)) * (1j * k + 1.0 / dist) * g / dist**2
    du = -(1.0 / (4 * np.pi)) * np.exp(-1j * k * dist) * (
        k**2 / dist**2 - 3j * k / dist**3 - 3.0 / dist**4
    )
    p = moment_total
    curl_h = -2.0 * u * p + du * dist * (rhat * (rhat @ p) - p)
    return curl_h / (1j * ctx.omega * ctx.eps0)


def test_far_field_limit_consistency():
    # strip r e^{jkr} / sqrt(Z0) from the exact field far away and compare
    ctx = make_context(1.5e9, 0.3)
    position = np.array([0.12, -0.05, 0.2])
    moment = np.array([0.4 + 0.2j, -0.3, 0.9 - 0.1j])
    ens = CurrentEnsemble(
        positions=position[None, :],
        moments=moment[None, :],
        weights=np.array([1.0]),
        radius=0.3,
    )
    g = sphere_grid(6)
    fld = direct_far_field(ens, g, ctx)
    r_far = 1e6 * ctx.a
    for i in range(0, len(g), 13):
        point = r_far * g.unit_vectors[i]
        e_exact = _exact_point_source_E(position, moment, point, ctx)
        stripped = r_far * np.exp(1j * ctx.k * r_far) * e_exact / math.sqrt(ctx.Z0)
        ref = fld.values[i]
        assert np.linalg.norm(stripped - ref) <= 1e-4 * np.linalg.norm(ref)


# --- CSV round trip -------------------------------------------------------------


def test_field_csv_round_trip():
    ctx = make_context(1e9, 0.1)
    ens = random_current_ensemble(0.1, 6, seed=8)
    g = sphere_grid(5)
    fld = direct_far_field(ens, g, ctx)
    text = field_to_csv(fld)
    lines = text.strip().split("\n")
    assert lines[0] == "theta,phi,weight,re_x,im_x,re_y,im_y,re_z,im_z"
    assert len(lines) == 1 + len(g)
    back = field_from_csv(text)
    # 17 significant digits round-trip doubles exactly
    assert np.array_equal(back.values, fld.values)
    assert np.array_equal(back.grid.theta, g.theta)
    assert back.grid.exactness_degree == g.exactness_degree
    assert field_to_csv(back) == text


def test_field_csv_rejects_garbage():
    with pytest.raises(ValueError):
        field_from_csv("not,a,field\n1,2,3\n")

"""Isometry families: point maps, closed-form differentials versus central
differences, structure-tensor relations, composition identities."""

import numpy as np
import numpy.testing as npt
import pytest

from nks3 import isometries as iso, pointwise as pw, quat as qt
from nks3.errors import DomainError

SQRT3 = np.sqrt(3.0)


def test_swap_point_map():
    m = iso.factor_swap()
    out = m.apply(pw.AmbientPoint(qt.E1, qt.E2))
    npt.assert_array_equal(out.p, qt.E2)
    npt.assert_array_equal(out.q, qt.E1)


def test_twist_point_map():
    m = iso.conjugation_twist()
    fixed = m.apply(pw.AmbientPoint(qt.ONE, qt.ONE))
    npt.assert_array_equal(fixed.p, qt.ONE)
    npt.assert_array_equal(fixed.q, qt.ONE)
    # (i, j) -> (ibar, j ibar) = (-i, k)
    out = m.apply(pw.AmbientPoint(qt.E1, qt.E2))
    npt.assert_array_equal(out.p, -qt.E1)
    npt.assert_array_equal(out.q, qt.E3)


def test_trivial_translation_is_identity():
    m = iso.two_sided_translation(qt.ONE, qt.ONE, qt.ONE)
    rng = np.random.default_rng(0)
    at = pw.random_point(rng)
    out = m.apply(at)
    npt.assert_allclose(out.p, at.p, atol=1e-15)
    npt.assert_allclose(out.q, at.q, atol=1e-15)


def test_translation_requires_unit_parameters():
    with pytest.raises(DomainError):
        iso.two_sided_translation(2.0 * qt.ONE, qt.ONE, qt.ONE)


def _all_maps(rng):
    return [
        iso.factor_swap(),
        iso.conjugation_twist(),
        iso.two_sided_translation(
            qt.sample_unit(rng), qt.sample_unit(rng), qt.sample_unit(rng)
        ),
    ]


def test_metric_pullback():
    rng = np.random.default_rng(1)
    for m in _all_maps(rng):
        for _ in range(50):
            at = pw.random_point(rng)
            z1 = pw.random_tangent(rng, at)
            z2 = pw.random_tangent(rng, at)
            assert pw.metric_g(m.differential(z1), m.differential(z2)) == pytest.approx(
                pw.metric_g(z1, z2), abs=1e-10
            )


def test_differential_against_central_differences():
    rng = np.random.default_rng(2)
    for m in _all_maps(rng):
        for _ in range(25):
            z = pw.random_tangent(rng, pw.random_point(rng))
            closed = m.differential(z)
            fd = iso.differential_fd(m, z)
            npt.assert_allclose(closed.u, fd.u, atol=1e-6)
            npt.assert_allclose(closed.v, fd.v, atol=1e-6)


def _max_component_diff(z1, z2):
    return max(float(np.max(np.abs(z1.u - z2.u))), float(np.max(np.abs(z1.v - z2.v))))


def test_swap_differential_relations():
    # d(swap) anticommutes with J and commutes with P
    m = iso.factor_swap()
    rng = np.random.default_rng(3)
    for _ in range(100):
        z = pw.random_tangent(rng, pw.random_point(rng))
        a = m.differential(pw.apply_J(z))
        b = pw.apply_J(m.differential(z))
        assert max(np.max(np.abs(a.u + b.u)), np.max(np.abs(a.v + b.v))) <= 1e-10
        a = m.differential(pw.apply_P(z))
        b = pw.apply_P(m.differential(z))
        assert _max_component_diff(a, b) <= 1e-10


def test_twist_differential_relations():
    # d(twist) anticommutes with J; through P it picks up -P/2 + sqrt(3)/2 JP
    m = iso.conjugation_twist()
    rng = np.random.default_rng(4)
    for _ in range(100):
        z = pw.random_tangent(rng, pw.random_point(rng))
        a = m.differential(pw.apply_J(z))
        b = pw.apply_J(m.differential(z))
        assert max(np.max(np.abs(a.u + b.u)), np.max(np.abs(a.v + b.v))) <= 1e-10
        a = m.differential(pw.apply_P(z))
        dz = m.differential(z)
        pdz = pw.apply_P(dz)
        jpdz = pw.apply_J(pdz)
        npt.assert_allclose(a.u, -0.5 * pdz.u + (SQRT3 / 2.0) * jpdz.u, atol=1e-10)
        npt.assert_allclose(a.v, -0.5 * pdz.v + (SQRT3 / 2.0) * jpdz.v, atol=1e-10)


def test_composition_identities():
    rng = np.random.default_rng(5)
    worst = iso.composition_checks(rng, samples=100)
    for name, residual in worst.items():
        assert residual <= 1e-12, name

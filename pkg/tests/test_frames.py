"""Frame-table calculus: table values, connection axioms, J-derivative
tensor identities, curvature routes, and agreement with the pointwise
formulas."""

import json
import math
import pathlib

import numpy as np
import numpy.testing as npt
import pytest

from nks3 import frames, pointwise as pw, quat as qt

SQRT3 = math.sqrt(3.0)

T = frames.get_tables()


def _rng(seed=0):
    return np.random.default_rng(seed)


class TestTables:
    def test_metric_values(self):
        assert T.g[0, 0] == pytest.approx(4.0 / 3.0, abs=0)
        assert T.g[3, 3] == pytest.approx(4.0 / 3.0, abs=0)
        assert T.g[0, 3] == pytest.approx(-2.0 / 3.0, abs=0)
        assert T.g[0, 1] == 0.0

    def test_metric_positive_definite(self):
        assert np.linalg.eigvalsh(T.g)[0] > 0.0
        npt.assert_array_equal(T.g, T.g.T)

    def test_complex_structure_squares_to_minus_id(self):
        npt.assert_allclose(T.J @ T.J, -np.eye(6), atol=1e-15)

    def test_product_structure(self):
        npt.assert_array_equal(T.P @ T.P, np.eye(6))
        # image of E2 is F2
        e2 = np.zeros(6)
        e2[1] = 1.0
        f2 = np.zeros(6)
        f2[4] = 1.0
        npt.assert_array_equal(T.P @ e2, f2)
        npt.assert_allclose(T.P @ T.g, (T.P @ T.g).T, atol=1e-15)
        npt.assert_allclose(T.P @ T.J + T.J @ T.P, 0.0, atol=1e-15)

    def test_factor_involution_from_P_and_J(self):
        npt.assert_allclose(T.Q, (2.0 * T.P @ T.J - T.J) / SQRT3, atol=1e-15)

    def test_connection_torsion_free(self):
        torsion = T.gamma - np.swapaxes(T.gamma, 0, 1) - T.bracket
        assert np.max(np.abs(torsion)) <= 1e-12

    def test_connection_metric_compatible(self):
        resid = np.einsum("abe,ec->abc", T.gamma, T.g) + np.einsum(
            "ace,eb->abc", T.gamma, T.g
        )
        assert np.max(np.abs(resid)) <= 1e-12

    def test_sphere_factor_leaf_totally_geodesic(self):
        # derivatives of first-factor fields along first-factor fields stay
        # in the first factor, and the same for the second
        assert np.max(np.abs(T.gamma[:3, :3, 3:])) == 0.0
        assert np.max(np.abs(T.gamma[3:, 3:, :3])) == 0.0

    def test_tables_frozen(self):
        with pytest.raises(ValueError):
            T.g[0, 0] = 0.0


class TestFrameCoordinates:
    def test_round_trip_identity(self):
        rng = _rng(1)
        for _ in range(50):
            at = pw.random_point(rng)
            x = rng.standard_normal(6)
            z = frames.frame_vector(at, x)
            npt.assert_allclose(frames.frame_coords(z), x, atol=1e-12)

    def test_r8_projection_round_trip(self):
        rng = _rng(2)
        for _ in range(50):
            at = pw.random_point(rng)
            x = rng.standard_normal(6)
            npt.assert_allclose(
                frames.r8_to_frame(at, frames.frame_to_r8(at, x)), x, atol=1e-12
            )

    def test_agreement_with_pointwise(self):
        rng = _rng(3)
        for _ in range(100):
            at = pw.random_point(rng)
            z1 = pw.random_tangent(rng, at)
            z2 = pw.random_tangent(rng, at)
            x1 = frames.frame_coords(z1)
            x2 = frames.frame_coords(z2)
            npt.assert_allclose(
                frames.frame_coords(pw.apply_J(z1)), T.J @ x1, atol=1e-10
            )
            npt.assert_allclose(
                frames.frame_coords(pw.apply_P(z1)), T.P @ x1, atol=1e-10
            )
            npt.assert_allclose(
                frames.frame_coords(pw.apply_Q(z1)), T.Q @ x1, atol=1e-10
            )
            assert pw.metric_g(z1, z2) == pytest.approx(
                float(x1 @ T.g @ x2), abs=1e-10
            )


class TestJDerivativeTensor:
    def test_hand_value(self):
        # G(E1, E2) = 2 (E3 + 2 F3) / (3 sqrt(3)), from the connection table
        e1 = np.eye(6)[0]
        e2 = np.eye(6)[1]
        expect = np.array([0, 0, 2.0 / (3.0 * SQRT3), 0, 0, 4.0 / (3.0 * SQRT3)])
        npt.assert_allclose(frames.tensor_G(T, e1, e2), expect, atol=1e-15)

    def test_vanishes_on_diagonal(self):
        rng = _rng(4)
        X = rng.standard_normal((200, 6))
        assert np.max(frames.g_norm(T, frames.tensor_G(T, X, X))) <= 1e-12

    def test_norm_on_orthonormal_J_orthogonal_pairs(self):
        # |G(X, Y)|^2 = 1/3 whenever X, Y are g-orthonormal with g(JX,Y) = 0
        rng = _rng(5)
        for _ in range(100):
            x = rng.standard_normal(6)
            x = x / frames.g_norm(T, x)
            y = rng.standard_normal(6)
            jx = T.J @ x
            y = y - frames.g_inner(T, y, x) * x - frames.g_inner(T, y, jx) * jx
            y = y / frames.g_norm(T, y)
            val = frames.g_inner(T, frames.tensor_G(T, x, y), frames.tensor_G(T, x, y))
            assert val == pytest.approx(1.0 / 3.0, abs=1e-10)

    def test_exhaustive_P_derivative_on_basis(self):
        for a in range(6):
            for b in range(6):
                x = np.eye(6)[a]
                y = np.eye(6)[b]
                assert frames.nabla_P_residual(T, x, y) <= 1e-12

    def test_P_derivative_random(self):
        rng = _rng(6)
        X = rng.standard_normal((100, 6))
        Y = rng.standard_normal((100, 6))
        assert frames.nabla_P_residual(T, X, Y) <= 1e-10
        assert frames.nabla_P_residual(T, X, X) <= 1e-10


class TestFlatConnectionRelation:
    def test_hand_case(self):
        # at (1, 1) the flat derivative of the E2 field along E1 projects to E3
        at = pw.AmbientPoint(qt.ONE, qt.ONE)
        e1 = np.eye(6)[0]
        e2 = np.eye(6)[1]
        npt.assert_allclose(
            frames.euclidean_connection(at, e1, e2), np.eye(6)[2], atol=1e-15
        )
        assert frames.connection_relation_residual(T, at, e1, e2) <= 1e-14

    def test_random_fields(self):
        rng = _rng(7)
        worst = 0.0
        for _ in range(200):
            at = pw.random_point(rng)
            worst = max(
                worst,
                frames.connection_relation_residual(
                    T, at, rng.standard_normal(6), rng.standard_normal(6)
                ),
            )
        assert worst <= 1e-10


class TestCurvature:
    def test_antisymmetry(self):
        rng = _rng(8)
        X = rng.standard_normal((100, 6))
        Z = rng.standard_normal((100, 6))
        assert np.max(frames.g_norm(T, frames.curvature(T, X, X, Z))) <= 1e-12

    def test_two_routes_agree(self):
        rng = _rng(9)
        X = rng.standard_normal((100, 6))
        Y = rng.standard_normal((100, 6))
        Z = rng.standard_normal((100, 6))
        diff = frames.curvature(T, X, Y, Z) - frames.curvature_closed_form(T, X, Y, Z)
        assert np.max(frames.g_norm(T, diff)) <= 1e-10

    def test_sectional_curvature_of_product_invariant_planes(self):
        # for g-orthonormal X, Y with PX = X, PY = Y, g(JX, Y) = 0 the
        # closed form collapses termwise to 5/12 + 1/3 = 3/4
        scale = SQRT3 / 2.0
        x = np.zeros(6)
        x[0] = x[3] = scale
        y = np.zeros(6)
        y[2] = y[5] = scale
        npt.assert_allclose(T.P @ x, x, atol=1e-15)
        assert frames.g_inner(T, x, x) == pytest.approx(1.0, abs=1e-14)
        assert abs(frames.g_inner(T, T.J @ x, y)) <= 1e-14
        k = frames.g_inner(T, frames.curvature(T, x, y, y), x)
        assert k == pytest.approx(0.75, abs=1e-12)

    def test_sphere_factor_sectional_curvature(self):
        e1 = np.eye(6)[0]
        e2 = np.eye(6)[1]
        k = frames.g_inner(T, frames.curvature(T, e1, e2, e2), e1)
        denom = frames.g_inner(T, e1, e1) * frames.g_inner(T, e2, e2)
        assert k / denom == pytest.approx(0.75, abs=1e-14)


def test_json_dump_matches_golden_file():
    golden_path = pathlib.Path(__file__).parent / "data" / "structure_tables.json"
    golden = json.loads(golden_path.read_text())
    current = json.loads(frames.tables_to_json(T))
    assert current.keys() == golden.keys()

    def walk(a, b):
        if isinstance(a, list):
            assert len(a) == len(b)
            for x, y in zip(a, b):
                walk(x, y)
        else:
            assert float(a) == float(b)

    for key in golden:
        if key == "basis":
            assert current[key] == golden[key]
        else:
            walk(current[key], golden[key])

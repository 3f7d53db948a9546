"""Constant-coefficient tensor tables in the global left-invariant frame.

The frame on the product of two unit 3-spheres is

    E_i = (p e_i, 0),   F_i = (0, q e_i),   e_1 = i, e_2 = j, e_3 = k,

ordered E_1, E_2, E_3, F_1, F_2, F_3; a FrameVector is its coefficient
6-vector.  In this frame every structure tensor has constant coefficients:

    g(E_i, E_j) = g(F_i, F_j) = 4/3 delta_ij,   g(E_i, F_j) = -2/3 delta_ij
    J E_i = -(E_i + 2 F_i)/sqrt(3),             J F_i = (2 E_i + F_i)/sqrt(3)
    P E_i = F_i,  P F_i = E_i,                  Q = diag(-1, -1, -1, 1, 1, 1)

and Lie brackets reduce to structure constants, [E_u, E_v] = E_{2 u x v},
[F_u, F_v] = F_{2 u x v}, [E, F] = 0.  Because all frame metric products
are constant, the Koszul formula collapses to

    2 g(D_X Y, Z) = g([X,Y], Z) - g([X,Z], Y) - g([Y,Z], X)

which is solved exactly, once, for the connection coefficients.  The
J-derivative tensor G(X, Y) = (D_X J) Y and the full curvature tensor then
come out as finite contractions with no numerical differentiation.

The one computation here that leaves the frame algebra is
`euclidean_connection`: for a field with constant frame coefficients the
Levi-Civita connection of the ordinary product round metric equals the flat
R^8 derivative projected back to the tangent space, which is again exact.
It provides an independent oracle for the relation

    nablaE_X Y = D_X Y + (J G(X, PY) + J G(Y, PX)) / 2

between the two connections.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import quat as qt
from .pointwise import AmbientPoint, TangentVector, project_components

SQRT3 = np.sqrt(3.0)


@dataclass(frozen=True)
class StructureTables:
    """Immutable constant tensors of the frame calculus.

    Index convention: operators act on coefficient columns, so
    (J x)_c = sum_a J[c, a] x_a.  Trilinear tables are stored as
    T[a, b, c] with T(B_a, B_b) = sum_c T[a, b, c] B_c, and the curvature
    table as R[a, b, c, d] with R(B_a, B_b) B_c = sum_d R[a, b, c, d] B_d.
    """

    g: np.ndarray        # (6, 6) metric
    g_inv: np.ndarray    # (6, 6)
    J: np.ndarray        # (6, 6) almost complex structure
    P: np.ndarray        # (6, 6) almost product structure
    Q: np.ndarray        # (6, 6) factor involution (-U, V)
    bracket: np.ndarray  # (6, 6, 6) Lie structure constants
    gamma: np.ndarray    # (6, 6, 6) connection coefficients
    G: np.ndarray        # (6, 6, 6) J-derivative tensor
    R: np.ndarray        # (6, 6, 6, 6) curvature tensor


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def build_tables() -> StructureTables:
    """Construct every constant table from the frame reduction."""
    eye3 = np.eye(3)

    g = np.zeros((6, 6))
    g[:3, :3] = (4.0 / 3.0) * eye3
    g[3:, 3:] = (4.0 / 3.0) * eye3
    g[:3, 3:] = -(2.0 / 3.0) * eye3
    g[3:, :3] = -(2.0 / 3.0) * eye3

    J = np.zeros((6, 6))
    J[:3, :3] = -eye3 / SQRT3
    J[3:, :3] = -2.0 * eye3 / SQRT3
    J[:3, 3:] = 2.0 * eye3 / SQRT3
    J[3:, 3:] = eye3 / SQRT3

    P = np.zeros((6, 6))
    P[:3, 3:] = eye3
    P[3:, :3] = eye3

    Q = np.diag([-1.0, -1.0, -1.0, 1.0, 1.0, 1.0])

    eps = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[i, j, k] = 1.0
        eps[j, i, k] = -1.0
    C = np.zeros((6, 6, 6))
    C[:3, :3, :3] = 2.0 * eps
    C[3:, 3:, 3:] = 2.0 * eps

    # reduced Koszul formula; rhs[a, b, c] = g(D_{B_a} B_b, B_c)
    t1 = np.einsum("abe,ec->abc", C, g)
    t2 = np.einsum("ace,eb->abc", C, g)
    t3 = np.einsum("bce,ea->abc", C, g)
    rhs = 0.5 * (t1 - t2 - t3)
    g_inv = np.linalg.inv(g)
    gamma = np.einsum("abd,dc->abc", rhs, g_inv)

    # G(B_a, B_b) = D_{B_a}(J B_b) - J D_{B_a} B_b, constant coefficients
    G = np.einsum("kb,akc->abc", J, gamma) - np.einsum("abd,cd->abc", gamma, J)

    # curvature on frame fields from the connection and bracket tables
    R = (
        np.einsum("bce,aed->abcd", gamma, gamma)
        - np.einsum("ace,bed->abcd", gamma, gamma)
        - np.einsum("abe,ecd->abcd", C, gamma)
    )

    return StructureTables(
        g=_freeze(g),
        g_inv=_freeze(g_inv),
        J=_freeze(J),
        P=_freeze(P),
        Q=_freeze(Q),
        bracket=_freeze(C),
        gamma=_freeze(gamma),
        G=_freeze(G),
        R=_freeze(R),
    )


@lru_cache(maxsize=1)
def get_tables() -> StructureTables:
    return build_tables()


# ---------------------------------------------------------------------------
# frame coordinate conversions
# ---------------------------------------------------------------------------

def frame_coords(z: TangentVector) -> np.ndarray:
    """Coefficients of a tangent vector in the left-invariant frame."""
    at = z.at
    return np.concatenate(
        [qt.vec(qt.mul(qt.conj(at.p), z.u)), qt.vec(qt.mul(qt.conj(at.q), z.v))]
    )


def frame_coords_components(p, q, u, v) -> np.ndarray:
    """Batched frame coefficients for raw component arrays."""
    return np.concatenate(
        [qt.vec(qt.mul(qt.conj(p), u)), qt.vec(qt.mul(qt.conj(q), v))], axis=-1
    )


def frame_vector(at: AmbientPoint, x) -> TangentVector:
    """Tangent vector with the given frame coefficients."""
    x = np.asarray(x, dtype=float)
    return TangentVector(at, qt.mul(at.p, qt.pure(x[:3])), qt.mul(at.q, qt.pure(x[3:])))


def frame_to_r8(at: AmbientPoint, x) -> np.ndarray:
    """Flat R^8 representation (U, V) of a frame coefficient vector."""
    x = np.asarray(x, dtype=float)
    u = qt.mul(at.p, qt.pure(x[:3]))
    v = qt.mul(at.q, qt.pure(x[3:]))
    return np.concatenate([u, v])


def r8_to_frame(at: AmbientPoint, w) -> np.ndarray:
    """Tangent-project a flat R^8 vector at a point, in frame coefficients."""
    w = np.asarray(w, dtype=float)
    u, v = project_components(at.p, at.q, w[:4], w[4:])
    return frame_coords_components(at.p, at.q, u, v)


# ---------------------------------------------------------------------------
# tensor evaluation
# ---------------------------------------------------------------------------

def g_inner(tables: StructureTables, x, y):
    """Metric pairing of frame coefficient vectors; broadcasts over rows."""
    return np.einsum("...i,ij,...j->...", x, tables.g, y)


def g_norm(tables: StructureTables, x):
    return np.sqrt(np.maximum(g_inner(tables, x, x), 0.0))


def tensor_G(tables: StructureTables, x, y):
    """J-derivative tensor G(X, Y); broadcasts over rows of x and y."""
    return np.einsum("abc,...a,...b->...c", tables.G, x, y)


def nabla(tables: StructureTables, x, y):
    """Connection applied to a field with constant frame coefficients y."""
    return np.einsum("abc,...a,...b->...c", tables.gamma, x, y)


def curvature(tables: StructureTables, x, y, z):
    """Curvature R(X, Y) Z through the structure-constant table."""
    return np.einsum("abcd,...a,...b,...c->...d", tables.R, x, y, z)


def curvature_closed_form(tables: StructureTables, x, y, z):
    """Curvature R(X, Y) Z through the ambient closed form.

    R(X,Y)Z = 5/12 [g(Y,Z) X - g(X,Z) Y]
            + 1/12 [g(JY,Z) JX - g(JX,Z) JY - 2 g(JX,Y) JZ]
            + 1/3  [g(PY,Z) PX - g(PX,Z) PY + g(JPY,Z) JPX - g(JPX,Z) JPY]
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    J, P = tables.J, tables.P
    jx = x @ J.T
    jy = y @ J.T
    jz = z @ J.T
    px = x @ P.T
    py = y @ P.T
    jpx = px @ J.T
    jpy = py @ J.T

    def g_(u, v):
        return g_inner(tables, u, v)[..., None]

    term1 = (5.0 / 12.0) * (g_(y, z) * x - g_(x, z) * y)
    term2 = (1.0 / 12.0) * (g_(jy, z) * jx - g_(jx, z) * jy - 2.0 * g_(jx, y) * jz)
    term3 = (1.0 / 3.0) * (
        g_(py, z) * px - g_(px, z) * py + g_(jpy, z) * jpx - g_(jpx, z) * jpy
    )
    return term1 + term2 + term3


def nabla_P_residual(tables: StructureTables, x, y) -> float:
    """Residual of 2 (D_X P) Y = J G(X, PY) + J P G(X, Y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    py = y @ tables.P.T
    lhs = 2.0 * (nabla(tables, x, py) - nabla(tables, x, y) @ tables.P.T)
    rhs = tensor_G(tables, x, py) @ tables.J.T + tensor_G(tables, x, y) @ (
        tables.J @ tables.P
    ).T
    return float(np.max(g_norm(tables, lhs - rhs)))


def euclidean_connection(at: AmbientPoint, x, y) -> np.ndarray:
    """Product-round-metric connection of a constant-frame-coefficient field.

    The field Y(p, q) = (p u, q v) with fixed imaginary u, v is linear in the
    point, so its flat R^8 derivative along X is (X_p u, X_q v) exactly;
    projecting back to the tangent space gives the connection with no
    differencing error.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xu = qt.mul(at.p, qt.pure(x[:3]))
    xv = qt.mul(at.q, qt.pure(x[3:]))
    du = qt.mul(xu, qt.pure(y[:3]))
    dv = qt.mul(xv, qt.pure(y[3:]))
    return r8_to_frame(at, np.concatenate([du, dv]))


def connection_relation_residual(
    tables: StructureTables, at: AmbientPoint, x, y
) -> float:
    """Residual of the flat-vs-frame connection relation at one point."""
    px = np.asarray(x) @ tables.P.T
    py = np.asarray(y) @ tables.P.T
    corr = 0.5 * (
        tensor_G(tables, x, py) @ tables.J.T + tensor_G(tables, y, px) @ tables.J.T
    )
    lhs = euclidean_connection(at, x, y)
    rhs = nabla(tables, x, y) + corr
    return float(g_norm(tables, lhs - rhs))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def tables_to_json(tables: StructureTables) -> str:
    """Dump all tables as JSON with reals rendered as decimal strings."""

    def render(a: np.ndarray):
        if a.ndim == 1:
            return [repr(float(x)) for x in a]
        return [render(row) for row in a]

    doc = {
        "basis": ["E1", "E2", "E3", "F1", "F2", "F3"],
        "g": render(tables.g),
        "J": render(tables.J),
        "P": render(tables.P),
        "Q": render(tables.Q),
        "bracket": render(tables.bracket),
        "gamma": render(tables.gamma),
        "G": render(tables.G),
        "R": render(tables.R),
    }
    return json.dumps(doc, indent=2)

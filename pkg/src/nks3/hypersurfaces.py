"""Hypersurface geometry of the example families in the nearly Kaehler product.

Six families of parametrized immersions of a 5-dimensional chart:

    m1(r)    (x, sqrt(1 - r^2) + r y)        x on the 3-sphere, y imaginary unit
    m2(r)    factor swap of m1(r)
    m3(r)    conjugation twist of m1(r)
    m4(k,l)  (x, k e^{i phi1} + l e^{i phi2} j)   with k^2 + l^2 = 1
    m5(k,l)  factor swap of m4(k,l)
    m6(k,l)  conjugation twist of m4(k,l)

Chart layout: u[0:3] move x through the one-parameter subgroups
exp(u0 i) exp(u1 j) exp(u2 k); u[3:5] are latitude/longitude on the
2-sphere factor of m1 (kept away from the poles), or the two torus angles
of m4.  All pushforwards are closed form.

`analyze_point` produces the pointwise apparatus of a hypersurface: the
metric normal xi, the structure vector U = -J xi, the induced almost
contact tensors, and the shape operator via the Weingarten relation
A X = -(D_X xi)^T.  The ambient covariant derivative of xi is assembled
from the product-round-metric derivative (central differences of the
normal field along chart lines, projected to the tangent space) corrected
by the exact frame tensors:

    D_X xi = nablaE_X xi - (J G(X, P xi) + J G(xi, P X)) / 2.

Everything downstream (spectra, residuals of the Gauss, Codazzi and
structure-vector transport identities) works in frame coordinates, where
the structure tensors are constant matrices.

Orientation convention: the normal sign is chosen so that trace(A) >= 0,
with a lexicographic tie-break on the frame coefficients of xi when the
trace vanishes.  Spectra of a hypersurface and of its image under an
ambient isometry then agree as multisets up to one global sign, and that
is how spectra are compared throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import quat as qt
from .errors import DegenerateImmersionError, DomainError, PreconditionError
from .frames import frame_coords, frame_to_r8, get_tables, r8_to_frame, tensor_G
from .isometries import IsometryMap, conjugation_twist, factor_swap
from .pointwise import AmbientPoint, TangentVector

SQRT3 = math.sqrt(3.0)

RANK_TOL = 1e-6
TRACE_TIE_TOL = 1e-9
DIM_TOL = 1e-6
CLASS_TOL = 1e-6
HOPF_TOL = 1e-6
ORTHO_TOL = 1e-8

FAMILIES = ("m1", "m2", "m3", "m4", "m5", "m6")
THREE_CURVATURE_FAMILIES = ("m1", "m2", "m3")
FIVE_CURVATURE_FAMILIES = ("m4", "m5", "m6")

PLUS = "PLUS"
MINUS = "MINUS"
REFLECT = "REFLECT"
OTHER = "OTHER"


# ---------------------------------------------------------------------------
# immersions
# ---------------------------------------------------------------------------

class Immersion:
    """A parametrized immersion of a 5-parameter chart, with pushforward."""

    def __init__(self, family: str, params: tuple,
                 point_fn: Callable, push_fn: Callable):
        self.family = family
        self.params = params
        self._point = point_fn
        self._push = push_fn

    def point(self, u) -> AmbientPoint:
        return self._point(np.asarray(u, dtype=float))

    def pushforward(self, u) -> list:
        """The five chart-direction tangent vectors at u."""
        return self._push(np.asarray(u, dtype=float))


def _sphere_factor(u3):
    """x and its three partials; each partial is (imaginary) * x."""
    g1 = qt.exp_pure(np.array([u3[0], 0.0, 0.0]))
    g2 = qt.exp_pure(np.array([0.0, u3[1], 0.0]))
    g3 = qt.exp_pure(np.array([0.0, 0.0, u3[2]]))
    x = qt.mul(qt.mul(g1, g2), g3)
    d0 = qt.mul(qt.E1, x)
    d1 = qt.mul(qt.mul(qt.mul(g1, qt.E2), g2), g3)
    d2 = qt.mul(qt.mul(qt.mul(g1, g2), qt.E3), g3)
    return x, (d0, d1, d2)


def _round_sphere_chart(r: float):
    c = math.sqrt(max(1.0 - r * r, 0.0))

    def second_factor(u):
        psi, chi = u[3], u[4]
        y = qt.quat(0.0, math.cos(psi) * math.cos(chi),
                    math.cos(psi) * math.sin(chi), math.sin(psi))
        dpsi = qt.quat(0.0, -math.sin(psi) * math.cos(chi),
                       -math.sin(psi) * math.sin(chi), math.cos(psi))
        dchi = qt.quat(0.0, -math.cos(psi) * math.sin(chi),
                       math.cos(psi) * math.cos(chi), 0.0)
        return c * qt.ONE + r * y, r * dpsi, r * dchi

    def point_fn(u):
        x, _ = _sphere_factor(u[:3])
        q, _, _ = second_factor(u)
        return AmbientPoint(x, q)

    def push_fn(u):
        x, dx = _sphere_factor(u[:3])
        q, d3, d4 = second_factor(u)
        pt = AmbientPoint(x, q)
        zero = np.zeros(4)
        return [TangentVector(pt, d, zero) for d in dx] + [
            TangentVector(pt, zero, d3),
            TangentVector(pt, zero, d4),
        ]

    return point_fn, push_fn


def _torus_chart(k: float, l: float):
    def second_factor(u):
        e1 = qt.exp_pure(np.array([u[3], 0.0, 0.0]))
        e2 = qt.exp_pure(np.array([u[4], 0.0, 0.0]))
        q = k * e1 + l * qt.mul(e2, qt.E2)
        d3 = k * qt.mul(qt.E1, e1)
        d4 = l * qt.mul(qt.E1, qt.mul(e2, qt.E2))
        return q, d3, d4

    def point_fn(u):
        x, _ = _sphere_factor(u[:3])
        q, _, _ = second_factor(u)
        return AmbientPoint(x, q)

    def push_fn(u):
        x, dx = _sphere_factor(u[:3])
        q, d3, d4 = second_factor(u)
        pt = AmbientPoint(x, q)
        zero = np.zeros(4)
        return [TangentVector(pt, d, zero) for d in dx] + [
            TangentVector(pt, zero, d3),
            TangentVector(pt, zero, d4),
        ]

    return point_fn, push_fn


def _composed(family: str, params: tuple, base: Immersion,
              isom: IsometryMap) -> Immersion:
    def point_fn(u):
        return isom.apply(base.point(u))

    def push_fn(u):
        return [isom.differential(z) for z in base.pushforward(u)]

    return Immersion(family, params, point_fn, push_fn)


def make_example(family: str, r: Optional[float] = None,
                 k: Optional[float] = None, l: Optional[float] = None) -> Immersion:
    """Build one of the six example hypersurface families."""
    if family not in FAMILIES:
        raise DomainError(f"unknown family {family!r}")
    if family in THREE_CURVATURE_FAMILIES:
        if r is None or k is not None or l is not None:
            raise DomainError(f"family {family} takes the single parameter r")
        if not 0.0 < r <= 1.0:
            raise DomainError("r must lie in (0, 1]")
        point_fn, push_fn = _round_sphere_chart(float(r))
        base = Immersion("m1", (float(r),), point_fn, push_fn)
        if family == "m1":
            return base
        isom = factor_swap() if family == "m2" else conjugation_twist()
        return _composed(family, (float(r),), base, isom)

    if r is not None or k is None or l is None:
        raise DomainError(f"family {family} takes the parameter pair (k, l)")
    if not (0.0 < k < 1.0 and 0.0 < l < 1.0):
        raise DomainError("k and l must lie in (0, 1)")
    if abs(k * k + l * l - 1.0) > 1e-12:
        raise DomainError("k and l must satisfy k^2 + l^2 = 1")
    point_fn, push_fn = _torus_chart(float(k), float(l))
    base = Immersion("m4", (float(k), float(l)), point_fn, push_fn)
    if family == "m4":
        return base
    isom = factor_swap() if family == "m5" else conjugation_twist()
    return _composed(family, (float(k), float(l)), base, isom)


def random_chart_point(rng: np.random.Generator) -> np.ndarray:
    """A chart point away from the coordinate degeneracies.

    The 3-sphere coordinates lock at u1 = +-pi/4 and the latitude at
    u3 = +-pi/2, so sampling stays well inside both bounds.
    """
    u = rng.uniform(-0.6, 0.6, size=5)
    u[3] = rng.uniform(-1.2, 1.2)
    u[4] = rng.uniform(-math.pi, math.pi)
    return u


# ---------------------------------------------------------------------------
# closed-form spectra
# ---------------------------------------------------------------------------

def expected_spectrum(family: str, r: Optional[float] = None,
                      k: Optional[float] = None,
                      l: Optional[float] = None) -> np.ndarray:
    """Principal curvatures with multiplicity, ascending, from the closed forms."""
    if family in THREE_CURVATURE_FAMILIES:
        mid = math.sqrt(1.0 - r * r) / (2.0 * r)
        half = math.sqrt(3.0 - 2.0 * r * r) / (2.0 * SQRT3 * r)
        lam, bet = mid - half, mid + half
        return np.sort(np.array([0.0, lam, lam, bet, bet]))
    s1 = math.sqrt(9.0 * k * k + 3.0 * l * l)
    s2 = math.sqrt(3.0 * k * k + 9.0 * l * l)
    vals = [0.0,
            (3.0 * k - s1) / (6.0 * l),
            (3.0 * k + s1) / (6.0 * l),
            (-3.0 * l - s2) / (6.0 * k),
            (-3.0 * l + s2) / (6.0 * k)]
    return np.sort(np.array(vals))


def spectra_match(computed, reference) -> float:
    """Multiset distance up to one global sign; the better of the two signs."""
    a = np.sort(np.asarray(computed, dtype=float))
    b = np.sort(np.asarray(reference, dtype=float))
    return min(float(np.max(np.abs(a - b))),
               float(np.max(np.abs(np.sort(-a) - b))))


# ---------------------------------------------------------------------------
# pointwise hypersurface data
# ---------------------------------------------------------------------------

@dataclass
class HypersurfacePointData:
    """Frame-coordinate hypersurface apparatus at one chart point."""

    point: AmbientPoint
    push_coords: np.ndarray      # (5, 6) chart pushforwards
    tangent_frame: np.ndarray    # (5, 6) rows g-orthonormal
    chart_weights: np.ndarray    # (5, 5): frame_i = sum_a W[i, a] push_a
    xi: np.ndarray               # (6,) unit normal
    xi_r8: np.ndarray            # (8,) flat representation, for sign alignment
    structure_vector: np.ndarray  # (6,) U = -J xi
    alpha: float                 # g(A U, U)
    shape: np.ndarray            # (5, 5) symmetrized shape operator
    symmetry_residual: float
    phi: np.ndarray              # (5, 5): phi t_i = sum_j phi[i, j] t_j
    eta: np.ndarray              # (5,) frame components of U
    hopf_residual: float
    a: float                     # g(P xi, xi)
    b: float                     # g(P xi, U)
    c: float                     # |P xi - a xi - b U|_g

    def tangential(self, w6: np.ndarray) -> np.ndarray:
        t = get_tables()
        return w6 - float(w6 @ t.g @ self.xi) * self.xi

    def tangent_components(self, w6: np.ndarray) -> np.ndarray:
        t = get_tables()
        return self.tangent_frame @ t.g @ w6

    def from_components(self, x5) -> np.ndarray:
        return np.asarray(x5, dtype=float) @ self.tangent_frame

    def apply_shape(self, w6: np.ndarray) -> np.ndarray:
        return (self.tangent_components(w6) @ self.shape) @ self.tangent_frame

    def apply_phi(self, w6: np.ndarray) -> np.ndarray:
        t = get_tables()
        jw = t.J @ w6
        return jw - float(jw @ t.g @ self.xi) * self.xi


def _chart_data(M: Immersion, u):
    pt = M.point(u)
    push = M.pushforward(u)
    T = np.stack([frame_coords(z) for z in push])
    t = get_tables()
    gram = T @ t.g @ T.T
    evals = np.linalg.eigvalsh(gram)
    if evals[0] <= RANK_TOL:
        raise DegenerateImmersionError(
            f"pushforward rank below 5 at u={np.asarray(u).tolist()}"
        )
    L = np.linalg.cholesky(gram)
    W = np.linalg.solve(L, np.eye(5))
    frame = W @ T
    return pt, T, frame, W


def _unit_normal(pt: AmbientPoint, T: np.ndarray) -> np.ndarray:
    t = get_tables()
    _, _, vt = np.linalg.svd(T @ t.g)
    xi = vt[-1]
    return xi / math.sqrt(float(xi @ t.g @ xi))


def _normal_r8(M: Immersion, u, ref_r8: np.ndarray) -> np.ndarray:
    """Normal at a neighbouring chart point, sign-aligned to a reference."""
    pt, T, _, _ = _chart_data(M, u)
    xi = _unit_normal(pt, T)
    xi8 = frame_to_r8(pt, xi)
    if float(xi8 @ ref_r8) < 0.0:
        xi8 = -xi8
    return xi8


def analyze_point(M: Immersion, u, h: float = 1e-5,
                  ref_normal_r8: Optional[np.ndarray] = None) -> HypersurfacePointData:
    """Full pointwise apparatus of the hypersurface at chart point u."""
    u = np.asarray(u, dtype=float)
    t = get_tables()
    pt, T, frame, W = _chart_data(M, u)
    xi = _unit_normal(pt, T)
    xi8 = frame_to_r8(pt, xi)
    if ref_normal_r8 is not None and float(xi8 @ ref_normal_r8) < 0.0:
        xi = -xi
        xi8 = -xi8

    # product-round-metric derivative of the normal along each chart line
    nablaE_chart = np.empty((5, 6))
    for a_idx in range(5):
        step = np.zeros(5)
        step[a_idx] = h
        plus = _normal_r8(M, u + step, xi8)
        minus = _normal_r8(M, u - step, xi8)
        nablaE_chart[a_idx] = r8_to_frame(pt, (plus - minus) / (2.0 * h))
    nablaE_frame = W @ nablaE_chart

    pxi = t.P @ xi
    corr = 0.5 * (
        tensor_G(t, frame, pxi[None, :]) @ t.J.T
        + tensor_G(t, xi[None, :], frame @ t.P.T) @ t.J.T
    )
    nabla_xi = nablaE_frame - corr
    A = -(nabla_xi @ t.g @ frame.T)

    if ref_normal_r8 is None:
        tr = float(np.trace(A))
        if tr < -TRACE_TIE_TOL:
            flip = True
        elif tr > TRACE_TIE_TOL:
            flip = False
        else:
            lead = xi[int(np.argmax(np.abs(xi) > TRACE_TIE_TOL))]
            flip = lead < 0.0
        if flip:
            xi = -xi
            xi8 = -xi8
            A = -A

    symmetry_residual = float(np.max(np.abs(A - A.T)))
    A = 0.5 * (A + A.T)

    uvec = -(t.J @ xi)
    eta = frame @ t.g @ uvec
    phi_rows = np.empty((5, 5))
    for i in range(5):
        jt = t.J @ frame[i]
        phi_rows[i] = frame @ t.g @ (jt - float(jt @ t.g @ xi) * xi)

    au = eta @ A
    alpha = float(au @ eta)
    hopf_residual = float(np.linalg.norm(au - alpha * eta))

    pxi = t.P @ xi
    a_coef = float(pxi @ t.g @ xi)
    b_coef = float(pxi @ t.g @ uvec)
    rem = pxi - a_coef * xi - b_coef * uvec
    c_coef = math.sqrt(max(float(rem @ t.g @ rem), 0.0))

    return HypersurfacePointData(
        point=pt,
        push_coords=T,
        tangent_frame=frame,
        chart_weights=W,
        xi=xi,
        xi_r8=xi8,
        structure_vector=uvec,
        alpha=alpha,
        shape=A,
        symmetry_residual=symmetry_residual,
        phi=phi_rows,
        eta=eta,
        hopf_residual=hopf_residual,
        a=a_coef,
        b=b_coef,
        c=c_coef,
    )


# ---------------------------------------------------------------------------
# spectra and classification
# ---------------------------------------------------------------------------

def cluster_eigenvalues(values, rel_tol: float = 1e-6,
                        abs_floor: float = 1e-9) -> list:
    """Group ascending eigenvalues into clusters of nearly equal values."""
    values = np.sort(np.asarray(values, dtype=float))
    threshold = max(rel_tol * float(np.max(np.abs(values))), abs_floor)
    clusters = [[values[0]]]
    for v in values[1:]:
        if v - clusters[-1][-1] <= threshold:
            clusters[-1].append(v)
        else:
            clusters.append([v])
    return clusters


@dataclass
class SpectralReport:
    """Shape-operator spectrum and distribution diagnostics at one point."""

    eigenvalues: np.ndarray        # (5,) ascending
    multiplicities: tuple
    cluster_means: tuple
    trace: float
    mean_curvature: float
    alpha: float
    hopf_residual: float
    dim_distribution: int          # 2 or 4
    a: float
    b: float
    c: float
    theta: Optional[float]


def spectral_report(data: HypersurfacePointData, rel_tol: float = 1e-6,
                    abs_floor: float = 1e-9) -> SpectralReport:
    t = get_tables()
    evals, evecs = np.linalg.eigh(data.shape)
    clusters = cluster_eigenvalues(evals, rel_tol, abs_floor)
    mult = tuple(len(c) for c in clusters)
    means = tuple(float(np.mean(c)) for c in clusters)

    # invariant |g(J X1, X2)| of the top two-dimensional eigenspace
    theta = None
    offsets = np.concatenate([[0], np.cumsum(mult)])
    for idx in range(len(mult) - 1, -1, -1):
        if mult[idx] == 2:
            cols = evecs[:, offsets[idx]:offsets[idx] + 2]
            x1 = cols[:, 0] @ data.tangent_frame
            x2 = cols[:, 1] @ data.tangent_frame
            theta = float(abs(x1 @ t.g @ (t.J @ x2)))
            break

    trace = float(np.sum(evals))
    return SpectralReport(
        eigenvalues=evals,
        multiplicities=mult,
        cluster_means=means,
        trace=trace,
        mean_curvature=trace / 5.0,
        alpha=data.alpha,
        hopf_residual=data.hopf_residual,
        dim_distribution=2 if data.c <= DIM_TOL else 4,
        a=data.a,
        b=data.b,
        c=data.c,
        theta=theta,
    )


_CLASS_TABLE = (
    (PLUS, 0.5, -SQRT3 / 2.0),
    (MINUS, 0.5, SQRT3 / 2.0),
    (REFLECT, -1.0, 0.0),
)


def classify_normal_action(report) -> str:
    """Which of the three product-structure actions the normal realizes.

    Accepts any object with attributes a, b, c (a point analysis or a
    spectral report).  Defined only when P xi lies in span(xi, U), that
    is when the canonical distribution spanned by xi, U and their images
    under P is 2-dimensional.
    """
    if report.c > DIM_TOL:
        raise PreconditionError(
            "normal-action classes are defined only when P xi lies in span(xi, U)"
        )
    for name, a0, b0 in _CLASS_TABLE:
        if abs(report.a - a0) <= CLASS_TOL and abs(report.b - b0) <= CLASS_TOL:
            return name
    return OTHER


def normal_action_residual(report, name: str) -> float:
    """Distance of (a, b) from the named class."""
    for cname, a0, b0 in _CLASS_TABLE:
        if cname == name:
            return max(abs(report.a - a0), abs(report.b - b0))
    raise DomainError(f"unknown class {name!r}")


# ---------------------------------------------------------------------------
# identity residuals
# ---------------------------------------------------------------------------

def _gnorm(w6) -> float:
    t = get_tables()
    return math.sqrt(max(float(w6 @ t.g @ w6), 0.0))


def _ambient_correction(t, x6, w6):
    """(J G(X, P W) + J G(W, P X)) / 2, the flat-vs-frame connection gap."""
    return 0.5 * (
        t.J @ tensor_G(t, x6, t.P @ w6) + t.J @ tensor_G(t, w6, t.P @ x6)
    )


def _induced_derivative(data: HypersurfacePointData, x6, field_center,
                        d_field_r8) -> np.ndarray:
    """Induced covariant derivative at the center from a flat field derivative."""
    t = get_tables()
    nablaE = r8_to_frame(data.point, d_field_r8)
    return data.tangential(nablaE - _ambient_correction(t, x6, field_center))


def reeb_transport_residual(M: Immersion, u, x5, h: float = 1e-5,
                            data: Optional[HypersurfacePointData] = None) -> float:
    """Residual of the structure-vector transport law D_X U = phi A X - G(X, xi)."""
    t = get_tables()
    if data is None:
        data = analyze_point(M, u)
    u = np.asarray(u, dtype=float)
    x5 = np.asarray(x5, dtype=float)
    X = data.from_components(x5)
    chart_vel = x5 @ data.chart_weights

    def reeb_r8(u_prime):
        pt_p, T_p, _, _ = _chart_data(M, u_prime)
        xi_p = _unit_normal(pt_p, T_p)
        if float(frame_to_r8(pt_p, xi_p) @ data.xi_r8) < 0.0:
            xi_p = -xi_p
        return frame_to_r8(pt_p, -(t.J @ xi_p))

    du8 = (reeb_r8(u + h * chart_vel) - reeb_r8(u - h * chart_vel)) / (2.0 * h)
    lhs = _induced_derivative(data, X, data.structure_vector, du8)
    rhs = data.apply_phi(data.apply_shape(X)) - tensor_G(t, X, data.xi)
    return _gnorm(lhs - rhs)


def codazzi_residual(M: Immersion, u, x5, y5, h: float = 1e-4,
                     data: Optional[HypersurfacePointData] = None) -> float:
    """Residual of the Codazzi relation for the shape operator."""
    t = get_tables()
    if data is None:
        data = analyze_point(M, u)
    u = np.asarray(u, dtype=float)
    x5 = np.asarray(x5, dtype=float)
    y5 = np.asarray(y5, dtype=float)
    X = data.from_components(x5)
    Y = data.from_components(y5)
    xchart = x5 @ data.chart_weights
    ychart = y5 @ data.chart_weights

    def shaped_r8(u_prime, arg_chart):
        d2 = analyze_point(M, u_prime, ref_normal_r8=data.xi_r8)
        return frame_to_r8(d2.point, d2.apply_shape(arg_chart @ d2.push_coords))

    def deriv_of_shaped(vel_chart, vel6, arg_chart, center6):
        dfield = (
            shaped_r8(u + h * vel_chart, arg_chart)
            - shaped_r8(u - h * vel_chart, arg_chart)
        ) / (2.0 * h)
        return _induced_derivative(data, vel6, center6, dfield)

    lhs = deriv_of_shaped(xchart, X, ychart, data.apply_shape(Y)) - deriv_of_shaped(
        ychart, Y, xchart, data.apply_shape(X)
    )

    g = t.g
    xi, uvec = data.xi, data.structure_vector
    px, py = t.P @ X, t.P @ Y
    jpx, jpy = t.J @ px, t.J @ py
    rhs = (1.0 / 12.0) * (
        float(X @ g @ uvec) * data.apply_phi(Y)
        - float(Y @ g @ uvec) * data.apply_phi(X)
        - 2.0 * float((t.J @ X) @ g @ Y) * uvec
    ) + (1.0 / 3.0) * (
        float(px @ g @ xi) * data.tangential(py)
        - float(py @ g @ xi) * data.tangential(px)
        + float(px @ g @ uvec) * data.tangential(jpy)
        - float(py @ g @ uvec) * data.tangential(jpx)
    )
    return _gnorm(lhs - rhs)


def _covariant_field_r8(M: Immersion, u_prime, vel_chart, arg_chart,
                        h: float) -> np.ndarray:
    """(induced derivative of the arg field along vel)(u_prime), flat layout.

    Both the velocity and the argument are chart-coefficient-constant
    combinations of the coordinate pushforwards.
    """
    t = get_tables()
    pt_p, T_p, _, _ = _chart_data(M, u_prime)
    xi_p = _unit_normal(pt_p, T_p)

    def field_r8(u_second):
        pt_s, T_s, _, _ = _chart_data(M, u_second)
        return frame_to_r8(pt_s, arg_chart @ T_s)

    dfield = (field_r8(u_prime + h * vel_chart)
              - field_r8(u_prime - h * vel_chart)) / (2.0 * h)
    nablaE = r8_to_frame(pt_p, dfield)
    v6 = vel_chart @ T_p
    a6 = arg_chart @ T_p
    nabla_amb = nablaE - _ambient_correction(t, v6, a6)
    nabla_ind = nabla_amb - float(nabla_amb @ t.g @ xi_p) * xi_p
    return frame_to_r8(pt_p, nabla_ind)


def _induced_curvature(M: Immersion, u, data: HypersurfacePointData,
                       xchart, ychart, zchart, X, Y,
                       h: float) -> np.ndarray:
    """R(X, Y) Z of the induced connection, two stacked central differences."""

    def second_derivative(outer_chart, inner_chart, outer6):
        dfield = (
            _covariant_field_r8(M, u + h * outer_chart, inner_chart, zchart, h)
            - _covariant_field_r8(M, u - h * outer_chart, inner_chart, zchart, h)
        ) / (2.0 * h)
        center = r8_to_frame(
            data.point, _covariant_field_r8(M, u, inner_chart, zchart, h)
        )
        return _induced_derivative(data, outer6, center, dfield)

    return second_derivative(xchart, ychart, X) - second_derivative(
        ychart, xchart, Y
    )


def gauss_residual(M: Immersion, u, x5, y5, z5, h: float = 1e-4,
                   data: Optional[HypersurfacePointData] = None) -> float:
    """Residual of the Gauss relation between induced and ambient curvature."""
    t = get_tables()
    if data is None:
        data = analyze_point(M, u)
    u = np.asarray(u, dtype=float)
    x5 = np.asarray(x5, dtype=float)
    y5 = np.asarray(y5, dtype=float)
    z5 = np.asarray(z5, dtype=float)
    X = data.from_components(x5)
    Y = data.from_components(y5)
    Z = data.from_components(z5)
    xchart = x5 @ data.chart_weights
    ychart = y5 @ data.chart_weights
    zchart = z5 @ data.chart_weights

    lhs = _induced_curvature(M, u, data, xchart, ychart, zchart, X, Y, h)

    g = t.g
    jx, jy = t.J @ X, t.J @ Y
    px, py = t.P @ X, t.P @ Y
    jpx, jpy = t.J @ px, t.J @ py
    az = data.apply_shape(Z)
    rhs = (
        (5.0 / 12.0) * (float(Y @ g @ Z) * X - float(X @ g @ Z) * Y)
        + (1.0 / 12.0) * (
            float(jy @ g @ Z) * data.apply_phi(X)
            - float(jx @ g @ Z) * data.apply_phi(Y)
            - 2.0 * float(jx @ g @ Y) * data.apply_phi(Z)
        )
        + (1.0 / 3.0) * (
            float(py @ g @ Z) * data.tangential(px)
            - float(px @ g @ Z) * data.tangential(py)
            + float(jpy @ g @ Z) * data.tangential(jpx)
            - float(jpx @ g @ Z) * data.tangential(jpy)
        )
        + float(az @ g @ Y) * data.apply_shape(X)
        - float(az @ g @ X) * data.apply_shape(Y)
    )
    return _gnorm(lhs - rhs)


def hopf_identity_residual(M: Immersion, u, x5, y5,
                           data: Optional[HypersurfacePointData] = None) -> float:
    """Residual of the pointwise identity tying A, phi and G on the
    structure-vector complement of a Hopf hypersurface."""
    t = get_tables()
    if data is None:
        data = analyze_point(M, u)
    if data.hopf_residual > HOPF_TOL:
        raise PreconditionError("point fails the Hopf condition")
    x5 = np.asarray(x5, dtype=float)
    y5 = np.asarray(y5, dtype=float)
    if abs(float(x5 @ data.eta)) > ORTHO_TOL or abs(float(y5 @ data.eta)) > ORTHO_TOL:
        raise PreconditionError("arguments must be orthogonal to the structure vector")

    X = data.from_components(x5)
    Y = data.from_components(y5)
    g = t.g
    xi, uvec, alpha = data.xi, data.structure_vector, data.alpha
    px, py = t.P @ X, t.P @ Y

    lhs = (1.0 / 6.0) * float(data.apply_phi(X) @ g @ Y) - (2.0 / 3.0) * (
        float(px @ g @ xi) * float(py @ g @ uvec)
        - float(px @ g @ uvec) * float(py @ g @ xi)
    )

    gxxi = tensor_G(t, X, xi)
    ax = data.apply_shape(X)
    rhs_vec = (
        alpha * gxxi - data.apply_shape(gxxi)
        + tensor_G(t, alpha * X - ax, xi)
        - alpha * (data.apply_shape(data.apply_phi(X)) + data.apply_phi(ax))
        + 2.0 * data.apply_shape(data.apply_phi(ax))
    )
    return abs(lhs - float(rhs_vec @ g @ Y))


# ---------------------------------------------------------------------------
# moduli relations and leaf geometry of the round-sphere families
# ---------------------------------------------------------------------------

@dataclass
class ThetaConsistency:
    theta: float
    r_residual: float
    spectrum_residual: float
    product_residual: float


def theta_r_consistency(M: Immersion, u) -> ThetaConsistency:
    """Consistency of the eigenspace invariant theta with the modulus r.

    Checks r = sqrt(3) theta / sqrt(1 + 2 theta^2), the closed forms
    (1 +/- sqrt(1 - theta^2)) / (2 sqrt(3) theta) for the absolute values
    of the double principal curvatures, and their exact product -1/12.
    """
    if M.family not in THREE_CURVATURE_FAMILIES:
        raise PreconditionError("theta-r consistency applies to m1, m2, m3")
    r = M.params[0]
    rep = spectral_report(analyze_point(M, u))
    if rep.theta is None or rep.multiplicities.count(2) != 2:
        raise DegenerateImmersionError("no two-dimensional principal eigenspaces")
    theta = rep.theta
    r_res = abs(r - SQRT3 * theta / math.sqrt(1.0 + 2.0 * theta * theta))

    s = math.sqrt(max(1.0 - theta * theta, 0.0))
    closed = np.sort(np.array([(1.0 + s) / (2.0 * SQRT3 * theta),
                               (1.0 - s) / (2.0 * SQRT3 * theta)]))
    doubles = [m for m, n in zip(rep.cluster_means, rep.multiplicities) if n == 2]
    observed = np.sort(np.abs(np.array(doubles)))
    spec_res = float(np.max(np.abs(observed - closed)))

    prod_res = abs(doubles[0] * doubles[1] + 1.0 / 12.0)
    return ThetaConsistency(theta, r_res, spec_res, prod_res)


@dataclass
class LeafGeometry:
    sphere3_metric_residual: float     # factor pullback vs 4/3 of round
    sphere2_metric_residual: float     # factor pullback vs 4 r^2 / 3 of round
    sphere3_sectional: float           # finite-difference sectional curvature
    sphere2_curvature_residual: float  # (1 + 2 theta^2)/(4 theta^2) vs 3/(4 r^2)


def leaf_geometry(M: Immersion, u,
                  theta: Optional[float] = None) -> LeafGeometry:
    """Geometry of the two product-factor leaves through a chart point.

    The 3-sphere factor leaf carries 4/3 times its round metric, so its
    sectional curvature is 3/4; the value is also recomputed from the
    induced curvature by finite differences.  The 2-sphere factor leaf
    carries 4 r^2 / 3 times the round metric, so its curvature is
    3 / (4 r^2), which in terms of the eigenspace invariant theta reads
    (1 + 2 theta^2) / (4 theta^2).
    """
    if M.family not in THREE_CURVATURE_FAMILIES:
        raise PreconditionError("leaf geometry applies to m1, m2, m3")
    t = get_tables()
    r = M.params[0]
    u = np.asarray(u, dtype=float)
    data = analyze_point(M, u)
    gram = data.push_coords @ t.g @ data.push_coords.T

    # round-metric reference grams come from the base chart; the induced
    # gram is unchanged under the ambient isometries of m2 and m3
    _, dx = _sphere_factor(u[:3])
    round3 = np.array([[qt.dot(a, b) for b in dx] for a in dx])
    res3 = float(np.max(np.abs(gram[:3, :3] - (4.0 / 3.0) * round3)))
    round2 = np.diag([1.0, math.cos(float(u[3])) ** 2])
    res2 = float(np.max(np.abs(gram[3:, 3:] - (4.0 / 3.0) * r * r * round2)))

    # orthonormal pair spanning two 3-sphere-factor directions
    comp = data.tangent_frame @ t.g @ data.push_coords.T
    x5 = comp[:, 0] / np.linalg.norm(comp[:, 0])
    y5 = comp[:, 1] - float(comp[:, 1] @ x5) * x5
    y5 = y5 / np.linalg.norm(y5)
    X = data.from_components(x5)
    Y = data.from_components(y5)
    xchart = x5 @ data.chart_weights
    ychart = y5 @ data.chart_weights
    riem = _induced_curvature(M, u, data, xchart, ychart, ychart, X, Y, 1e-4)
    sec3 = float(riem @ t.g @ X)

    if theta is None:
        theta = spectral_report(data).theta
    k2 = (1.0 + 2.0 * theta * theta) / (4.0 * theta * theta)
    res_k2 = abs(k2 - 3.0 / (4.0 * r * r))
    return LeafGeometry(res3, res2, sec3, res_k2)

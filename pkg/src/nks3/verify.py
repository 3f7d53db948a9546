"""Structured verification suites with machine-readable reports.

Each suite evaluates a fixed list of identities over seeded random samples
and reports one CheckResult per identity: an id, a human-readable anchor
stating the identity, the sample count, the worst residual, the tolerance,
and the pass flag.  A non-finite residual always fails.  Reports are
deterministic for a fixed seed.
"""

from __future__ import annotations

import json
import math
import platform
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import hypersurfaces as hs
from . import isometries as iso
from . import pointwise as pw
from . import quat as qt
from .errors import DomainError
from .frames import (
    connection_relation_residual,
    curvature,
    curvature_closed_form,
    frame_coords_components,
    frame_to_r8,
    g_inner,
    g_norm,
    get_tables,
    nabla,
    r8_to_frame,
    tensor_G,
)

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    anchor: str
    samples: int
    max_residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return math.isfinite(self.max_residual) and self.max_residual <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "id": self.check_id,
            "anchor": self.anchor,
            "samples": self.samples,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


@dataclass
class SuiteReport:
    suite: str
    seed: int
    checks: list
    duration_ms: float
    environment: dict = field(default_factory=dict)

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "checks": [c.to_dict() for c in self.checks],
            "duration_ms": self.duration_ms,
            "environment": self.environment,
        }

    def to_json(self, indent=2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def environment_fingerprint() -> dict:
    return {
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "platform": platform.platform(),
        "machine": platform.machine(),
        "float_eps": np.finfo(float).eps,
    }


def _finalize(suite: str, seed: int, checks: list, started: float) -> SuiteReport:
    return SuiteReport(
        suite=suite,
        seed=seed,
        checks=checks,
        duration_ms=(time.perf_counter() - started) * 1000.0,
        environment=environment_fingerprint(),
    )


def _sanitize(value: float) -> float:
    # non-finite residuals propagate as inf so the check fails rather than erroring
    v = float(value)
    return v if math.isfinite(v) else math.inf


# ---------------------------------------------------------------------------
# structure suite
# ---------------------------------------------------------------------------

def _random_points(rng, n):
    p = rng.standard_normal((n, 4))
    q = rng.standard_normal((n, 4))
    p /= np.linalg.norm(p, axis=-1, keepdims=True)
    q /= np.linalg.norm(q, axis=-1, keepdims=True)
    return p, q


def run_structure_suite(seed: int, samples: int) -> SuiteReport:
    """Identity checks for the ambient structure tensors.

    Covers the antisymmetry, J-anticommutation, skew-adjointness and inner
    product expansion of the J-derivative tensor G, the derivative law and
    G-compatibility of the product structure, the expression of the factor
    involution through P and J, the relation between the flat product
    connection and the frame connection, the agreement of the curvature
    table with its closed form, and the pointwise-versus-frame agreement
    of J, P and the metric.
    """
    if samples < 1:
        raise DomainError("samples must be at least 1")
    started = time.perf_counter()
    t = get_tables()
    rng = np.random.default_rng(seed)
    n = samples

    X = rng.standard_normal((n, 6))
    Y = rng.standard_normal((n, 6))
    Z = rng.standard_normal((n, 6))
    W = rng.standard_normal((n, 6))

    checks = []

    def add(check_id, anchor, residual, tol, count=n):
        checks.append(CheckResult(check_id, anchor, count, _sanitize(residual), tol))

    gn = lambda v: float(np.max(g_norm(t, v)))

    add("G-antisymmetry", "G(X,Y) + G(Y,X) = 0",
        gn(tensor_G(t, X, Y) + tensor_G(t, Y, X)), 1e-12)

    add("G-J-anticommute", "G(X,JY) + J G(X,Y) = 0",
        gn(tensor_G(t, X, Y @ t.J.T) + tensor_G(t, X, Y) @ t.J.T), 1e-10)

    add("G-skew-adjoint", "g(G(X,Y),Z) + g(G(X,Z),Y) = 0",
        float(np.max(np.abs(
            g_inner(t, tensor_G(t, X, Y), Z) + g_inner(t, tensor_G(t, X, Z), Y)
        ))), 1e-10)

    jx = X @ t.J.T
    lhs26 = g_inner(t, tensor_G(t, X, Y), tensor_G(t, Z, W))
    rhs26 = (1.0 / 3.0) * (
        g_inner(t, X, Z) * g_inner(t, Y, W)
        - g_inner(t, X, W) * g_inner(t, Y, Z)
        + g_inner(t, jx, Z) * g_inner(t, W @ t.J.T, Y)
        - g_inner(t, jx, W) * g_inner(t, Z @ t.J.T, Y)
    )
    add("G-inner-product",
        "g(G(X,Y),G(Z,W)) = [g(X,Z)g(Y,W) - g(X,W)g(Y,Z) + g(JX,Z)g(JW,Y) - g(JX,W)g(JZ,Y)]/3",
        float(np.max(np.abs(lhs26 - rhs26))), 1e-10)

    py = Y @ t.P.T
    lhs28 = 2.0 * (nabla(t, X, py) - nabla(t, X, Y) @ t.P.T)
    rhs28 = tensor_G(t, X, py) @ t.J.T + tensor_G(t, X, Y) @ (t.J @ t.P).T
    add("P-derivative", "2 (D_X P) Y = J G(X,PY) + J P G(X,Y)",
        gn(lhs28 - rhs28), 1e-10)

    add("P-G-compatibility", "P G(X,Y) + G(PX,PY) = 0",
        gn(tensor_G(t, X, Y) @ t.P.T + tensor_G(t, X @ t.P.T, Y @ t.P.T)), 1e-10)

    # pointwise factor involution against its P, J expression
    p, q = _random_points(rng, n)
    u_raw = rng.standard_normal((n, 4))
    v_raw = rng.standard_normal((n, 4))
    u, v = pw.project_components(p, q, u_raw, v_raw)
    qu, qv = pw.q_components(u, v)
    ju, jv = pw.j_components(p, q, u, v)
    pju, pjv = pw.p_components(p, q, ju, jv)
    ru = (2.0 * pju - ju) / SQRT3 - qu
    rv = (2.0 * pjv - jv) / SQRT3 - qv
    res_q = float(np.max(np.sqrt(np.abs(pw.metric_components(p, q, ru, rv, ru, rv)))))
    add("Q-from-P-J", "Q Z = (2 P J Z - J Z)/sqrt(3)", res_q, 1e-10)

    worst_conn = 0.0
    for i in range(n):
        at = pw.AmbientPoint(p[i], q[i])
        worst_conn = max(
            worst_conn, connection_relation_residual(t, at, X[i], Y[i])
        )
    add("flat-connection-relation",
        "nablaE_X Y = D_X Y + [J G(X,PY) + J G(Y,PX)]/2",
        worst_conn, 1e-10)

    add("curvature-two-routes",
        "R(X,Y)Z from connection coefficients = closed form in g, J, P",
        gn(curvature(t, X, Y, Z) - curvature_closed_form(t, X, Y, Z)), 1e-10)

    xf = frame_coords_components(p, q, u, v)
    u2, v2 = pw.project_components(p, q, rng.standard_normal((n, 4)),
                                   rng.standard_normal((n, 4)))
    yf = frame_coords_components(p, q, u2, v2)
    res_frame = max(
        float(np.max(np.abs(frame_coords_components(p, q, ju, jv) - xf @ t.J.T))),
        float(np.max(np.abs(
            frame_coords_components(p, q, *pw.p_components(p, q, u, v)) - xf @ t.P.T
        ))),
        float(np.max(np.abs(
            pw.metric_components(p, q, u, v, u2, v2) - g_inner(t, xf, yf)
        ))),
    )
    add("frame-vs-pointwise", "frame tables reproduce the pointwise J, P, g",
        res_frame, 1e-10)

    return _finalize("structure", seed, checks, started)


# ---------------------------------------------------------------------------
# isometry suite
# ---------------------------------------------------------------------------

def run_isometry_suite(seed: int, samples: int) -> SuiteReport:
    """Metric pullback, differential relations with J and P, closed-form
    differentials against central differences, and composition identities
    for the three isometry families."""
    if samples < 1:
        raise DomainError("samples must be at least 1")
    started = time.perf_counter()
    rng = np.random.default_rng(seed)

    swap = iso.factor_swap()
    twist = iso.conjugation_twist()

    res = {
        "pullback-swap": 0.0,
        "pullback-twist": 0.0,
        "pullback-translation": 0.0,
        "swap-J-anticommute": 0.0,
        "swap-P-commute": 0.0,
        "twist-J-anticommute": 0.0,
        "twist-P-twist": 0.0,
        "differential-vs-fd": 0.0,
    }

    def gdiff(z1: pw.TangentVector, z2: pw.TangentVector) -> float:
        d = pw.TangentVector(z1.at, z1.u - z2.u, z1.v - z2.v)
        return pw.g_norm(d)

    for _ in range(samples):
        at = pw.random_point(rng)
        z = pw.random_tangent(rng, at)
        z2 = pw.random_tangent(rng, at)
        trans = iso.two_sided_translation(
            qt.sample_unit(rng), qt.sample_unit(rng), qt.sample_unit(rng)
        )

        for name, m in (("swap", swap), ("twist", twist), ("translation", trans)):
            d1, d2 = m.differential(z), m.differential(z2)
            res["pullback-" + name] = max(
                res["pullback-" + name],
                abs(pw.metric_g(d1, d2) - pw.metric_g(z, z2)),
            )
            fd = iso.differential_fd(m, z)
            res["differential-vs-fd"] = max(
                res["differential-vs-fd"],
                float(np.max(np.abs(fd.u - d1.u))),
                float(np.max(np.abs(fd.v - d1.v))),
            )

        res["swap-J-anticommute"] = max(
            res["swap-J-anticommute"],
            gdiff(swap.differential(pw.apply_J(z)),
                  pw.TangentVector(*_negate(pw.apply_J(swap.differential(z))))),
        )
        res["swap-P-commute"] = max(
            res["swap-P-commute"],
            gdiff(swap.differential(pw.apply_P(z)), pw.apply_P(swap.differential(z))),
        )
        res["twist-J-anticommute"] = max(
            res["twist-J-anticommute"],
            gdiff(twist.differential(pw.apply_J(z)),
                  pw.TangentVector(*_negate(pw.apply_J(twist.differential(z))))),
        )
        dz = twist.differential(z)
        pdz = pw.apply_P(dz)
        jpdz = pw.apply_J(pdz)
        target = pw.TangentVector(
            dz.at, -0.5 * pdz.u + (SQRT3 / 2.0) * jpdz.u,
            -0.5 * pdz.v + (SQRT3 / 2.0) * jpdz.v
        )
        res["twist-P-twist"] = max(
            res["twist-P-twist"], gdiff(twist.differential(pw.apply_P(z)), target)
        )

    comp = iso.composition_checks(rng, samples)

    anchors = {
        "pullback-swap": "g(d(swap) Z, d(swap) Z') = g(Z, Z')",
        "pullback-twist": "g(d(twist) Z, d(twist) Z') = g(Z, Z')",
        "pullback-translation": "g(d(translation) Z, d(translation) Z') = g(Z, Z')",
        "swap-J-anticommute": "d(swap) J = -J d(swap)",
        "swap-P-commute": "d(swap) P = P d(swap)",
        "twist-J-anticommute": "d(twist) J = -J d(twist)",
        "twist-P-twist": "d(twist) P = (-P/2 + sqrt(3)/2 JP) d(twist)",
        "differential-vs-fd": "closed-form differentials match central differences",
    }
    checks = []
    for cid, val in res.items():
        tol = 1e-6 if cid == "differential-vs-fd" else 1e-10
        checks.append(CheckResult(cid, anchors[cid], samples, _sanitize(val), tol))
    comp_anchors = {
        "swap-involution": "swap o swap = id",
        "twist-involution": "twist o twist = id",
        "translation-through-swap": "T(a,b,c) o swap = swap o T(b,a,c)",
        "translation-through-twist": "T(a,b,c) o twist = twist o T(c,b,a)",
    }
    for cid, val in comp.items():
        checks.append(CheckResult(cid, comp_anchors[cid], samples, _sanitize(val), 1e-10))

    return _finalize("isometry", seed, checks, started)


def _negate(z: pw.TangentVector):
    return z.at, -z.u, -z.v


# ---------------------------------------------------------------------------
# hypersurface suite
# ---------------------------------------------------------------------------

EXPECTED_CLASS = {"m1": hs.PLUS, "m2": hs.MINUS, "m3": hs.REFLECT}

DEFAULT_BATTERY = (
    ("m1", {"r": 0.6}), ("m1", {"r": 1.0}),
    ("m2", {"r": 0.6}), ("m2", {"r": 1.0}),
    ("m3", {"r": 0.6}), ("m3", {"r": 1.0}),
    ("m4", {"k": 0.6, "l": 0.8}),
    ("m5", {"k": 0.6, "l": 0.8}),
    ("m6", {"k": 0.6, "l": 0.8}),
)


def run_hypersurface_suite(family: str, params: dict, seed: int,
                           samples: int) -> SuiteReport:
    """Pointwise hypersurface checks for one family at one parameter value.

    Covers the Hopf property, the vanishing of the structure-vector
    principal curvature, the spectrum against its closed form (as a
    multiset up to one global sign), the multiplicity pattern, the
    2-dimensionality of the distribution spanned by the normal, the
    structure vector and their product-structure images, invariance of the
    structure-vector complement under P, the trace against the minimality
    locus, transport of the structure vector, the Gauss and Codazzi
    relations, the Hopf pointwise identity, and for the round-sphere
    families the theta-r relation and the leaf geometry.
    """
    if samples < 1:
        raise DomainError("samples must be at least 1")
    started = time.perf_counter()
    rng = np.random.default_rng(seed)
    M = hs.make_example(family, **params)
    label = family + "(" + ",".join(f"{k}={v:g}" for k, v in sorted(params.items())) + ")"

    expected = hs.expected_spectrum(family, **params)
    three_family = family in hs.THREE_CURVATURE_FAMILIES
    expected_mult = (2, 1, 2) if three_family else (1, 1, 1, 1, 1)

    worst = {
        "hopf": 0.0, "alpha": 0.0, "symmetry": 0.0, "contact": 0.0,
        "spectrum": 0.0, "multiplicity": 0.0, "distribution-dim": 0.0,
        "reeb-orthogonal-P": 0.0, "reeb-transport": 0.0,
        "codazzi": 0.0, "gauss": 0.0, "hopf-identity": 0.0,
    }
    spectra = []
    t = get_tables()

    for _ in range(samples):
        u = hs.random_chart_point(rng)
        data = hs.analyze_point(M, u)
        rep = hs.spectral_report(data)
        spectra.append(rep.eigenvalues)

        worst["hopf"] = max(worst["hopf"], data.hopf_residual)
        worst["alpha"] = max(worst["alpha"], abs(data.alpha))
        worst["symmetry"] = max(worst["symmetry"], data.symmetry_residual)
        worst["spectrum"] = max(
            worst["spectrum"], hs.spectra_match(rep.eigenvalues, expected)
        )
        if rep.multiplicities != expected_mult:
            worst["multiplicity"] = 1.0
        worst["distribution-dim"] = max(worst["distribution-dim"], data.c)

        # almost contact relations in the orthonormal tangent frame
        phi, eta = data.phi, data.eta
        contact = max(
            float(np.max(np.abs(phi @ phi + np.eye(5) - np.outer(eta, eta)))),
            float(np.max(np.abs(eta @ phi))),
            float(np.max(np.abs(phi + phi.T))),
        )
        worst["contact"] = max(worst["contact"], contact)

        # P maps the structure-vector complement into itself
        basis = _structure_complement(data)
        for x5 in basis:
            px = t.P @ data.from_components(x5)
            worst["reeb-orthogonal-P"] = max(
                worst["reeb-orthogonal-P"],
                abs(float(px @ t.g @ data.structure_vector)),
            )

        x5 = _unit(rng.standard_normal(5))
        y5 = _unit(rng.standard_normal(5))
        z5 = _unit(rng.standard_normal(5))
        worst["reeb-transport"] = max(
            worst["reeb-transport"], hs.reeb_transport_residual(M, u, x5, data=data)
        )
        worst["codazzi"] = max(
            worst["codazzi"], hs.codazzi_residual(M, u, x5, y5, data=data)
        )
        worst["gauss"] = max(
            worst["gauss"], hs.gauss_residual(M, u, x5, y5, z5, data=data)
        )
        xp = _unit(basis[0] + 0.3 * basis[2])
        yp = _unit(basis[1] - 0.5 * basis[3])
        worst["hopf-identity"] = max(
            worst["hopf-identity"], hs.hopf_identity_residual(M, u, xp, yp, data=data)
        )

    spectra = np.stack(spectra)
    spread = float(np.max(np.ptp(spectra, axis=0)))
    trace = float(np.mean([np.sum(s) for s in spectra]))

    checks = []

    def add(cid, anchor, residual, tol):
        checks.append(
            CheckResult(label + ":" + cid, anchor, samples, _sanitize(residual), tol)
        )

    add("hopf", "A U = alpha U (Hopf condition)", worst["hopf"], 1e-6)
    add("alpha-zero", "alpha = 0 on the example families", worst["alpha"], 1e-6)
    add("shape-symmetric", "shape operator symmetric in an orthonormal frame",
        worst["symmetry"], 1e-6)
    add("almost-contact", "phi^2 = -id + eta (x) U, eta o phi = 0, phi skew",
        worst["contact"], 1e-8)
    add("spectrum-closed-form",
        "principal curvatures match their closed forms up to one global sign",
        worst["spectrum"], 1e-6)
    add("multiplicity-pattern",
        f"multiplicity pattern {expected_mult}", worst["multiplicity"], 0.0)
    add("distribution-dim", "P xi lies in span(xi, U)",
        worst["distribution-dim"], 1e-6)
    add("P-preserves-complement",
        "P maps the structure-vector complement to itself",
        worst["reeb-orthogonal-P"], 1e-8)
    add("reeb-transport", "D_X U = phi A X - G(X, xi)",
        worst["reeb-transport"], 1e-5)
    add("gauss", "induced curvature matches the Gauss relation",
        worst["gauss"], 1e-3)
    add("codazzi", "shape-operator derivative matches the Codazzi relation",
        worst["codazzi"], 1e-3)
    add("hopf-identity",
        "pointwise identity tying A, phi, G on the structure-vector complement",
        worst["hopf-identity"], 1e-5)
    add("eigenvalue-constancy",
        "principal curvatures constant across sample points", spread, 1e-6)

    if three_family:
        r = params["r"]
        cls_expect = EXPECTED_CLASS[family]
        worst_cls = 0.0
        worst_theta = 0.0
        worst_prod = 0.0
        worst_leaf = 0.0
        rng2 = np.random.default_rng(seed + 1)
        for _ in range(min(samples, 3)):
            u = hs.random_chart_point(rng2)
            data = hs.analyze_point(M, u)
            rep = hs.spectral_report(data)
            worst_cls = max(worst_cls, hs.normal_action_residual(rep, cls_expect))
            tc = hs.theta_r_consistency(M, u)
            worst_theta = max(worst_theta, tc.r_residual, tc.spectrum_residual)
            worst_prod = max(worst_prod, tc.product_residual)
            lg = hs.leaf_geometry(M, u, theta=rep.theta)
            worst_leaf = max(
                worst_leaf,
                lg.sphere3_metric_residual * 1e3,  # scale to the curvature tolerance
                abs(lg.sphere3_sectional - 0.75),
                lg.sphere2_metric_residual * 1e3,
                lg.sphere2_curvature_residual * 1e3,
            )
        add("normal-action", f"normal-action class {cls_expect}", worst_cls, 1e-6)
        add("theta-r",
            "r = sqrt(3) theta / sqrt(1 + 2 theta^2) and the theta closed forms",
            worst_theta, 1e-6)
        add("double-eigenvalue-product", "product of double curvatures = -1/12",
            worst_prod, 1e-8)
        add("leaf-geometry",
            "factor leaves carry 4/3 and 4r^2/3 round metrics; curvatures 3/4 and (1+2 theta^2)/(4 theta^2)",
            worst_leaf, 1e-3)
        if abs(r - 1.0) < 1e-12:
            add("minimal-at-r1", "trace A = 0 exactly at r = 1", abs(trace), 1e-6)
        else:
            add("nonminimal-below-r1", "trace A bounded away from 0 for r < 1",
                max(0.0, 0.1 - abs(trace)), 0.0)
    else:
        worst_cls = 0.0
        rng2 = np.random.default_rng(seed + 1)
        classes = set()
        for _ in range(min(samples, 3)):
            u = hs.random_chart_point(rng2)
            rep = hs.spectral_report(hs.analyze_point(M, u))
            classes.add(hs.classify_normal_action(rep))
        add("normal-action-defined",
            "normal action falls in one consistent class",
            0.0 if len(classes) == 1 and hs.OTHER not in classes else 1.0, 0.0)

    return _finalize("hypersurface", seed, checks, started)


def _structure_complement(data: hs.HypersurfacePointData) -> list:
    """Orthonormal basis of the tangent directions orthogonal to U."""
    eta = data.eta
    basis = []
    for i in range(5):
        v = np.zeros(5)
        v[i] = 1.0
        v = v - float(v @ eta) * eta / float(eta @ eta)
        for b in basis:
            v = v - float(v @ b) * b
        n = np.linalg.norm(v)
        if n > 1e-8:
            basis.append(v / n)
    return basis[:4]


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def run_default_hypersurface_suites(seed: int, samples: int) -> SuiteReport:
    """The standard battery over all six families, merged into one report."""
    started = time.perf_counter()
    checks = []
    for i, (family, params) in enumerate(DEFAULT_BATTERY):
        rep = run_hypersurface_suite(family, params, seed + i, samples)
        checks.extend(rep.checks)
    return _finalize("hypersurface", seed, checks, started)

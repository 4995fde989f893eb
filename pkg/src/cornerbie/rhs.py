"""Right-hand side: single-layer logarithmic integrals of the Neumann datum.

gbar_i(s) = int_Sigma f(Q) log|sigma_i(s) - Q| dSigma_Q is computed on
the macro arcs.  The self-arc integral splits the kernel as

    log|sig_l(s) - sig_l(t)| = log|t - s| + delta_l(t, s),

where delta_l is the cancellation-safe chord/parameter log ratio; the
log|t - s| part is integrated with the product rule built on the
logarithmic Legendre moments, everything else with plain
Gauss-Legendre of order M.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .errors import ParameterError
from .geometry import Boundary, Decomposition, macro_param_of
from .quadrature import gauss_legendre, legendre_table, log_moments

__all__ = [
    "NeumannDatum",
    "normal_derivative",
    "log_chord_ratio",
    "rhs_approx",
]

_EPS_BRANCH = 8.0 * np.finfo(float).eps
_COMPATIBILITY_TOL = 1e-8
_COMPATIBILITY_RULE = 256


def normal_derivative(u_grad: Callable, boundary: Boundary, ell: int, t):
    """Inward normal derivative of a potential on macro arc ell.

    The inward unit normal of a counterclockwise boundary is
    (-eta', xi') / |sigma'|.
    """
    t = np.asarray(t, float)
    arc = boundary.arcs[ell]
    p = np.asarray(arc.position(t), float)
    d = np.asarray(arc.first_derivative(t), float)
    g = np.asarray(u_grad(p), float)
    out = (-g[..., 0] * d[..., 1] + g[..., 1] * d[..., 0]) / np.linalg.norm(d, axis=-1)
    return out if out.ndim else float(out)


@dataclass(frozen=True, eq=False)
class NeumannDatum:
    """Boundary flux datum f with its per-arc parameter density.

    Either a pointwise boundary function f or the gradient of an exact
    potential may back the datum; arc_density(k, t) always returns
    f(sigma_k(t)) |sigma_k'(t)|.  Construction checks the compatibility
    condition int_Sigma f dSigma = 0 with a 256-point rule per arc;
    check_compatibility=False skips it for data that are not meant to
    feed the solvability-constrained problem.
    """

    boundary: Boundary
    f: Optional[Callable] = None
    u_grad: Optional[Callable] = None
    check_compatibility: bool = True

    def __post_init__(self):
        if (self.f is None) == (self.u_grad is None):
            raise ParameterError("provide exactly one of f or u_grad")
        if not self.check_compatibility:
            return
        resid = self.compatibility_residual()
        if abs(resid) > _COMPATIBILITY_TOL:
            raise ParameterError(
                f"Neumann datum violates the zero-flux compatibility condition: "
                f"integral = {resid:.3e}"
            )

    def f_value(self, k: int, t):
        """Datum value f at sigma_k(t)."""
        if self.u_grad is not None:
            return normal_derivative(self.u_grad, self.boundary, k, t)
        p = np.asarray(self.boundary.arcs[k].position(np.asarray(t, float)), float)
        return self.f(p)

    def arc_density(self, k: int, t):
        """Parameter-space density f(sigma_k(t)) |sigma_k'(t)|."""
        t = np.asarray(t, float)
        d = np.asarray(self.boundary.arcs[k].first_derivative(t), float)
        return self.f_value(k, t) * np.linalg.norm(d, axis=-1)

    def compatibility_residual(self) -> float:
        rule = gauss_legendre(_COMPATIBILITY_RULE)
        total = 0.0
        for k in range(len(self.boundary.arcs)):
            total += float(rule.weights @ self.arc_density(k, rule.nodes))
        return total


def log_chord_ratio(boundary: Boundary, ell: int, t, s: float):
    """log(|sigma_l(s) - sigma_l(t)| / |t - s|), safe at t = s.

    Within 8 machine epsilons of the diagonal the ratio is replaced by
    its limit |sigma_l'(t)|, which avoids the catastrophic cancellation
    of the raw quotient.
    """
    t = np.asarray(t, float)
    arc = boundary.arcs[ell]
    near = np.abs(t - s) < _EPS_BRANCH
    p = np.asarray(arc.position(t), float)
    base = np.asarray(arc.position(float(s)), float)
    chord = np.linalg.norm(p - base, axis=-1)
    gap = np.abs(t - s)
    speed = np.linalg.norm(np.asarray(arc.first_derivative(t), float), axis=-1)
    out = np.where(near, np.log(speed),
                   np.log(np.where(near, 1.0, chord) / np.where(near, 1.0, gap)))
    return out if out.ndim else float(out)


@lru_cache(maxsize=16)
def _tables(dec: Decomposition, datum: NeumannDatum, M: int):
    """Gauss-Legendre data reused by every rhs evaluation: nodes/weights,
    per-arc densities and points, and the Legendre table at the nodes."""
    rule = gauss_legendre(M)
    x, w = rule.nodes, rule.weights
    boundary = dec.boundary
    dens = [np.asarray(datum.arc_density(k, x), float) for k in range(len(boundary.arcs))]
    pts = [np.asarray(boundary.arcs[k].position(x), float) for k in range(len(boundary.arcs))]
    return x, w, dens, pts, legendre_table(M, x)


def rhs_approx(dec: Decomposition, datum: NeumannDatum, M: int, i: int, s: float) -> float:
    """Product-rule approximation of gbar_i(s) with an M-point rule.

    The collocation point is mapped to its macro arc (ell, s_macro); all
    other arcs contribute plain Gauss-Legendre sums of the log kernel,
    the self arc the moment product rule plus the chord-ratio term.
    """
    if not 1 <= M <= 512:
        raise ParameterError(f"rhs rule order must be in [1, 512], got {M}")
    ell, sm = macro_param_of(dec, i, s)
    x, w, dens, pts, ptab = _tables(dec, datum, M)
    base = np.asarray(dec.boundary.arcs[ell].position(float(sm)), float)
    total = 0.0
    for k in range(len(dec.boundary.arcs)):
        if k == ell:
            continue
        dist = np.linalg.norm(pts[k] - base, axis=-1)
        total += float(np.sum(w * dens[k] * np.log(dist)))
    moments = log_moments(float(sm), M)
    prod = ptab.T @ moments
    dvec = log_chord_ratio(dec.boundary, ell, x, float(sm))
    total += float(np.sum(w * dens[ell] * (prod + dvec)))
    return total

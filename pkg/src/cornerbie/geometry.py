"""Corner-domain boundaries and their three-way sub-arc decomposition.

A boundary is a counterclockwise chain of C^2 macro arcs joined at
corner points.  Each corner is flanked by two short sub-arcs that stay
within a prescribed perpendicular deviation of the corner tangent lines
and whose parametrization speeds match at the corner; the remainder of
every macro arc becomes a central sub-arc.  Sub-arcs are listed per
corner as (gamma, upsilon, central), with the gamma arc parametrized
backwards so that both corner arcs start at the corner point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import GeometryError, ParameterError

__all__ = [
    "GAMMA",
    "UPSILON",
    "CENTRAL",
    "MacroArc",
    "Corner",
    "Boundary",
    "SubArc",
    "Decomposition",
    "line_arc",
    "circle_arc",
    "make_boundary",
    "make_smooth_boundary",
    "make_polygon",
    "make_example_domain",
    "decompose",
    "subarc_eval",
    "boundary_angle",
    "macro_param_of",
    "boundary_polyline",
    "winding_number",
]

GAMMA = "gamma"      # trailing corner arc, reversed parametrization
UPSILON = "upsilon"  # leading corner arc
CENTRAL = "central"

_ANGLE_TOL = 1e-8
_CLOSURE_TOL = 1e-12
_N_VALIDATION_SAMPLES = 1024
_N_DEVIATION_SAMPLES = 201


@dataclass(frozen=True, eq=False)
class MacroArc:
    """One C^2 piece of the boundary, parametrized over [0, 1].

    The three callables accept scalar or array parameters and return
    arrays with a trailing coordinate axis of length 2.
    """

    position: Callable[[np.ndarray], np.ndarray]
    first_derivative: Callable[[np.ndarray], np.ndarray]
    second_derivative: Callable[[np.ndarray], np.ndarray]

    def validate(self) -> None:
        t = np.linspace(0.0, 1.0, _N_VALIDATION_SAMPLES)
        p = np.asarray(self.position(t), float)
        d = np.asarray(self.first_derivative(t), float)
        dd = np.asarray(self.second_derivative(t), float)
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(d)) and np.all(np.isfinite(dd))):
            raise GeometryError("arc position/derivatives must be finite on [0, 1]")
        speed = np.linalg.norm(d, axis=-1)
        if speed.min() <= 0.0:
            raise GeometryError("arc parametrization speed vanishes")


@dataclass(frozen=True, eq=False)
class Corner:
    """A boundary corner with interior angle omega = (1 - chi) pi."""

    index: int
    point: np.ndarray
    interior_angle: float
    chi: float = field(init=False)
    beta: float = field(init=False)

    def __post_init__(self):
        omega = self.interior_angle
        if not (0.0 < omega < 2.0 * math.pi) or omega == math.pi:
            raise GeometryError(
                f"corner {self.index}: interior angle must be in (0, pi) or (pi, 2 pi), got {omega}"
            )
        chi = 1.0 - omega / math.pi
        if not 0.0 < abs(chi) < 1.0:
            raise GeometryError(f"corner {self.index}: chi = {chi} out of range")
        object.__setattr__(self, "chi", chi)
        object.__setattr__(self, "beta", 1.0 / (1.0 + abs(chi)))
        self.point.setflags(write=False)


@dataclass(frozen=True, eq=False)
class Boundary:
    """Counterclockwise boundary: arc k runs from corner k to corner k+1.

    A boundary without corners (a single smooth closed curve) is allowed
    for the smooth-case pipeline; it carries exactly one arc per closed
    curve and an empty corner tuple.
    """

    arcs: tuple
    corners: tuple

    @property
    def n_corners(self) -> int:
        return len(self.corners)

    def arc_endpoint(self, k: int, end: float) -> np.ndarray:
        return np.asarray(self.arcs[k].position(float(end)), float)


def _tangent_angle(v: np.ndarray) -> float:
    return math.atan2(float(v[1]), float(v[0]))


def _interior_angle_from_tangents(d_in: np.ndarray, d_out: np.ndarray) -> float:
    """Interior angle of a CCW boundary from the one-sided tangents.

    d_in is the derivative arriving at the corner, d_out the one leaving;
    the wedge is measured from the outgoing ray to the reversed incoming
    ray going counterclockwise (through the interior, which lies left of
    the direction of travel).
    """
    ang = _tangent_angle(-d_in) - _tangent_angle(d_out)
    return ang % (2.0 * math.pi)


def _signed_area(boundary: Boundary, per_arc: int = 2048) -> float:
    pts = boundary_polyline(boundary, per_arc * max(1, len(boundary.arcs)))
    x, y = pts[:, 0], pts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    return 0.5 * float(np.sum(x * yn - y * xn))


def make_boundary(arcs: Sequence[MacroArc], corner_angles: Sequence[float]) -> Boundary:
    """Validated boundary from macro arcs and their corner interior angles.

    Arc k must run from corner k to corner k+1 (indices mod n).  The
    given angles are cross-checked against the one-sided tangents; the
    curve must close head-to-tail and be counterclockwise.
    """
    n = len(arcs)
    if n < 1 or len(corner_angles) != n:
        raise GeometryError("need n >= 1 arcs and one interior angle per corner")
    for arc in arcs:
        arc.validate()
    corners = []
    for k in range(n):
        p_start = np.asarray(arcs[k].position(0.0), float)
        p_prev_end = np.asarray(arcs[(k - 1) % n].position(1.0), float)
        if np.linalg.norm(p_start - p_prev_end) > _CLOSURE_TOL:
            raise GeometryError(
                f"arcs {((k - 1) % n)} -> {k} do not close up: gap {np.linalg.norm(p_start - p_prev_end):.3e}"
            )
        d_in = np.asarray(arcs[(k - 1) % n].first_derivative(1.0), float)
        d_out = np.asarray(arcs[k].first_derivative(0.0), float)
        measured = _interior_angle_from_tangents(d_in, d_out)
        if abs(measured - corner_angles[k]) > _ANGLE_TOL:
            raise GeometryError(
                f"corner {k}: stated interior angle {corner_angles[k]:.12f} "
                f"disagrees with tangents ({measured:.12f})"
            )
        corners.append(Corner(k, p_start.copy(), float(corner_angles[k])))
    boundary = Boundary(tuple(arcs), tuple(corners))
    if _signed_area(boundary) <= 0.0:
        raise GeometryError("boundary must be counterclockwise (positive signed area)")
    return boundary


def make_smooth_boundary(arc: MacroArc) -> Boundary:
    """Boundary consisting of a single smooth closed curve, no corners."""
    arc.validate()
    p0 = np.asarray(arc.position(0.0), float)
    p1 = np.asarray(arc.position(1.0), float)
    if np.linalg.norm(p1 - p0) > _CLOSURE_TOL:
        raise GeometryError("smooth boundary curve must close up")
    boundary = Boundary((arc,), ())
    if _signed_area(boundary) <= 0.0:
        raise GeometryError("boundary must be counterclockwise (positive signed area)")
    return boundary


@dataclass(frozen=True)
class SubArc:
    """One of the 3n sections: an affine window [a, b] of a macro arc."""

    index: int
    kind: str
    macro_index: int
    a: float
    b: float
    reversed: bool


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Sub-arc decomposition (gamma_k, upsilon_k, central_k per corner).

    corner_speed[k] is the matched parametrization speed of both corner
    sub-arcs at corner k; deviation[k] the achieved maximum perpendicular
    distance from the corner sub-arcs to the corner tangent lines.
    """

    boundary: Boundary
    subarcs: tuple
    head_fraction: np.ndarray
    tail_fraction: np.ndarray
    corner_speed: np.ndarray
    deviation: np.ndarray
    delta: float

    @property
    def n_subarcs(self) -> int:
        return len(self.subarcs)

    @property
    def n_corners(self) -> int:
        return self.boundary.n_corners

    def corner_of(self, i: int) -> int:
        """Corner index owning sub-arc i (gamma/upsilon kinds only)."""
        if self.subarcs[i].kind == CENTRAL:
            raise ParameterError(f"sub-arc {i} is central, not a corner arc")
        return i // 3


def _max_tangent_deviation(arc: MacroArc, t_lo: float, t_hi: float,
                           corner: np.ndarray, tangent: np.ndarray) -> float:
    t = np.linspace(t_lo, t_hi, _N_DEVIATION_SAMPLES)
    p = np.asarray(arc.position(t), float) - corner
    that = tangent / np.linalg.norm(tangent)
    return float(np.abs(p[:, 0] * that[1] - p[:, 1] * that[0]).max())


def _largest_fraction(arc: MacroArc, at_head: bool, corner: np.ndarray,
                      tangent: np.ndarray, delta: float, cap: float) -> float:
    def dev(e: float) -> float:
        if at_head:
            return _max_tangent_deviation(arc, 0.0, e, corner, tangent)
        return _max_tangent_deviation(arc, 1.0 - e, 1.0, corner, tangent)

    if dev(cap) <= delta:
        return cap
    lo, hi = 0.0, cap
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if dev(mid) <= delta:
            lo = mid
        else:
            hi = mid
    if lo == 0.0:
        raise GeometryError("tangent-deviation bisection collapsed to zero fraction")
    return lo


def decompose(boundary: Boundary, delta: float, cap: float = 0.25) -> Decomposition:
    """Split every macro arc into (upsilon, central, gamma) sections.

    Corner sub-arc fractions are the largest (up to `cap`) for which the
    perpendicular deviation from the corner tangent line stays below
    `delta`, then one side is shrunk so the corner parametrization
    speeds match exactly.  A boundary without corners yields one central
    sub-arc per macro arc.
    """
    if delta <= 0.0:
        raise ParameterError(f"delta must be positive, got {delta}")
    if not 0.0 < cap <= 0.5:
        raise ParameterError(f"fraction cap must be in (0, 1/2], got {cap}")
    n = boundary.n_corners
    if n == 0:
        subarcs = tuple(
            SubArc(i, CENTRAL, i, 0.0, 1.0, False) for i in range(len(boundary.arcs))
        )
        empty = np.zeros(0)
        return Decomposition(boundary, subarcs, empty, empty.copy(), empty.copy(),
                             empty.copy(), delta)

    head = np.empty(n)   # upsilon fraction on arc k
    tail = np.empty(n)   # gamma fraction on arc (k-1) mod n
    speed = np.empty(n)
    achieved = np.empty(n)
    for k in range(n):
        prev = (k - 1) % n
        corner = boundary.corners[k].point
        d_head = np.asarray(boundary.arcs[k].first_derivative(0.0), float)
        d_tail = np.asarray(boundary.arcs[prev].first_derivative(1.0), float)
        v_head = float(np.linalg.norm(d_head))
        v_tail = float(np.linalg.norm(d_tail))
        if v_head <= 0.0 or v_tail <= 0.0:
            raise GeometryError(f"degenerate tangent at corner {k}")
        e_head = _largest_fraction(boundary.arcs[k], True, corner, d_head, delta, cap)
        e_tail = _largest_fraction(boundary.arcs[prev], False, corner, d_tail, delta, cap)
        # shrink one side so e_tail * v_tail == e_head * v_head
        e_head_m = min(e_head, e_tail * v_tail / v_head)
        e_tail_m = e_head_m * v_head / v_tail

        def dev_at(eh: float, et: float) -> float:
            return max(
                _max_tangent_deviation(boundary.arcs[k], 0.0, eh, corner, d_head),
                _max_tangent_deviation(boundary.arcs[prev], 1.0 - et, 1.0, corner, d_tail),
            )

        # rounding in the speed match can overshoot delta by an ulp; shrink
        # both sides together (preserving the matched ratio) until it holds
        got = dev_at(e_head_m, e_tail_m)
        for _ in range(64):
            if got <= delta:
                break
            e_head_m *= 1.0 - 1e-9
            e_tail_m *= 1.0 - 1e-9
            got = dev_at(e_head_m, e_tail_m)
        else:
            raise GeometryError(f"corner {k}: could not meet the deviation bound")
        head[k], tail[k] = e_head_m, e_tail_m
        speed[k] = e_head_m * v_head
        achieved[k] = got
    for ell in range(n):
        nxt = (ell + 1) % n
        if head[ell] > 0.5 or tail[nxt] > 0.5:
            raise GeometryError("corner fraction exceeds half of its macro interval")
        if head[ell] + tail[nxt] >= 1.0:
            raise GeometryError(
                f"macro arc {ell}: corner sections overlap (delta too large)"
            )
    subarcs = []
    for k in range(n):
        prev = (k - 1) % n
        subarcs.append(SubArc(3 * k, GAMMA, prev, 1.0 - tail[k], 1.0, True))
        subarcs.append(SubArc(3 * k + 1, UPSILON, k, 0.0, head[k], False))
        subarcs.append(SubArc(3 * k + 2, CENTRAL, k, head[k], 1.0 - tail[(k + 1) % n], False))
    return Decomposition(boundary, tuple(subarcs), head, tail, speed, achieved, delta)


def subarc_eval(dec: Decomposition, i: int, s):
    """Position and first/second parameter derivatives of sub-arc i at s.

    The chain rule over the affine window gives d1 = +/-(b-a) sigma',
    d2 = (b-a)^2 sigma'' (sign negative on reversed arcs).  Corner arcs
    return the stored corner point exactly at s = 0.
    """
    sub = dec.subarcs[i]
    arc = dec.boundary.arcs[sub.macro_index]
    s_arr = np.asarray(s, float)
    length = sub.b - sub.a
    if sub.reversed:
        t = sub.b - length * s_arr
        d1 = -length * np.asarray(arc.first_derivative(t), float)
    else:
        t = sub.a + length * s_arr
        d1 = length * np.asarray(arc.first_derivative(t), float)
    p = np.asarray(arc.position(t), float)
    d2 = length * length * np.asarray(arc.second_derivative(t), float)
    if sub.kind != CENTRAL:
        corner = dec.boundary.corners[i // 3].point
        if s_arr.ndim == 0:
            if s_arr == 0.0:
                p = corner.copy()
        elif np.any(s_arr == 0.0):
            p = np.where((s_arr == 0.0)[..., None], corner, p)
    return p, d1, d2


def boundary_angle(dec: Decomposition, i: int, s: float) -> float:
    """Interior angle of the boundary at the point sigma_i(s).

    Piecewise exact: (1 - chi_k) pi at the corner end (s = 0) of a corner
    sub-arc, pi everywhere else.  No limits are taken.
    """
    sub = dec.subarcs[i]
    if sub.kind != CENTRAL and s == 0.0:
        return (1.0 - dec.boundary.corners[i // 3].chi) * math.pi
    return math.pi


def macro_param_of(dec: Decomposition, i: int, s: float):
    """Macro-arc index and parameter with sigma_i(s) = macro_ell(s_macro)."""
    sub = dec.subarcs[i]
    if sub.reversed:
        return sub.macro_index, sub.b - (sub.b - sub.a) * s
    return sub.macro_index, sub.a + (sub.b - sub.a) * s


# --------------------------------------------------------------------------
# concrete arcs and built-in domains
# --------------------------------------------------------------------------

def line_arc(p0, p1) -> MacroArc:
    """Straight segment from p0 to p1."""
    p0 = np.asarray(p0, float)
    p1 = np.asarray(p1, float)
    d = p1 - p0

    def position(t):
        t = np.asarray(t, float)
        return p0 + t[..., None] * d

    def first(t):
        t = np.asarray(t, float)
        return np.broadcast_to(d, t.shape + (2,)).copy()

    def second(t):
        t = np.asarray(t, float)
        return np.zeros(t.shape + (2,))

    return MacroArc(position, first, second)


def circle_arc(radius: float = 1.0, center=(0.0, 0.0)) -> MacroArc:
    """Counterclockwise circle, one full turn over [0, 1]."""
    cx, cy = float(center[0]), float(center[1])
    w = 2.0 * math.pi

    def position(t):
        a = w * np.asarray(t, float)
        return np.stack([cx + radius * np.cos(a), cy + radius * np.sin(a)], axis=-1)

    def first(t):
        a = w * np.asarray(t, float)
        return radius * w * np.stack([-np.sin(a), np.cos(a)], axis=-1)

    def second(t):
        a = w * np.asarray(t, float)
        return -radius * w * w * np.stack([np.cos(a), np.sin(a)], axis=-1)

    return MacroArc(position, first, second)


def _trig_arc(xfun, yfun, dxfun, dyfun, ddxfun, ddyfun) -> MacroArc:
    def position(t):
        t = np.asarray(t, float)
        return np.stack([xfun(t), yfun(t)], axis=-1)

    def first(t):
        t = np.asarray(t, float)
        return np.stack([dxfun(t), dyfun(t)], axis=-1)

    def second(t):
        t = np.asarray(t, float)
        return np.stack([ddxfun(t), ddyfun(t)], axis=-1)

    return MacroArc(position, first, second)


def _heart_arc(phi: float) -> MacroArc:
    # rotation through (pi + phi) t applied to (tan(phi/2), 1), shifted so the
    # curve starts and ends at the origin with interior angle phi there
    w = math.pi + phi
    tp = math.tan(phi / 2.0)
    return _trig_arc(
        lambda t: tp * np.cos(w * t) - np.sin(w * t) - tp,
        lambda t: tp * np.sin(w * t) + np.cos(w * t) - np.cos(np.pi * t),
        lambda t: -tp * w * np.sin(w * t) - w * np.cos(w * t),
        lambda t: tp * w * np.cos(w * t) - w * np.sin(w * t) + np.pi * np.sin(np.pi * t),
        lambda t: -tp * w * w * np.cos(w * t) + w * w * np.sin(w * t),
        lambda t: -tp * w * w * np.sin(w * t) - w * w * np.cos(w * t)
        + np.pi * np.pi * np.cos(np.pi * t),
    )


def _teardrop_arc(phi: float) -> MacroArc:
    tp = math.tan(phi / 2.0)
    pi = np.pi
    return _trig_arc(
        lambda t: 2.0 * np.sin(pi * t),
        lambda t: -tp * np.sin(2 * pi * t),
        lambda t: 2.0 * pi * np.cos(pi * t),
        lambda t: -2.0 * pi * tp * np.cos(2 * pi * t),
        lambda t: -2.0 * pi * pi * np.sin(pi * t),
        lambda t: 4.0 * pi * pi * tp * np.sin(2 * pi * t),
    )


def _boomerang_arc(phi: float) -> MacroArc:
    tp = math.tan(phi / 2.0)
    pi = np.pi
    return _trig_arc(
        lambda t: (2.0 / 3.0) * np.sin(3 * pi * t),
        lambda t: -tp * np.sin(2 * pi * t),
        lambda t: 2.0 * pi * np.cos(3 * pi * t),
        lambda t: -2.0 * pi * tp * np.cos(2 * pi * t),
        lambda t: -6.0 * pi * pi * np.sin(3 * pi * t),
        lambda t: 4.0 * pi * pi * tp * np.sin(2 * pi * t),
    )


def make_polygon(vertices: Sequence) -> Boundary:
    """Counterclockwise polygon boundary, one line arc per side."""
    verts = [np.asarray(v, float) for v in vertices]
    n = len(verts)
    if n < 3:
        raise GeometryError("polygon needs at least 3 vertices")
    arcs = [line_arc(verts[k], verts[(k + 1) % n]) for k in range(n)]
    angles = []
    for k in range(n):
        d_in = verts[k] - verts[(k - 1) % n]
        d_out = verts[(k + 1) % n] - verts[k]
        angles.append(_interior_angle_from_tangents(d_in, d_out))
    return make_boundary(arcs, angles)


TRIANGLE_VERTICES = ((-1.25, -0.75), (0.75, -0.75), (0.75, 1.25))


def make_example_domain(name: str, phi: float | None = None) -> Boundary:
    """Built-in benchmark domains: heart, teardrop, boomerang, triangle.

    heart and boomerang take an interior corner angle phi in (pi, 2 pi),
    teardrop in (0, pi); the triangle ignores phi and uses the fixed
    vertices (-5/4, -3/4), (3/4, -3/4), (3/4, 5/4).
    """
    if name == "triangle":
        return make_polygon(TRIANGLE_VERTICES)
    if phi is None:
        raise ParameterError(f"domain {name!r} requires a corner angle phi")
    if name == "heart":
        if not math.pi < phi < 2.0 * math.pi:
            raise ParameterError(f"heart angle must be in (pi, 2 pi), got {phi}")
        return make_boundary([_heart_arc(phi)], [phi])
    if name == "teardrop":
        if not 0.0 < phi < math.pi:
            raise ParameterError(f"teardrop angle must be in (0, pi), got {phi}")
        return make_boundary([_teardrop_arc(phi)], [phi])
    if name == "boomerang":
        if not math.pi < phi < 2.0 * math.pi:
            raise ParameterError(f"boomerang angle must be in (pi, 2 pi), got {phi}")
        return make_boundary([_boomerang_arc(phi)], [phi])
    raise ParameterError(f"unknown example domain {name!r}")


# --------------------------------------------------------------------------
# point-location helpers
# --------------------------------------------------------------------------

def boundary_polyline(boundary: Boundary, total: int = 4096) -> np.ndarray:
    """Dense sample of the whole boundary as an (N, 2) closed polyline."""
    n_arcs = len(boundary.arcs)
    per_arc = max(8, total // n_arcs)
    pts = []
    for arc in boundary.arcs:
        t = np.linspace(0.0, 1.0, per_arc, endpoint=False)
        pts.append(np.asarray(arc.position(t), float))
    return np.concatenate(pts, axis=0)


def winding_number(polyline: np.ndarray, point) -> int:
    """Winding number of a closed polyline about a point (angle sum)."""
    d = polyline - np.asarray(point, float)
    ang = np.arctan2(d[:, 1], d[:, 0])
    turns = np.diff(np.concatenate([ang, ang[:1]]))
    turns = (turns + np.pi) % (2.0 * np.pi) - np.pi
    return int(round(float(turns.sum()) / (2.0 * np.pi)))

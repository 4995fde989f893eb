"""Collocated Nystrom system for the corner-domain boundary equation.

The boundary equation (-pi I + Ltilde + K) ubar = gbar is collocated at
the left-Radau quadrature nodes of every sub-arc: order mu on the short
corner arcs, order nu on the central arcs.  Rows and columns are indexed
arc-major by node; the two corner arcs of each corner share their s = 0
node, so their unknown columns are merged and the duplicate corner
collocation row (the upsilon one) is dropped, giving a square system of
dimension n (2 mu + nu + 3) - n.

The wedge blocks are assembled in modified form: for collocation points
below the threshold tau = min(1, c / nu^(2 - 2 eps)) the row is the
linear blend of the discrete row at tau and the exact corner row, which
is the single coefficient -chi pi on the merged corner column.  The
(-pi + angle) diagonal term never appears explicitly: it vanishes for
s > 0 and is already inside the corner coefficient at s = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np

from .errors import AssemblyError, ParameterError
from .geometry import CENTRAL, GAMMA, UPSILON, Decomposition
from .kernels import (
    KernelContext,
    double_layer_block,
    mellin_corner_coefficient,
    mellin_kernel,
    remainder_block,
)
from .quadrature import gauss_radau_left

__all__ = [
    "DiscretizationParams",
    "UnknownMap",
    "DenseSystem",
    "collocation_points",
    "modified_wedge_rows",
    "build_system",
]


@dataclass(frozen=True)
class DiscretizationParams:
    """Rule orders and wedge-modification constants.

    mu is the corner-arc rule order, nu the central-arc one (mu < nu in
    corner runs; equality is only meaningful for boundaries without
    corners, where mu is unused).  The blend threshold is
    tau = min(1, c / nu^(2 - 2 eps)).
    """

    mu: int
    nu: int
    c: float
    eps: float

    def __post_init__(self):
        if not 1 <= self.mu <= self.nu:
            raise ParameterError(f"need 1 <= mu <= nu, got mu={self.mu}, nu={self.nu}")
        if self.c <= 0.0:
            raise ParameterError(f"blend constant must be positive, got {self.c}")
        if not 0.0 < self.eps < 0.5:
            raise ParameterError(f"blend exponent must be in (0, 1/2), got {self.eps}")

    @property
    def tau(self) -> float:
        return min(1.0, self.c / self.nu ** (2.0 - 2.0 * self.eps))


def collocation_points(dec: Decomposition, params: DiscretizationParams, i: int) -> np.ndarray:
    """Collocation nodes of sub-arc i (identical to its quadrature nodes)."""
    order = params.nu if dec.subarcs[i].kind == CENTRAL else params.mu
    return gauss_radau_left(order).nodes


def modified_wedge_rows(chi: float, t_nodes: np.ndarray, s_values: np.ndarray,
                        tau: float):
    """Row coefficients of the modified wedge block.

    Returns (rows, corner_coeff): rows[l, h] multiplies the density value
    at node t_nodes[h] of the partner arc, corner_coeff[l] the merged
    corner unknown.  Rows with s >= tau are the plain kernel rows; below
    tau they blend the row at tau with the exact corner row value
    -chi pi, reaching it exactly at s = 0.
    """
    t_nodes = np.asarray(t_nodes, float)
    s_values = np.atleast_1d(np.asarray(s_values, float))
    rows = np.empty((len(s_values), len(t_nodes)))
    corner_coeff = np.zeros(len(s_values))
    hi = s_values >= tau
    if np.any(hi):
        rows[hi] = mellin_kernel(chi, t_nodes[None, :], s_values[hi][:, None])
    lo = ~hi
    if np.any(lo):
        row_at_tau = mellin_kernel(chi, t_nodes, tau)
        rows[lo] = (s_values[lo][:, None] / tau) * row_at_tau[None, :]
        corner_coeff[lo] = (tau - s_values[lo]) / tau * mellin_corner_coefficient(chi)
    return rows, corner_coeff


@dataclass
class UnknownMap:
    """Global indexing of the per-arc Radau nodes with corner merging."""

    dec: Decomposition
    params: DiscretizationParams
    nodes: List[np.ndarray] = field(init=False)
    weights: List[np.ndarray] = field(init=False)
    col_index: List[np.ndarray] = field(init=False)
    row_index: List[np.ndarray] = field(init=False)  # -1 marks a dropped row
    corner_col: np.ndarray = field(init=False)
    full_size: int = field(init=False)
    reduced_size: int = field(init=False)

    def __post_init__(self):
        dec, params = self.dec, self.params
        if dec.n_corners > 0 and params.mu >= params.nu:
            raise ParameterError("corner runs require mu < nu")
        self.nodes, self.weights = [], []
        for i in range(dec.n_subarcs):
            rule = gauss_radau_left(
                params.nu if dec.subarcs[i].kind == CENTRAL else params.mu
            )
            self.nodes.append(rule.nodes)
            self.weights.append(rule.weights)
        self.full_size = sum(len(x) for x in self.nodes)
        col_index: List[np.ndarray] = []
        corner_col = np.full(dec.n_corners, -1, dtype=int)
        nxt = 0
        for i in range(dec.n_subarcs):
            kind = dec.subarcs[i].kind
            idx = np.empty(len(self.nodes[i]), dtype=int)
            for h in range(len(idx)):
                if kind == UPSILON and h == 0:
                    idx[h] = corner_col[i // 3]
                    continue
                idx[h] = nxt
                if kind == GAMMA and h == 0:
                    corner_col[i // 3] = nxt
                nxt += 1
            col_index.append(idx)
        self.col_index = col_index
        self.corner_col = corner_col
        self.reduced_size = nxt
        # rows follow the column layout; the upsilon s=0 row is dropped
        row_index: List[np.ndarray] = []
        for i in range(dec.n_subarcs):
            idx = self.col_index[i].copy()
            if dec.subarcs[i].kind == UPSILON:
                idx[0] = -1
            row_index.append(idx)
        self.row_index = row_index

    def split_solution(self, x: np.ndarray) -> List[np.ndarray]:
        """Per-arc nodal value arrays from the reduced solution vector."""
        return [x[idx] for idx in self.col_index]


@dataclass
class DenseSystem:
    """Reduced collocation matrix, right-hand side and index map."""

    matrix: np.ndarray
    rhs: np.ndarray
    unknown_map: UnknownMap
    params: DiscretizationParams
    dec: Decomposition
    ctx: KernelContext


def build_system(dec: Decomposition, params: DiscretizationParams,
                 rhs_provider: Callable[[int, float], float],
                 drop_duplicate_rows: bool = True) -> DenseSystem:
    """Assemble the collocated system A a = b on the reduced unknowns.

    rhs_provider(i, s) must return gbar_i(s) at any collocation point.
    With drop_duplicate_rows=False the matrix keeps both (identical)
    corner collocation rows and is rectangular; that form exists for
    verification only.
    """
    umap = UnknownMap(dec, params)
    ctx = KernelContext(dec)
    n_arcs = dec.n_subarcs
    tau = params.tau

    if drop_duplicate_rows:
        row_index = umap.row_index
        n_rows = umap.reduced_size
    else:
        row_index = []
        nxt = 0
        for i in range(n_arcs):
            row_index.append(np.arange(nxt, nxt + len(umap.nodes[i])))
            nxt += len(umap.nodes[i])
        n_rows = nxt

    A = np.zeros((n_rows, umap.reduced_size))
    b = np.zeros(n_rows)

    for i in range(n_arcs):
        rows = row_index[i]
        keep = rows >= 0
        r = rows[keep]
        s_nodes = umap.nodes[i]
        # -pi identity on the own columns
        A[r, umap.col_index[i][keep]] += -math.pi
        for j in range(n_arcs):
            cols = umap.col_index[j]
            lam = umap.weights[j]
            if not ctx.is_mellin_pair(i, j):
                block = double_layer_block(ctx, i, j, umap.nodes[j], s_nodes)
                A[r[:, None], cols[None, :]] += block[keep] * lam[None, :]
                continue
            chi = ctx.pair_chi(i, j)
            t_nodes = umap.nodes[j]
            block = remainder_block(ctx, i, j, t_nodes, s_nodes)
            lt, corner_coeff = modified_wedge_rows(chi, t_nodes, s_nodes, tau)
            block = block + lt
            A[r[:, None], cols[None, :]] += block[keep] * lam[None, :]
            A[r, umap.corner_col[i // 3]] += corner_coeff[keep]
        for h in np.nonzero(keep)[0]:
            b[rows[h]] = rhs_provider(i, float(s_nodes[h]))

    if not np.all(np.isfinite(A)):
        bad = np.argwhere(~np.isfinite(A))[0]
        raise AssemblyError(f"non-finite matrix entry at reduced index {tuple(bad)}")
    if not np.all(np.isfinite(b)):
        bad = int(np.nonzero(~np.isfinite(b))[0][0])
        raise AssemblyError(f"non-finite right-hand side entry at reduced row {bad}")
    return DenseSystem(A, b, umap, params, dec, ctx)

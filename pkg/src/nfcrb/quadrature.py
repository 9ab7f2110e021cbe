"""Deterministic 2-D quadrature over the square [-L/2, L/2]^2.

Tensor-product Gauss-Legendre rules on a uniform panel grid, refined by
doubling the panel count per axis until two successive estimates agree to
the requested relative tolerance.  All integrands of interest are smooth
(the source sits strictly off the surface), so the spectral rule converges
quickly; refinement exists to adapt the panel size to the integrand scale
when the surface is much larger than the source distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Row-blocks are sized to keep each evaluation under ~2M nodes; the block
# partition is a deterministic function of the grid, so summation order and
# results are bit-stable.
_BLOCK_BUDGET = 1 << 21


class IntegrationError(ValueError):
    """Raised when the integrand produces non-finite samples."""


@dataclass(frozen=True)
class QuadratureConfig:
    """Gauss-Legendre order, initial panel grid, and refinement policy."""

    nodes_per_panel: int = 16
    panels_per_axis: int = 4
    target_rel_tol: float = 1e-10
    max_refinements: int = 8

    def __post_init__(self):
        if self.nodes_per_panel < 2:
            raise ValueError("nodes_per_panel must be >= 2")
        if self.panels_per_axis < 1:
            raise ValueError("panels_per_axis must be >= 1")
        if self.target_rel_tol <= 0:
            raise ValueError("target_rel_tol must be positive")
        if self.max_refinements < 0:
            raise ValueError("max_refinements must be nonnegative")


@dataclass(frozen=True)
class IntegralResult:
    value: complex
    est_rel_error: float
    panels_used: int
    converged: bool = True

    def __post_init__(self):
        if self.est_rel_error < 0:
            raise ValueError("est_rel_error must be nonnegative")


def panel_nodes_1d(half_side, panels, order):
    """Nodes and weights of the composite Gauss-Legendre rule on [-h, h]."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(-half_side, half_side, panels + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    half_width = 0.5 * (edges[1] - edges[0])
    nodes = (mids[:, None] + half_width * x[None, :]).ravel()
    weights = np.tile(half_width * w, panels)
    return nodes, weights


def evaluate_panel_grid(f, half_side, panels, order, n_out):
    """One full tensor-product evaluation at a fixed panel grid.

    Low-level building block for the refinement drivers here and in the
    information-matrix assembly.  Sums row-blocks in a fixed order; ``f``
    maps broadcastable (y, z) arrays to a scalar array or a stack of
    ``n_out`` component arrays.  Returns the ``n_out`` integral values.
    """
    nodes, weights = panel_nodes_1d(half_side, panels, order)
    n = nodes.size
    acc = np.zeros(n_out, dtype=complex)
    rows_per_block = max(1, _BLOCK_BUDGET // n)
    for start in range(0, n, rows_per_block):
        stop = min(start + rows_per_block, n)
        yy = nodes[start:stop, None]
        zz = nodes[None, :]
        vals = np.asarray(f(yy, zz), dtype=complex)
        vals = np.broadcast_to(vals, (n_out, stop - start, n))
        if not np.all(np.isfinite(vals)):
            bad = np.argwhere(~np.isfinite(vals))[0]
            raise IntegrationError(
                "non-finite integrand sample at "
                f"(y={nodes[start + bad[-2]]:.6g}, z={nodes[bad[-1]]:.6g})")
        wblock = np.outer(weights[start:stop], weights)
        acc += np.tensordot(vals, wblock, axes=([-2, -1], [0, 1]))
    return acc


def integrate_multi(f, half_side, cfg, n_out):
    """Panel-doubling integration of an ``n_out``-component integrand.

    Returns (values, est_rel_error, panels_used, converged).  The error
    estimate compares successive refinements componentwise, relative to
    the largest component magnitude, so identically-zero components (for
    instance odd integrands) do not stall convergence.
    """
    panels = cfg.panels_per_axis
    prev = evaluate_panel_grid(f, half_side, panels, cfg.nodes_per_panel, n_out)
    est = np.inf
    for _ in range(cfg.max_refinements):
        panels *= 2
        cur = evaluate_panel_grid(f, half_side, panels, cfg.nodes_per_panel, n_out)
        scale = np.max(np.abs(cur))
        if scale == 0.0:
            est = float(np.max(np.abs(cur - prev)))
        else:
            est = float(np.max(np.abs(cur - prev)) / scale)
        prev = cur
        if est <= cfg.target_rel_tol:
            return prev, est, panels, True
    return prev, est, panels, est <= cfg.target_rel_tol


def integrate_2d(f, half_side, cfg=None):
    """Integrate a scalar function of (y, z) over [-half_side, half_side]^2.

    Parameters
    ----------
    f : callable
        Accepts broadcastable (y, z) arrays and returns real or complex
        values.  Must be finite everywhere on the domain.
    half_side : float
        Half of the square side, meters.
    cfg : QuadratureConfig, optional

    Returns
    -------
    IntegralResult
        ``converged`` is False when successive refinements never agreed
        to ``target_rel_tol``; ``est_rel_error`` then exceeds it.
    """
    if half_side <= 0:
        raise ValueError("half_side must be positive")
    cfg = cfg or QuadratureConfig()
    values, est, panels, converged = integrate_multi(f, half_side, cfg, 1)
    value = complex(values[0])
    if value.imag == 0.0:
        value = value.real
    return IntegralResult(value=value, est_rel_error=est,
                          panels_used=panels, converged=converged)

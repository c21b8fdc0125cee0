"""Self-mixing term: the antisymmetric kernel and its quadrature over beta.

At a fixed space point the kernel compares momentum densities
``d = |beta| rho(beta) - |alpha| rho(alpha)`` and moves mass from the
weaker node to the stronger one at a saturating rate ``r(d)``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from kinflow.grid import VelocityGrid


def r(d):
    """Saturating rate ``-d/(1+|d|)``; odd, 1-Lipschitz and bounded by 1."""
    return -d / (1.0 + np.abs(d))


def mixer_kernel(rho_alpha, rho_beta, norm_alpha, norm_beta):
    """Kernel value for one ``(alpha, beta)`` pair. Broadcasts over arrays."""
    d = norm_beta * rho_beta - norm_alpha * rho_alpha
    return r(d) * np.where(d >= 0, rho_alpha, rho_beta)


def _mixer_rows(rows: np.ndarray, norms: np.ndarray, w: np.ndarray, kappa: float) -> np.ndarray:
    # rows: (S, Q) densities, one row per space node. The beta sum runs in
    # row-major velocity order, one node at a time, so every row gets the
    # same operation sequence no matter how rows are chunked.
    m = rows * norms
    out = np.zeros_like(rows)
    for b in range(rows.shape[1]):
        d = m[:, b : b + 1] - m
        rate = -d / (1.0 + np.abs(d))
        out += w[b] * (rate * np.where(d >= 0, rows, rows[:, b : b + 1]))
    return kappa * out


def mixer_field(
    u: np.ndarray,
    vg: VelocityGrid,
    w: np.ndarray,
    kappa: float,
    workers: int = 1,
) -> np.ndarray:
    """Mixer integral at every node of ``u`` (shape ``(..., n1, n2)``).

    Returns ``kappa * sum_beta w(beta) M(alpha, beta)`` with the same shape
    as ``u``. Space nodes are independent; with ``workers > 1`` they are
    split into contiguous chunks evaluated on a thread pool. Results do not
    depend on ``workers``.
    """
    u = np.asarray(u, dtype=float)
    if u.shape[-2:] != vg.shape or w.shape != vg.shape:
        raise ValueError(
            f"density slice shape {u.shape[-2:]} / weights {w.shape} "
            f"do not match velocity grid {vg.shape}"
        )
    lead = u.shape[:-2]
    rows = u.reshape(-1, vg.n1 * vg.n2)
    norms = vg.norms().ravel()
    wf = w.ravel()
    if kappa == 0:
        return np.zeros_like(u)

    nrows = rows.shape[0]
    if workers <= 1 or nrows < 2 * workers:
        out = _mixer_rows(rows, norms, wf, kappa)
    else:
        bounds = np.linspace(0, nrows, workers + 1).astype(int)
        out = np.empty_like(rows)

        def job(i: int) -> None:
            lo, hi = bounds[i], bounds[i + 1]
            out[lo:hi] = _mixer_rows(rows[lo:hi], norms, wf, kappa)

        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(job, range(workers)))
    return out.reshape(*lead, vg.n1, vg.n2)


def mixer_integral(
    slice_: np.ndarray, vg: VelocityGrid, w: np.ndarray, kappa: float
) -> np.ndarray:
    """Mixer values at every alpha node for one space node's density slice."""
    slice_ = np.asarray(slice_, dtype=float)
    if slice_.shape != vg.shape:
        raise ValueError(f"slice shape {slice_.shape} does not match velocity grid {vg.shape}")
    return mixer_field(slice_, vg, w, kappa)

"""Seeded random states, channels and energy-constrained state pairs.

All generators draw from ``numpy.random.Generator`` on the counter-based
Philox bit generator. :func:`streams` derives independent child streams
from one seed via ``SeedSequence.spawn``, so subtasks can be sampled in any
order (or in parallel) and still reproduce.

Distributions:

* :func:`random_state` - ``G G^dagger / Tr`` with ``G`` a ``dim x rank``
  complex Gaussian matrix (the induced measure).
* :func:`random_channel` - Kraus blocks of a Haar-like random isometry
  obtained by QR of a complex Gaussian matrix.
* :func:`random_energy_constrained_pair` - Gaussian states whose rows are
  damped by ``exp(-kappa (E_i - E0))`` to lower the energy, paired by convex
  mixing so the trace distance is at most ``eps``; both premises are
  post-checked and the pair is rejected otherwise.
"""
from __future__ import annotations

import numpy as np

from .channels import KrausChannel
from .core import trace_distance
from .errors import SamplingBudgetExceeded

__all__ = [
    "make_rng",
    "streams",
    "random_pure",
    "random_state",
    "random_channel",
    "random_energy_constrained_pair",
]


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(ss))


def streams(seed: int, n: int) -> list:
    """``n`` independent generators derived from ``seed``."""
    return [make_rng(ss) for ss in np.random.SeedSequence(seed).spawn(n)]


def _gaussian(rng, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_pure(dim: int, rng) -> np.ndarray:
    psi = _gaussian(make_rng(rng), dim)
    return psi / np.linalg.norm(psi)


def random_state(dim: int, rank: int | None = None, rng=None) -> np.ndarray:
    """Random density matrix of the given rank (full rank by default)."""
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise ValueError(f"rank {rank} not in [1, {dim}]")
    g = _gaussian(make_rng(rng), (dim, rank))
    rho = g @ g.conj().T
    rho = rho / np.real(np.trace(rho))
    return 0.5 * (rho + rho.conj().T)


def random_channel(d_in: int, d_out: int, n_kraus: int, rng=None) -> KrausChannel:
    """Random channel with ``n_kraus`` Kraus operators (needs ``n_kraus * d_out >= d_in``)."""
    if n_kraus * d_out < d_in:
        raise ValueError("n_kraus * d_out must be at least d_in")
    q, r = np.linalg.qr(_gaussian(make_rng(rng), (n_kraus * d_out, d_in)))
    q = q * (np.diag(r) / np.abs(np.diag(r)))[None, :]
    return KrausChannel(list(q.reshape(n_kraus, d_out, d_in)))


def _damped_state(levels: np.ndarray, e_max: float, rng, max_tries: int) -> np.ndarray:
    d = levels.size
    shifted = levels - levels[0]
    for _ in range(max_tries):
        rank = int(rng.integers(1, d + 1))
        kappa = float(rng.exponential(1.0)) / max(e_max - levels[0], 1e-12)
        g = _gaussian(rng, (d, rank)) * np.exp(-kappa * shifted)[:, None]
        rho = g @ g.conj().T
        rho = rho / np.real(np.trace(rho))
        rho = 0.5 * (rho + rho.conj().T)
        if float(np.real(np.sum(np.diag(rho) * levels))) <= e_max:
            return rho
    raise SamplingBudgetExceeded(f"no state with mean energy <= {e_max} in {max_tries} draws")


def random_energy_constrained_pair(levels, E: float, eps: float, rng=None, max_tries: int = 1000):
    """States ``rho, sigma`` with ``Tr H rho, Tr H sigma <= E`` and trace distance ``<= eps``.

    ``levels`` is the diagonal of ``H`` in the sampling basis. ``sigma`` is
    ``(1 - s) rho + s tau`` with ``tau`` another energy-constrained state, so
    its energy stays below ``E``; ``s`` is drawn so the distance lands in
    ``[eps / 2, eps]`` whenever ``tau`` is far enough from ``rho``.
    """
    rng = make_rng(rng)
    levels = np.asarray(levels, dtype=float)
    if E < levels[0]:
        raise ValueError(f"E = {E} below the ground level {levels[0]}")
    for _ in range(max_tries):
        rho = _damped_state(levels, E, rng, max_tries)
        tau = _damped_state(levels, E, rng, max_tries)
        dist = trace_distance(rho, tau)
        if dist == 0:
            continue
        s = min(1.0, eps * rng.uniform(0.5, 1.0) / dist)
        sigma = (1.0 - s) * rho + s * tau
        if (trace_distance(rho, sigma) <= eps
                and np.real(np.sum(np.diag(rho) * levels)) <= E
                and np.real(np.sum(np.diag(sigma) * levels)) <= E):
            return rho, sigma
    raise SamplingBudgetExceeded(f"no admissible pair in {max_tries} attempts")

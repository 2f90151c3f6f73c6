"""Discrete convex-roof estimates of the output entropy and entanglement of formation.

Every pure-state ensemble of a rank-``r`` state ``rho = sum_i lam_i |e_i><e_i|``
arises from an isometry ``U`` (``m x r``, ``U^dagger U = I``) through the
unnormalized members ``psi_j = sum_i U_ji sqrt(lam_i) e_i``. The roof is the
minimum over such ensembles of ``sum_j p_j H_Phi(psi_j)``.

:func:`roof_estimate` searches isometries by multi-start local optimization
and therefore returns an *upper* estimate. :func:`brute_force_roof` is an
independent grid oracle for rank-2 states in dimension at most 4.

Only discrete ensembles are considered; whether the continuous-measure
version of the roof always coincides with the discrete one is not settled
in general, and this module makes no claim about it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import tolerances as tol
from .channels import KrausChannel, partial_trace_channel, pure_output_entropy
from .core import check_state, eta, hermitian_eigh
from .errors import BudgetExceeded, InvalidState, NotIsometry, TooLarge

__all__ = [
    "EnsembleDecomposition",
    "RoofEstimate",
    "decompositions_from_unitary",
    "ensemble_objective",
    "roof_estimate",
    "eof_estimate",
    "brute_force_roof",
]


@dataclass
class EnsembleDecomposition:
    probabilities: np.ndarray
    members: np.ndarray     # one unit vector per row

    def average(self) -> np.ndarray:
        m = self.members
        return np.einsum("j,ja,jb->ab", self.probabilities, m, m.conj())


@dataclass
class RoofEstimate:
    value: float
    best_ensemble: EnsembleDecomposition
    restarts_used: int
    converged: bool
    evaluations: int = 0


def _support(rho, rank_tol: float = tol.RANK):
    a = check_state(rho)
    if abs(float(np.real(np.trace(a))) - 1.0) > tol.TRACE:
        raise InvalidState("ensemble decompositions need a unit-trace state")
    w, v = hermitian_eigh(a)
    r = int(np.sum(w > rank_tol * w[0]))
    return w[:r], v[:, :r]


def _unnormalized_members(lam, vecs, u) -> np.ndarray:
    # rows are psi_j = sum_i U_ji sqrt(lam_i) e_i
    return (u * np.sqrt(lam)[None, :]) @ vecs.T


def decompositions_from_unitary(rho, u, recon_tol: float = tol.RECON) -> EnsembleDecomposition:
    """Pure-state ensemble of ``rho`` generated by the isometry ``u`` (``m x rank``)."""
    lam, vecs = _support(rho)
    u = np.asarray(u, dtype=complex)
    r = lam.size
    if u.ndim != 2 or u.shape[1] != r or u.shape[0] < r:
        raise NotIsometry(f"expected an m x {r} isometry with m >= {r}, got shape {u.shape}")
    dev = float(np.max(np.abs(u.conj().T @ u - np.eye(r))))
    if dev > recon_tol:
        raise NotIsometry(f"max |U^dagger U - I| = {dev:.3e}")
    psi = _unnormalized_members(lam, vecs, u)
    p = np.sum(np.abs(psi) ** 2, axis=1)
    keep = p > 0
    p, psi = p[keep], psi[keep]
    members = psi / np.sqrt(p)[:, None]
    return EnsembleDecomposition(p / p.sum(), members)


def _batched_output_entropy(kraus: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Entropy of ``Phi(|psi><psi|)`` for each row of ``psi`` (rows need not be normalized).

    Returns ``||psi||^2``-weighted entropies, i.e. the extended entropy of
    the unnormalized output, which is what the ensemble average needs.
    """
    vecs = np.einsum("kab,nb->nka", kraus, psi)
    gram = np.einsum("nka,nla->nkl", vecs.conj(), vecs)
    if gram.shape[1] == 2:
        a = np.real(gram[:, 0, 0])
        c = np.real(gram[:, 1, 1])
        rad = np.sqrt(0.25 * (a - c) ** 2 + np.abs(gram[:, 0, 1]) ** 2)
        w = np.stack([0.5 * (a + c) + rad, 0.5 * (a + c) - rad], axis=1)
    else:
        w = np.linalg.eigvalsh(gram)
    w = np.clip(w, 0.0, None)
    return eta(w).sum(axis=1) - eta(w.sum(axis=1))


def ensemble_objective(channel: KrausChannel, ens: EnsembleDecomposition) -> float:
    """``sum_j p_j H_Phi(|psi_j><psi_j|)``."""
    return float(sum(p * pure_output_entropy(channel, m)
                     for p, m in zip(ens.probabilities, ens.members)))


def _isometry(x: np.ndarray, m: int, r: int) -> np.ndarray:
    a = (x[: m * r] + 1j * x[m * r:]).reshape(m, r)
    q, rr = np.linalg.qr(a)
    # fix the column phases so the map is well defined
    ph = np.diag(rr).copy()
    ph[ph == 0] = 1.0
    return q * (ph / np.abs(ph))[None, :]


def roof_estimate(channel: KrausChannel, rho, m: int | None = None, restarts: int = 32,
                  seed: int = 0, max_evals: int = 200_000, strict: bool = False) -> RoofEstimate:
    """Upper estimate of the convex roof of ``H_Phi`` at ``rho``.

    Each restart draws a Haar-like random isometry (the first restart uses
    the eigen-ensemble), runs a quasi-Newton descent on the QR
    parametrization and then a perturbation polish with a decreasing step.
    ``m`` defaults to ``rank**2`` capped at 16. The result is the best over
    restarts; ``converged`` means at least two restarts reached it within
    the roof tolerance and the evaluation budget was not exhausted.
    """
    lam, vecs = _support(rho)
    r = lam.size
    kraus = channel.stacked()
    if r == 1:
        ens = EnsembleDecomposition(np.array([1.0]), vecs.T.copy())
        return RoofEstimate(ensemble_objective(channel, ens), ens, 0, True, 1)
    if m is None:
        m = min(r * r, 16)
    if m < r:
        raise ValueError(f"ensemble size m = {m} is below the rank {r}")
    rng = np.random.default_rng(seed)
    evals = 0

    def objective(x):
        nonlocal evals
        evals += 1
        u = _isometry(x, m, r)
        return float(_batched_output_entropy(kraus, _unnormalized_members(lam, vecs, u)).sum())

    finals = []
    best_val, best_x = math.inf, None
    used = 0
    for k in range(restarts):
        if evals >= max_evals:
            break
        used += 1
        if k == 0:
            a0 = np.zeros((m, r), dtype=complex)
            a0[:r, :r] = np.eye(r)
            a0 += 1e-3 * (rng.standard_normal((m, r)) + 1j * rng.standard_normal((m, r)))
        else:
            a0 = rng.standard_normal((m, r)) + 1j * rng.standard_normal((m, r))
        x = np.concatenate([a0.real.ravel(), a0.imag.ravel()])
        res = minimize(objective, x, method="L-BFGS-B",
                       options={"maxiter": 400, "maxfun": max(max_evals - evals, 1)})
        x, fx = res.x, float(res.fun)
        step = 0.1
        while step > 1e-5 and evals < max_evals:
            improved = False
            for _ in range(8):
                cand = x + step * rng.standard_normal(x.size)
                fc = objective(cand)
                if fc < fx:
                    x, fx, improved = cand, fc, True
            if not improved:
                step *= 0.5
        finals.append(fx)
        if fx < best_val:
            best_val, best_x = fx, x
    exhausted = evals >= max_evals
    if strict and exhausted:
        raise BudgetExceeded(f"roof search used {evals} evaluations")
    hits = sum(1 for f in finals if f <= best_val + tol.ROOF)
    ens = decompositions_from_unitary(rho, _isometry(best_x, m, r))
    return RoofEstimate(max(best_val, 0.0), ens, used, hits >= 2 and not exhausted, evals)


def eof_estimate(rho_ab, dims=None, m: int | None = None, restarts: int = 32,
                 seed: int = 0) -> RoofEstimate:
    """Entanglement of formation: the roof of the reduced-state entropy.

    ``dims`` is ``(d_A, d_B)``; square dimensions default to equal factors.
    """
    d = np.asarray(rho_ab).shape[0]
    if dims is None:
        s = int(round(math.sqrt(d)))
        if s * s != d:
            raise ValueError("give dims for a non-square composite dimension")
        dims = (s, s)
    return roof_estimate(partial_trace_channel(*dims), rho_ab, m=m, restarts=restarts, seed=seed)


def _two_member_grid(n: int) -> np.ndarray:
    th = np.linspace(0.0, math.pi / 2, n)
    al = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
    t, a = np.meshgrid(th, al, indexing="ij")
    t, a = t.ravel(), a.ravel()
    ph = np.exp(1j * a)
    u = np.empty((t.size, 2, 2), dtype=complex)
    u[:, 0, 0] = np.cos(t)
    u[:, 0, 1] = ph * np.sin(t)
    u[:, 1, 0] = np.sin(t)
    u[:, 1, 1] = -ph * np.cos(t)
    return u


def _bloch(theta, phi):
    return np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1)


def _spinor(b):
    # unit vector in C^2 with Bloch vector b
    theta = np.arccos(np.clip(b[..., 2], -1.0, 1.0))
    phi = np.arctan2(b[..., 1], b[..., 0])
    return np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=-1)


def _three_member_chunks(n: int, chunk: int = 200_000):
    th = np.linspace(0.0, math.pi, n)
    ph = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
    s = np.linspace(0.0, 1.0, n)
    b_grid = _bloch(*[g.ravel() for g in np.meshgrid(th, ph, indexing="ij")])
    nb = b_grid.shape[0]
    idx = np.stack([g.ravel() for g in np.meshgrid(np.arange(nb), np.arange(nb), np.arange(n),
                                                   indexing="ij")], axis=1)
    for start in range(0, idx.shape[0], chunk):
        i = idx[start:start + chunk]
        b1, b2, sv = b_grid[i[:, 0]], b_grid[i[:, 1]], s[i[:, 2]][:, None]
        comb = sv * b1 + (1.0 - sv) * b2
        length = np.linalg.norm(comb, axis=1)
        ok = length > 1e-9
        b1, b2, sv, comb, length = b1[ok], b2[ok], sv[ok], comb[ok], length[ok]
        b3 = -comb / length[:, None]
        a3 = 2.0 * length / (1.0 + length)
        a1 = a3 * sv[:, 0] / length
        a2 = a3 * (1.0 - sv[:, 0]) / length
        # row j of the isometry is sqrt(a_j) times the conjugate spinor of b_j
        rows = [np.sqrt(a[:, None]) * _spinor(b).conj() for a, b in ((a1, b1), (a2, b2), (a3, b3))]
        yield np.stack(rows, axis=1)


def brute_force_roof(channel: KrausChannel, rho, resolution: int = 16) -> float:
    """Grid minimum of the ensemble objective over 2- and 3-member ensembles.

    Needs input dimension at most 4 and rank at most 2. The 2-member family
    is the full set of 2 x 2 unitaries up to row phases, sampled at
    ``4 * resolution`` points per angle; 3-member ensembles come from
    rank-one qubit frames with Bloch vectors ``b1, b2`` (``resolution``
    points per angle) and ``b3`` fixed by a mixing parameter ``s``. Every
    grid point is a feasible ensemble, so the result is an upper bound on
    the roof restricted to these sizes.
    """
    if channel.input_dim > 4:
        raise TooLarge(f"input dimension {channel.input_dim} > 4")
    lam, vecs = _support(rho)
    if lam.size > 2:
        raise TooLarge(f"rank {lam.size} > 2")
    kraus = channel.stacked()
    if lam.size == 1:
        return pure_output_entropy(channel, vecs[:, 0])

    def value(u):
        psi = np.einsum("gji,i,ai->gja", u, np.sqrt(lam), vecs)
        g, j, d = psi.shape
        h = _batched_output_entropy(kraus, psi.reshape(g * j, d)).reshape(g, j)
        return float(h.sum(axis=1).min())

    best = value(_two_member_grid(4 * resolution))
    for u in _three_member_chunks(resolution):
        best = min(best, value(u))
    return best

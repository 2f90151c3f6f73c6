"""Hermitian spectral numerics and entropy functionals.

All entropies are in nats. States are plain ``numpy`` arrays; functions that
need a state validate their input with :func:`check_state` and never mutate
it.
"""
from __future__ import annotations

import math

import numpy as np

from . import tolerances as tol
from .errors import (
    DimensionMismatch,
    InvalidState,
    NegativeWeight,
    NoConvergence,
    NonHermitian,
    OutOfRange,
)

__all__ = [
    "eta",
    "hermitian_eigh",
    "hermitian_eigendecomposition",
    "check_state",
    "von_neumann_entropy",
    "entropy_of_spectrum",
    "extended_shannon_entropy",
    "binary_entropy",
    "g_function",
    "trace_distance",
    "ket_to_dm",
    "partial_trace",
    "maximally_mixed",
]


def eta(x):
    """``-x ln x`` with ``eta(0) = 0``, elementwise."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = -x[pos] * np.log(x[pos])
    return out


def _as_square(m) -> np.ndarray:
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimensionMismatch(f"expected a nonempty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def hermitian_eigh(m, herm_tol: float = tol.HERM):
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    m : array_like
        Square matrix, Hermitian up to ``herm_tol * max|m_ij|``.
    herm_tol : float
        Relative Hermiticity tolerance.

    Returns
    -------
    (eigenvalues, eigenvectors)
        Eigenvalues sorted in descending order and the unitary whose columns
        are the matching eigenvectors, so ``m = U diag(w) U^dagger``.

    Raises
    ------
    NonHermitian
        If the anti-Hermitian part exceeds the tolerance.
    NoConvergence
        If LAPACK fails to converge.
    """
    a = _as_square(m)
    scale = float(np.max(np.abs(a)))
    dev = float(np.max(np.abs(a - a.conj().T)))
    if dev > herm_tol * scale:
        raise NonHermitian(f"max |M - M^dagger| = {dev:.3e} exceeds {herm_tol:.1e} * {scale:.3e}")
    h = 0.5 * (a + a.conj().T)
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(str(exc)) from exc
    return w[::-1].copy(), v[:, ::-1].copy()


hermitian_eigendecomposition = hermitian_eigh


def check_state(rho, psd_tol: float = tol.PSD, trace_tol: float = tol.TRACE) -> np.ndarray:
    """Validate a positive operator in the unit trace ball and return its Hermitian part.

    Raises :class:`InvalidState` when the matrix is not square, not Hermitian,
    has an eigenvalue below ``-psd_tol``, or has trace outside ``(0, 1 + trace_tol]``.
    """
    try:
        a = _as_square(rho)
        w, _ = hermitian_eigh(a)
    except (DimensionMismatch, NonHermitian, ValueError) as exc:
        raise InvalidState(str(exc)) from exc
    if w[-1] < -psd_tol:
        raise InvalidState(f"negative eigenvalue {w[-1]:.3e}")
    tr = float(np.real(np.trace(a)))
    if not (0.0 < tr <= 1.0 + trace_tol):
        raise InvalidState(f"trace {tr!r} outside (0, 1]")
    return 0.5 * (a + a.conj().T)


def entropy_of_spectrum(w, psd_tol: float = tol.PSD) -> float:
    """``sum eta(w_i) - eta(sum w_i)`` after clamping tiny negatives to zero."""
    w = np.asarray(w, dtype=float)
    if w.size and w.min() < -psd_tol:
        raise InvalidState(f"negative eigenvalue {w.min():.3e}")
    w = np.clip(w, 0.0, None)
    total = float(w.sum())
    val = float(eta(w).sum()) - float(eta(total))
    return max(val, 0.0)


def von_neumann_entropy(rho, psd_tol: float = tol.PSD) -> float:
    """Entropy of a positive operator with trace at most one.

    Uses the homogeneous extension ``Tr eta(rho) - eta(Tr rho)``, which is the
    usual ``-Tr rho ln rho`` for normalized states.

    >>> round(von_neumann_entropy(np.eye(2) / 2), 7)
    0.6931472
    """
    a = check_state(rho, psd_tol=psd_tol)
    w = np.linalg.eigvalsh(a)
    return entropy_of_spectrum(w, psd_tol=psd_tol)


def extended_shannon_entropy(x, psd_tol: float = tol.PSD) -> float:
    """Shannon entropy extended homogeneously to nonnegative vectors."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size and x.min() < -psd_tol:
        raise NegativeWeight(f"weight {x.min():.3e} < 0")
    if not np.all(np.isfinite(x)):
        raise NegativeWeight("weights must be finite")
    x = np.clip(x, 0.0, None)
    return max(float(eta(x).sum()) - float(eta(x.sum())), 0.0)


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"p = {p!r} not in [0, 1]")
    out = 0.0
    for q in (p, 1.0 - p):
        if q > 0.0:
            out -= q * math.log(q)
    return out


def g_function(x: float) -> float:
    """``(1 + x) h2(x / (1 + x))``, the correction term of AFW-type bounds.

    Equivalently ``(1 + x) ln(1 + x) - x ln x``; strictly increasing with
    ``g(0) = 0`` and ``g(1) = 2 ln 2``.
    """
    if x < 0:
        raise OutOfRange(f"x = {x!r} < 0")
    if x == 0:
        return 0.0
    return (1.0 + x) * math.log1p(x) - x * math.log(x)


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of ``rho - sigma``."""
    a = np.asarray(rho)
    b = np.asarray(sigma)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    diff = a - b
    w = np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))
    return float(0.5 * np.abs(w).sum())


def ket_to_dm(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.outer(psi, psi.conj())


def maximally_mixed(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex) / d


def partial_trace(rho, dims, keep) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    ``dims`` are the local dimensions in tensor order; ``keep`` is an int or a
    sequence of subsystem indices.
    """
    dims = [int(d) for d in dims]
    keep = [keep] if isinstance(keep, (int, np.integer)) else sorted(keep)
    n = len(dims)
    a = np.asarray(rho)
    if a.shape != (math.prod(dims),) * 2:
        raise DimensionMismatch(f"operator shape {a.shape} incompatible with dims {dims}")
    t = a.reshape(dims + dims)
    trace_out = [i for i in range(n) if i not in keep]
    # contract from the highest index so earlier axis numbers stay valid
    for cnt, i in enumerate(sorted(trace_out, reverse=True)):
        m = n - cnt
        t = np.trace(t, axis1=i, axis2=i + m)
    dk = math.prod(dims[i] for i in keep) if keep else 1
    return t.reshape(dk, dk)

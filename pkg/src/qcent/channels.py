"""Kraus-form channels and operations.

A :class:`KrausChannel` is an immutable list of Kraus operators
``V_k : C^{d_in} -> C^{d_out}`` acting as ``rho -> sum_k V_k rho V_k^dagger``.
The complementary channel is realized through the environment Gram matrix
``W_kj = Tr(V_k rho V_j^dagger)``, which equals the output of the
complementary channel for the Stinespring isometry
``|phi> -> sum_k V_k|phi> (x) |k>``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import tolerances as tol
from .core import check_state, entropy_of_spectrum, hermitian_eigh, von_neumann_entropy
from .errors import DimensionMismatch, InvalidState

__all__ = [
    "KrausChannel",
    "ValidationReport",
    "validate",
    "apply",
    "output_entropy",
    "complementary_state",
    "entropy_exchange",
    "compose",
    "tensor",
    "choi_matrix",
    "choi_rank",
    "purify",
    "identity_channel",
    "unitary_channel",
    "dephasing",
    "qubit_dephasing",
    "depolarize_to",
    "mix_with_pure",
    "example1_pinching",
    "partial_trace_channel",
    "pure_output_entropy",
]


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Completely positive map given by Kraus operators.

    ``kind`` is ``"channel"`` (trace preserving) or ``"operation"`` (trace
    non-increasing). The trace condition is *not* enforced at construction;
    use :func:`validate`.
    """

    kraus: tuple
    kind: str = "channel"

    def __init__(self, kraus: Sequence, kind: str = "channel"):
        if kind not in ("channel", "operation"):
            raise ValueError(f"kind must be 'channel' or 'operation', got {kind!r}")
        ops = [np.array(v, dtype=complex) for v in kraus]
        if not ops:
            raise ValueError("at least one Kraus operator is required")
        shape = ops[0].shape
        for v in ops:
            if v.ndim != 2 or v.shape != shape:
                raise DimensionMismatch("Kraus operators must be matrices of one common shape")
            if not np.all(np.isfinite(v)):
                raise ValueError("Kraus operators must be finite")
            v.setflags(write=False)
        # zero operators only pad the environment
        nonzero = tuple(v for v in ops if np.any(v != 0))
        if not nonzero:
            raise ValueError("at least one nonzero Kraus operator is required")
        object.__setattr__(self, "kraus", nonzero)
        object.__setattr__(self, "kind", kind)

    @property
    def input_dim(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def output_dim(self) -> int:
        return self.kraus[0].shape[0]

    @property
    def n_kraus(self) -> int:
        return len(self.kraus)

    def stacked(self) -> np.ndarray:
        """Kraus operators as one ``(m, d_out, d_in)`` array."""
        return np.stack(self.kraus)

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)

    def __repr__(self) -> str:
        return (f"KrausChannel(kind={self.kind!r}, {self.input_dim}->{self.output_dim}, "
                f"n_kraus={self.n_kraus})")


@dataclass(frozen=True)
class ValidationReport:
    deviation: float
    max_eigenvalue: float
    passed: bool
    kind: str


def validate(channel: KrausChannel, tp_tol: float = tol.TP) -> ValidationReport:
    """Spectral deviation of ``sum V_k^dagger V_k`` from ``I`` (channel) or from ``<= I`` (operation)."""
    s = sum(v.conj().T @ v for v in channel.kraus)
    w = np.linalg.eigvalsh(0.5 * (s + s.conj().T))
    if channel.kind == "channel":
        dev = float(np.max(np.abs(w - 1.0)))
    else:
        dev = float(max(w[-1] - 1.0, 0.0))
    return ValidationReport(deviation=dev, max_eigenvalue=float(w[-1]),
                            passed=dev <= tp_tol, kind=channel.kind)


def _check_input(channel: KrausChannel, rho) -> np.ndarray:
    a = np.asarray(rho, dtype=complex)
    if a.shape != (channel.input_dim, channel.input_dim):
        raise DimensionMismatch(
            f"state of shape {a.shape} does not match input dimension {channel.input_dim}")
    return a


def apply(channel: KrausChannel, rho) -> np.ndarray:
    a = _check_input(channel, rho)
    v = channel.stacked()
    out = np.einsum("kij,jl,kml->im", v, a, v.conj(), optimize=True)
    return 0.5 * (out + out.conj().T)


def output_entropy(channel: KrausChannel, rho) -> float:
    """Entropy of ``channel(rho)`` via the homogeneous extension, so operations are allowed."""
    check_state(rho)
    return von_neumann_entropy(apply(channel, rho))


def pure_output_entropy(channel: KrausChannel, psi) -> float:
    """Output entropy on the pure state ``|psi><psi|`` (``psi`` is normalized here).

    Works with the ``m x m`` Gram matrix of the vectors ``V_k psi``, which has
    the same nonzero spectrum as the output.
    """
    psi = np.asarray(psi, dtype=complex).ravel()
    psi = psi / np.linalg.norm(psi)
    vecs = channel.stacked() @ psi
    gram = vecs.conj() @ vecs.T
    return entropy_of_spectrum(np.linalg.eigvalsh(0.5 * (gram + gram.conj().T)))


def complementary_state(channel: KrausChannel, rho) -> np.ndarray:
    """Environment state ``W_kj = Tr(V_k rho V_j^dagger)``."""
    a = _check_input(channel, rho)
    v = channel.stacked()
    w = np.einsum("kij,jl,mil->km", v, a, v.conj(), optimize=True)
    return 0.5 * (w + w.conj().T)


def entropy_exchange(channel: KrausChannel, rho) -> float:
    check_state(rho)
    return von_neumann_entropy(complementary_state(channel, rho))


def _combined_kind(*chans: KrausChannel) -> str:
    return "channel" if all(c.kind == "channel" for c in chans) else "operation"


def compose(second: KrausChannel, first: KrausChannel) -> KrausChannel:
    """``second o first``, Kraus set ``{W_j V_k}``."""
    if first.output_dim != second.input_dim:
        raise DimensionMismatch(
            f"cannot compose: output dim {first.output_dim} != input dim {second.input_dim}")
    ops = [w @ v for w in second.kraus for v in first.kraus]
    return KrausChannel(ops, kind=_combined_kind(first, second))


def tensor(a: KrausChannel, b: KrausChannel) -> KrausChannel:
    ops = [np.kron(v, w) for v in a.kraus for w in b.kraus]
    return KrausChannel(ops, kind=_combined_kind(a, b))


def choi_matrix(channel: KrausChannel) -> np.ndarray:
    """``(id (x) Phi)(|Omega><Omega|)`` with ``|Omega> = sum_i |i>|i>`` unnormalized."""
    d_in, d_out = channel.input_dim, channel.output_dim
    c = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for v in channel.kraus:
        # column i of V sits in block i of vec
        vec = v.T.reshape(-1)
        c += np.outer(vec, vec.conj())
    return c


def choi_rank(channel: KrausChannel, rank_tol: float = tol.RANK) -> int:
    """Minimal number of Kraus operators, as the numerical rank of the Choi matrix."""
    w, _ = hermitian_eigh(choi_matrix(channel))
    if w[0] <= 0:
        return 0
    return int(np.sum(w > rank_tol * w[0]))


def purify(rho) -> np.ndarray:
    """Vector in ``C^d (x) C^d`` whose reduction to the first factor is ``rho``.

    Built as ``sum_i sqrt(w_i) |e_i> (x) |i>`` from the eigendecomposition, so
    the Schmidt coefficients are the square roots of the eigenvalues.
    """
    a = check_state(rho)
    tr = float(np.real(np.trace(a)))
    if abs(tr - 1.0) > tol.TRACE:
        raise InvalidState("purification needs a unit-trace state")
    w, u = hermitian_eigh(a)
    w = np.clip(w, 0.0, None)
    d = a.shape[0]
    psi = np.zeros(d * d, dtype=complex)
    for i in range(d):
        ref = np.zeros(d)
        ref[i] = 1.0
        psi += np.sqrt(w[i]) * np.kron(u[:, i], ref)
    return psi / np.linalg.norm(psi)


# --------------------------------------------------------------------------
# generators


def identity_channel(d: int) -> KrausChannel:
    return KrausChannel([np.eye(d)])


def unitary_channel(u) -> KrausChannel:
    return KrausChannel([np.asarray(u, dtype=complex)])


def dephasing(d: int) -> KrausChannel:
    """Complete dephasing (pinching) in the computational basis."""
    ops = []
    for k in range(d):
        p = np.zeros((d, d))
        p[k, k] = 1.0
        ops.append(p)
    return KrausChannel(ops)


def qubit_dephasing(p: float) -> KrausChannel:
    z = np.diag([1.0, -1.0])
    return KrausChannel([np.sqrt(1.0 - p) * np.eye(2), np.sqrt(p) * z])


def depolarize_to(sigma, d_in: int) -> KrausChannel:
    """Completely depolarizing channel ``rho -> Tr(rho) sigma``."""
    s = check_state(sigma)
    w, u = hermitian_eigh(s)
    ops = []
    for i, wi in enumerate(w):
        if wi <= 0:
            continue
        for j in range(d_in):
            e = np.zeros(d_in)
            e[j] = 1.0
            ops.append(np.sqrt(wi) * np.outer(u[:, i], e))
    return KrausChannel(ops)


def mix_with_pure(d: int, p: float, psi=None) -> KrausChannel:
    """``rho -> (1 - p) rho + p Tr(rho) |psi><psi|``; ``psi`` defaults to ``|0>``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p = {p!r} not in [0, 1]")
    if psi is None:
        psi = np.zeros(d)
        psi[0] = 1.0
    psi = np.asarray(psi, dtype=complex).ravel()
    psi = psi / np.linalg.norm(psi)
    ops = [np.sqrt(1.0 - p) * np.eye(d, dtype=complex)]
    for j in range(d):
        e = np.zeros(d)
        e[j] = 1.0
        ops.append(np.sqrt(p) * np.outer(psi, e))
    return KrausChannel(ops)


def example1_coefficients(alpha: float, n: int) -> np.ndarray:
    """``c_k = alpha / ln k`` for ``k = 2 .. n + 1``."""
    k = np.arange(2, n + 2, dtype=float)
    return alpha / np.log(k)


def example1_pinching(alpha: float, n: int) -> KrausChannel:
    """Truncation of the pinching family with weights ``c_k = alpha / ln k``.

    The rank-one projectors ``P_k = |k-2><k-2|`` (``k = 2 .. n + 1``) act on
    ``C^n``; the first Kraus operator is ``sqrt(I - sum_k c_k P_k)`` so the
    truncation is trace preserving. Requires ``0 <= alpha <= ln 2``.
    """
    if not 0.0 <= alpha <= np.log(2.0) + 1e-15:
        raise ValueError("alpha must lie in [0, ln 2]")
    c = np.minimum(example1_coefficients(alpha, n), 1.0)
    ops = [np.diag(np.sqrt(1.0 - c))]
    for i, ck in enumerate(c):
        p = np.zeros((n, n))
        p[i, i] = np.sqrt(ck)
        ops.append(p)
    return KrausChannel(ops)


def partial_trace_channel(d_a: int, d_b: int) -> KrausChannel:
    """``rho_AB -> rho_A`` with Kraus operators ``I_A (x) <k|_B``."""
    ops = []
    for k in range(d_b):
        bra = np.zeros((1, d_b))
        bra[0, k] = 1.0
        ops.append(np.kron(np.eye(d_a), bra))
    return KrausChannel(ops)

"""Verification harness: entropy inequalities, channel identities and bound validity.

Each check draws random instances, measures the worst violation of one
inequality or identity, and passes when that violation does not exceed its
tolerance. Inequalities ``lhs <= rhs`` report ``max(lhs - rhs)``; identities
report ``max |lhs - rhs|``. Every check gets its own Philox stream keyed by
its position in :data:`CHECKS`, so results do not depend on which suites
run alongside it.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import channels as ch
from . import tolerances
from .bounds import (
    BoundRequest,
    afw_bound,
    audenaert_bound,
    corollary5_bound,
    estimate_Hp_max,
    theorem2_bound,
)
from .core import (
    binary_entropy,
    extended_shannon_entropy,
    g_function,
    hermitian_eigh,
    partial_trace,
    trace_distance,
    von_neumann_entropy,
)
from .energy import (
    EnergyProfile,
    F_bar,
    F_H,
    F_hat_star,
    HamiltonianSpectrum,
    bd_ratio,
    gibbs_parameter,
    mean_energy,
    oscillator_F_bar,
    partition_function,
)
from .roof import decompositions_from_unitary, ensemble_objective, eof_estimate, roof_estimate
from .sampling import make_rng, random_channel, random_energy_constrained_pair, random_pure, random_state

__all__ = ["Check", "VerificationReport", "CHECKS", "SUITES", "run_suite"]

SUITES = ("core", "channel", "energy", "bound", "roof")


@dataclass
class Check:
    name: str
    suite: str
    samples: int
    max_violation: float
    tolerance: float
    passed: bool
    statistical: bool = False


@dataclass
class VerificationReport:
    suite: str
    seed: int
    samples: int
    tolerance: float
    checks: list
    passed: bool

    def to_dict(self) -> dict:
        return {"version": "v1", "suite": self.suite, "seed": self.seed, "samples": self.samples,
                "tolerance": self.tolerance, "passed": self.passed,
                "checks": [asdict(c) for c in self.checks]}


class _Acc:
    """Running maximum of violations."""

    def __init__(self):
        self.worst = -math.inf
        self.n = 0

    def le(self, lhs, rhs):
        self.worst = max(self.worst, float(lhs - rhs))
        self.n += 1

    def eq(self, lhs, rhs):
        self.worst = max(self.worst, float(abs(lhs - rhs)))
        self.n += 1


# --------------------------------------------------------------------------
# core


def _eigh_reconstruction(rng, n, tol):
    acc = _Acc()
    for _ in range(n):
        d = int(rng.integers(2, 17))
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        m = g + g.conj().T
        w, u = hermitian_eigh(m)
        err = np.linalg.norm(u @ np.diag(w) @ u.conj().T - m) / np.linalg.norm(m)
        acc.le(err, 0.0)
        acc.le(np.linalg.norm(u.conj().T @ u - np.eye(d)), 0.0)
    return acc, tol.recon


def _concavity(rng, n, tol):
    acc = _Acc()
    for _ in range(n):
        d = int(rng.integers(2, 9))
        r, s, p = random_state(d, rng=rng), random_state(d, rng=rng), float(rng.uniform())
        hm = von_neumann_entropy(p * r + (1 - p) * s)
        avg = p * von_neumann_entropy(r) + (1 - p) * von_neumann_entropy(s)
        acc.le(avg, hm)
        acc.le(hm, avg + binary_entropy(p))
    return acc, tol.num


def _ensemble_bound(rng, n, tol):
    acc = _Acc()
    for _ in range(n):
        d, k = int(rng.integers(2, 7)), int(rng.integers(2, 6))
        p = rng.dirichlet(np.ones(k))
        states = [random_state(d, int(rng.integers(1, d + 1)), rng) for _ in range(k)]
        mix = sum(pi * s for pi, s in zip(p, states))
        rhs = sum(pi * von_neumann_entropy(s) for pi, s in zip(p, states)) + extended_shannon_entropy(p)
        acc.le(von_neumann_entropy(mix), rhs)
    return acc, tol.num


def _orthogonal_equality(rng, n, tol):
    acc = _Acc()
    for _ in range(n):
        k = int(rng.integers(2, 5))
        sizes = rng.integers(1, 4, size=k)
        traces = rng.dirichlet(np.ones(k)) * rng.uniform(0.3, 1.0)
        blocks = [t * random_state(int(s), rng=rng) for t, s in zip(traces, sizes)]
        total = np.zeros((sizes.sum(),) * 2, dtype=complex)
        parts = []
        off = 0
        for b in blocks:
            s = b.shape[0]
            part = np.zeros_like(total)
            part[off:off + s, off:off + s] = b
            total += part
            parts.append(part)
            off += s
        rhs = sum(von_neumann_entropy(x) for x in parts) + extended_shannon_entropy(traces)
        acc.eq(von_neumann_entropy(total), rhs)
    return acc, tol.num


def _homogeneity(rng, n, tol):
    acc = _Acc()
    for _ in range(n):
        d = int(rng.integers(2, 9))
        r, c = random_state(d, rng=rng), float(rng.uniform(0.01, 1.0))
        acc.eq(von_neumann_entropy(c * r), c * von_neumann_entropy(r))
    return acc, tol.num


def _bipartite(rng, n):
    da, db = int(rng.integers(2, 4)), int(rng.integers(2, 4))
    rho = random_state(da * db, int(rng.integers(1, da * db + 1)), rng)
    return (von_neumann_entropy(rho), von_neumann_entropy(partial_trace(rho, (da, db), 0)),
            von_neumann_entropy(partial_trace(rho, (da, db), 1)))


def _subadditivity(rng, n, tol):
    acc = _Acc()
    for _ in range(n):
        hab, ha, hb = _bipartite(rng, n)
        acc.le(hab, ha + hb)
    return acc, tol.num


def _triangle(rng, n, tol):
    acc = _Acc()
    for _ in range(n):
        hab, ha, hb = _bipartite(rng, n)
        acc.le(abs(ha - hb), hab)
    return acc, tol.num


def _audenaert_saturation(rng, n, tol):
    acc = _Acc()
    for d in (2, 3, 4, 8, 16):
        for eps in np.linspace(0.0, 1.0 - 1.0 / d, 7):
            r = np.zeros(d)
            r[0] = 1.0
            s = np.full(d, eps / (d - 1))
            s[0] = 1.0 - eps
            dh = abs(von_neumann_entropy(np.diag(r)) - von_neumann_entropy(np.diag(s)))
            acc.eq(dh, audenaert_bound(d, float(eps)))
    return acc, tol.num


def _audenaert_validity(rng, n, tol):
    acc = _Acc()
    for _ in range(n):
        d = int(rng.integers(2, 7))
        r, s = random_state(d, rng=rng), random_state(d, int(rng.integers(1, d + 1)), rng)
        eps = trace_distance(r, s)
        if eps <= 1.0 - 1.0 / d:
            acc.le(abs(von_neumann_entropy(r) - von_neumann_entropy(s)), audenaert_bound(d, eps))
    return acc, tol.num


# --------------------------------------------------------------------------
# channels


def _rand_chan(rng, d_in=None, d_out=None):
    d_in = d_in or int(rng.integers(2, 5))
    d_out = d_out or int(rng.integers(2, 5))
    m = int(rng.integers(max(1, math.ceil(d_in / d_out)), 5))
    return random_channel(d_in, d_out, m, rng)


def _pure_coincidence(rng, n, tol):
    acc = _Acc()
    for _ in range(n):
        c = _rand_chan(rng)
        psi = random_pure(c.input_dim, rng)
        rho = np.outer(psi, psi.conj())
        acc.eq(ch.output_entropy(c, rho), ch.entropy_exchange(c, rho))
    return acc, tol.num


def _complementary_subadditivity(rng, n, tol):
    acc = _Acc()
    for _ in range(n):
        c = _rand_chan(rng)
        rho = random_state(c.input_dim, rng=rng)
        acc.le(von_neumann_entropy(rho), ch.output_entropy(c, rho) + ch.entropy_exchange(c, rho))
    return acc, tol.num


def _kraus_norm_entropy(rng, n, tol):
    acc = _Acc()
    for _ in range(n):
        c = _rand_chan(rng)
        psi = random_pure(c.input_dim, rng)
        w = np.sum(np.abs(c.stacked() @ psi) ** 2, axis=1)
        acc.le(ch.pure_output_entropy(c, psi), extended_shannon_entropy(w))
    return acc, tol.num


def _laa_premise(rng, n, tol):
    acc = _Acc()
    for _ in range(n):
        c = _rand_chan(rng)
        d = c.input_dim
        r, s, p = random_state(d, rng=rng), random_state(d, rng=rng), float(rng.uniform())
        gap = ch.output_entropy(c, p * r + (1 - p) * s) - (
            p * ch.output_entropy(c, r) + (1 - p) * ch.output_entropy(c, s))
        acc.le(0.0, gap)
        acc.le(gap, binary_entropy(p))
    return acc, tol.num


def _hp_upper_inequality(rng, n, tol):
    acc = _Acc()
    for _ in range(n):
        c = _rand_chan(rng)
        norms = [float(np.linalg.norm(v, 2) ** 2) for v in c.kraus]
        hp_upper = min(math.log(ch.choi_rank(c)), extended_shannon_entropy(norms),
                       math.log(c.output_dim))
        rho = random_state(c.input_dim, rng=rng)
        acc.le(ch.output_entropy(c, rho), von_neumann_entropy(rho) + hp_upper)
    return acc, tol.num


def _compose_tensor_action(rng, n, tol):
    acc = _Acc()
    for _ in range(n):
        a = _rand_chan(rng)
        b = _rand_chan(rng, d_in=a.output_dim)
        rho = random_state(a.input_dim, rng=rng)
        acc.eq(np.abs(ch.apply(ch.compose(b, a), rho) - ch.apply(b, ch.apply(a, rho))).max(), 0.0)
        c = _rand_chan(rng)
        sigma = random_state(c.input_dim, rng=rng)
        lhs = ch.apply(ch.tensor(a, c), np.kron(rho, sigma))
        acc.eq(np.abs(lhs - np.kron(ch.apply(a, rho), ch.apply(c, sigma))).max(), 0.0)
    return acc, tol.num


def _choi_rank_tensor(rng, n, tol):
    acc = _Acc()
    for _ in range(max(1, n // 4)):
        a, b = _rand_chan(rng, d_in=2), _rand_chan(rng, d_in=2)
        acc.eq(ch.choi_rank(ch.tensor(a, b)), ch.choi_rank(a) * ch.choi_rank(b))
    return acc, 0.5


# --------------------------------------------------------------------------
# energy


def _gibbs_maximality(rng, n, tol):
    acc = _Acc()
    for _ in range(n):
        d = int(rng.integers(2, 12))
        levels = np.sort(rng.uniform(0.0, 5.0, size=d))
        prof = EnergyProfile(HamiltonianSpectrum.explicit(levels))
        p = rng.dirichlet(np.ones(d) * rng.uniform(0.2, 3.0))
        acc.le(extended_shannon_entropy(p), F_H(prof, float(p @ levels)))
    return acc, tol.num


def _partition_closed_form(rng, n, tol):
    acc = _Acc()
    prof = EnergyProfile(HamiltonianSpectrum.oscillator([1.0]))
    for lam in np.geomspace(0.05, 20.0, max(4, n // 10)):
        exact = math.exp(-lam / 2) / -math.expm1(-lam)
        acc.le(abs(partition_function(prof, float(lam)) / exact - 1.0), 0.0)
    return acc, tol.root


def _gibbs_root(rng, n, tol):
    acc = _Acc()
    for ell in (1, 2):
        prof = EnergyProfile(HamiltonianSpectrum.oscillator([1.0] * ell))
        for e in rng.uniform(0.05, 6.0, size=max(2, n // 20)):
            E = prof.E0 + float(e)
            lam = gibbs_parameter(prof, E)
            acc.le(abs(mean_energy(prof, lam) - E) / E, 0.0)
    return acc, tol.root


def _f_shape(rng, n, tol):
    acc = _Acc()
    prof = EnergyProfile(HamiltonianSpectrum.oscillator([1.0]))
    grid = np.geomspace(0.01, 50.0, 25)
    f = np.array([F_bar(prof, float(x)) for x in grid])
    acc.le(np.max(f[:-1] - f[1:]), 0.0)
    slopes = np.diff(f) / np.diff(grid)
    acc.le(np.max(slopes[1:] - slopes[:-1]), 0.0)
    return acc, tol.num


def _f_hat_conditions(rng, n, tol):
    acc = _Acc()
    prof = EnergyProfile(HamiltonianSpectrum.oscillator([1.0]))
    grid = np.geomspace(0.01, 20.0, 12)
    fh = np.array([F_hat_star(prof, float(x)) for x in grid])
    fb = np.array([F_bar(prof, float(x)) for x in grid])
    acc.le(np.max(fh[:-1] - fh[1:]), 0.0)
    r = fh / np.sqrt(grid)
    acc.le(np.max(r[1:] - r[:-1]), 0.0)
    acc.le(np.max(fb - fh), 0.0)
    return acc, tol.num


def _oscillator_dominance(rng, n, tol):
    acc = _Acc()
    for ell in (1, 2, 3):
        prof = EnergyProfile(HamiltonianSpectrum.oscillator([1.0] * ell))
        for e in np.geomspace(0.01, 30.0, 10):
            acc.le(F_bar(prof, float(e)), oscillator_F_bar(ell, [1.0] * ell, float(e)))
    return acc, tol.num


def _bd_limit(rng, n, tol):
    acc = _Acc()
    for ell, E in ((1, 40.0), (2, 40.0)):
        prof = EnergyProfile(HamiltonianSpectrum.oscillator([1.0] * ell))
        acc.le(abs(bd_ratio(prof, E) - (1.0 + 1.0 / ell)), 0.0)
    return acc, 0.05


# --------------------------------------------------------------------------
# bounds


def _truncated_oscillator(cutoff: float = 40.0):
    levels = np.arange(0.5, cutoff, 1.0)
    return levels, HamiltonianSpectrum.explicit(levels)


def _theorem2_validity(rng, n, tol):
    acc = _Acc()
    levels, _ = _truncated_oscillator()
    d = levels.size
    f_hat = lambda x: oscillator_F_bar(1, [1.0], x)
    chans = [(ch.identity_channel(d), 0.0), (ch.mix_with_pure(d, 0.3), math.log(2.0))]
    for chan, hp in chans:
        for eps, E in ((0.05, 2.0), (0.2, 8.0)):
            T = theorem2_bound(BoundRequest(eps, E, 0.5, f_hat, hp, t=1e-3)).T
            bounds = [theorem2_bound(BoundRequest(eps, E, 0.5, f_hat, hp, t=float(t))).value
                      for t in np.geomspace(max(1e-6, T * 1e-3), T, 4)]
            worst = min(bounds)
            for _ in range(max(1, n // 4)):
                r, s = random_energy_constrained_pair(levels, E, eps, rng)
                dh = abs(ch.output_entropy(chan, r) - ch.output_entropy(chan, s))
                acc.le(dh, worst)
    return acc, tol.num


def _afw_validity(rng, n, tol):
    acc = _Acc()
    for _ in range(max(1, n // 10)):
        c = _rand_chan(rng, d_out=4)
        for _ in range(10):
            r = random_state(c.input_dim, rng=rng)
            s = random_state(c.input_dim, int(rng.integers(1, c.input_dim + 1)), rng)
            eps = trace_distance(r, s)
            dh = abs(ch.output_entropy(c, r) - ch.output_entropy(c, s))
            acc.le(dh, afw_bound(math.log(4.0), eps))
    return acc, tol.num


def _monotonicity(rng, n, tol):
    acc = _Acc()
    f_hat = lambda x: oscillator_F_bar(1, [1.0], x)
    t = 0.5
    vals = [theorem2_bound(BoundRequest(float(e), 2.0, 0.5, f_hat, 0.0, t=t)).value
            for e in np.linspace(0.01, 1.0, 30)]
    acc.le(np.max(np.diff(vals) * -1.0), 0.0)
    vals = [theorem2_bound(BoundRequest(0.1, 0.5 + float(eb), 0.5, f_hat, 0.0, t=t)).value
            for eb in np.linspace(0.5, 20.0, 20)]
    acc.le(np.max(np.diff(vals) * -1.0), 0.0)
    return acc, tol.num


def _corollary5_dominates(rng, n, tol):
    acc = _Acc()
    for ell in (1, 2):
        w = [1.0] * ell
        f_hat = lambda x, ell=ell, w=w: oscillator_F_bar(ell, w, x)
        e0 = 0.5 * ell
        for eps in (0.05, 0.3):
            for E in (e0 + 1.0, e0 + 10.0):
                base = theorem2_bound(BoundRequest(eps, E, e0, f_hat, 0.0, t=1e-3))
                T = min(base.T, corollary5_bound(ell, w, E, eps, t=1e-3).T)
                for t in np.geomspace(1e-3, T, 5):
                    a = theorem2_bound(BoundRequest(eps, E, e0, f_hat, 0.0, t=float(t))).value
                    b = corollary5_bound(ell, w, E, eps, t=float(t)).value
                    acc.le(a, b)
    return acc, tol.num


def _hp_bracket(rng, n, tol):
    acc = _Acc()
    for _ in range(max(1, n // 25)):
        c = _rand_chan(rng)
        est = estimate_Hp_max(c, restarts=2, seed=int(rng.integers(2**31)))
        acc.le(est.lower, est.upper)
    return acc, tol.num


# --------------------------------------------------------------------------
# roof


def _roof_feasibility(rng, n, tol):
    acc = _Acc()
    for _ in range(max(1, n // 50)):
        c = _rand_chan(rng, d_in=2)
        rho = random_state(2, rng=rng)
        est = roof_estimate(c, rho, restarts=4, seed=int(rng.integers(2**31)))
        acc.eq(np.abs(est.best_ensemble.average() - rho).max(), 0.0)
        eig = decompositions_from_unitary(rho, np.eye(2))
        acc.le(est.value, ensemble_objective(c, eig))
    return acc, tol.decomp


def _roof_convexity(rng, n, tol):
    acc = _Acc()
    for _ in range(max(1, n // 50)):
        c = _rand_chan(rng, d_in=2)
        r1, r2, p = random_state(2, rng=rng), random_state(2, rng=rng), float(rng.uniform())
        seed = int(rng.integers(2**31))
        v = [roof_estimate(c, x, restarts=6, seed=seed).value for x in (p * r1 + (1 - p) * r2, r1, r2)]
        acc.le(v[0], p * v[1] + (1 - p) * v[2])
    return acc, 2 * tol.roof


def _eof_pure(rng, n, tol):
    acc = _Acc()
    for _ in range(max(1, n // 20)):
        psi = random_pure(4, rng)
        rho = np.outer(psi, psi.conj())
        acc.eq(eof_estimate(rho).value, von_neumann_entropy(partial_trace(rho, (2, 2), 0)))
    return acc, tol.num


CHECKS: list[tuple[str, str, Callable, bool]] = [
    ("core", "eigh_reconstruction", _eigh_reconstruction, False),
    ("core", "concavity_two_sided", _concavity, False),
    ("core", "ensemble_entropy_bound", _ensemble_bound, False),
    ("core", "orthogonal_support_equality", _orthogonal_equality, False),
    ("core", "homogeneity", _homogeneity, False),
    ("core", "subadditivity", _subadditivity, False),
    ("core", "triangle_inequality", _triangle, False),
    ("core", "audenaert_saturation", _audenaert_saturation, False),
    ("core", "audenaert_validity", _audenaert_validity, False),
    ("channel", "pure_state_coincidence", _pure_coincidence, False),
    ("channel", "complementary_subadditivity", _complementary_subadditivity, False),
    ("channel", "kraus_norm_entropy_bound", _kraus_norm_entropy, False),
    ("channel", "laa_premise", _laa_premise, False),
    ("channel", "pure_sup_entropy_bound", _hp_upper_inequality, False),
    ("channel", "compose_tensor_action", _compose_tensor_action, False),
    ("channel", "choi_rank_multiplicative", _choi_rank_tensor, False),
    ("energy", "gibbs_maximality", _gibbs_maximality, False),
    ("energy", "partition_closed_form", _partition_closed_form, False),
    ("energy", "gibbs_parameter_root", _gibbs_root, False),
    ("energy", "F_bar_increasing_concave", _f_shape, False),
    ("energy", "F_hat_star_conditions", _f_hat_conditions, False),
    ("energy", "oscillator_envelope_dominance", _oscillator_dominance, False),
    ("energy", "bd_ratio_limit", _bd_limit, False),
    ("bound", "theorem2_validity", _theorem2_validity, True),
    ("bound", "afw_validity", _afw_validity, True),
    ("bound", "theorem2_monotonicity", _monotonicity, False),
    ("bound", "corollary5_dominates_theorem2", _corollary5_dominates, False),
    ("bound", "pure_sup_bracket", _hp_bracket, False),
    ("roof", "roof_feasibility", _roof_feasibility, False),
    ("roof", "roof_convexity", _roof_convexity, True),
    ("roof", "eof_pure_state", _eof_pure, False),
]


def run_suite(suite: str = "all", seed: int = 0, samples: int = 100,
              tol: tolerances.Tolerances | None = None) -> VerificationReport:
    """Run one suite (or ``"all"``) and collect per-check worst violations."""
    if suite != "all" and suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; expected one of {SUITES + ('all',)}")
    tol = tol or tolerances.Tolerances.from_env()
    checks = []
    for idx, (s, name, fn, statistical) in enumerate(CHECKS):
        if suite not in ("all", s):
            continue
        rng = make_rng(np.random.SeedSequence(seed, spawn_key=(idx,)))
        acc, limit = fn(rng, samples, tol)
        worst = acc.worst if acc.n else 0.0
        checks.append(Check(name=name, suite=s, samples=acc.n, max_violation=worst,
                            tolerance=limit, passed=bool(worst <= limit),
                            statistical=statistical))
    return VerificationReport(suite=suite, seed=seed, samples=samples, tolerance=tol.num,
                              checks=checks, passed=all(c.passed for c in checks))

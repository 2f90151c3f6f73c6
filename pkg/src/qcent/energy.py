"""Hamiltonian spectra, Gibbs states and the energy-entropy functions.

A spectrum is either an explicit nondecreasing list of levels with a declared
tail model, or a multimode harmonic oscillator whose levels
``sum_i hw_i (n_i + 1/2)`` are enumerated on demand. Partition sums are always
truncated; the truncation is accepted only when the neglected tail is
certified below ``tail_tol`` relative to the retained sum:

* ``explicit`` + ``"finite"``: the list *is* the spectrum, tail is zero.
* ``explicit`` + ``"geometric-gap"``: levels beyond the list are assumed to be
  at least ``gap`` apart (multiplicity one), giving a geometric tail bound.
* ``oscillator``: the tail is bounded by a Chernoff estimate built from the
  product-form generating function. ``cutoff``, if given, caps
  materialization; otherwise the cutoff grows until the tail is certified or
  ``max_levels`` is hit.

To treat a truncated oscillator as a finite system in its own right, build an
explicit finite spectrum from :func:`generate_levels`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import tolerances as tol
from .core import eta, g_function
from .errors import (
    BelowD0,
    CutoffTooLow,
    EmptyIndexSet,
    HorizonNotReached,
    OutOfRange,
    TailNotControlled,
    ZeroDenominator,
)

__all__ = [
    "HamiltonianSpectrum",
    "EnergyProfile",
    "generate_levels",
    "partition_function",
    "mean_energy",
    "gibbs_parameter",
    "gibbs_weights",
    "gibbs_state",
    "ground_population",
    "F_H",
    "F_bar",
    "F_hat_star",
    "gamma_of_d",
    "minimal_d0",
    "bd_ratio",
    "oscillator_F_bar",
    "oscillator_constants",
    "audit_f_hat",
]

TAIL_MODELS = ("finite", "geometric-gap")


@dataclass(frozen=True)
class HamiltonianSpectrum:
    kind: str
    levels: tuple = ()
    tail: str = "finite"
    gap: float | None = None
    hbar_omega: tuple = ()
    cutoff: float | None = None

    def __post_init__(self):
        if self.kind == "explicit":
            lv = np.asarray(self.levels, dtype=float)
            if lv.ndim != 1 or lv.size == 0 or not np.all(np.isfinite(lv)):
                raise ValueError("explicit spectrum needs a nonempty finite list of levels")
            if np.any(np.diff(lv) < 0):
                raise ValueError("levels must be nondecreasing")
            if self.tail not in TAIL_MODELS:
                raise ValueError(f"tail model must be one of {TAIL_MODELS}")
            if self.tail == "geometric-gap" and not (self.gap and self.gap > 0):
                raise ValueError("geometric-gap tail needs a positive gap")
        elif self.kind == "oscillator":
            w = np.asarray(self.hbar_omega, dtype=float)
            if w.ndim != 1 or w.size == 0 or np.any(w <= 0):
                raise ValueError("oscillator needs positive frequencies")
        else:
            raise ValueError(f"unknown spectrum kind {self.kind!r}")

    @classmethod
    def explicit(cls, levels, tail: str = "finite", gap: float | None = None):
        return cls(kind="explicit", levels=tuple(float(x) for x in levels), tail=tail, gap=gap)

    @classmethod
    def oscillator(cls, hbar_omega, cutoff: float | None = None):
        if np.isscalar(hbar_omega):
            hbar_omega = (hbar_omega,)
        return cls(kind="oscillator", hbar_omega=tuple(float(x) for x in hbar_omega),
                   cutoff=cutoff)

    @property
    def ground_energy(self) -> float:
        if self.kind == "explicit":
            return self.levels[0]
        return 0.5 * sum(self.hbar_omega)

    @property
    def is_finite(self) -> bool:
        return self.kind == "explicit" and self.tail == "finite"


def _oscillator_levels(omegas, cutoff: float) -> np.ndarray:
    e0 = 0.5 * sum(omegas)
    slack = 1e-12 * max(abs(cutoff), 1.0)
    partial = np.array([e0])
    for w in omegas:
        nmax = int(math.floor((cutoff - e0) / w + 1e-12)) if cutoff >= e0 else -1
        if nmax < 0:
            return np.empty(0)
        cand = (partial[:, None] + w * np.arange(nmax + 1)[None, :]).ravel()
        partial = cand[cand <= cutoff + slack]
    return np.sort(partial)


def _chernoff_tail(omegas, rate: float, c: float) -> float:
    """Upper bound on ``sum_{E > c} exp(-rate E)`` over shifted oscillator levels.

    For any ``0 < s < rate`` the sum is at most
    ``exp(-s c) prod_i 1 / (1 - exp(-(rate - s) w_i))``; ``s`` is optimized.
    """
    if rate <= 0:
        return math.inf

    def log_bound(s):
        return -s * c - sum(math.log(-math.expm1(-(rate - s) * w)) for w in omegas)

    res = minimize_scalar(log_bound, bounds=(0.0, rate * (1.0 - 1e-9)), method="bounded",
                          options={"xatol": 1e-12 * rate})
    return math.exp(min(float(res.fun), log_bound(0.5 * rate), 700.0))


def generate_levels(spectrum: HamiltonianSpectrum, energy_cutoff: float) -> np.ndarray:
    """All levels ``<= energy_cutoff``, sorted, with multiplicity."""
    if spectrum.kind == "explicit":
        lv = np.asarray(spectrum.levels, dtype=float)
        out = lv[lv <= energy_cutoff + 1e-12 * max(abs(energy_cutoff), 1.0)]
    else:
        out = _oscillator_levels(spectrum.hbar_omega, energy_cutoff)
    if out.size == 0:
        raise CutoffTooLow(f"no level below cutoff {energy_cutoff}")
    return out


@dataclass
class _Stats:
    lam: float
    shifted: np.ndarray     # materialized E_k - E0
    log_z_shift: float      # ln sum exp(-lam * shifted)
    mean_shift: float


@dataclass
class EnergyProfile:
    """Spectrum plus write-once caches of partition data.

    Cached entries are pure functions of their key, so concurrent population
    is harmless.
    """

    spectrum: HamiltonianSpectrum
    tail_tol: float = tol.TAIL
    root_tol: float = tol.ROOT
    max_levels: int = 2_000_000
    _levels: np.ndarray | None = field(default=None, repr=False)
    _levels_cutoff: float = field(default=-math.inf, repr=False)
    _stats: dict = field(default_factory=dict, repr=False)
    _lam: dict = field(default_factory=dict, repr=False)
    _fbar: dict = field(default_factory=dict, repr=False)

    @property
    def E0(self) -> float:
        return self.spectrum.ground_energy

    @property
    def ground_multiplicity(self) -> int:
        lv = self._levels_upto(self.E0)
        return int(np.sum(lv <= self.E0 + 1e-12 * max(abs(self.E0), 1.0)))

    # -- materialization ---------------------------------------------------
    def _levels_upto(self, cutoff: float) -> np.ndarray:
        sp = self.spectrum
        if sp.kind == "explicit":
            return np.asarray(sp.levels, dtype=float)
        if cutoff > self._levels_cutoff:
            lv = _oscillator_levels(sp.hbar_omega, cutoff)
            self._levels, self._levels_cutoff = lv, cutoff
        lv = self._levels
        return lv[: np.searchsorted(lv, cutoff, side="right")]

    def _tail_ok(self, shifted, lam, z, ez, cutoff_shift) -> bool:
        sp = self.spectrum
        if sp.kind == "explicit":
            if sp.tail == "finite":
                return True
            last = float(shifted[-1])
            g = sp.gap
            q = math.exp(-lam * g)
            first = last + g
            if first < 1.0 / lam:
                return False  # x exp(-lam x) not yet decreasing
            base = math.exp(-lam * last)
            z_tail = base * q / (1.0 - q)
            ez_tail = base * (last * q / (1.0 - q) + g * q / (1.0 - q) ** 2)
        else:
            c = float(cutoff_shift)
            z_tail = _chernoff_tail(sp.hbar_omega, lam, c)
            # x <= exp(x/c) * c/e turns the energy tail into a partition tail
            ez_tail = (c / math.e) * _chernoff_tail(sp.hbar_omega, lam - 1.0 / c, c) \
                if lam * c > 1.0 else math.inf
        return z_tail <= self.tail_tol * z and ez_tail <= self.tail_tol * max(ez, 1e-300)

    def stats(self, lam: float) -> _Stats:
        if not lam > 0:
            raise OutOfRange(f"lambda = {lam!r} must be positive")
        hit = self._stats.get(lam)
        if hit is not None:
            return hit
        sp = self.spectrum
        e0 = self.E0
        if sp.kind == "explicit":
            cutoffs = [math.inf]
        elif sp.cutoff is not None:
            cutoffs = [sp.cutoff]
        else:
            guess = (math.log(1.0 / self.tail_tol) + 2.0
                     + sum(math.log1p(1.0 / (lam * w)) for w in sp.hbar_omega)) / lam
            c = max(guess, 4.0 * max(sp.hbar_omega))
            cutoffs = [e0 + c * 1.2 ** i for i in range(80)]
        for cutoff in cutoffs:
            lv = self._levels_upto(cutoff)
            if lv.size > self.max_levels:
                break
            shifted = lv - e0
            wts = np.exp(-lam * shifted)
            z = float(wts.sum())
            ez = float(np.dot(wts, shifted))
            if self._tail_ok(shifted, lam, z, ez, cutoff - e0):
                st = _Stats(lam, shifted, math.log(z), ez / z)
                self._stats[lam] = st
                return st
        raise TailNotControlled(
            f"partition sum at lambda={lam:.3e} not certified within {self.tail_tol:.1e}")

    def ceiling(self) -> float:
        """Supremum of Gibbs mean energies (finite spectra only; else +inf)."""
        if self.spectrum.is_finite:
            return float(np.mean(self.spectrum.levels))
        return math.inf


def partition_function(profile: EnergyProfile, lam: float) -> float:
    """``Tr exp(-lam H)`` from a certified truncated sum."""
    st = profile.stats(lam)
    return math.exp(st.log_z_shift - lam * profile.E0)


def mean_energy(profile: EnergyProfile, lam: float) -> float:
    return profile.E0 + profile.stats(lam).mean_shift


def gibbs_parameter(profile: EnergyProfile, E: float) -> float:
    """Inverse temperature ``lam(E)`` at which the Gibbs mean energy equals ``E``.

    Raises :class:`OutOfRange` for ``E <= E0`` and, on finite spectra, for
    ``E`` at or above the infinite-temperature mean energy.
    """
    e_bar = E - profile.E0
    if not e_bar > 0:
        raise OutOfRange(f"E = {E!r} must exceed the ground energy {profile.E0!r}")
    if e_bar >= (profile.ceiling() - profile.E0) * (1.0 - 1e-12):
        raise OutOfRange(f"E = {E!r} is not below the truncation ceiling {profile.ceiling()!r}")
    hit = profile._lam.get(E)
    if hit is not None:
        return hit

    if profile.spectrum.kind == "oscillator":
        def f(lam):
            return float(np.sum(_mode_occupations(profile.spectrum.hbar_omega, lam)
                                * np.asarray(profile.spectrum.hbar_omega))) - e_bar
    else:
        def f(lam):
            return profile.stats(lam).mean_shift - e_bar

    guess = 1.0 / e_bar
    lo = hi = guess
    while f(hi) > 0:
        hi *= 2.0
    while f(lo) < 0:
        lo *= 0.5
        if lo < 1e-300:  # pragma: no cover - guarded by ceiling check
            raise OutOfRange("could not bracket lambda(E)")
    if lo == hi:
        lam = lo
    else:
        lam = brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    profile._lam[E] = lam
    return lam


def gibbs_weights(profile: EnergyProfile, E: float):
    """Levels and Gibbs probabilities of the truncated Gibbs state at mean energy ``E``."""
    e_bar = E - profile.E0
    if e_bar < 0:
        raise OutOfRange(f"E = {E!r} below ground energy")
    if e_bar == 0:
        lv = profile._levels_upto(profile.E0)
        m = profile.ground_multiplicity
        p = np.zeros(lv.size)
        p[:m] = 1.0 / m
        return lv, p
    if profile.spectrum.is_finite and e_bar >= profile.ceiling() - profile.E0:
        lv = np.asarray(profile.spectrum.levels, dtype=float)
        return lv, np.full(lv.size, 1.0 / lv.size)
    lam = gibbs_parameter(profile, E)
    st = profile.stats(lam)
    w = np.exp(-lam * st.shifted - st.log_z_shift)
    return st.shifted + profile.E0, w


def gibbs_state(profile: EnergyProfile, E: float) -> np.ndarray:
    """Diagonal Gibbs density matrix in the level basis."""
    _, p = gibbs_weights(profile, E)
    return np.diag(p).astype(complex)


def _mode_occupations(omegas, lam: float) -> np.ndarray:
    """Bose occupation numbers ``1 / (exp(lam w) - 1)`` of independent modes."""
    with np.errstate(over="ignore"):  # huge lam just means empty modes
        return 1.0 / np.expm1(lam * np.asarray(omegas, dtype=float))


def ground_population(profile: EnergyProfile, E: float) -> float:
    """Weight of the lowest level in the Gibbs state at mean energy ``E``."""
    spec = profile.spectrum
    if spec.kind == "oscillator" and E > profile.E0:
        n = _mode_occupations(spec.hbar_omega, gibbs_parameter(profile, E))
        return float(np.prod(1.0 / (1.0 + n)))
    return float(gibbs_weights(profile, E)[1][0])


def F_H(profile: EnergyProfile, E: float) -> float:
    """Maximal entropy of states with mean energy at most ``E`` (the Gibbs entropy).

    For oscillators the Gibbs state is a product of thermal modes, so the
    entropy is ``sum_i g(N_i)`` with no level enumeration; that keeps very
    large energies cheap.
    """
    sp = profile.spectrum
    if sp.kind == "oscillator" and E > profile.E0:
        lam = gibbs_parameter(profile, E)
        return float(sum(g_function(float(n)) for n in _mode_occupations(sp.hbar_omega, lam)))
    _, p = gibbs_weights(profile, E)
    return float(eta(p).sum())


def F_bar(profile: EnergyProfile, E: float) -> float:
    """``F_H(E + E0)`` for ``E >= 0``."""
    if E < 0:
        raise OutOfRange(f"E = {E!r} < 0")
    hit = profile._fbar.get(E)
    if hit is None:
        hit = profile._fbar[E] = F_H(profile, E + profile.E0)
    return hit


def F_hat_star(profile: EnergyProfile, E: float, ratio: float = 1.25,
               budget: int = 200, patience: int = 10) -> float:
    """Minimal admissible envelope ``sqrt(E) sup_{E' >= E} F_bar(E') / sqrt(E')``.

    The supremum is scanned on the geometric grid ``E * ratio**j`` until the
    ratio has decreased ``patience`` times in a row, then the best grid cell
    is refined by a bounded scalar maximization. ``F_hat_star(0)`` is
    ``F_bar(0)``, its limit.
    """
    if E < 0:
        raise OutOfRange(f"E = {E!r} < 0")
    if E == 0:
        return F_bar(profile, 0.0)

    def r(x):
        return F_bar(profile, x) / math.sqrt(x)

    best_j, best = 0, r(E)
    prev, streak = best, 0
    grid = [E]
    for j in range(1, budget):
        x = E * ratio ** j
        grid.append(x)
        v = r(x)
        if v > best:
            best_j, best = j, v
        streak = streak + 1 if v < prev else 0
        prev = v
        if streak >= patience:
            break
    else:
        raise HorizonNotReached(
            f"F_bar/sqrt(E) not certified decreasing within {budget} grid points from E={E}")
    lo = grid[max(best_j - 1, 0)]
    hi = grid[best_j + 1]
    res = minimize_scalar(lambda x: -r(x), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10 * hi})
    best = max(best, -float(res.fun))
    return math.sqrt(E) * best


def minimal_d0(f_hat: Callable[[float], float]) -> int:
    """Smallest integer ``d`` with ``ln d > f_hat(0)``."""
    f0 = f_hat(0.0)
    d = max(int(math.ceil(math.exp(f0))), 1)
    while not math.log(d) > f0:
        d += 1
    return d


def gamma_of_d(f_hat: Callable[[float], float], d: int, f0: float | None = None) -> float:
    """Energy at which the increasing envelope ``f_hat`` reaches ``ln d``."""
    target = math.log(d)
    if f0 is None:
        f0 = f_hat(0.0)
    if not target > f0:
        raise BelowD0(f"ln {d} = {target:.6g} does not exceed f_hat(0) = {f0:.6g}")
    hi = 1.0
    while f_hat(hi) < target:
        hi *= 2.0
        if hi > 1e300:  # pragma: no cover
            raise OutOfRange("f_hat does not reach ln d")
    return brentq(lambda x: f_hat(x) - target, 0.0, hi, xtol=1e-14, rtol=1e-14, maxiter=500)


def bd_ratio(profile: EnergyProfile, E: float) -> float:
    """``sum E_k^2 / sum E_k E_j`` over all level pairs with ``E_k + E_j <= E``."""
    e0 = profile.E0
    reach = E - e0
    sp = profile.spectrum
    if sp.kind == "explicit" and not sp.is_finite and reach > sp.levels[-1]:
        raise TailNotControlled("index set extends past the explicitly listed levels")
    lv = profile._levels_upto(reach)
    lv = lv[lv <= reach + 1e-12 * max(abs(reach), 1.0)]
    slack = 1e-12 * max(abs(E), 1.0)
    cnt = np.searchsorted(lv, E - lv + slack, side="right")
    if cnt.sum() == 0:
        raise EmptyIndexSet(f"no level pair with E_k + E_j <= {E}")
    prefix = np.concatenate([[0.0], np.cumsum(lv)])
    n_up = float(np.dot(lv ** 2, cnt))
    n_down = float(np.dot(lv, prefix[cnt]))
    if n_down == 0:
        raise ZeroDenominator("all admissible levels are zero")
    return n_up / n_down


def oscillator_constants(hbar_omega):
    """``(l, E0, E_*)`` for an ``l``-mode oscillator."""
    w = np.atleast_1d(np.asarray(hbar_omega, dtype=float))
    ell = w.size
    return ell, 0.5 * float(w.sum()), float(np.exp(np.mean(np.log(w))))


def oscillator_F_bar(ell: int, hbar_omega, E: float) -> float:
    """Closed-form upper envelope ``l ln((E + 2 E0) / (l E_*)) + l`` of ``F_bar``."""
    if E < 0:
        raise OutOfRange(f"E = {E!r} < 0")
    n, e0, e_star = oscillator_constants(hbar_omega)
    if n != ell:
        raise ValueError(f"got {n} frequencies for {ell} modes")
    return ell * math.log((E + 2.0 * e0) / (ell * e_star)) + ell


def audit_f_hat(f_hat: Callable[[float], float], energies, profile: EnergyProfile | None = None,
                atol: float = tol.NUM) -> dict:
    """Numeric audit of an envelope on sampled energies.

    Checks strict increase and nonincreasing ``f_hat(E)/sqrt(E)`` on the
    sorted samples, and dominance over ``F_bar`` when a profile is given.
    Returns the worst violation of each clause.
    """
    e = np.sort(np.asarray(energies, dtype=float))
    if e.size < 2 or e[0] <= 0:
        raise ValueError("need at least two positive energies")
    v = np.array([f_hat(x) for x in e])
    ratio = v / np.sqrt(e)
    inc = float(max(0.0, np.max(v[:-1] - v[1:]))) if np.any(np.diff(v) <= 0) else 0.0
    strict_fail = bool(np.any(np.diff(v) <= 0))
    dec = float(max(0.0, np.max(ratio[1:] - ratio[:-1])))
    out = {"increasing_violation": inc, "strict_increase": not strict_fail,
           "ratio_violation": dec}
    if profile is not None:
        fb = np.array([F_bar(profile, x) for x in e])
        out["dominance_violation"] = float(max(0.0, np.max(fb - v)))
    out["passed"] = (not strict_fail and dec <= atol
                     and out.get("dominance_violation", 0.0) <= atol)
    return out

"""Continuity bounds for output entropies and PFE criteria for Kraus families.

Bounds implemented:

* :func:`audenaert_bound` - sharp Fannes-type bound in finite dimension.
* :func:`afw_bound` - ``eps * range + g(eps)`` for maps with bounded output entropy.
* :func:`theorem2_bound` - energy-constrained bound for any PFE map, with the
  free parameter ``t`` chosen by the caller or by :func:`optimize_t`.
* :func:`corollary5_bound` - the same for multimode oscillators with the
  closed-form envelope.

Every bound takes ``Hp_max``, the supremum of the output entropy over pure
inputs. It must be an *upper* bound on that supremum for the bound to hold;
:func:`estimate_Hp_max` produces certified upper values and a numerical lower
value for reporting.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .channels import KrausChannel, choi_rank, pure_output_entropy
from .core import binary_entropy, eta, extended_shannon_entropy, g_function
from .energy import EnergyProfile, F_H, gamma_of_d, ground_population, minimal_d0, oscillator_constants
from .errors import OutOfRange, TailNotControlled, TOutOfRange

__all__ = [
    "audenaert_bound",
    "afw_bound",
    "BoundRequest",
    "BoundResult",
    "theorem2_bound",
    "optimize_t",
    "corollary5_bound",
    "tightness_witness",
    "golden_section_min",
    "HpMaxEstimate",
    "estimate_Hp_max",
    "TailModel",
    "SumCertificate",
    "certify_sum",
    "KrausFamily",
    "example1_family",
    "finite_family",
    "corollary1_check",
]

T_MIN = 1e-6
GRID_POINTS = 64


def audenaert_bound(d: int, eps: float) -> float:
    """``eps ln(d - 1) + h2(eps)``, valid for ``0 <= eps <= 1 - 1/d``."""
    if d < 2:
        raise OutOfRange("dimension must be at least 2")
    if eps < 0 or eps > 1.0 - 1.0 / d + 1e-15:
        raise OutOfRange(f"eps = {eps!r} outside [0, 1 - 1/d] for d = {d}")
    eps = min(eps, 1.0 - 1.0 / d)
    return eps * math.log(d - 1) + binary_entropy(eps)


def afw_bound(h_range: float, eps: float) -> float:
    """``eps * h_range + g(eps)`` for output entropies spanning ``h_range``."""
    if not 0.0 <= eps <= 1.0:
        raise OutOfRange(f"eps = {eps!r} not in [0, 1]")
    if h_range < 0:
        raise OutOfRange("entropy range must be nonnegative")
    return eps * h_range + g_function(eps)


@dataclass(frozen=True)
class BoundRequest:
    """Inputs of the energy-constrained bound.

    ``F_hat`` must be an admissible envelope of ``F_bar`` (continuous,
    increasing, ``F_hat(E)/sqrt(E)`` nonincreasing). ``d0`` defaults to the
    smallest integer with ``ln d0 > F_hat(0)``.
    """

    epsilon: float
    E: float
    E0: float
    F_hat: Callable[[float], float]
    Hp_max: float = 0.0
    d0: int | None = None
    t: float | None = None


@dataclass
class BoundResult:
    value: float
    t_used: float
    T: float
    terms: dict
    delta: float
    d0: int | None = None
    flags: dict = field(default_factory=dict)


@dataclass(frozen=True)
class _Setup:
    eps: float
    e_bar: float
    d0: int
    gamma_d0: float
    T: float
    delta: float


def _hp_value(hp) -> float:
    val = getattr(hp, "upper", hp)
    val = float(val)
    if not (val >= 0 and math.isfinite(val)):
        raise OutOfRange(f"Hp_max must be a finite nonnegative upper bound, got {val!r}")
    return val


def _setup(req: BoundRequest) -> _Setup:
    eps = float(req.epsilon)
    if not 0.0 < eps <= 1.0:
        raise OutOfRange(f"epsilon = {eps!r} not in (0, 1]")
    e_bar = req.E - req.E0
    if not e_bar > 0:
        raise OutOfRange(f"E - E0 = {e_bar!r} must be positive")
    f0 = req.F_hat(0.0)
    d0 = req.d0 if req.d0 is not None else minimal_d0(req.F_hat)
    gam = gamma_of_d(req.F_hat, d0, f0=f0)
    T = min(1.0, math.sqrt(e_bar / gam)) / eps
    delta = _hp_value(req.Hp_max) + 1.0 / d0 + math.log(2.0)
    return _Setup(eps, e_bar, d0, gam, T, delta)


def _rhs(eps: float, t: float, f_val: float, delta: float):
    main = eps * (1.0 + 4.0 * t) * (f_val + delta)
    two_g = 2.0 * g_function(eps * t)
    g_tail = g_function(eps * (1.0 + 2.0 * t))
    return main, two_g, g_tail


def _check_t(t: float, T: float) -> None:
    if not (T_MIN <= t <= T * (1.0 + 1e-12)):
        raise TOutOfRange(f"t = {t!r} outside [{T_MIN}, T = {T!r}]")


def _theorem2_at(req: BoundRequest, s: _Setup, t: float) -> BoundResult:
    _check_t(t, s.T)
    f_val = req.F_hat(s.e_bar / (s.eps * t) ** 2)
    main, two_g, g_tail = _rhs(s.eps, t, f_val, s.delta)
    return BoundResult(
        value=main + two_g + g_tail, t_used=t, T=s.T,
        terms={"main": main, "two_g": two_g, "g_tail": g_tail, "F_hat": f_val},
        delta=s.delta, d0=s.d0,
        flags={"t_at_T": math.isclose(t, s.T, rel_tol=1e-12)},
    )


def theorem2_bound(req: BoundRequest) -> BoundResult:
    """Energy-constrained continuity bound at ``req.t`` (optimized when ``t`` is None).

    ``eps (1 + 4t) (F_hat(Ebar / (eps t)^2) + Delta) + 2 g(eps t) + g(eps (1 + 2t))``
    with ``Delta = Hp_max + 1/d0 + ln 2`` and ``t`` in ``(0, T]``,
    ``T = min(1, sqrt(Ebar / gamma(d0))) / eps``.
    """
    s = _setup(req)
    if req.t is None:
        return _optimize(lambda t: _theorem2_at(req, s, t), s.T)
    return _theorem2_at(req, s, float(req.t))


def golden_section_min(f: Callable[[float], float], a: float, b: float,
                       tol: float = 1e-10, maxiter: int = 200):
    """Golden-section search for a minimum of ``f`` on ``[a, b]``; returns ``(x, f(x))``."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(maxiter):
        if abs(b - a) <= tol * max(1.0, abs(a) + abs(b)):
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def _optimize(evaluate: Callable[[float], BoundResult], T: float) -> BoundResult:
    # log grid first: unimodality in t is not proven
    if T < T_MIN:
        raise TOutOfRange(f"admissible range (0, {T!r}] lies below t = {T_MIN}")
    lo = max(T_MIN, T * 1e-6)
    grid = np.geomspace(lo, T, GRID_POINTS) if T > lo else np.array([T])
    grid[-1] = T
    results = [evaluate(float(t)) for t in grid]
    vals = [r.value for r in results]
    i = int(np.argmin(vals))
    best = results[i]
    if grid.size > 1:
        a = math.log(grid[max(i - 1, 0)])
        b = math.log(grid[min(i + 1, grid.size - 1)])
        x, _ = golden_section_min(lambda u: evaluate(min(math.exp(u), T)).value, a, b, tol=1e-12)
        refined = evaluate(min(math.exp(x), T))
        if refined.value < best.value:
            best = refined
    best.flags["optimized"] = True
    return best


def optimize_t(req: BoundRequest) -> BoundResult:
    """Minimize the energy-constrained bound over ``t`` in ``(0, T]``."""
    s = _setup(req)
    return _optimize(lambda t: _theorem2_at(req, s, t), s.T)


def corollary5_bound(ell: int, hbar_omega, E: float, eps: float, t: float | None = None,
                     Hp_max=0.0) -> BoundResult:
    """Energy-constrained bound for an ``ell``-mode oscillator input.

    Uses ``Delta* = Hp_max + exp(-ell) + ln 2`` and ``T* = min(1, sqrt(Ebar/E0)) / eps``.
    """
    n, e0, e_star = oscillator_constants(hbar_omega)
    if n != ell:
        raise ValueError(f"got {n} frequencies for {ell} modes")
    if not 0.0 < eps <= 1.0:
        raise OutOfRange(f"epsilon = {eps!r} not in (0, 1]")
    e_bar = E - e0
    if not e_bar > 0:
        raise OutOfRange(f"E - E0 = {e_bar!r} must be positive")
    T = min(1.0, math.sqrt(e_bar / e0)) / eps
    delta = _hp_value(Hp_max) + math.exp(-ell) + math.log(2.0)

    def at(tt: float) -> BoundResult:
        _check_t(tt, T)
        x = e_bar / (eps * tt) ** 2
        f_val = ell * math.log((x + 2.0 * e0) / (ell * e_star)) + ell
        main, two_g, g_tail = _rhs(eps, tt, f_val, delta)
        return BoundResult(value=main + two_g + g_tail, t_used=tt, T=T,
                           terms={"main": main, "two_g": two_g, "g_tail": g_tail, "F_hat": f_val},
                           delta=delta, flags={"t_at_T": math.isclose(tt, T, rel_tol=1e-12)})

    if t is None:
        return _optimize(at, T)
    return at(float(t))


def tightness_witness(profile: EnergyProfile, E: float, eps: float,
                      F_hat: Callable[[float], float]) -> dict:
    """Entropy gap of an explicit pair against the optimized bound for the identity map.

    The pair is the ground state ``rho`` and ``sigma = (1 - eps) rho + eps gamma(E')``
    with ``E' = E0 + (E - E0) / eps``, so both have energy at most ``E`` and
    their trace distance is ``eps (1 - g0)`` with ``g0`` the ground weight of
    ``gamma(E')``. This is a one-sided search: the ratio is a lower estimate
    of how tight the bound is, not a statement about its limit.
    """
    e0 = profile.E0
    e_w = e0 + (E - e0) / eps
    g0 = ground_population(profile, e_w)
    p0 = 1.0 - eps + eps * g0
    gap = float(eta(p0)) - eps * (1.0 - g0) * math.log(eps) + eps * (F_H(profile, e_w) - float(eta(g0)))
    bound = theorem2_bound(BoundRequest(eps, E, e0, F_hat, 0.0))
    return {"gap": gap, "bound": bound.value, "ratio": gap / bound.value,
            "distance": eps * (1.0 - g0), "E_witness": e_w, "t_used": bound.t_used}


# --------------------------------------------------------------------------
# pure-state output entropy supremum


@dataclass
class HpMaxEstimate:
    lower: float
    upper: float
    witness: np.ndarray
    certificates: dict


def estimate_Hp_max(channel: KrausChannel, restarts: int = 8, seed: int = 0,
                    analytic_upper: float | None = None, maxiter: int = 200) -> HpMaxEstimate:
    """Bracket the supremum of the output entropy over pure inputs.

    ``lower`` is the best value found by multi-start local search over the
    unit sphere (starting from basis vectors, the uniform superposition and
    seeded random vectors). ``upper`` is the smallest available certificate:
    ``ln(choi_rank)``, ``S({||V_k||^2})``, ``ln(d_out)`` and any caller-supplied
    analytic value.
    """
    d = channel.input_dim
    rng = np.random.default_rng(seed)

    def value(x):
        psi = x[:d] + 1j * x[d:]
        nrm = np.linalg.norm(psi)
        if nrm == 0:
            return 0.0
        return pure_output_entropy(channel, psi / nrm)

    starts = [np.ones(d) / math.sqrt(d)]
    starts += [np.eye(d)[i] for i in range(min(d, 4))]
    starts += [rng.standard_normal(d) + 1j * rng.standard_normal(d) for _ in range(restarts)]
    best_val, best_psi = -1.0, None
    for psi0 in starts:
        x0 = np.concatenate([np.real(psi0), np.imag(psi0)]).astype(float)
        v0 = value(x0)
        res = minimize(lambda x: -value(x), x0, method="L-BFGS-B",
                       options={"maxiter": maxiter})
        cand = [(v0, x0), (-float(res.fun), res.x)]
        for v, x in cand:
            if v > best_val:
                psi = x[:d] + 1j * x[d:]
                best_val, best_psi = v, psi / np.linalg.norm(psi)

    certs = {"choi_rank_log": math.log(choi_rank(channel)),
             "output_dim_log": math.log(channel.output_dim)}
    norms_sq = [float(np.linalg.norm(v, 2) ** 2) for v in channel.kraus]
    certs["kraus_norms"] = extended_shannon_entropy(norms_sq)
    if analytic_upper is not None:
        certs["analytic"] = float(analytic_upper)
    upper = min(certs.values())
    return HpMaxEstimate(lower=max(best_val, 0.0), upper=upper, witness=best_psi,
                         certificates=certs)


# --------------------------------------------------------------------------
# certified infinite sums and the Kraus-family criteria


@dataclass(frozen=True)
class TailModel:
    """Declared behaviour of terms ``x_k`` for ``k >= start``.

    ``direction="upper"`` asserts ``x_k <= C k^-p`` (p-series) or
    ``x_k <= C r^k`` (geometric); ``direction="lower"`` asserts the reverse
    inequality and is used to certify divergence of p-series with ``p <= 1``.
    """

    kind: str
    p: float | None = None
    r: float | None = None
    constant: float = 1.0
    start: int = 1
    direction: str = "upper"

    def __post_init__(self):
        if self.kind not in ("finite", "p-series", "geometric"):
            raise ValueError(f"unknown tail model {self.kind!r}")
        if self.kind == "p-series" and (self.p is None or self.p <= 0):
            raise ValueError("p-series needs p > 0")
        if self.kind == "geometric" and (self.r is None or not 0 < self.r < 1):
            raise ValueError("geometric tail needs 0 < r < 1")
        if self.direction not in ("upper", "lower"):
            raise ValueError("direction must be 'upper' or 'lower'")

    def envelope(self, k):
        k = np.asarray(k, dtype=float)
        if self.kind == "p-series":
            return self.constant * k ** (-self.p)
        return self.constant * self.r ** k


@dataclass(frozen=True)
class SumCertificate:
    partial: float
    remainder: float       # upper bound on the neglected tail, inf if divergent
    divergent: bool
    n_terms: int
    model: str

    @property
    def converges(self) -> bool:
        return not self.divergent and math.isfinite(self.remainder)

    @property
    def upper(self) -> float:
        return math.inf if self.divergent else self.partial + self.remainder


def _audit(terms: np.ndarray, ks: np.ndarray, model: TailModel) -> None:
    mask = ks >= model.start
    if not np.any(mask):
        return
    env = model.envelope(ks[mask])
    x = terms[mask]
    slack = 1e-12 * np.maximum(env, 1e-300)
    bad = x > env + slack if model.direction == "upper" else x < env - slack
    if np.any(bad):
        k = int(ks[mask][np.argmax(bad)])
        raise TailNotControlled(f"declared {model.kind} tail violated at k = {k}")


def _p_series_remainder(c: float, p: float, K: int) -> float:
    # sum_{k >= K} c k^-p <= c (K-1)^(1-p) / (p-1) for K >= 2
    return c * (K - 1) ** (1.0 - p) / (p - 1.0)


def certify_sum(term: Callable[[int], float], model: TailModel, n_explicit: int = 1000,
                count: int | None = None) -> SumCertificate:
    """Sum ``term(k)`` for ``k = 1, 2, ...`` with a certified remainder.

    Finite families (``count`` given, model ``finite``) are summed exactly.
    Otherwise the first ``n_explicit`` terms are summed and audited against
    the model, and the rest is bounded in closed form.
    """
    if model.kind == "finite":
        if count is None:
            raise TailNotControlled("finite tail model needs an explicit count")
        ks = np.arange(1, count + 1)
        vals = np.array([term(int(k)) for k in ks], dtype=float)
        return SumCertificate(float(vals.sum()), 0.0, False, count, "finite")
    K = max(n_explicit, model.start) + 1
    ks = np.arange(1, K)
    vals = np.array([term(int(k)) for k in ks], dtype=float)
    _audit(vals, ks, model)
    partial = float(vals.sum())
    if model.direction == "lower":
        if model.kind == "p-series" and model.p <= 1.0 and model.constant > 0:
            return SumCertificate(partial, math.inf, True, K - 1, "p-series lower")
        raise TailNotControlled("a lower tail model certifies divergence only for p-series with p <= 1")
    if model.kind == "p-series":
        if model.p <= 1.0:
            raise TailNotControlled("upper p-series model with p <= 1 does not control the tail")
        rem = _p_series_remainder(model.constant, model.p, K)
    else:
        rem = model.constant * model.r ** K / (1.0 - model.r)
    return SumCertificate(partial, rem, False, K - 1, f"{model.kind} upper")


def _eta_remainder(model: TailModel, K: int) -> float:
    """Upper bound on ``sum_{k >= K} eta(x_k)`` given ``x_k <= envelope(k)``."""
    c = model.constant
    if model.kind == "p-series":
        p = model.p
        x0 = K - 1.0
        # eta is increasing below 1/e and c x^-p (p ln x - ln c) decreases once p ln x - ln c > 1
        if c * x0 ** (-p) > 1.0 / math.e or p * math.log(x0) - math.log(c) <= 1.0:
            return math.inf
        a = x0 ** (1.0 - p)
        return c * (p * a * (math.log(x0) / (p - 1.0) + 1.0 / (p - 1.0) ** 2)
                    - math.log(c) * a / (p - 1.0))
    r = model.r
    if c * r ** K > 1.0 / math.e:
        return math.inf
    lr = -math.log(r)
    geo = r ** K / (1.0 - r)
    kgeo = r ** K * (K * (1.0 - r) + r) / (1.0 - r) ** 2
    return c * (lr * kgeo - math.log(c) * geo)


@dataclass(frozen=True)
class KrausFamily:
    """A finite or infinite sequence of Kraus operators described analytically.

    ``norm_sq(k)`` is ``||V_k||^2`` (``k`` from 1). ``truncate(n)`` returns a
    finite channel whose Kraus list starts with ``V_1, V_2, ...`` restricted
    to an ``n``-dimensional input space. Infinite families declare
    ``norm_sq_tail``.
    """

    name: str
    norm_sq: Callable[[int], float]
    truncate: Callable[[int], KrausChannel]
    count: int | None = None
    norm_sq_tail: TailModel | None = None


def finite_family(channel: KrausChannel, name: str = "finite") -> KrausFamily:
    norms = [float(np.linalg.norm(v, 2) ** 2) for v in channel.kraus]
    return KrausFamily(name=name, norm_sq=lambda k: norms[k - 1],
                       truncate=lambda n: channel, count=len(norms),
                       norm_sq_tail=TailModel("finite"))


def example1_family(alpha: float) -> KrausFamily:
    """Pinching family with weights ``alpha / ln k``; ``||V_1||^2 = 1`` in infinite dimension.

    Since ``ln k <= k``, ``alpha / ln k >= alpha / k`` for ``k >= 2``, which
    certifies divergence of ``sum ||V_k||^2`` against the harmonic series.
    """
    from .channels import example1_pinching

    def norm_sq(k: int) -> float:
        return 1.0 if k == 1 else alpha / math.log(k)

    return KrausFamily(name=f"example1(alpha={alpha})", norm_sq=norm_sq,
                       truncate=lambda n: example1_pinching(alpha, n), count=None,
                       norm_sq_tail=TailModel("p-series", p=1.0, constant=alpha, start=2,
                                              direction="lower"))


def _sampled_sup_entropy(channel: KrausChannel, samples: int, rng) -> float:
    d = channel.input_dim
    v = channel.stacked()
    best = 0.0
    for _ in range(samples):
        psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        psi /= np.linalg.norm(psi)
        w = np.sum(np.abs(v @ psi) ** 2, axis=1)
        best = max(best, extended_shannon_entropy(w))
    return best


def corollary1_check(family: KrausFamily, h: Callable[[int], float] | None = None,
                     h_tail: TailModel | None = None, n_explicit: int = 1000,
                     truncations=(16, 32, 64, 128), samples: int = 256, seed: int = 0) -> dict:
    """Evaluate the three sufficient PFE conditions for a Kraus family.

    Returns a dict keyed ``"a"``, ``"b"``, ``"c"``; each entry has
    ``verdict`` in {"pass", "fail", "inconclusive"}, ``certified`` and the
    supporting numbers.
    """
    rng = np.random.default_rng(seed)
    finite = family.count is not None
    report = {}

    # (b): sum of squared norms and their extended Shannon entropy
    cert = certify_sum(family.norm_sq, family.norm_sq_tail or TailModel("finite"),
                       n_explicit=n_explicit, count=family.count)
    b = {"sum_norm_sq": cert.upper, "partial": cert.partial, "n_terms": cert.n_terms,
         "model": cert.model}
    if cert.divergent:
        b.update(verdict="fail", certified=True, entropy=math.inf)
    else:
        ks = np.arange(1, cert.n_terms + 1)
        x = np.array([family.norm_sq(int(k)) for k in ks])
        eta_part = float(eta(x).sum())
        if finite:
            ent = extended_shannon_entropy(x)
            b.update(verdict="pass", certified=True, entropy=ent)
        else:
            rem = _eta_remainder(family.norm_sq_tail, cert.n_terms + 1)
            ok = math.isfinite(rem)
            # eta(sum) >= min over the certified interval of the total
            lo_tot, hi_tot = cert.partial, cert.upper
            eta_sum_lo = min(float(eta(lo_tot)), float(eta(hi_tot)))
            b.update(verdict="pass" if ok else "inconclusive", certified=ok,
                     entropy=eta_part + rem - eta_sum_lo if ok else math.inf)
    report["b"] = b

    # (c): ||sum h_k V_k^dagger V_k|| over growing truncations, plus sum exp(-h_k)
    if h is None:
        report["c"] = {"verdict": "inconclusive", "certified": False,
                       "reason": "no h sequence supplied"}
    else:
        sizes = [None] if finite else list(truncations)
        norms = []
        for n in sizes:
            ch = family.truncate(n if n is not None else 0)
            s = sum(h(k + 1) * (v.conj().T @ v) for k, v in enumerate(ch.kraus))
            norms.append(float(np.linalg.eigvalsh(0.5 * (s + s.conj().T))[-1]))
        monotone = all(b2 >= b1 - 1e-12 * max(1.0, abs(b1)) for b1, b2 in zip(norms, norms[1:]))
        plateau = finite or (len(norms) >= 2 and
                             abs(norms[-1] - norms[-2]) <= 1e-9 * max(1.0, abs(norms[-1])))
        exp_cert = certify_sum(lambda k: math.exp(-h(k)), h_tail or TailModel("finite"),
                               n_explicit=n_explicit, count=family.count)
        bounded = monotone and plateau and math.isfinite(norms[-1])
        ok = bounded and exp_cert.converges
        report["c"] = {"verdict": "pass" if ok else ("fail" if exp_cert.divergent else "inconclusive"),
                       "certified": ok or exp_cert.divergent,
                       "operator_norms": norms, "truncations": sizes,
                       "sum_exp_neg_h": exp_cert.upper, "exp_model": exp_cert.model}

    # (a): sup over the unit sphere of S({||V_k phi||^2})
    n_a = None if finite else max(truncations)
    sampled = _sampled_sup_entropy(family.truncate(n_a or 0), samples, rng)
    if finite:
        a = {"verdict": "pass", "certified": True, "bound": math.log(family.count)}
    elif report["c"]["verdict"] == "pass":
        a = {"verdict": "pass", "certified": True, "implied_by": "c"}
    elif report["b"]["verdict"] == "pass":
        a = {"verdict": "pass", "certified": True, "implied_by": "b"}
    else:
        a = {"verdict": "inconclusive", "certified": False}
    a["sampled_sup"] = sampled
    a["truncation"] = n_a
    report["a"] = a
    return report

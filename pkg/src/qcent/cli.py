"""``qcent`` command-line interface.

Every command prints one result. The default format is deterministic JSON
with floats written to 17 significant digits. Exit status is 0 on success,
1 when ``verify`` finds a failing check and 2 on input or numerical errors.
"""
from __future__ import annotations

import argparse
import math
import sys

from . import channels as ch
from . import io
from .bounds import (
    BoundRequest,
    afw_bound,
    audenaert_bound,
    corollary5_bound,
    estimate_Hp_max,
    theorem2_bound,
)
from .core import von_neumann_entropy
from .energy import (
    EnergyProfile,
    F_H,
    F_hat_star,
    gibbs_parameter,
    gibbs_weights,
    oscillator_F_bar,
    partition_function,
)
from .errors import QcentError
from .roof import roof_estimate
from .tolerances import Tolerances
from .verify import SUITES, run_suite


def _emit(result: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(io.dumps(result))
        return
    if "checks" in result:
        rows = result["checks"]
        header = ["suite", "name", "samples", "max_violation", "tolerance", "passed", "statistical"]
    else:
        flat = {}

        def walk(prefix, obj):
            for k, v in obj.items():
                key = f"{prefix}{k}"
                if isinstance(v, dict):
                    walk(key + ".", v)
                elif not isinstance(v, (list, tuple)):
                    flat[key] = v

        walk("", result)
        rows, header = [flat], list(flat)
    out.write(io.to_csv(rows, header) if fmt == "csv" else io.to_table(rows, header))


def _floats(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


# --------------------------------------------------------------------------
# commands


def cmd_entropy(args) -> dict:
    rho = io.parse_state(args.state)
    h = von_neumann_entropy(rho)
    res = {"entropy_nats": h}
    if args.bits:
        res["entropy_bits"] = h / math.log(2.0)
    return res


def cmd_channel_info(args) -> dict:
    chan = io.parse_channel(args.chan)
    rep = ch.validate(chan)
    hp = estimate_Hp_max(chan, restarts=args.restarts, seed=args.seed)
    return {
        "input_dim": chan.input_dim,
        "output_dim": chan.output_dim,
        "kind": chan.kind,
        "n_kraus": chan.n_kraus,
        "choi_rank": ch.choi_rank(chan),
        "validation": {"deviation": rep.deviation, "passed": rep.passed},
        "pure_output_entropy_sup": {"lower": hp.lower, "upper": hp.upper,
                                    "certificates": hp.certificates},
    }


def cmd_gibbs(args) -> dict:
    prof = EnergyProfile(io.parse_hamiltonian(args.spec))
    E = args.energy
    res = {"E": E, "E0": prof.E0}
    if E > prof.E0:
        lam = gibbs_parameter(prof, E)
        res["lambda"] = lam
        res["partition_function"] = partition_function(prof, lam)
    res["F_H"] = F_H(prof, E)
    if args.populations:
        levels, p = gibbs_weights(prof, E)
        keep = p > 1e-16
        res["levels"] = levels[keep].tolist()
        res["populations"] = p[keep].tolist()
    return res


def _bound_dict(r) -> dict:
    return {"value": r.value, "t_used": r.t_used, "T": r.T, "delta": r.delta,
            "d0": r.d0, "terms": r.terms}


def _hp_upper(args) -> tuple:
    if args.chan is None:
        return (args.hp_upper if args.hp_upper is not None else 0.0), "identity"
    chan = io.parse_channel(args.chan)
    est = estimate_Hp_max(chan, seed=args.seed, analytic_upper=args.hp_upper)
    return est.upper, "certified"


def cmd_bound(args) -> dict:
    kind = args.bound
    if kind == "audenaert":
        return {"value": audenaert_bound(args.dim, args.eps)}
    if kind == "afw":
        return {"value": afw_bound(args.range, args.eps)}
    hp, source = _hp_upper(args)
    if kind == "theorem2":
        spec = io.parse_hamiltonian(args.spec)
        prof = EnergyProfile(spec)
        if args.envelope == "oscillator":
            if spec.kind != "oscillator":
                raise QcentError("the oscillator envelope needs an oscillator Hamiltonian")
            ell = len(spec.hbar_omega)
            f_hat = lambda x: oscillator_F_bar(ell, spec.hbar_omega, x)
        else:
            f_hat = lambda x: F_hat_star(prof, x)
        r = theorem2_bound(BoundRequest(args.eps, args.E, prof.E0, f_hat, hp, t=args.t))
    else:
        omega = args.omega if len(args.omega) == args.modes else args.omega * args.modes
        r = corollary5_bound(args.modes, omega, args.E, args.eps, t=args.t, Hp_max=hp)
    res = _bound_dict(r)
    res["Hp_max_upper"] = hp
    res["Hp_max_source"] = source
    return res


def cmd_roof(args) -> dict:
    chan = io.parse_channel(args.chan)
    rho = io.parse_state(args.state)
    est = roof_estimate(chan, rho, m=args.m, restarts=args.restarts, seed=args.seed)
    ens = est.best_ensemble
    return {"value": est.value, "converged": est.converged, "restarts_used": est.restarts_used,
            "ensemble_size": int(ens.probabilities.size),
            "probabilities": ens.probabilities.tolist(),
            "output_entropy": von_neumann_entropy(ch.apply(chan, rho))}


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("json", "csv", "table"), default="json")
    p = argparse.ArgumentParser(prog="qcent", description="Entropy, channel and continuity-bound numerics.")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("entropy", parents=[fmt], help="von Neumann entropy of a state file")
    e.add_argument("state")
    e.add_argument("--bits", action="store_true", help="also report the value in bits")
    e.set_defaults(func=cmd_entropy)

    c = sub.add_parser("channel", help="channel utilities")
    csub = c.add_subparsers(dest="channel_command", required=True)
    ci = csub.add_parser("info", parents=[fmt], help="dimensions, Choi rank, validation")
    ci.add_argument("chan")
    ci.add_argument("--restarts", type=int, default=8)
    ci.add_argument("--seed", type=int, default=0)
    ci.set_defaults(func=cmd_channel_info)

    g = sub.add_parser("gibbs", parents=[fmt], help="Gibbs state data at mean energy E")
    g.add_argument("--spec", required=True)
    g.add_argument("--energy", type=float, required=True)
    g.add_argument("--populations", action="store_true")
    g.set_defaults(func=cmd_gibbs)

    b = sub.add_parser("bound", help="continuity bounds")
    bsub = b.add_subparsers(dest="bound", required=True)
    ba = bsub.add_parser("audenaert", parents=[fmt])
    ba.add_argument("--dim", type=int, required=True)
    ba.add_argument("--eps", type=float, required=True)
    bf = bsub.add_parser("afw", parents=[fmt])
    bf.add_argument("--range", type=float, required=True, help="H_max - H_min of the output entropy")
    bf.add_argument("--eps", type=float, required=True)
    bt = bsub.add_parser("theorem2", parents=[fmt], help="energy-constrained bound")
    bt.add_argument("--spec", required=True)
    bt.add_argument("--envelope", choices=("star", "oscillator"), default="star")
    bc = bsub.add_parser("corollary5", parents=[fmt], help="oscillator closed-form bound")
    bc.add_argument("--modes", type=int, required=True)
    bc.add_argument("--omega", type=_floats, required=True)
    for sp in (bt, bc):
        sp.add_argument("--eps", type=float, required=True)
        sp.add_argument("--E", type=float, required=True)
        sp.add_argument("--t", type=float, default=None, help="omit to optimize over t")
        sp.add_argument("--chan", default=None, help="channel file; default is the identity")
        sp.add_argument("--hp-upper", type=float, default=None,
                        help="known upper bound on the pure-state output entropy")
        sp.add_argument("--seed", type=int, default=0)
    for sp in (ba, bf, bt, bc):
        sp.set_defaults(func=cmd_bound)

    v = sub.add_parser("verify", parents=[fmt], help="run the verification harness")
    v.add_argument("--suite", choices=SUITES + ("all",), default="all")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--samples", type=int, default=100)
    v.set_defaults(func=None)

    r = sub.add_parser("roof", parents=[fmt], help="convex-roof estimate of the output entropy")
    r.add_argument("--chan", required=True)
    r.add_argument("--state", required=True)
    r.add_argument("--restarts", type=int, default=32)
    r.add_argument("--m", type=int, default=None, help="ensemble size")
    r.add_argument("--seed", type=int, default=0)
    r.set_defaults(func=cmd_roof)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = sys.stdout
    try:
        if args.command == "verify":
            report = run_suite(args.suite, seed=args.seed, samples=args.samples,
                               tol=Tolerances.from_env())
            _emit(report.to_dict(), args.format, out)
            return 0 if report.passed else 1
        _emit(args.func(args), args.format, out)
    except (QcentError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

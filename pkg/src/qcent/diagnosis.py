"""Class A/B/C diagnosis of structured channel families.

Class membership is a property of infinite-dimensional channels, so it can't
be decided from finite data. :func:`classify` applies analytic rules to
structured descriptors and otherwise runs a truncation probe that reports
how output entropy and entropy exchange grow along Gibbs inputs of
increasing energy. A probe alone only ever yields ``"inconclusive"``.

Rules:

* finite output dimension -> A
* finite Choi rank (identity, unitaries, any finite Kraus list) -> B
* nontrivial mixture of channels from different classes -> C
* tensor: A (x) A -> A, B (x) B -> B, different classes -> not PFE, and a
  factor that is a mixture of A and B channels makes the product not PFE
* composition: A o A -> A, B o B -> B
* complementary channel swaps A and B and keeps C
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .channels import KrausChannel, complementary_state, apply
from .core import von_neumann_entropy
from .energy import EnergyProfile, HamiltonianSpectrum, gibbs_parameter
from .errors import UnknownDescriptor

__all__ = ["ChannelDescriptor", "ClassDiagnosis", "classify", "truncation_probe"]

VERDICTS = ("class_A", "class_B", "class_C", "not_PFE", "inconclusive")
KINDS = (
    "finite-dim-output",
    "finite-choi-rank",
    "identity",
    "depolarizing",
    "pinching-family",
    "mixture-with-pure-state",
    "mixture",
    "tensor",
    "compose",
    "complementary",
    "explicit-truncated",
)


@dataclass(frozen=True)
class ChannelDescriptor:
    """Structured description of a (possibly infinite-dimensional) channel.

    ``params`` holds kind-specific data, e.g. ``{"output_dim": 4}``,
    ``{"p": 0.3}`` or ``{"weights": [...]}``; ``parts`` holds component
    descriptors for mixtures, tensor products and compositions (for
    ``compose`` the order is ``(second, first)``). ``truncate(n)`` returns the
    restriction to an ``n``-dimensional input space, used by the probe.
    """

    kind: str
    params: dict = field(default_factory=dict)
    parts: tuple = ()
    truncate: Callable[[int], KrausChannel] | None = None


@dataclass
class ClassDiagnosis:
    verdict: str
    evidence: list
    rule: str | None = None

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict != "inconclusive" and self.rule is None:
            raise ValueError("a definite verdict needs the analytic rule that produced it")


def _mixture_classes(parts, weights) -> list:
    classes = []
    for part, w in zip(parts, weights):
        if w > 0:
            classes.append(classify(part).verdict)
    return classes


def _is_ab_mixture(desc: ChannelDescriptor) -> bool:
    if desc.kind == "mixture-with-pure-state":
        return 0.0 < desc.params.get("p", 0.0) < 1.0
    if desc.kind == "mixture":
        weights = desc.params.get("weights", [1.0] * len(desc.parts))
        cls = set(_mixture_classes(desc.parts, weights))
        return {"class_A", "class_B"} <= cls
    return False


def truncation_probe(truncate: Callable[[int], KrausChannel], dim: int = 64,
                     offsets=(1.0, 2.0, 4.0, 8.0), hbar_omega: float = 1.0) -> list:
    """Output entropy and entropy exchange on truncated oscillator Gibbs states.

    Gibbs inputs of a one-mode oscillator at ``E = E0 + offset`` are cut to
    the first ``dim`` levels and renormalized. Returns evidence pairs,
    including the growth of each entropy across the energy range.
    """
    channel = truncate(dim)
    if channel.input_dim != dim:
        raise UnknownDescriptor("truncate(n) must return a channel on an n-dimensional input")
    profile = EnergyProfile(HamiltonianSpectrum.oscillator([hbar_omega]))
    e0 = profile.E0
    evidence = []
    outs, exch = [], []
    for off in offsets:
        lam = gibbs_parameter(profile, e0 + off)
        p = np.exp(-lam * hbar_omega * np.arange(dim))
        rho = np.diag(p / p.sum()).astype(complex)
        h_out = von_neumann_entropy(apply(channel, rho))
        h_exc = von_neumann_entropy(complementary_state(channel, rho))
        outs.append(h_out)
        exch.append(h_exc)
        evidence.append((f"H_out@E0+{off:g}", h_out))
        evidence.append((f"H_exchange@E0+{off:g}", h_exc))
    span = math.log(offsets[-1] / offsets[0])
    evidence.append(("H_out_growth_per_log_E", (outs[-1] - outs[0]) / span))
    evidence.append(("H_exchange_growth_per_log_E", (exch[-1] - exch[0]) / span))
    evidence.append(("probe_dim", dim))
    return evidence


def classify(desc: ChannelDescriptor, probe_dim: int = 64) -> ClassDiagnosis:
    """Diagnose the class of a structured channel descriptor.

    Raises :class:`UnknownDescriptor` for unrecognised kinds.
    """
    kind = desc.kind
    if kind not in KINDS:
        raise UnknownDescriptor(f"unknown descriptor kind {kind!r}")
    prm = desc.params

    if kind == "finite-dim-output":
        d = int(prm["output_dim"])
        return ClassDiagnosis("class_A", [("output_dim", d)], rule="finite output dimension")
    if kind == "depolarizing":
        return ClassDiagnosis("class_A", [("output_rank", prm.get("output_rank", 1))],
                              rule="constant finite-rank output")
    if kind == "identity":
        return ClassDiagnosis("class_B", [("choi_rank", 1)], rule="finite Choi rank")
    if kind == "finite-choi-rank":
        return ClassDiagnosis("class_B", [("choi_rank", int(prm["rank"]))], rule="finite Choi rank")

    if kind == "mixture-with-pure-state":
        p = float(prm["p"])
        if not 0.0 <= p <= 1.0:
            raise UnknownDescriptor(f"mixing weight p = {p!r} not in [0, 1]")
        if p == 0.0:
            return ClassDiagnosis("class_B", [("p", p)], rule="finite Choi rank")
        if p == 1.0:
            return ClassDiagnosis("class_A", [("p", p)], rule="constant finite-rank output")
        return ClassDiagnosis("class_C", [("p", p), ("components", "identity(B) + depolarizing(A)")],
                              rule="mixture of different classes")

    if kind == "mixture":
        weights = prm.get("weights", [1.0] * len(desc.parts))
        classes = _mixture_classes(desc.parts, weights)
        ev = [("component_classes", classes)]
        distinct = set(classes)
        if "not_PFE" in distinct:
            return ClassDiagnosis("not_PFE", ev, rule="mixture with a non-PFE component")
        if "inconclusive" in distinct:
            return ClassDiagnosis("inconclusive", ev)
        if len(distinct) == 1:
            cls = classes[0]
            return ClassDiagnosis(cls, ev, rule="convexity of the class")
        return ClassDiagnosis("class_C", ev, rule="mixture of different classes")

    if kind == "tensor":
        a, b = desc.parts
        ca, cb = classify(a).verdict, classify(b).verdict
        ev = [("factor_classes", (ca, cb))]
        if "not_PFE" in (ca, cb):
            return ClassDiagnosis("not_PFE", ev, rule="non-PFE factor")
        if _is_ab_mixture(a) or _is_ab_mixture(b):
            return ClassDiagnosis("not_PFE", ev, rule="tensor with a mixture of classes A and B")
        if "inconclusive" in (ca, cb) or ca == cb == "class_C":
            return ClassDiagnosis("inconclusive", ev)
        if ca == cb:
            return ClassDiagnosis(ca, ev, rule="tensor closure")
        return ClassDiagnosis("not_PFE", ev, rule="tensor of different classes")

    if kind == "compose":
        second, first = desc.parts
        c2, c1 = classify(second).verdict, classify(first).verdict
        ev = [("classes(second, first)", (c2, c1))]
        if c1 == c2 and c1 in ("class_A", "class_B"):
            return ClassDiagnosis(c1, ev, rule="composition closure")
        if c2 == "class_A":
            # the outer channel bounds the output entropy
            return ClassDiagnosis("class_A", ev, rule="finite output of the outer channel")
        return ClassDiagnosis("inconclusive", ev)

    if kind == "complementary":
        (inner,) = desc.parts
        c = classify(inner)
        swap = {"class_A": "class_B", "class_B": "class_A", "class_C": "class_C",
                "not_PFE": "not_PFE"}
        if c.verdict in swap:
            return ClassDiagnosis(swap[c.verdict], [("inner_class", c.verdict)],
                                  rule="complementary channel swaps A and B")
        return ClassDiagnosis("inconclusive", [("inner_class", c.verdict)])

    # pinching-family and explicit-truncated: probe only
    if desc.truncate is None:
        raise UnknownDescriptor(f"{kind} descriptor needs a truncate(n) callable")
    evidence = [("descriptor", kind)] + [(k, v) for k, v in prm.items()]
    evidence += truncation_probe(desc.truncate, dim=probe_dim)
    return ClassDiagnosis("inconclusive", evidence)

"""Operational semantics: heralded execution and exact channel application."""

from __future__ import annotations

import itertools
import math
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from pfc.pf import PFDiagram, theta, time_ordering
from pfc.semantics.dense import DEFAULT_WIDTH_CAP
from pfc.semantics.kraus import kraus_set
from pfc.semantics.verify import eval_pf_branch

__all__ = ["run_procedure", "apply_channel", "RunResult", "NotRunnable", "NormCollapse", "FORCE_THRESHOLD"]

FORCE_THRESHOLD = 1e-12


class NotRunnable(ValueError):
    """The diagram admits no time-ordering."""


class NormCollapse(RuntimeError):
    """Every outcome of an operation has vanishing probability."""


@dataclass
class RunResult:
    state: np.ndarray
    outcomes: dict[str, int]
    probabilities: dict[str, float]
    forced: list[str] = field(default_factory=list)
    schedule: list[str] = field(default_factory=list)


def _wire_keys(d: PFDiagram) -> tuple[dict[tuple[str, int], str], dict[tuple[str, int], str]]:
    in_key: dict[tuple[str, int], str] = {}
    out_key: dict[tuple[str, int], str] = {}
    for k, (a, p, b, q) in enumerate(d.edges):
        out_key[(a, p)] = in_key[(b, q)] = f"#e{k}"
    for w, n, p in d.inputs:
        in_key[(n, p)] = f"in:{w}"
    for w, n, p in d.outputs:
        out_key[(n, p)] = f"out:{w}"
    return in_key, out_key


def _apply(psi: np.ndarray, axes: list[str], k: np.ndarray, ins: list[str], outs: list[str]) -> tuple[np.ndarray, list[str]]:
    """Apply matrix ``k`` (first port most significant) to the named axes."""
    front = [axes.index(a) for a in ins]
    rest = [i for i in range(len(axes)) if i not in front]
    t = np.transpose(psi, front + rest).reshape(2 ** len(ins), -1)
    t = (k @ t).reshape((2,) * len(outs) + tuple(psi.shape[i] for i in rest))
    return t, outs + [axes[i] for i in rest]


def run_procedure(
    d: PFDiagram,
    state: np.ndarray,
    seed: int | None = None,
    r: Mapping[str, int] | None = None,
    rng: np.random.Generator | None = None,
) -> RunResult:
    """Execute ``d`` on a pure input state, sampling every heralded outcome.

    Nodes run in time-ordering layers (ties by label). An outcome is drawn
    with probability ``||K_s psi||^2``; if one outcome has probability below
    ``FORCE_THRESHOLD`` the other is taken and the node is logged in
    ``forced``. Rotations resolve their angle from bits already heralded.

    Raises
    ------
    NotRunnable
        If ``d`` has no time-ordering.
    NormCollapse
        If the state is annihilated.
    """
    t = time_ordering(d)
    if t is None:
        raise NotRunnable("the dependency graph of wires and classical control has a cycle")
    rng = rng if rng is not None else np.random.default_rng(seed)
    n_in = len(d.inputs)
    state = np.asarray(state, dtype=complex).reshape(-1)
    if state.shape[0] != 2**n_in:
        raise ValueError(f"state has dimension {state.shape[0]}, expected {2**n_in}")
    norm = np.linalg.norm(state)
    if norm < FORCE_THRESHOLD:
        raise NormCollapse("input state has zero norm")
    in_key, out_key = _wire_keys(d)
    psi = (state / norm).reshape((2,) * n_in) if n_in else state.reshape(())
    axes = [f"in:{w}" for w, _, _ in d.inputs]
    bits: dict[str, int] = dict(r or {})
    result = RunResult(np.zeros(0), {}, {})
    for label in sorted(d.nodes, key=lambda v: (t[v], v)):
        node = d.nodes[label]
        nin, nout = node.arity
        ins = [in_key[(label, q)] for q in range(nin)]
        outs = [out_key[(label, q)] for q in range(nout)]
        alpha = theta(node.theta, bits).radians if node.theta is not None else 0.0
        options = kraus_set(node.op, alpha)
        result.schedule.append(label)
        if len(options) == 1:
            psi, axes = _apply(psi, axes, options[0][1], ins, outs)
            continue
        branches = [_apply(psi, axes, k, ins, outs) for _, k in options]
        probs = [float(np.vdot(b[0], b[0]).real) for b in branches]
        total = sum(probs)
        if total < FORCE_THRESHOLD:
            raise NormCollapse(f"state annihilated at {label!r}")
        probs = [p / total for p in probs]
        if probs[0] < FORCE_THRESHOLD:
            s = 1
            result.forced.append(label)
        elif probs[1] < FORCE_THRESHOLD:
            s = 0
            result.forced.append(label)
        else:
            s = int(rng.random() >= probs[0])
        psi, axes = branches[s]
        psi = psi / math.sqrt(probs[s] * total)
        bits[label] = s
        result.outcomes[label] = s
        result.probabilities[label] = probs[s]
    order = [f"out:{w}" for w, _, _ in d.outputs]
    psi = np.transpose(psi, [axes.index(a) for a in order]) if order else psi
    result.state = psi.reshape(-1)
    return result


def apply_channel(
    d: PFDiagram,
    rho: np.ndarray,
    r: Mapping[str, int] | None = None,
    width_cap: int = DEFAULT_WIDTH_CAP,
) -> np.ndarray:
    """Exact branch sum ``sum_x D(x) rho D(x)^dagger`` over all internal bits."""
    bits = sorted(d.internal_bits)
    if len(bits) > 16:
        raise ValueError(f"{len(bits)} heralded bits exceed the exhaustive limit of 16")
    out = None
    for xs in itertools.product((0, 1), repeat=len(bits)):
        m = eval_pf_branch(d, dict(zip(bits, xs)), r, width_cap).matrix
        term = m @ rho @ m.conj().T
        out = term if out is None else out + term
    assert out is not None
    return out

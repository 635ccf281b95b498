"""End-to-end driver: normalise, sign, find a flow, compile, verify."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from typing import Any

from pfc.compile import CompilationTrace, compile_to_pf
from pfc.flow import PFFlow, find_pf_flow
from pfc.graphlike import GraphLikeDiagram, Signature, build_signature, to_graph_like
from pfc.pf import PFDiagram, dependency_cycle, time_ordering
from pfc.semantics.dense import WidthExceeded
from pfc.semantics.verify import VerificationReport, check_determinism
from pfc.zx import ZXDiagram

__all__ = ["PipelineConfig", "PipelineResult", "full_pipeline", "EXIT_CODES"]

EXIT_CODES = {"ok": 0, "no_flow": 2, "verification_failed": 3, "not_runnable": 3}


@dataclass(frozen=True)
class PipelineConfig:
    width_cap: int = 12
    branch_cap: int = 2**16
    tol: float = 1e-9
    seed: int = 0
    threads: int = 1
    samples: int = 256
    allow_global_phase: bool = False
    out_dir: str | None = None
    verbosity: int = 0

    def __post_init__(self) -> None:
        if self.width_cap <= 0 or self.branch_cap <= 0 or self.threads <= 0 or self.samples <= 0:
            raise ValueError("caps, thread count and sample count must be positive")
        if not 0 < self.tol < 1:
            raise ValueError(f"tolerance must lie in (0, 1), got {self.tol}")

    @classmethod
    def from_env(cls, env: dict[str, str] | None = None, **overrides: Any) -> PipelineConfig:
        """Defaults, then ``PFC_*`` environment variables, then explicit overrides."""
        env = dict(os.environ if env is None else env)
        values: dict[str, Any] = {}
        for key, name, cast in (
            ("width_cap", "PFC_WIDTH_CAP", int),
            ("branch_cap", "PFC_BRANCH_CAP", int),
            ("tol", "PFC_TOL", float),
            ("threads", "PFC_THREADS", int),
        ):
            if env.get(name):
                values[key] = cast(env[name])
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass
class PipelineResult:
    source: ZXDiagram
    outcome: str = "ok"
    graph_like: GraphLikeDiagram | None = None
    signature: Signature | None = None
    flow: PFFlow | None = None
    pf: PFDiagram | None = None
    trace: CompilationTrace | None = None
    ordering: dict[str, int] | None = None
    verification: VerificationReport | None = None
    timings: dict[str, float] = field(default_factory=dict)
    messages: list[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.outcome]


def full_pipeline(d: ZXDiagram, config: PipelineConfig | None = None) -> PipelineResult:
    """Run every stage; a missing flow is the normal ``no_flow`` outcome, not an error."""
    config = config or PipelineConfig()
    res = PipelineResult(d)

    def timed(name: str, fn, *args, **kwargs):
        start = time.perf_counter()
        try:
            return fn(*args, **kwargs)
        finally:
            res.timings[name] = time.perf_counter() - start

    res.graph_like = timed("normalize", to_graph_like, d, width_cap=config.width_cap)
    res.signature = timed("signature", build_signature, res.graph_like)
    res.flow = timed("flow", find_pf_flow, res.signature)
    if res.flow is None:
        res.outcome = "no_flow"
        res.messages.append("no PF-flow: some diagram vertex can never be marked")
        return res
    if res.flow.refinements:
        res.messages.append(f"same-round neighbours ordered by label: {[list(p) for p in res.flow.refinements]}")
    res.pf, res.trace = timed("compile", compile_to_pf, res.graph_like, res.flow)
    res.ordering = timed("time_ordering", time_ordering, res.pf)
    if res.ordering is None:
        res.outcome = "not_runnable"
        res.messages.append(f"dependency cycle: {dependency_cycle(res.pf)}")
        return res
    try:
        res.verification = timed(
            "verify",
            check_determinism,
            res.pf,
            res.graph_like.inner,
            tol=config.tol,
            branch_cap=config.branch_cap,
            samples=config.samples,
            seed=config.seed,
            width_cap=config.width_cap,
            threads=config.threads,
            allow_global_phase=config.allow_global_phase,
        )
    except WidthExceeded as exc:
        res.messages.append(f"determinism check skipped: {exc}")
        return res
    if not res.verification.passed:
        res.outcome = "verification_failed"
        res.messages.extend(res.verification.failures[:10])
    return res

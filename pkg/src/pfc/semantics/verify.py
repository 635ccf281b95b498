"""Branch evaluation and the determinism check."""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from collections.abc import Mapping

import numpy as np

from pfc.pf import PFDiagram, branch_diagram
from pfc.semantics.dense import DEFAULT_WIDTH_CAP, DenseMap, contraction_order, eval_zx, proportional
from pfc.zx import ZXDiagram

__all__ = [
    "eval_pf_branch",
    "check_determinism",
    "VerificationReport",
    "BranchResult",
    "ZeroReference",
    "enumerate_branches",
]

DEFAULT_BRANCH_CAP = 2**16
MIN_SAMPLES = 256


class ZeroReference(ValueError):
    """The source diagram denotes the zero map."""


def eval_pf_branch(
    d: PFDiagram,
    x: Mapping[str, int] | None = None,
    r: Mapping[str, int] | None = None,
    width_cap: int = DEFAULT_WIDTH_CAP,
) -> DenseMap:
    """Dense map of the branch ``D(x)`` (external bits from ``r``)."""
    return eval_zx(branch_diagram(d, x, r), width_cap=width_cap)


@dataclass(frozen=True)
class BranchResult:
    branch: str
    scalar: complex | None
    deviation: float
    sign: int | None


@dataclass
class VerificationReport:
    """Outcome of comparing every checked branch map against the source map.

    ``sign`` of a branch is 0 or 1 when its scalar is ``(-1)^sign`` times the
    reference scalar, ``None`` otherwise. ``phase_class`` is ``"sign"`` when
    all ratios are +-1, ``"global_phase"`` when every branch is proportional
    with equal modulus but some ratio is another unit phase, and ``"none"``
    when proportionality or modulus fails.
    """

    bits: tuple[str, ...]
    mode: str
    reference_scalar: complex | None
    branches: list[BranchResult] = field(default_factory=list)
    max_deviation: float = 0.0
    passed: bool = False
    phase_class: str = "none"
    failures: list[str] = field(default_factory=list)

    @property
    def sign_pattern(self) -> dict[str, int | None]:
        return {b.branch: b.sign for b in self.branches}

    def to_dict(self) -> dict:
        def cx(c: complex | None):
            return None if c is None else {"re": c.real, "im": c.imag}

        return {
            "passed": self.passed,
            "mode": self.mode,
            "bits": list(self.bits),
            "phase_class": self.phase_class,
            "reference_scalar": cx(self.reference_scalar),
            "max_deviation": self.max_deviation,
            "branches_checked": len(self.branches),
            "failures": self.failures,
            "branches": [
                {"branch": b.branch, "scalar": cx(b.scalar), "deviation": b.deviation, "sign": b.sign}
                for b in self.branches
            ],
        }


def enumerate_branches(
    bits: tuple[str, ...], branch_cap: int = DEFAULT_BRANCH_CAP, samples: int = MIN_SAMPLES, seed: int = 0
) -> tuple[str, list[tuple[int, ...]]]:
    """All branches if there are at most ``branch_cap`` (and 16 bits), else a seeded uniform sample."""
    n = len(bits)
    if n <= 16 and 2**n <= branch_cap:
        return "exhaustive", list(itertools.product((0, 1), repeat=n))
    rng = np.random.default_rng(seed)
    count = max(samples, MIN_SAMPLES)
    drawn = {(0,) * n}
    while len(drawn) < count:
        drawn.add(tuple(int(v) for v in rng.integers(0, 2, n)))
    return "sampled", sorted(drawn)


def check_determinism(
    compiled: PFDiagram,
    source: ZXDiagram,
    tol: float = 1e-9,
    r: Mapping[str, int] | None = None,
    branch_cap: int = DEFAULT_BRANCH_CAP,
    samples: int = MIN_SAMPLES,
    seed: int = 0,
    width_cap: int = DEFAULT_WIDTH_CAP,
    threads: int = 1,
    allow_global_phase: bool = False,
) -> VerificationReport:
    """Compare every branch map of ``compiled`` against ``source``.

    Passes iff every branch is proportional to the source map with a nonzero
    scalar, all scalars share one modulus, and every ratio to the all-zero
    branch is +1 or -1 (within ``tol``). With ``allow_global_phase`` any unit
    ratio is accepted.

    Raises
    ------
    ZeroReference
        If the source map is zero.
    WidthExceeded
        If a branch diagram is too wide to evaluate.
    """
    ref = eval_zx(source, width_cap=width_cap).matrix
    if not np.any(np.abs(ref) > 0) or np.linalg.norm(ref) < 1e-300:
        raise ZeroReference("source diagram evaluates to the zero map")
    bits = tuple(sorted(compiled.internal_bits))
    mode, branches = enumerate_branches(bits, branch_cap, samples, seed)
    first = branch_diagram(compiled, dict.fromkeys(bits, 0), r)
    order = contraction_order(first)
    norm_ref = np.linalg.norm(ref)

    def one(xs: tuple[int, ...]) -> BranchResult:
        m = eval_zx(branch_diagram(compiled, dict(zip(bits, xs)), r), width_cap=width_cap, order=order).matrix
        c = proportional(m, ref, tol)
        if c is None:
            # least-squares scalar, only to report how far off the branch is
            ls = np.vdot(ref, m) / norm_ref**2
            dev = float(np.linalg.norm(m - ls * ref) / max(np.linalg.norm(m), 1e-300))
        else:
            dev = float(np.linalg.norm(m - c * ref) / np.linalg.norm(m))
        return BranchResult("".join(map(str, xs)), c, dev, None)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, branches))
    else:
        results = [one(xs) for xs in branches]

    report = VerificationReport(bits, mode, results[0].scalar if results else None)
    failures: list[str] = []
    c0 = report.reference_scalar
    proportional_all = all(b.scalar is not None and abs(b.scalar) > 0 for b in results)
    signed: list[BranchResult] = []
    unit_only = True
    for b in results:
        if b.scalar is None or abs(b.scalar) == 0:
            failures.append(f"branch {b.branch or '(empty)'}: not proportional to the source (deviation {b.deviation:.3g})")
            signed.append(b)
            continue
        assert c0 is not None
        ratio = b.scalar / c0
        if abs(abs(ratio) - 1) > tol:
            unit_only = False
            failures.append(f"branch {b.branch}: modulus ratio {abs(ratio):.12g} differs from 1")
            signed.append(b)
            continue
        if abs(ratio - 1) <= tol:
            sign = 0
        elif abs(ratio + 1) <= tol:
            sign = 1
        else:
            sign = None
            if not allow_global_phase:
                failures.append(f"branch {b.branch}: phase ratio {ratio.real:+.6f}{ratio.imag:+.6f}i is not +1 or -1")
        signed.append(BranchResult(b.branch, b.scalar, b.deviation, sign))
    report.branches = signed
    report.max_deviation = max((b.deviation for b in results), default=0.0)
    report.failures = failures
    report.passed = not failures
    if proportional_all and unit_only:
        report.phase_class = "sign" if all(b.sign is not None for b in signed) else "global_phase"
    return report

"""Dense semantics: Kraus library, ZX evaluation, branch verification and execution."""

from pfc.semantics.dense import DenseMap, WidthExceeded, eval_zx, proportional
from pfc.semantics.kraus import kraus, kraus_set
from pfc.semantics.run import NormCollapse, NotRunnable, RunResult, apply_channel, run_procedure
from pfc.semantics.verify import (
    VerificationReport,
    ZeroReference,
    check_determinism,
    eval_pf_branch,
)

__all__ = [
    "DenseMap",
    "WidthExceeded",
    "eval_zx",
    "proportional",
    "kraus",
    "kraus_set",
    "eval_pf_branch",
    "check_determinism",
    "VerificationReport",
    "ZeroReference",
    "run_procedure",
    "apply_channel",
    "RunResult",
    "NotRunnable",
    "NormCollapse",
]

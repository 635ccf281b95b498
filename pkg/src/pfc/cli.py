"""The ``pfc`` command-line driver.

Exit codes: 0 success, 1 usage or parse error, 2 no PF-flow, 3 failed
verification (non-runnable diagram or non-deterministic branches).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any

import numpy as np

from pfc import zx
from pfc.compile import save_trace, trace_to_dict
from pfc.flow import find_pf_flow, flow_to_dict, load_flow, save_flow, validate_pf_flow
from pfc.graphlike import build_signature, save_signature, signature_to_dict, to_graph_like
from pfc.pf import PFFormatError, dependency_cycle, pf_load, pf_save, pf_to_dict, time_ordering
from pfc.pipeline import PipelineConfig, full_pipeline
from pfc.semantics.kraus import kraus
from pfc.semantics.run import run_procedure
from pfc.semantics.verify import check_determinism

EXIT_OK, EXIT_USAGE, EXIT_NO_FLOW, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with 2, which means NoFlow here
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def _load_zx(path: str) -> zx.ZXDiagram:
    try:
        d = zx.load(_read(path))
    except zx.ZXFormatError as exc:
        raise UsageError(f"{path}: {exc}") from None
    problems = zx.validate(d)
    if problems:
        raise UsageError(f"{path}: invalid diagram: " + "; ".join(problems))
    return d


def _load_pf(path: str):
    try:
        return pf_load(_read(path))
    except PFFormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _config(args: argparse.Namespace) -> PipelineConfig:
    return PipelineConfig.from_env(
        width_cap=getattr(args, "width_cap", None),
        branch_cap=getattr(args, "branch_cap", None),
        tol=getattr(args, "tol", None),
        threads=getattr(args, "threads", None),
        seed=getattr(args, "seed", None),
        allow_global_phase=getattr(args, "allow_global_phase", None) or None,
    )


def _emit(args: argparse.Namespace, report: dict[str, Any], human: str) -> None:
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    elif human:
        print(human)


def _stem(path: str) -> str:
    name = Path(path).name
    for suffix in (".zx.json", ".pf.json", ".json"):
        if name.endswith(suffix):
            return name[: -len(suffix)]
    return Path(path).stem


# -- commands -------------------------------------------------------------------


def cmd_normalize(args: argparse.Namespace) -> int:
    g = to_graph_like(_load_zx(args.input), width_cap=_config(args).width_cap)
    text = zx.save(g.inner)
    _write(args.output, text)
    _emit(args, {"command": "normalize", "nodes": len(g.nodes), "output": args.output}, "" if args.output else text.rstrip())
    return EXIT_OK


def cmd_signature(args: argparse.Namespace) -> int:
    sig = build_signature(to_graph_like(_load_zx(args.input), width_cap=_config(args).width_cap))
    text = save_signature(sig)
    _write(args.output, text)
    _emit(args, {"command": "signature", "signature": signature_to_dict(sig)}, "" if args.output else text.rstrip())
    return EXIT_OK


def cmd_flow(args: argparse.Namespace) -> int:
    sig = build_signature(to_graph_like(_load_zx(args.input), width_cap=_config(args).width_cap))
    flow = find_pf_flow(sig)
    if flow is None:
        _emit(args, {"command": "flow", "outcome": "no_flow"}, "")
        print("no PF-flow exists for this diagram", file=sys.stderr)
        return EXIT_NO_FLOW
    problems = validate_pf_flow(sig, flow)
    text = save_flow(flow)
    _write(args.output, text)
    report = {"command": "flow", "outcome": "ok", "flow": flow_to_dict(flow), "violations": [str(p) for p in problems]}
    _emit(args, report, "" if args.output else text.rstrip())
    for a, b in flow.refinements:
        print(f"note: {a} and {b} were marked in the same round and ordered by label", file=sys.stderr)
    return EXIT_OK if not problems else EXIT_VERIFY


def cmd_compile(args: argparse.Namespace) -> int:
    from pfc.compile import FlowInvalid, compile_to_pf

    g = to_graph_like(_load_zx(args.input), width_cap=_config(args).width_cap)
    if args.flow:
        try:
            flow = load_flow(_read(args.flow))
        except ValueError as exc:
            raise UsageError(f"{args.flow}: {exc}") from None
    else:
        flow = find_pf_flow(build_signature(g))
        if flow is None:
            print("no PF-flow exists for this diagram", file=sys.stderr)
            _emit(args, {"command": "compile", "outcome": "no_flow"}, "")
            return EXIT_NO_FLOW
    try:
        pf, trace = compile_to_pf(g, flow)
    except FlowInvalid as exc:
        print(f"flow does not validate: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    stem = _stem(args.input)
    out = args.output or f"{stem}.pf.json"
    trace_path = args.trace or str(Path(out).with_name(f"{stem}.trace.json"))
    _write(out, pf_save(pf))
    _write(trace_path, save_trace(trace))
    _emit(
        args,
        {"command": "compile", "outcome": "ok", "output": out, "trace": trace_path, "nodes": len(pf.nodes), "bits": sorted(pf.bits)},
        f"wrote {out} ({len(pf.nodes)} nodes, {len(pf.bits)} bits) and {trace_path}",
    )
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    pf = _load_pf(args.input)
    order = time_ordering(pf)
    report: dict[str, Any] = {"command": "verify", "runnable": order is not None}
    if order is None:
        cycle = dependency_cycle(pf) or []
        text = " -> ".join(f"{a} ({kind}) {b}" for a, b, kind in cycle)
        report["cycle"] = [list(e) for e in cycle]
        _emit(args, report, "")
        print(f"not runnable: dependency cycle {text}", file=sys.stderr)
        return EXIT_VERIFY
    report["time_ordering"] = order
    if not args.source:
        _emit(args, report, "runnable")
        return EXIT_OK
    cfg = _config(args)
    branch_cap = 1 if args.sampled else (2**16 if args.exhaustive else cfg.branch_cap)
    ver = check_determinism(
        pf,
        _load_zx(args.source),
        tol=cfg.tol,
        branch_cap=branch_cap,
        seed=cfg.seed,
        width_cap=cfg.width_cap,
        threads=cfg.threads,
        allow_global_phase=cfg.allow_global_phase,
    )
    report["determinism"] = ver.to_dict()
    _emit(args, report, f"runnable; determinism {'passed' if ver.passed else 'FAILED'} ({ver.mode}, {len(ver.branches)} branches, {ver.phase_class})")
    for line in ver.failures[:20]:
        print(line, file=sys.stderr)
    return EXIT_OK if ver.passed else EXIT_VERIFY


def _read_state(path: str | None, dim: int) -> np.ndarray:
    if path is None:
        state = np.zeros(dim, dtype=complex)
        state[0] = 1
        return state
    try:
        raw = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: {exc.msg}") from None
    raw = raw.get("amplitudes", raw) if isinstance(raw, dict) else raw
    try:
        amps = [complex(a[0], a[1]) if isinstance(a, list) else complex(a) for a in raw]
    except (TypeError, ValueError, IndexError):
        raise UsageError(f"{path}: amplitudes must be numbers or [re, im] pairs") from None
    if len(amps) != dim:
        raise UsageError(f"{path}: expected {dim} amplitudes, got {len(amps)}")
    return np.array(amps, dtype=complex)


def cmd_run(args: argparse.Namespace) -> int:
    from pfc.semantics.run import NotRunnable

    pf = _load_pf(args.input)
    state = _read_state(args.state, 2 ** len(pf.inputs))
    try:
        res = run_procedure(pf, state, seed=args.seed)
    except NotRunnable as exc:
        print(f"not runnable: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    report = {
        "command": "run",
        "seed": args.seed,
        "outcomes": res.outcomes,
        "forced": res.forced,
        "state": [[a.real, a.imag] for a in res.state],
    }
    _emit(args, report, json.dumps({"outcomes": res.outcomes, "state": report["state"]}))
    return EXIT_OK


def cmd_kraus(args: argparse.Namespace) -> int:
    def enc(m: np.ndarray) -> list:
        return [[[z.real, z.imag] for z in row] for row in m]

    out: dict[str, Any] = {}
    for kind in ("A_V", "A_H", "K_V", "K_H"):
        for s in (0, 1):
            out[f"{kind},{s}"] = enc(kraus(kind, s))
    out[f"R_V({args.alpha})"] = enc(kraus("R_V", alpha=args.alpha))
    out[f"R_H({args.alpha})"] = enc(kraus("R_H", alpha=args.alpha))
    out["H"] = enc(kraus("H"))
    out["SWAP"] = enc(kraus("SWAP"))
    print(json.dumps(out, indent=None if args.json else 1))
    return EXIT_OK


def cmd_pipeline(args: argparse.Namespace) -> int:
    cfg = _config(args)
    d = _load_zx(args.input)
    res = full_pipeline(d, cfg)
    out_dir = Path(args.out_dir) if args.out_dir else None
    stem = _stem(args.input)
    written: list[str] = []
    if out_dir is not None:
        # partial artifacts are written too, to help diagnose a missing flow
        pieces = [
            ("graphlike.zx.json", res.graph_like and zx.save(res.graph_like.inner)),
            ("sig.json", res.signature and save_signature(res.signature)),
            ("flow.json", res.flow and save_flow(res.flow)),
            ("pf.json", res.pf and pf_save(res.pf)),
            ("trace.json", res.trace and save_trace(res.trace)),
            ("report.json", res.verification and json.dumps(res.verification.to_dict(), indent=2) + "\n"),
        ]
        for suffix, text in pieces:
            if text:
                path = out_dir / f"{stem}.{suffix}"
                _write(str(path), text)
                written.append(str(path))
    report = {
        "command": "pipeline",
        "input": args.input,
        "outcome": res.outcome,
        "exit_code": res.exit_code,
        "messages": res.messages,
        "signature": res.signature and signature_to_dict(res.signature),
        "flow": res.flow and flow_to_dict(res.flow),
        "pf": res.pf and pf_to_dict(res.pf),
        "trace": res.trace and trace_to_dict(res.trace),
        "runnable": res.ordering is not None if res.pf is not None else None,
        "verification": res.verification and res.verification.to_dict(),
        "written": written,
    }
    human = f"{args.input}: {res.outcome}"
    if res.verification is not None:
        human += f" ({res.verification.mode}, {len(res.verification.branches)} branches, {res.verification.phase_class})"
    _emit(args, report, human)
    for m in res.messages:
        print(m, file=sys.stderr)
    return res.exit_code


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pfc", description="Compile ZX diagrams to Pauli Fusion procedures.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print one JSON report on stdout")
    common.add_argument("--width-cap", type=int, help="max open legs during dense evaluation (env PFC_WIDTH_CAP)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def verify_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--tol", type=float, help="relative proportionality tolerance (env PFC_TOL)")
        p.add_argument("--branch-cap", type=int, help="max branches for exhaustive mode (env PFC_BRANCH_CAP)")
        p.add_argument("--threads", type=int, help="worker threads for branch evaluation (env PFC_THREADS)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--allow-global-phase", action="store_true", help="accept unit-modulus ratios other than +1/-1")

    p = sub.add_parser("normalize", parents=[common], help="rewrite to graph-like form")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_normalize)

    p = sub.add_parser("signature", parents=[common], help="emit the signature (.sig.json)")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_signature)

    p = sub.add_parser("flow", parents=[common], help="find a PF-flow (.flow.json)")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_flow)

    p = sub.add_parser("compile", parents=[common], help="compile to a PF diagram (.pf.json + .trace.json)")
    p.add_argument("input")
    p.add_argument("--flow", help="use this .flow.json instead of searching")
    p.add_argument("-o", "--output")
    p.add_argument("--trace")
    p.set_defaults(fn=cmd_compile)

    p = sub.add_parser("verify", parents=[common], help="check runnability and, with --source, determinism")
    p.add_argument("input")
    p.add_argument("--source", help="the .zx.json the PF diagram should realise")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--sampled", action="store_true")
    verify_flags(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("run", parents=[common], help="execute with sampled heralded outcomes")
    p.add_argument("input")
    p.add_argument("--state", help="JSON list of amplitudes (numbers or [re, im]); default |0...0>")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("kraus", parents=[common], help="dump the Kraus matrices as JSON")
    p.add_argument("--alpha", type=float, default=0.0, help="rotation angle in radians")
    p.set_defaults(fn=cmd_kraus)

    p = sub.add_parser("pipeline", parents=[common], help="run every stage and verify")
    p.add_argument("input")
    p.add_argument("--out-dir")
    verify_flags(p)
    p.set_defaults(fn=cmd_pipeline)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"pfc: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"pfc: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Command-line interface tying the library into reproducible workflows.

Exit codes: 0 success, 1 domain error or failed check, 2 parse error,
3 inconclusive result.  All numeric output is printed with 12 significant
digits; identical invocations produce identical payloads (timing aside).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass
from typing import Any

import numpy as np

from qfalab import combinators, fragments, spectral, synthesis
from qfalab.automata import DEFAULT_MONOID_CAP, Dfa, DfaParseError, dfa_to_json, parse_dfa
from qfalab.fixtures import (
    dfa_fixture,
    dfa_fixture_names,
    oracle,
    oracle_names,
    qfa_fixture,
    qfa_fixture_names,
)
from qfalab.qfa import (
    Qfa,
    QfaParseError,
    parse_qfa,
    qfa_to_json,
    run,
    validate,
    verify_recognition,
)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_PARSE = 2
EXIT_INCONCLUSIVE = 3


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _round_floats(obj: Any) -> Any:
    """Round every float to 12 significant digits for stable payloads."""
    if isinstance(obj, float):
        return float(_fmt(obj))
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


@dataclass
class CommandReport:
    command: str
    status: str  # pass | fail | inconclusive
    payload: dict
    timing_s: float
    quiet: bool = False  # raw output already written; skip the report

    def exit_code(self) -> int:
        return {"pass": EXIT_OK, "fail": EXIT_DOMAIN, "inconclusive": EXIT_INCONCLUSIVE}[self.status]


def _emit(report: CommandReport, fmt: str) -> None:
    if report.quiet:
        return
    if fmt == "structured":
        doc = {
            "command": report.command,
            "status": report.status,
            "payload": _round_floats(report.payload),
            "timing_s": round(report.timing_s, 6),
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
        return
    print(f"[{report.status}] {report.command}")
    _print_table(report.payload, indent="  ")
    print(f"  (took {report.timing_s:.3f}s)")


def _print_table(obj: Any, indent: str = "") -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)):
                print(f"{indent}{k}:")
                _print_table(v, indent + "  ")
            else:
                print(f"{indent}{k}: {_fmt(v) if isinstance(v, float) else v}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                _print_table(v, indent)
                print()
            else:
                print(f"{indent}- {_fmt(v) if isinstance(v, float) else v}")
    else:
        print(f"{indent}{obj}")


def _read_dfa(path: str, complete_with_sink: bool) -> tuple[Dfa, dict]:
    with open(path, "r", encoding="utf-8") as fh:
        dfa, report = parse_dfa(fh.read(), complete_with_sink=complete_with_sink)
    note = {}
    if report.completed_with_sink:
        note = {
            "completed_with_sink": True,
            "sink_name": report.sink_name,
            "missing_transitions": len(report.missing_transitions),
        }
    return dfa, note


def _read_qfa(path: str, tol: float) -> Qfa:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_qfa(fh.read(), validate_tol=tol)


def _witness_payload(witness: fragments.FragmentWitness | None, dfa, verification=None) -> Any:
    if witness is None:
        return None
    doc: dict[str, Any] = {"kind": witness.kind}
    if witness.states:
        doc["states"] = dict(witness.states)
    if witness.words:
        doc["words"] = dict(witness.words)
    if witness.levels:
        doc["levels"] = [
            {"states": list(lv.states), "words": list(lv.words)} for lv in witness.levels
        ]
    if verification is not None:
        doc["verification"] = [
            {"condition": c.label, "passed": c.passed, **({"detail": c.detail} if c.detail else {})}
            for c in verification.conditions
        ]
        doc["verified"] = verification.passed
    return doc


def _plan_payload(plan: synthesis.SynthesisPlan | None) -> Any:
    if plan is None:
        return None
    return {
        "transient_states": list(plan.transient_states),
        "components": [list(c) for c in plan.components],
        "entry_states": list(plan.entry_states),
        "chain": list(plan.chain),
        "containment_counts": list(plan.containment_counts),
        "halting_weights": [str(w) for w in plan.halting_weights],
        "success_probability": str(plan.success_probability),
        "success_probability_float": float(plan.success_probability),
    }


# ---------------------------------------------------------------------------
# subcommands

def _cmd_classify(args) -> CommandReport:
    started = time.perf_counter()
    dfa, note = _read_dfa(args.dfa, args.complete_with_sink)
    verdict = fragments.classify(dfa, monoid_cap=args.monoid_cap)
    verification = None
    if verdict.witness is not None:
        verification = fragments.verify_witness(verdict.minimal_dfa, verdict.witness)
    payload = {
        "classification": verdict.classification,
        "minimal_states": len(verdict.minimal_dfa.states),
        "monoid": {"size": verdict.monoid_size, "complete": verdict.monoid_complete},
        "witness": _witness_payload(verdict.witness, verdict.minimal_dfa, verification),
        "plan": _plan_payload(verdict.plan),
    }
    if verdict.reason:
        payload["reason"] = verdict.reason
    if note:
        payload["parse_report"] = note
    status = "inconclusive" if verdict.classification == fragments.INCONCLUSIVE else "pass"
    return CommandReport("classify", status, payload, time.perf_counter() - started)


def _cmd_simulate(args) -> CommandReport:
    started = time.perf_counter()
    qfa = _read_qfa(args.qfa, args.tol)
    if args.all_up_to is None:
        if args.word is None:
            raise ValueError("give a word or --all-up-to N")
        outcome = run(qfa, args.word, with_trace=args.trace)
        payload = {
            "word": args.word,
            "p_accept": outcome.p_accept,
            "p_reject": outcome.p_reject,
            "p_residual": outcome.p_residual,
        }
        if outcome.residual_flagged:
            payload["note"] = "non-halting mass left after the right endmarker"
        if args.trace:
            payload["trace"] = [
                {
                    "symbol": rec.symbol,
                    "accept_increment": rec.accept_increment,
                    "reject_increment": rec.reject_increment,
                    "post_norm_sq": float(np.vdot(rec.post_state, rec.post_state).real),
                }
                for rec in outcome.trace
            ]
        return CommandReport("simulate", "pass", payload, time.perf_counter() - started)

    if args.oracle is None or args.p is None:
        raise ValueError("--all-up-to needs --oracle and --p")
    lang = oracle(args.oracle)
    report = verify_recognition(qfa, lang, args.p, args.all_up_to, tol=args.tol)
    payload = {
        "oracle": args.oracle,
        "p": args.p,
        "max_len": args.all_up_to,
        "words_checked": report.words_checked,
        "worst_accept_margin": report.worst_accept_margin,
        "worst_reject_margin": report.worst_reject_margin,
        "counterexamples": [
            {"word": w, "probability": pr} for w, pr in report.counterexamples
        ],
        "residual_flagged": report.residual_flagged,
    }
    return CommandReport(
        "simulate", "pass" if report.passed else "fail", payload, time.perf_counter() - started
    )


def _cmd_synthesize(args) -> CommandReport:
    started = time.perf_counter()
    dfa, note = _read_dfa(args.dfa, args.complete_with_sink)
    verdict = fragments.classify(dfa, monoid_cap=args.monoid_cap)
    if verdict.classification == fragments.INCONCLUSIVE:
        return CommandReport(
            "synthesize",
            "inconclusive",
            {"reason": verdict.reason},
            time.perf_counter() - started,
        )
    if verdict.classification != fragments.CONSTRUCTIBLE:
        raise ValueError(
            f"input is {verdict.classification}; only constructible languages can be compiled"
        )
    qfa, p = synthesis.synthesize(verdict.minimal_dfa)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(qfa_to_json(qfa))
    payload = {
        "out": args.out,
        "dimension": qfa.dimension,
        "plan": _plan_payload(verdict.plan),
        "success_probability": str(p),
        "success_probability_float": float(p),
    }
    if note:
        payload["parse_report"] = note
    return CommandReport("synthesize", "pass", payload, time.perf_counter() - started)


def _cmd_union(args) -> CommandReport:
    started = time.perf_counter()
    q1 = _read_qfa(args.qfa1, args.tol)
    q2 = _read_qfa(args.qfa2, args.tol)
    machine, p = combinators.union(q1, args.p1, q2, args.p2)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(qfa_to_json(machine))
    payload = {
        "out": args.out,
        "dimension": machine.dimension,
        "p1": args.p1,
        "p2": args.p2,
        "combined_probability": p,
    }
    return CommandReport("union", "pass", payload, time.perf_counter() - started)


def _cmd_complement(args) -> CommandReport:
    started = time.perf_counter()
    qfa = _read_qfa(args.qfa, args.tol)
    comp = combinators.complement(qfa)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(qfa_to_json(comp))
    payload = {"out": args.out, "dimension": comp.dimension}
    return CommandReport("complement", "pass", payload, time.perf_counter() - started)


def _cmd_decompose(args) -> CommandReport:
    started = time.perf_counter()
    qfa = _read_qfa(args.qfa, args.tol)
    if args.word2 is None:
        dec = spectral.decompose_word(qfa, args.word)
        words = [args.word]
    else:
        dec = spectral.decompose_pair(qfa, args.word, args.word2)
        words = [args.word, args.word2]

    def basis_payload(mat: np.ndarray) -> list[list[list[float]]]:
        return [
            [[float(z.real), float(z.imag)] for z in mat[:, j]]
            for j in range(mat.shape[1])
        ]

    decay = []
    for j in range(dec.transient_basis.shape[1]):
        v = dec.transient_basis[:, j]
        decay.append(spectral.norm_decay_table(qfa, args.word, v, args.decay_steps))
    payload = {
        "words": words,
        "non_halting_dimension": len(dec.non_halting),
        "isometric_dimension": dec.isometric_dim,
        "transient_dimension": dec.transient_dim,
        "isometric_basis": basis_payload(dec.isometric_basis),
        "transient_basis": basis_payload(dec.transient_basis),
        "transient_norm_decay": [
            {"basis_vector": j, "norms": table} for j, table in enumerate(decay)
        ],
        "note": "bounded search cannot certify shrinkage failure, only report budget exhaustion",
    }
    return CommandReport("decompose", "pass", payload, time.perf_counter() - started)


def _cmd_separability(args) -> CommandReport:
    started = time.perf_counter()
    q1 = _read_qfa(args.qfa1, args.tol)
    q2 = _read_qfa(args.qfa2, args.tol)
    lang = oracle(args.oracle)
    result = combinators.separability(q1, q2, lang, args.max_len)
    payload = {
        "oracle": args.oracle,
        "max_len": args.max_len,
        "separable": result.separable,
        "limit_case": result.limit_case,
        "margin": result.margin if result.margin != float("inf") else "inf",
        "line": list(result.line) if result.line else None,
        "cloud": [
            {"word": p.word, "p1": p.p1, "p2": p.p2, "label": "in" if p.in_language else "out"}
            for p in result.cloud
        ],
    }
    return CommandReport("separability", "pass", payload, time.perf_counter() - started)


def _cmd_fixtures(args) -> CommandReport:
    started = time.perf_counter()
    if args.action == "list":
        payload = {
            "dfa": list(dfa_fixture_names()),
            "qfa": list(qfa_fixture_names()),
            "oracle": list(oracle_names()),
        }
        return CommandReport("fixtures", "pass", payload, time.perf_counter() - started)
    name = args.name
    if name in dfa_fixture_names():
        text = dfa_to_json(dfa_fixture(name))
    elif name in qfa_fixture_names():
        text = qfa_to_json(qfa_fixture(name))
    else:
        raise ValueError(f"unknown fixture {name!r}; try `fixtures list`")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        return CommandReport(
            "fixtures", "pass", {"name": name, "out": args.out}, time.perf_counter() - started
        )
    # bare emit: the fixture text is the whole output
    sys.stdout.write(text)
    return CommandReport("fixtures", "pass", {"name": name}, time.perf_counter() - started, quiet=True)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qfalab",
        description="Recognizability analysis, compilation and exact simulation of 1-way QFAs.",
    )
    default_cap = int(os.environ.get("QFALAB_MONOID_CAP", DEFAULT_MONOID_CAP))

    def add_globals(target, suppress: bool):
        # the same flags parse before or after the subcommand; the
        # subcommand position wins when both are given
        kw = {"default": argparse.SUPPRESS} if suppress else {}
        target.add_argument(
            "--tol", type=float, help="numeric tolerance (default 1e-9)",
            **({"default": 1e-9} if not suppress else kw),
        )
        target.add_argument(
            "--monoid-cap", type=int,
            help="transition monoid enumeration cap (env QFALAB_MONOID_CAP overrides the default)",
            **({"default": default_cap} if not suppress else kw),
        )
        target.add_argument(
            "--format", choices=("table", "structured"), help="output format",
            **({"default": "table"} if not suppress else kw),
        )

    add_globals(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    add_globals(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="decide QFA-recognizability of a DFA's language")
    p.add_argument("dfa")
    p.add_argument("--complete-with-sink", action="store_true")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("simulate", parents=[common], help="run a QFA on one word or sweep all words up to a length")
    p.add_argument("qfa")
    p.add_argument("word", nargs="?")
    p.add_argument("--all-up-to", type=int, metavar="N")
    p.add_argument("--oracle", choices=oracle_names())
    p.add_argument("--p", type=float)
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("synthesize", parents=[common], help="compile an eligible DFA into a QFA")
    p.add_argument("dfa")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--complete-with-sink", action="store_true")
    p.set_defaults(func=_cmd_synthesize)

    p = sub.add_parser("union", parents=[common], help="combine two recognizers into one for the union")
    p.add_argument("qfa1")
    p.add_argument("p1", type=float)
    p.add_argument("qfa2")
    p.add_argument("p2", type=float)
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=_cmd_union)

    p = sub.add_parser("complement", parents=[common], help="swap accepting and rejecting states")
    p.add_argument("qfa")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=_cmd_complement)

    p = sub.add_parser("decompose", parents=[common], help="isometric/transient split for one or two words")
    p.add_argument("qfa")
    p.add_argument("--word", required=True)
    p.add_argument("--word2")
    p.add_argument("--decay-steps", type=int, default=12)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("separability", parents=[common], help="two-machine point cloud and max-margin line")
    p.add_argument("qfa1")
    p.add_argument("qfa2")
    p.add_argument("--oracle", required=True, choices=oracle_names())
    p.add_argument("--max-len", type=int, required=True)
    p.set_defaults(func=_cmd_separability)

    p = sub.add_parser("fixtures", parents=[common], help="list or emit built-in fixtures")
    p.add_argument("action", choices=("list", "emit"))
    p.add_argument("name", nargs="?")
    p.add_argument("-o", "--out")
    p.set_defaults(func=_cmd_fixtures)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except (DfaParseError, QfaParseError, json.JSONDecodeError, FileNotFoundError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    _emit(report, args.format)
    return report.exit_code()


if __name__ == "__main__":
    sys.exit(main())

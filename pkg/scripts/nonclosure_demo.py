#!/usr/bin/env python3
"""End-to-end demonstration that QFA-recognizability is not closed under union.

Classifies the two parity-constrained halves and their union, compiles the
halves into concrete machines, and verifies every claimed probability by
exact simulation.
"""

from qfalab.fixtures import dfa_fixture, oracle, qfa_fixture
from qfalab.fragments import classify, verify_witness
from qfalab.qfa import verify_recognition
from qfalab.synthesis import synthesize

MAX_LEN = 8


def classify_line(name: str) -> None:
    verdict = classify(dfa_fixture(name))
    extra = ""
    if verdict.witness is not None:
        words = ", ".join(f"{k}={v!r}" for k, v in sorted(verdict.witness.words.items()))
        verified = verify_witness(verdict.minimal_dfa, verdict.witness).passed
        extra = f"  [{verdict.witness.kind}: {words}; verified={verified}]"
    print(f"  {name:22s} -> {verdict.classification}{extra}")


def main() -> None:
    print("Classification of the three languages:")
    for name in ("even_head_odd_tail", "odd_head_odd_tail", "odd_tail"):
        classify_line(name)

    print("\nCompiling the two recognizable halves:")
    for name in ("even_head_odd_tail", "odd_head_odd_tail"):
        machine, p = synthesize(dfa_fixture(name))
        report = verify_recognition(machine, oracle(name), float(p) - 1e-9, MAX_LEN)
        print(
            f"  {name:22s} -> {machine.dimension}-state machine at p = {p} "
            f"(exhaustive check to length {MAX_LEN}: {'ok' if report.passed else 'FAILED'})"
        )

    print("\nThe bespoke 8-state machines do better (p = 2/3):")
    for qfa_name, lang in (
        ("even_head_odd_tail_qfa", "even_head_odd_tail"),
        ("odd_head_odd_tail_qfa", "odd_head_odd_tail"),
    ):
        machine = qfa_fixture(qfa_name)
        report = verify_recognition(machine, oracle(lang), 2 / 3 - 1e-9, MAX_LEN)
        print(f"  {qfa_name:24s} vs {lang}: {'ok' if report.passed else 'FAILED'}")

    print(
        "\nThe union of the two halves is the whole odd-tail language, and its\n"
        "minimal automaton carries a verified forbidden fragment: no machine of\n"
        "this kind recognizes it with any probability above 1/2."
    )


if __name__ == "__main__":
    main()

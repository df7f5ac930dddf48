#!/usr/bin/env python3
"""Emit the two-machine probability cloud for the union language as TSV.

Each word maps to (accept probability under the first machine, accept
probability under the second); the maximum-margin separating line between
the in-language and out-of-language points shows why the union sits exactly
on the boundary of what a convex combination of the two machines can decide.
"""

import argparse
import sys

from qfalab.combinators import separability
from qfalab.fixtures import oracle, qfa_fixture


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-len", type=int, default=6)
    parser.add_argument("--oracle", default="odd_tail")
    args = parser.parse_args()

    q1 = qfa_fixture("even_head_odd_tail_qfa")
    q2 = qfa_fixture("odd_head_odd_tail_qfa")
    result = separability(q1, q2, oracle(args.oracle), args.max_len)

    print("word\tp1\tp2\tlabel")
    for point in result.cloud:
        print(f"{point.word or '<empty>'}\t{point.p1:.12g}\t{point.p2:.12g}\t"
              f"{'in' if point.in_language else 'out'}")

    print(f"# separable: {result.separable}", file=sys.stderr)
    print(f"# limit_case: {result.limit_case}", file=sys.stderr)
    print(f"# margin: {result.margin:.12g}", file=sys.stderr)
    if result.line:
        a, b, c = result.line
        print(f"# line: {a:.12g} * x + {b:.12g} * y = {c:.12g}", file=sys.stderr)


if __name__ == "__main__":
    main()

"""Forbidden-fragment detection in minimal DFAs and the recognizability verdict.

A fragment is a pattern of states and words in the minimal automaton whose
presence rules out recognition by a measure-many 1-way QFA (or, for the
two-cycles pattern, moves the language outside the class on which the
fragment conditions are an exact characterization).  Detectors quantify
over transition-monoid elements instead of raw words, which turns the
unbounded word quantifiers into finite exact searches; witness words are
recovered from the elements' shortest witness words.

Witness kinds:

  partial-order-violation   q1 -x-> q2, x fixes q2, and q2 can reach q1 back
  two-cycles                chained pumping q1 -x-> q2 -y-> q3 with x, y
                            fixing q2, q3 respectively
  fork                      one state pumped by x and y into two jointly
                            recurrent states whose futures are incomparable
  two-level-fork            three branches, each splitting into two of three
                            second-stage cycles, with a 3-accept/3-reject
                            suffix assignment
  multilevel                the general layered form; verification only
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from qfalab.automata import (
    DEFAULT_MONOID_CAP,
    Dfa,
    Monoid,
    minimize,
    transition_monoid,
)

ORDER_VIOLATION = "partial-order-violation"
TWO_CYCLES = "two-cycles"
FORK = "fork"
TWO_LEVEL_FORK = "two-level-fork"
MULTILEVEL = "multilevel"

WITNESS_KINDS = (ORDER_VIOLATION, TWO_CYCLES, FORK, TWO_LEVEL_FORK, MULTILEVEL)

NOT_RECOGNIZABLE = "not-recognizable"
CONSTRUCTIBLE = "constructible"
OUTSIDE_CHARACTERIZED_CLASS = "outside-characterized-class"
INCONCLUSIVE = "inconclusive"

DEFAULT_SEARCH_BUDGET = 250_000

# two-level-fork shape: defined (branch, stage) pairs and the suffix
# outcome table (suffix index, branch, stage, accepting?)
_FORK2_PAIRS = ((1, 1), (1, 2), (2, 1), (2, 3), (3, 2), (3, 3))
_FORK2_OUTCOMES = (
    ("s1", 1, 1, True),
    ("s2", 2, 3, True),
    ("s3", 3, 2, True),
    ("s2", 1, 2, False),
    ("s3", 2, 1, False),
    ("s1", 3, 3, False),
)


@dataclass(frozen=True)
class WitnessLevel:
    states: tuple[str, ...]
    words: tuple[str, ...]


@dataclass(frozen=True)
class FragmentWitness:
    """States and words instantiating one forbidden construction."""

    kind: str
    states: Mapping[str, str] = field(default_factory=dict)
    words: Mapping[str, str] = field(default_factory=dict)
    monoid_elements: Mapping[str, Mapping[str, str]] = field(default_factory=dict)
    levels: tuple[WitnessLevel, ...] = ()

    def __post_init__(self):
        if self.kind not in WITNESS_KINDS:
            raise ValueError(f"unknown witness kind {self.kind!r}")


@dataclass(frozen=True)
class ConditionCheck:
    label: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    kind: str
    conditions: tuple[ConditionCheck, ...]
    passed: bool
    notes: tuple[str, ...] = ()

    def failed_labels(self) -> tuple[str, ...]:
        return tuple(c.label for c in self.conditions if not c.passed)


def witness_to_json(witness: FragmentWitness) -> str:
    obj: dict = {"kind": witness.kind}
    if witness.states:
        obj["states"] = dict(witness.states)
    if witness.words:
        obj["words"] = dict(witness.words)
    if witness.monoid_elements:
        obj["monoid_elements"] = {k: dict(v) for k, v in witness.monoid_elements.items()}
    if witness.levels:
        obj["levels"] = [
            {"states": list(lv.states), "words": list(lv.words)} for lv in witness.levels
        ]
    return json.dumps({"witness": obj}, indent=2, sort_keys=True) + "\n"


def parse_witness(text: str) -> FragmentWitness:
    obj = json.loads(text)
    if not isinstance(obj, dict) or "witness" not in obj:
        raise ValueError('expected an object with a "witness" key')
    body = obj["witness"]
    levels = tuple(
        WitnessLevel(tuple(lv["states"]), tuple(lv.get("words", ())))
        for lv in body.get("levels", ())
    )
    return FragmentWitness(
        kind=body["kind"],
        states=dict(body.get("states", {})),
        words=dict(body.get("words", {})),
        monoid_elements={k: dict(v) for k, v in body.get("monoid_elements", {}).items()},
        levels=levels,
    )


# ---------------------------------------------------------------------------
# shared machinery

def _word_mapping(dfa: Dfa, word: str) -> list[int]:
    """delta_word as a function on state indices."""
    sym = {a: j for j, a in enumerate(dfa.alphabet)}
    table = dfa._table
    out = []
    for i in range(len(dfa.states)):
        j = i
        for ch in word:
            if ch not in sym:
                raise ValueError(f"word {word!r} uses symbol {ch!r} outside the alphabet")
            j = table[j][sym[ch]]
        out.append(j)
    return out


def _recurrent_from(n: int, edge_maps: Sequence[Sequence[int]], source: int) -> bool:
    """In the graph with edges i -> m[i] per map, can every state reachable
    from `source` reach `source` back?"""
    forward = set()
    queue = deque([source])
    forward.add(source)
    while queue:
        i = queue.popleft()
        for m in edge_maps:
            j = m[i]
            if j not in forward:
                forward.add(j)
                queue.append(j)
    reverse: list[list[int]] = [[] for _ in range(n)]
    for i in range(n):
        for m in edge_maps:
            reverse[m[i]].append(i)
    can_reach = {source}
    queue = deque([source])
    while queue:
        i = queue.popleft()
        for j in reverse[i]:
            if j not in can_reach:
                can_reach.add(j)
                queue.append(j)
    return forward <= can_reach


def _separability_table(dfa: Dfa) -> list[list[bool]]:
    """table[s][t]: exists z with delta(s,z) accepting and delta(t,z) rejecting.

    Computed for all ordered pairs at once by backward closure over the
    product graph, so the answer is exact.
    """
    n = len(dfa.states)
    table = dfa._table
    acc = dfa._accepting_indices
    marked = [[False] * n for _ in range(n)]
    queue: deque[tuple[int, int]] = deque()
    for s in range(n):
        for t in range(n):
            if s in acc and t not in acc:
                marked[s][t] = True
                queue.append((s, t))
    reverse: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for s in range(n):
        for t in range(n):
            for a in range(len(dfa.alphabet)):
                reverse.setdefault((table[s][a], table[t][a]), []).append((s, t))
    while queue:
        pair = queue.popleft()
        for prev in reverse.get(pair, ()):
            if not marked[prev[0]][prev[1]]:
                marked[prev[0]][prev[1]] = True
                queue.append(prev)
    return marked


def _separating_suffix(dfa: Dfa, s: int, t: int) -> str | None:
    """Shortest z with delta(s,z) accepting and delta(t,z) rejecting."""
    table = dfa._table
    acc = dfa._accepting_indices
    if s in acc and t not in acc:
        return ""
    seen = {(s, t)}
    queue: deque[tuple[int, int, str]] = deque([(s, t, "")])
    while queue:
        a, b, word = queue.popleft()
        for j, ch in enumerate(dfa.alphabet):
            na, nb = table[a][j], table[b][j]
            if na in acc and nb not in acc:
                return word + ch
            if (na, nb) not in seen:
                seen.add((na, nb))
                queue.append((na, nb, word + ch))
    return None


def _shortest_path_word(dfa: Dfa, source: int, target: int) -> str | None:
    table = dfa._table
    if source == target:
        return ""
    seen = {source}
    queue: deque[tuple[int, str]] = deque([(source, "")])
    while queue:
        i, word = queue.popleft()
        for j, ch in enumerate(dfa.alphabet):
            k = table[i][j]
            if k == target:
                return word + ch
            if k not in seen:
                seen.add(k)
                queue.append((k, word + ch))
    return None


def _mapping_dict(dfa: Dfa, mapping: Sequence[int]) -> dict[str, str]:
    return {dfa.states[i]: dfa.states[mapping[i]] for i in range(len(dfa.states))}


# ---------------------------------------------------------------------------
# detectors

def detect_order_violation(dfa: Dfa, monoid: Monoid) -> FragmentWitness | None:
    """Element f and states q1 != q2 with f(q1) = q2 = f(q2) and q2 ~> q1.

    Search order is lexicographic over (element index, state index); absence
    is meaningful only when the monoid is complete.
    """
    n = len(dfa.states)
    table = dfa._table
    reach: list[set[int]] = []
    for i in range(n):
        seen = {i}
        queue = deque([i])
        while queue:
            j = queue.popleft()
            for k in table[j]:
                if k not in seen:
                    seen.add(k)
                    queue.append(k)
        reach.append(seen)
    for elem in monoid.elements[1:]:
        m = elem.mapping
        for q1 in range(n):
            q2 = m[q1]
            if q2 == q1 or m[q2] != q2:
                continue
            if q1 in reach[q2]:
                y = _shortest_path_word(dfa, q2, q1)
                return FragmentWitness(
                    kind=ORDER_VIOLATION,
                    states={"q1": dfa.states[q1], "q2": dfa.states[q2]},
                    words={"x": elem.witness_word, "y": y},
                    monoid_elements={
                        "x": _mapping_dict(dfa, m),
                        "y": _mapping_dict(dfa, _word_mapping(dfa, y)),
                    },
                )
    return None


def detect_two_cycles(dfa: Dfa, monoid: Monoid) -> FragmentWitness | None:
    """Chained pumping: f(q1) = q2 = f(q2), g(q2) = q3 = g(q3), all distinct.

    Pairwise distinctness matters: with q3 = q1 the pattern degenerates to a
    partial-order violation, which carries a different (stronger) verdict.
    """
    n = len(dfa.states)
    # per state q, the first elements g (by index) with g(q) != q fixed by g,
    # keyed by the target so distinctness from q1 can be enforced later
    second: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for gi, elem in enumerate(monoid.elements[1:], start=1):
        g = elem.mapping
        for q in range(n):
            q3 = g[q]
            if q3 != q and g[q3] == q3 and all(t != q3 for _, t in second[q]):
                second[q].append((gi, q3))
    for elem in monoid.elements[1:]:
        f = elem.mapping
        for q1 in range(n):
            q2 = f[q1]
            if q2 == q1 or f[q2] != q2:
                continue
            hit = next(((gi, q3) for gi, q3 in second[q2] if q3 != q1), None)
            if hit is None:
                continue
            gi, q3 = hit
            gelem = monoid.elements[gi]
            return FragmentWitness(
                kind=TWO_CYCLES,
                states={"q1": dfa.states[q1], "q2": dfa.states[q2], "q3": dfa.states[q3]},
                words={"x": elem.witness_word, "y": gelem.witness_word},
                monoid_elements={
                    "x": _mapping_dict(dfa, f),
                    "y": _mapping_dict(dfa, gelem.mapping),
                },
            )
    return None


def detect_fork(dfa: Dfa, monoid: Monoid) -> FragmentWitness | None:
    """Two elements pumping one state into jointly recurrent, incomparable states.

    Conditions on (f, g, q1): q2 = f(q1) fixed by f, q3 = g(q1) fixed by g,
    q2 != q3; every state reachable from q2 (resp. q3) in the two-edge graph
    {f, g} can return to it; and suffixes z1, z2 separate (q2, q3) both ways.
    The separability prefilter is exact, so surviving pairs are rare.
    """
    n = len(dfa.states)
    sep = _separability_table(dfa)
    elements = monoid.elements
    pair_feasible = [[sep[s][t] and sep[t][s] for t in range(n)] for s in range(n)]
    if not any(pair_feasible[s][t] for s in range(n) for t in range(n)):
        return None
    recurrence_memo: dict[tuple[int, int, int], bool] = {}

    def recurrent(fi: int, gi: int, q: int) -> bool:
        key = (fi, gi, q)
        if key not in recurrence_memo:
            recurrence_memo[key] = _recurrent_from(
                n, (elements[fi].mapping, elements[gi].mapping), q
            )
        return recurrence_memo[key]

    for fi in range(1, len(elements)):
        f = elements[fi].mapping
        pairs = [(q1, f[q1]) for q1 in range(n) if f[f[q1]] == f[q1]]
        if not pairs:
            continue
        for gi in range(1, len(elements)):
            g = elements[gi].mapping
            for q1, q2 in pairs:
                q3 = g[q1]
                if g[q3] != q3 or q3 == q2:
                    continue
                if not pair_feasible[q2][q3]:
                    continue
                if not recurrent(fi, gi, q2) or not recurrent(fi, gi, q3):
                    continue
                z1 = _separating_suffix(dfa, q2, q3)
                z2 = _separating_suffix(dfa, q3, q2)
                return FragmentWitness(
                    kind=FORK,
                    states={
                        "q1": dfa.states[q1],
                        "q2": dfa.states[q2],
                        "q3": dfa.states[q3],
                    },
                    words={
                        "x": elements[fi].witness_word,
                        "y": elements[gi].witness_word,
                        "z1": z1,
                        "z2": z2,
                    },
                    monoid_elements={
                        "x": _mapping_dict(dfa, f),
                        "y": _mapping_dict(dfa, g),
                    },
                )
    return None


def search_two_level_fork(
    dfa: Dfa, monoid: Monoid, budget: int = DEFAULT_SEARCH_BUDGET
) -> FragmentWitness | None:
    """Budgeted search for the two-level fork; sound but incomplete.

    Candidate triples of monoid elements are enumerated lexicographically at
    each level under the fixed-point, recurrence and separability
    constraints; every examined triple costs one budget unit.  `None` means
    no witness within budget, never a proof of absence.
    """
    n = len(dfa.states)
    sep = _separability_table(dfa)
    elements = monoid.elements
    ledger = [0]  # budget units spent so far
    level2_failures: set[tuple[int, int, int]] = set()

    for q0 in range(n):
        cand1 = []
        for ei in range(1, len(elements)):
            m = elements[ei].mapping
            qx = m[q0]
            if m[qx] == qx:
                cand1.append((ei, qx))
        for ai, qa in cand1:
            for bi, qb in cand1:
                for ci, qc in cand1:
                    ledger[0] += 1
                    if ledger[0] > budget:
                        return None
                    maps1 = (elements[ai].mapping, elements[bi].mapping, elements[ci].mapping)
                    if not all(_recurrent_from(n, maps1, q) for q in (qa, qb, qc)):
                        continue
                    key = (qa, qb, qc)
                    if key in level2_failures:
                        continue
                    found = _level2_scan(dfa, monoid, sep, qa, qb, qc, budget, ledger)
                    if found is None:
                        if ledger[0] > budget:
                            return None
                        level2_failures.add(key)
                        continue
                    di, ei2, fi, q_stage = found
                    return _assemble_two_level_fork(
                        dfa, monoid, q0, (ai, bi, ci), (di, ei2, fi), (qa, qb, qc), q_stage
                    )
    return None


def _level2_scan(dfa, monoid, sep, qa, qb, qc, budget, ledger):
    """Scan stage-element triples for the branch targets (qa, qb, qc)."""
    n = len(dfa.states)
    elements = monoid.elements

    def cands(first_q, second_q):
        out = []
        for ei in range(1, len(elements)):
            m = elements[ei].mapping
            if m[m[first_q]] == m[first_q] and m[m[second_q]] == m[second_q]:
                out.append(ei)
        return out

    cand_d = cands(qa, qb)
    cand_e = cands(qa, qc)
    cand_f = cands(qb, qc)
    for di in cand_d:
        md = elements[di].mapping
        for ei in cand_e:
            me = elements[ei].mapping
            for fi in cand_f:
                ledger[0] += 1
                if ledger[0] > budget:
                    return None
                mf = elements[fi].mapping
                q11, q12 = md[qa], me[qa]
                q21, q23 = md[qb], mf[qb]
                q32, q33 = me[qc], mf[qc]
                # suffix outcomes: s1 separates (q11, q33), s2 (q23, q12), s3 (q32, q21)
                if not (sep[q11][q33] and sep[q23][q12] and sep[q32][q21]):
                    continue
                maps2 = (md, me, mf)
                stage_states = (q11, q12, q21, q23, q32, q33)
                if not all(_recurrent_from(n, maps2, q) for q in set(stage_states)):
                    continue
                return (di, ei, fi, stage_states)
    return None


def _assemble_two_level_fork(dfa, monoid, q0, branch_ids, stage_ids, branch_states, stage_states):
    elements = monoid.elements
    q11, q12, q21, q23, q32, q33 = stage_states
    s1 = _separating_suffix(dfa, q11, q33)
    s2 = _separating_suffix(dfa, q23, q12)
    s3 = _separating_suffix(dfa, q32, q21)
    words = {
        "u1": elements[branch_ids[0]].witness_word,
        "u2": elements[branch_ids[1]].witness_word,
        "u3": elements[branch_ids[2]].witness_word,
        "v1": elements[stage_ids[0]].witness_word,
        "v2": elements[stage_ids[1]].witness_word,
        "v3": elements[stage_ids[2]].witness_word,
        "s1": s1,
        "s2": s2,
        "s3": s3,
    }
    mappings = {}
    for name, idx in zip(("u1", "u2", "u3"), branch_ids):
        mappings[name] = _mapping_dict(dfa, elements[idx].mapping)
    for name, idx in zip(("v1", "v2", "v3"), stage_ids):
        mappings[name] = _mapping_dict(dfa, elements[idx].mapping)
    return FragmentWitness(
        kind=TWO_LEVEL_FORK,
        states={"q0": dfa.states[q0]},
        words=words,
        monoid_elements=mappings,
    )


# ---------------------------------------------------------------------------
# verification

def _require(witness: FragmentWitness, state_names: Sequence[str], word_names: Sequence[str]):
    missing = [k for k in state_names if k not in witness.states]
    missing += [k for k in word_names if k not in witness.words]
    if missing:
        raise ValueError(f"witness is missing bindings: {missing}")


def verify_witness(dfa: Dfa, witness: FragmentWitness) -> VerificationReport:
    """Replay every condition of the witness kind literally against the DFA.

    State equations are checked by word replay, recurrence conditions by
    graph reachability, and outcome conditions by membership of the reached
    state in the accepting set.
    """
    if witness.kind == ORDER_VIOLATION:
        return _verify_order_violation(dfa, witness)
    if witness.kind == TWO_CYCLES:
        return _verify_two_cycles(dfa, witness)
    if witness.kind == FORK:
        return _verify_fork(dfa, witness)
    if witness.kind == TWO_LEVEL_FORK:
        return _verify_two_level_fork(dfa, witness)
    if witness.kind == MULTILEVEL:
        return _verify_multilevel(dfa, witness)
    raise ValueError(f"unknown witness kind {witness.kind!r}")


def _state_index(dfa: Dfa, name: str) -> int:
    try:
        return dfa._index[name]
    except KeyError:
        raise ValueError(f"witness references unknown state {name!r}") from None


def _verify_order_violation(dfa: Dfa, w: FragmentWitness) -> VerificationReport:
    _require(w, ("q1", "q2"), ("x", "y"))
    q1, q2 = _state_index(dfa, w.states["q1"]), _state_index(dfa, w.states["q2"])
    mx = _word_mapping(dfa, w.words["x"])
    my = _word_mapping(dfa, w.words["y"])
    checks = (
        ConditionCheck("1: q1 != q2", q1 != q2),
        ConditionCheck("2: x sends q1 to q2", mx[q1] == q2),
        ConditionCheck("3: x fixes q2", mx[q2] == q2),
        ConditionCheck("4: y sends q2 to q1", my[q2] == q1),
    )
    return VerificationReport(w.kind, checks, all(c.passed for c in checks))


def _verify_two_cycles(dfa: Dfa, w: FragmentWitness) -> VerificationReport:
    _require(w, ("q1", "q2", "q3"), ("x", "y"))
    q1, q2, q3 = (_state_index(dfa, w.states[k]) for k in ("q1", "q2", "q3"))
    mx = _word_mapping(dfa, w.words["x"])
    my = _word_mapping(dfa, w.words["y"])
    checks = (
        ConditionCheck("1: q1 != q2", q1 != q2),
        ConditionCheck("2: q2 != q3", q2 != q3),
        ConditionCheck("3: q1 != q3", q1 != q3),
        ConditionCheck("4: x sends q1 to q2", mx[q1] == q2),
        ConditionCheck("5: x fixes q2", mx[q2] == q2),
        ConditionCheck("6: y sends q2 to q3", my[q2] == q3),
        ConditionCheck("7: y fixes q3", my[q3] == q3),
    )
    return VerificationReport(w.kind, checks, all(c.passed for c in checks))


def _verify_fork(dfa: Dfa, w: FragmentWitness) -> VerificationReport:
    _require(w, ("q1", "q2", "q3"), ("x", "y", "z1", "z2"))
    n = len(dfa.states)
    q1, q2, q3 = (_state_index(dfa, w.states[k]) for k in ("q1", "q2", "q3"))
    mx = _word_mapping(dfa, w.words["x"])
    my = _word_mapping(dfa, w.words["y"])
    mz1 = _word_mapping(dfa, w.words["z1"])
    mz2 = _word_mapping(dfa, w.words["z2"])
    acc = dfa._accepting_indices
    checks = (
        ConditionCheck("1: q2 != q3", q2 != q3),
        ConditionCheck("2: x sends q1 to q2", mx[q1] == q2),
        ConditionCheck("3: x fixes q2", mx[q2] == q2),
        ConditionCheck("4: y sends q1 to q3", my[q1] == q3),
        ConditionCheck("5: y fixes q3", my[q3] == q3),
        ConditionCheck(
            "6: q2 recurrent under {x, y}", _recurrent_from(n, (mx, my), q2)
        ),
        ConditionCheck(
            "7: q3 recurrent under {x, y}", _recurrent_from(n, (mx, my), q3)
        ),
        ConditionCheck("8: z1 accepts from q2", mz1[q2] in acc),
        ConditionCheck("9: z2 rejects from q2", mz2[q2] not in acc),
        ConditionCheck("10: z1 rejects from q3", mz1[q3] not in acc),
        ConditionCheck("11: z2 accepts from q3", mz2[q3] in acc),
    )
    return VerificationReport(w.kind, checks, all(c.passed for c in checks))


def _verify_two_level_fork(dfa: Dfa, w: FragmentWitness) -> VerificationReport:
    word_names = ("u1", "u2", "u3", "v1", "v2", "v3", "s1", "s2", "s3")
    _require(w, ("q0",), word_names)
    n = len(dfa.states)
    q0 = _state_index(dfa, w.states["q0"])
    maps = {name: _word_mapping(dfa, w.words[name]) for name in word_names}
    acc = dfa._accepting_indices

    branch = {k: maps[f"u{k}"][q0] for k in (1, 2, 3)}
    c1 = ConditionCheck("1: branch words leave q0 at their branch states", True,
                        detail=", ".join(f"u{k} -> {dfa.states[branch[k]]}" for k in (1, 2, 3)))
    bad2 = [k for k in (1, 2, 3) if maps[f"u{k}"][branch[k]] != branch[k]]
    c2 = ConditionCheck("2: each branch word fixes its branch state", not bad2,
                        detail=f"violated for u{bad2}" if bad2 else "")
    maps1 = tuple(maps[f"u{k}"] for k in (1, 2, 3))
    bad3 = [k for k in (1, 2, 3) if not _recurrent_from(n, maps1, branch[k])]
    c3 = ConditionCheck("3: branch states recurrent under the branch words", not bad3,
                        detail=f"violated for branch {bad3}" if bad3 else "")

    stage = {(k, m): maps[f"v{m}"][branch[k]] for (k, m) in _FORK2_PAIRS}
    c4 = ConditionCheck("4: stage words move branch states to stage states", True,
                        detail=", ".join(f"(u{k},v{m}) -> {dfa.states[s]}" for (k, m), s in stage.items()))
    bad5 = [(k, m) for (k, m) in _FORK2_PAIRS if maps[f"v{m}"][stage[(k, m)]] != stage[(k, m)]]
    c5 = ConditionCheck("5: each stage word fixes its stage state", not bad5,
                        detail=f"violated for {bad5}" if bad5 else "")
    maps2 = tuple(maps[f"v{m}"] for m in (1, 2, 3))
    bad6 = sorted({(k, m) for (k, m) in _FORK2_PAIRS if not _recurrent_from(n, maps2, stage[(k, m)])})
    c6 = ConditionCheck("6: stage states recurrent under the stage words", not bad6,
                        detail=f"violated for {bad6}" if bad6 else "")

    bad7 = []
    for sname, k, m, should_accept in _FORK2_OUTCOMES:
        target = maps[sname][stage[(k, m)]]
        if (target in acc) != should_accept:
            bad7.append(f"{sname} from (u{k},v{m}) -> {dfa.states[target]}")
    c7 = ConditionCheck("7: suffix outcomes (three accept, three reject)", not bad7,
                        detail="; ".join(bad7))

    checks = (c1, c2, c3, c4, c5, c6, c7)
    return VerificationReport(w.kind, checks, all(c.passed for c in checks))


def _verify_multilevel(dfa: Dfa, w: FragmentWitness) -> VerificationReport:
    if not w.levels:
        raise ValueError("multilevel witness carries no levels")
    n = len(dfa.states)
    acc = dfa._accepting_indices
    table = dfa._table
    levels = w.levels
    notes: list[str] = []
    checks: list[ConditionCheck] = []

    idx_levels = [tuple(_state_index(dfa, s) for s in lv.states) for lv in levels]
    word_maps = [tuple(_word_mapping(dfa, word) for word in lv.words) for lv in levels]

    ok = len(idx_levels[0]) == 1 and len(word_maps[0]) >= 1
    checks.append(ConditionCheck("level 1 has one state and at least one word", ok))
    if levels[-1].words:
        notes.append("final level carries words; they are ignored by the checks")

    for j in range(len(levels) - 1):
        computed = {m[q] for q in idx_levels[j] for m in word_maps[j]}
        declared = set(idx_levels[j + 1])
        match = computed == declared
        checks.append(
            ConditionCheck(
                f"level {j + 2} states are exactly the images of level {j + 1}",
                match,
                detail="" if match else (
                    f"computed {sorted(dfa.states[i] for i in computed)} vs "
                    f"declared {sorted(dfa.states[i] for i in declared)}"
                ),
            )
        )

    # recurrence binds the middle levels only; the final level is where the
    # suffix outcomes live and needs no return property
    for j in range(1, len(levels) - 1):
        if not word_maps[j - 1]:
            checks.append(ConditionCheck(f"level {j + 1} recurrence", False, "previous level has no words"))
            continue
        bad = [dfa.states[q] for q in idx_levels[j] if not _recurrent_from(n, word_maps[j - 1], q)]
        checks.append(
            ConditionCheck(
                f"level {j + 1} states recurrent under level {j} words",
                not bad,
                detail=f"violated for {bad}" if bad else "",
            )
        )

    all_level_states = {q for lv in idx_levels for q in lv}
    final = set(idx_levels[-1])
    for j in range(len(levels) - 1):
        for wi, m in enumerate(word_maps[j]):
            entry = {m[q] for q in idx_levels[j]}
            seen = set(entry)
            queue = deque(entry)
            while queue:
                i = queue.popleft()
                for k in table[i]:
                    if k not in seen:
                        seen.add(k)
                        queue.append(k)
            if not seen <= all_level_states:
                notes.append(
                    f"reachable set of word {levels[j].words[wi]!r} at level {j + 1} "
                    "leaves the declared levels (ambiguous corner of the layered form)"
                )
            dset = seen & final
            n_acc = sum(1 for q in dset if q in acc)
            n_rej = len(dset) - n_acc
            checks.append(
                ConditionCheck(
                    f"balanced outcomes for word {levels[j].words[wi]!r} at level {j + 1}",
                    n_acc == n_rej,
                    detail=f"{n_acc} accepting vs {n_rej} rejecting in the reachable final set",
                )
            )

    return VerificationReport(
        w.kind, tuple(checks), all(c.passed for c in checks), tuple(notes)
    )


# ---------------------------------------------------------------------------
# classification

@dataclass(frozen=True)
class Verdict:
    """Outcome of the recognizability decision for one DFA."""

    classification: str
    minimal_dfa: Dfa
    monoid_complete: bool
    monoid_size: int
    witness: FragmentWitness | None = None
    plan: "object | None" = None  # SynthesisPlan for CONSTRUCTIBLE verdicts
    reason: str | None = None


def classify(dfa: Dfa, monoid_cap: int = DEFAULT_MONOID_CAP) -> Verdict:
    """Decide QFA-recognizability of the DFA's language.

    Minimizes internally.  Chained cycles put the language outside the class
    where the fragment conditions characterize recognizability; otherwise a
    verified fragment witness proves non-recognizability, and absence of
    fragments over a complete monoid yields a synthesis plan.  An incomplete
    monoid with no fragment found is reported as inconclusive, never guessed.
    """
    minimal = minimize(dfa)
    monoid = transition_monoid(minimal, monoid_cap)

    witness = detect_two_cycles(minimal, monoid)
    if witness is not None:
        return Verdict(
            classification=OUTSIDE_CHARACTERIZED_CLASS,
            minimal_dfa=minimal,
            monoid_complete=monoid.complete,
            monoid_size=len(monoid),
            witness=witness,
        )
    witness = detect_order_violation(minimal, monoid) or detect_fork(minimal, monoid)
    if witness is not None:
        return Verdict(
            classification=NOT_RECOGNIZABLE,
            minimal_dfa=minimal,
            monoid_complete=monoid.complete,
            monoid_size=len(monoid),
            witness=witness,
        )
    if not monoid.complete:
        return Verdict(
            classification=INCONCLUSIVE,
            minimal_dfa=minimal,
            monoid_complete=False,
            monoid_size=len(monoid),
            reason=f"monoid enumeration hit the cap ({monoid_cap}); no fragment found so far",
        )
    from qfalab.synthesis import plan as _plan

    return Verdict(
        classification=CONSTRUCTIBLE,
        minimal_dfa=minimal,
        monoid_complete=True,
        monoid_size=len(monoid),
        plan=_plan(minimal),
    )

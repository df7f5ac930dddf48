"""Deterministic automata: representation, minimization, containment, SCCs, monoids.

Everything here is pure and operates on immutable values; the other modules
query this one for the combinatorial structure of the input language.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

DEFAULT_MONOID_CAP = 20_000


class DfaParseError(ValueError):
    """Raised when a DFA file is malformed."""


@dataclass(frozen=True)
class Dfa:
    """A complete deterministic finite automaton over single-character symbols.

    `transitions` must be total: every (state, symbol) pair maps to a state.
    State and alphabet order is significant; it fixes iteration order and the
    canonical renaming produced by `minimize`.
    """

    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    start: str
    accepting: frozenset[str]
    transitions: Mapping[tuple[str, str], str]

    def __post_init__(self):
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate state names")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("duplicate alphabet symbols")
        state_set = set(self.states)
        if self.start not in state_set:
            raise ValueError(f"start state {self.start!r} not among states")
        if not self.accepting <= state_set:
            raise ValueError("accepting set contains unknown states")
        for q in self.states:
            for a in self.alphabet:
                target = self.transitions.get((q, a))
                if target is None:
                    raise ValueError(f"transitions not total: missing ({q!r}, {a!r})")
                if target not in state_set:
                    raise ValueError(f"transition ({q!r}, {a!r}) -> unknown state {target!r}")

    # index-based views, built lazily, for the hot loops below
    @cached_property
    def _index(self) -> dict[str, int]:
        return {q: i for i, q in enumerate(self.states)}

    @cached_property
    def _table(self) -> list[list[int]]:
        """_table[state_index][symbol_index] -> state_index."""
        idx = self._index
        return [
            [idx[self.transitions[(q, a)]] for a in self.alphabet]
            for q in self.states
        ]

    @cached_property
    def _accepting_indices(self) -> frozenset[int]:
        return frozenset(self._index[q] for q in self.accepting)

    def step(self, state: str, symbol: str) -> str:
        return self.transitions[(state, symbol)]

    def run(self, word: str, start: str | None = None) -> str:
        """State reached from `start` (default: the initial state) on `word`."""
        i = self._index[start if start is not None else self.start]
        table = self._table
        sym_index = {a: j for j, a in enumerate(self.alphabet)}
        for ch in word:
            i = table[i][sym_index[ch]]
        return self.states[i]

    def accepts(self, word: str) -> bool:
        return self.run(word) in self.accepting

    def complement(self) -> Dfa:
        return Dfa(
            states=self.states,
            alphabet=self.alphabet,
            start=self.start,
            accepting=frozenset(self.states) - self.accepting,
            transitions=self.transitions,
        )


@dataclass(frozen=True)
class ParseReport:
    """What the DFA parser did beyond a plain read."""

    completed_with_sink: bool = False
    sink_name: str | None = None
    missing_transitions: tuple[tuple[str, str], ...] = ()


def parse_dfa(text: str, complete_with_sink: bool = False) -> tuple[Dfa, ParseReport]:
    """Parse the structured-text DFA format.

    The format is a JSON object with keys "alphabet" (single-character
    strings), "states", "start", "accept" and "delta" (state -> symbol ->
    state).  A non-total delta is rejected unless `complete_with_sink` is
    set, in which case a fresh rejecting sink absorbs the missing
    transitions and the report records it.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DfaParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise DfaParseError("top-level value must be an object")
    for key in ("alphabet", "states", "start", "accept", "delta"):
        if key not in obj:
            raise DfaParseError(f"missing key {key!r}")

    alphabet = obj["alphabet"]
    states = obj["states"]
    if not isinstance(alphabet, list) or not all(isinstance(a, str) and len(a) == 1 for a in alphabet):
        raise DfaParseError("alphabet must be a list of single-character strings")
    if len(set(alphabet)) != len(alphabet):
        raise DfaParseError("duplicate alphabet symbols")
    if not isinstance(states, list) or not all(isinstance(s, str) for s in states):
        raise DfaParseError("states must be a list of names")
    if len(set(states)) != len(states):
        raise DfaParseError("duplicate state names")
    if not states:
        raise DfaParseError("at least one state is required")

    accept = obj["accept"]
    if not isinstance(accept, list) or not set(accept) <= set(states):
        raise DfaParseError("accept must be a list of known state names")
    start = obj["start"]
    if start not in states:
        raise DfaParseError(f"unknown start state {start!r}")

    delta = obj["delta"]
    if not isinstance(delta, dict):
        raise DfaParseError("delta must be an object")
    transitions: dict[tuple[str, str], str] = {}
    missing: list[tuple[str, str]] = []
    for q in states:
        row = delta.get(q, {})
        if not isinstance(row, dict):
            raise DfaParseError(f"delta[{q!r}] must be an object")
        for sym, target in row.items():
            if sym not in alphabet:
                raise DfaParseError(f"delta[{q!r}] uses unknown symbol {sym!r}")
            if target not in states:
                raise DfaParseError(f"delta[{q!r}][{sym!r}] -> unknown state {target!r}")
            transitions[(q, sym)] = target
        for sym in alphabet:
            if (q, sym) not in transitions:
                missing.append((q, sym))

    report = ParseReport()
    if missing:
        if not complete_with_sink:
            q, sym = missing[0]
            raise DfaParseError(
                f"delta is not total ({len(missing)} transitions missing, first: {q!r} on {sym!r}); "
                "pass --complete-with-sink to add a rejecting sink"
            )
        sink = "__sink__"
        while sink in states:
            sink += "_"
        states = list(states) + [sink]
        for pair in missing:
            transitions[pair] = sink
        for sym in alphabet:
            transitions[(sink, sym)] = sink
        report = ParseReport(
            completed_with_sink=True, sink_name=sink, missing_transitions=tuple(missing)
        )

    dfa = Dfa(
        states=tuple(states),
        alphabet=tuple(alphabet),
        start=start,
        accepting=frozenset(accept),
        transitions=transitions,
    )
    return dfa, report


def dfa_to_json(dfa: Dfa) -> str:
    delta = {q: {a: dfa.transitions[(q, a)] for a in dfa.alphabet} for q in dfa.states}
    obj = {
        "alphabet": list(dfa.alphabet),
        "states": list(dfa.states),
        "start": dfa.start,
        "accept": sorted(dfa.accepting, key=dfa.states.index),
        "delta": delta,
    }
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _reachable_indices(dfa: Dfa) -> list[int]:
    """Indices of reachable states in BFS discovery order (alphabet order tiebreak)."""
    table = dfa._table
    start = dfa._index[dfa.start]
    order = [start]
    seen = {start}
    queue = deque([start])
    while queue:
        i = queue.popleft()
        for j in table[i]:
            if j not in seen:
                seen.add(j)
                order.append(j)
                queue.append(j)
    return order


def minimize(dfa: Dfa) -> Dfa:
    """Canonical minimal DFA for the same language.

    Unreachable states are dropped, equivalent states merged, and the result
    is renamed s0, s1, ... by BFS discovery order from the start state with
    alphabet order as tiebreak, so equal languages give equal values.
    """
    reach = _reachable_indices(dfa)
    reach_set = set(reach)
    table = dfa._table
    acc = dfa._accepting_indices

    # Hopcroft-style partition refinement restricted to reachable states.
    final = frozenset(i for i in reach if i in acc)
    nonfinal = frozenset(reach_set - final)
    partition = {b for b in (final, nonfinal) if b}
    worklist = {min((final, nonfinal), key=len)} if final and nonfinal else set(partition)
    nsym = len(dfa.alphabet)
    preimage: list[dict[int, list[int]]] = [dict() for _ in range(nsym)]
    for i in reach:
        for s in range(nsym):
            preimage[s].setdefault(table[i][s], []).append(i)

    while worklist:
        splitter = worklist.pop()
        for s in range(nsym):
            affected: set[int] = set()
            for t in splitter:
                affected.update(preimage[s].get(t, ()))
            if not affected:
                continue
            for block in [b for b in partition if affected & b and not b <= affected]:
                inside = frozenset(block & affected)
                outside = frozenset(block - affected)
                partition.remove(block)
                partition.add(inside)
                partition.add(outside)
                if block in worklist:
                    worklist.remove(block)
                    worklist.add(inside)
                    worklist.add(outside)
                else:
                    worklist.add(min(inside, outside, key=len))

    block_of = {i: b for b in partition for i in b}

    # canonical BFS order over the quotient
    start_block = block_of[dfa._index[dfa.start]]
    order: list[frozenset[int]] = [start_block]
    number = {start_block: 0}
    queue = deque([start_block])
    while queue:
        b = queue.popleft()
        rep = min(b)
        for s in range(nsym):
            t = block_of[table[rep][s]]
            if t not in number:
                number[t] = len(order)
                order.append(t)
                queue.append(t)

    names = [f"s{k}" for k in range(len(order))]
    transitions = {}
    for k, b in enumerate(order):
        rep = min(b)
        for s, a in enumerate(dfa.alphabet):
            transitions[(names[k], a)] = names[number[block_of[table[rep][s]]]]
    accepting = frozenset(names[k] for k, b in enumerate(order) if min(b) in acc)
    return Dfa(
        states=tuple(names),
        alphabet=dfa.alphabet,
        start=names[0],
        accepting=accepting,
        transitions=transitions,
    )


def separating_word(d1: Dfa, s1: str, d2: Dfa, s2: str) -> str | None:
    """Shortest word accepted from s1 in d1 but rejected from s2 in d2, if any.

    Searched by BFS over the product automaton, so "no word" is exact.
    """
    if d1.alphabet != d2.alphabet:
        raise ValueError("alphabet mismatch")
    i1, i2 = d1._index[s1], d2._index[s2]
    acc1, acc2 = d1._accepting_indices, d2._accepting_indices
    t1, t2 = d1._table, d2._table
    seen = {(i1, i2)}
    queue: deque[tuple[int, int, str]] = deque([(i1, i2, "")])
    while queue:
        a1, a2, word = queue.popleft()
        if a1 in acc1 and a2 not in acc2:
            return word
        for s, ch in enumerate(d1.alphabet):
            nxt = (t1[a1][s], t2[a2][s])
            if nxt not in seen:
                seen.add(nxt)
                queue.append((nxt[0], nxt[1], word + ch))
    return None


def language_contains(d1: Dfa, s1: str, d2: Dfa, s2: str) -> bool:
    """True iff every word accepted from s1 in d1 is accepted from s2 in d2."""
    return separating_word(d1, s1, d2, s2) is None


def reachable_states(dfa: Dfa, source: str) -> frozenset[str]:
    idx = dfa._index[source]
    table = dfa._table
    seen = {idx}
    queue = deque([idx])
    while queue:
        i = queue.popleft()
        for j in table[i]:
            if j not in seen:
                seen.add(j)
                queue.append(j)
    return frozenset(dfa.states[i] for i in seen)


def shortest_word_between(dfa: Dfa, source: str, targets: Iterable[str]) -> str | None:
    """Shortest word leading from `source` into `targets` (BFS, alphabet order)."""
    goal = {dfa._index[t] for t in targets}
    i = dfa._index[source]
    if i in goal:
        return ""
    table = dfa._table
    seen = {i}
    queue: deque[tuple[int, str]] = deque([(i, "")])
    while queue:
        j, word = queue.popleft()
        for s, ch in enumerate(dfa.alphabet):
            k = table[j][s]
            if k in goal:
                return word + ch
            if k not in seen:
                seen.add(k)
                queue.append((k, word + ch))
    return None


def closed_sccs(dfa: Dfa) -> list[frozenset[str]]:
    """Bottom strongly connected components: SCCs with no outgoing edge.

    A state q lies in one iff every state reachable from q can reach q back.
    Components are returned with a canonical order (by smallest member index).
    """
    n = len(dfa.states)
    table = dfa._table

    # Tarjan, iterative
    index_counter = 0
    indices = [-1] * n
    lowlink = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comp_of = [-1] * n
    comps: list[list[int]] = []

    for root in range(n):
        if indices[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work.pop()
            if pi == 0:
                indices[v] = lowlink[v] = index_counter
                index_counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            for s in range(pi, len(table[v])):
                w = table[v][s]
                if indices[w] == -1:
                    work.append((v, s + 1))
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    lowlink[v] = min(lowlink[v], indices[w])
            if recurse:
                continue
            if lowlink[v] == indices[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp_of[w] = len(comps)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])

    closed = []
    for ci, comp in enumerate(comps):
        if all(comp_of[table[v][s]] == ci for v in comp for s in range(len(dfa.alphabet))):
            closed.append(frozenset(dfa.states[v] for v in sorted(comp)))
    closed.sort(key=lambda c: min(dfa._index[q] for q in c))
    return closed


@dataclass(frozen=True)
class MonoidElement:
    """The state mapping induced by some word, with one shortest witness word."""

    mapping: tuple[int, ...]
    witness_word: str

    def apply(self, state_index: int) -> int:
        return self.mapping[state_index]


@dataclass(frozen=True)
class Monoid:
    """Transition monoid of a DFA, enumerated up to a cap.

    `elements[0]` is the identity; the generators (letter mappings) follow in
    BFS order.  `complete` is False iff more than `cap` distinct mappings
    exist, in which case downstream detectors may only report inconclusively.
    """

    states: tuple[str, ...]
    elements: tuple[MonoidElement, ...]
    complete: bool
    index_of: Mapping[tuple[int, ...], int] | None = field(
        repr=False, hash=False, compare=False, default=None
    )

    def __len__(self) -> int:
        return len(self.elements)


def transition_monoid(dfa: Dfa, cap: int = DEFAULT_MONOID_CAP) -> Monoid:
    """BFS closure of the letter mappings under composition.

    Elements are discovered in order of shortest witness word (alphabet order
    tiebreak), so element indices are deterministic.
    """
    if cap < len(dfa.alphabet) + 1:
        raise ValueError(f"cap must be at least |alphabet|+1 = {len(dfa.alphabet) + 1}")
    n = len(dfa.states)
    table = dfa._table
    letters = [tuple(table[i][s] for i in range(n)) for s in range(len(dfa.alphabet))]

    identity = tuple(range(n))
    elements = [MonoidElement(identity, "")]
    index_of = {identity: 0}
    queue = deque([0])
    complete = True
    while queue:
        ei = queue.popleft()
        elem = elements[ei]
        for s, ch in enumerate(dfa.alphabet):
            letter = letters[s]
            composed = tuple(letter[elem.mapping[i]] for i in range(n))
            if composed in index_of:
                continue
            if len(elements) >= cap:
                complete = False
                queue.clear()
                break
            index_of[composed] = len(elements)
            elements.append(MonoidElement(composed, elem.witness_word + ch))
            queue.append(len(elements) - 1)
    return Monoid(
        states=dfa.states,
        elements=tuple(elements),
        complete=complete,
        index_of=index_of,
    )

"""Shared strategies and independent brute-force oracles for the test suite.

The oracles here recompute properties from first principles (word
enumeration, definitional reach/return checks, Gram-matrix arithmetic) so
the library implementations are checked against a second, independent path.
"""

from __future__ import annotations

from collections import deque
from itertools import product

import numpy as np
from hypothesis import HealthCheck, settings, strategies as st

from qfalab.automata import Dfa

settings.register_profile(
    "qfalab",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("qfalab")


# ---------------------------------------------------------------------------
# random automata

def make_dfa(n_states: int, targets: list[int], accepting_mask: list[bool],
             alphabet: tuple[str, ...] = ("a", "b")) -> Dfa:
    """Deterministic DFA from flat data: targets has n_states * len(alphabet) entries."""
    states = tuple(f"q{i}" for i in range(n_states))
    transitions = {}
    k = 0
    for i in range(n_states):
        for sym in alphabet:
            transitions[(states[i], sym)] = states[targets[k] % n_states]
            k += 1
    accepting = frozenset(s for s, m in zip(states, accepting_mask) if m)
    return Dfa(states, alphabet, states[0], accepting, transitions)


@st.composite
def dfas(draw, min_states: int = 1, max_states: int = 6, alphabet: tuple[str, ...] = ("a", "b")):
    n = draw(st.integers(min_states, max_states))
    targets = draw(st.lists(st.integers(0, n - 1), min_size=n * len(alphabet), max_size=n * len(alphabet)))
    accepting = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    return make_dfa(n, targets, accepting, alphabet)


def random_dfa(rng: np.random.Generator, n_states: int, alphabet=("a", "b")) -> Dfa:
    targets = [int(t) for t in rng.integers(0, n_states, size=n_states * len(alphabet))]
    accepting = [bool(b) for b in rng.integers(0, 2, size=n_states)]
    return make_dfa(n_states, targets, accepting, alphabet)


# ---------------------------------------------------------------------------
# brute-force oracles

def words_up_to(alphabet, max_len):
    for n in range(max_len + 1):
        for tup in product(alphabet, repeat=n):
            yield "".join(tup)


def reachable_state_names(dfa: Dfa) -> set[str]:
    seen = {dfa.start}
    queue = deque([dfa.start])
    while queue:
        q = queue.popleft()
        for a in dfa.alphabet:
            t = dfa.transitions[(q, a)]
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return seen


def nerode_classes(dfa: Dfa, max_len: int) -> set[frozenset[str]]:
    """Partition of the reachable states by acceptance over all words up to max_len."""
    reachable = sorted(reachable_state_names(dfa), key=dfa.states.index)
    signatures: dict[tuple, list[str]] = {}
    for q in reachable:
        sig = tuple(dfa.run(w, start=q) in dfa.accepting for w in words_up_to(dfa.alphabet, max_len))
        signatures.setdefault(sig, []).append(q)
    return {frozenset(group) for group in signatures.values()}


def monoid_by_word_replay(dfa: Dfa) -> dict[tuple[int, ...], str]:
    """All distinct word-induced mappings, each word replayed from scratch.

    BFS over words, pruned on previously seen mappings; returns mapping ->
    first word found.
    """
    def mapping_of(word: str) -> tuple[int, ...]:
        return tuple(dfa.states.index(dfa.run(word, start=q)) for q in dfa.states)

    seen: dict[tuple[int, ...], str] = {}
    queue = deque([""])
    seen[mapping_of("")] = ""
    while queue:
        w = queue.popleft()
        for ch in dfa.alphabet:
            candidate = w + ch
            m = mapping_of(candidate)
            if m not in seen:
                seen[m] = candidate
                queue.append(candidate)
    return seen


def definitionally_closed_states(dfa: Dfa) -> set[str]:
    """States q such that every state reachable from q can reach q back."""
    reach: dict[str, set[str]] = {}
    for q in dfa.states:
        seen = {q}
        queue = deque([q])
        while queue:
            s = queue.popleft()
            for a in dfa.alphabet:
                t = dfa.transitions[(s, a)]
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
        reach[q] = seen
    return {q for q in dfa.states if all(q in reach[s] for s in reach[q])}


def recurrence_by_word_quantification(n: int, f, g, source: int, max_blocks: int) -> bool:
    """Direct check: for every block string t (<= max_blocks), the state
    t(source) admits a return string t1 (<= max_blocks) with t1(t(source)) = source."""
    def apply_blocks(blocks, state):
        for m in blocks:
            state = m[state]
        return state

    all_block_strings = []
    for k in range(max_blocks + 1):
        all_block_strings.extend(product((f, g), repeat=k))
    targets = {apply_blocks(blocks, source) for blocks in all_block_strings}
    for s in targets:
        if not any(apply_blocks(blocks, s) == source for blocks in all_block_strings):
            return False
    return True


# ---------------------------------------------------------------------------
# random machines

def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return q * phases


def random_qfa(rng: np.random.Generator, dim: int = 6, alphabet=("a", "b"),
               n_acc: int = 1, n_rej: int = 1):
    from qfalab.qfa import DOLLAR, KAPPA, Qfa, freeze

    unitaries = {sym: random_unitary(rng, dim) for sym in (*alphabet, KAPPA, DOLLAR)}
    indices = list(rng.permutation(dim))
    acc = frozenset(int(i) for i in indices[:n_acc])
    rej = frozenset(int(i) for i in indices[n_acc:n_acc + n_rej])
    start = int(indices[-1])
    return freeze(Qfa(dimension=dim, alphabet=tuple(alphabet), unitaries=unitaries,
                      start=start, acc=acc, rej=rej))

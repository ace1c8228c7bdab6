"""The expansion of a semiautomaton over state permutations.

Expansion states are permutations of the state set; a transition reorders
the images of all states by first appearance and carries a level: the
length of the stable prefix of positions.  Threads trace single runs
inside a run of the expansion and never increase in level.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .automata import Semiautomaton

Perm = tuple[int, ...]


class Expansion:
    """On-demand expansion transitions with a memo table.

    The full expansion has factorially many states and is never
    materialized; the memo tolerates concurrent idempotent insertion.
    """

    def __init__(self, b: Semiautomaton):
        self.b = b
        self._memo: dict[tuple[Perm, str], tuple[Perm, int]] = {}

    def identity(self) -> Perm:
        return tuple(range(self.b.n))

    def is_perm(self, p: Sequence[int]) -> bool:
        return sorted(p) == list(range(self.b.n))

    def level_of(self, q: int, p: Perm) -> int:
        """1-based position of state q in permutation p."""
        return p.index(q) + 1

    def step(self, p: Perm, letter: str) -> tuple[Perm, int]:
        """Target permutation and transition level for one letter."""
        key = (p, letter)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        b = self.b
        images = [b.step(q, letter) for q in p]
        listed: list[int] = []
        for q in images:
            if q not in listed:
                listed.append(q)
        remaining = [q for q in range(b.n) if q not in listed]
        target = tuple(listed + remaining)
        stable = {i + 1 for i, q in enumerate(images) if target.index(q) + 1 == i + 1}
        level = 0
        while level + 1 in stable:
            level += 1
        assert stable == set(range(1, level + 1)), "stable positions must form a prefix"
        result = (target, level)
        self._memo[key] = result
        return result

    def run(self, p0: Perm, word: Iterable[str]) -> tuple[list[Perm], list[int]]:
        """The expansion run on a word: states visited and transition levels."""
        states = [p0]
        levels: list[int] = []
        cur = p0
        for letter in word:
            cur, lv = self.step(cur, letter)
            states.append(cur)
            levels.append(lv)
        return states, levels

    def thread_of(self, run: Sequence[Perm], q: int, word: Sequence[str]) -> list[int]:
        """Level trace of the base run starting at q, along an expansion run."""
        if len(run) != len(word) + 1:
            raise ValueError("run length must be |word| + 1")
        out = [self.level_of(q, run[0])]
        cur = q
        for i, letter in enumerate(word):
            cur = self.b.step(cur, letter)
            out.append(self.level_of(cur, run[i + 1]))
        return out


@dataclass(frozen=True)
class DecompositionWitness:
    positions: tuple[int, ...]       # j_1 < ... < j_k = m
    levels: tuple[int, ...]          # strictly decreasing
    states: tuple[int, ...]          # q_0 .. q_k


@dataclass(frozen=True)
class DecompositionResult:
    ok: bool
    witness: DecompositionWitness | None = None
    actual_end: int | None = None    # on failure: where the run really ends

    def __bool__(self) -> bool:
        return self.ok


def decompose_run(
    exp: Expansion, run: Sequence[Perm], word: Sequence[str], q: int, q2: int
) -> DecompositionResult:
    """Decide reachability q -> q2 on the word from an expansion run alone.

    Searches for a stratified witness: drop positions, strictly
    decreasing levels, and intermediate states such that (a) the start
    and end states sit at the outer levels, (b) consecutive strata are
    linked by one transition of the base automaton, and (c) no transition
    taken up to the i-th drop position has level below the i-th level.
    The check never simulates the base automaton along the whole word.
    """
    b = exp.b
    n = b.n
    m = len(word)
    if len(run) != m + 1:
        raise ValueError("run length must be |word| + 1")
    _, levels = exp.run(run[0], word)

    def segments_stable(positions: tuple[int, ...], lvls: tuple[int, ...]) -> bool:
        # within each constant-level stratum every transition keeps the
        # stratum level alive; the drop transitions between strata are free
        for i in range(len(positions)):
            lo = 0 if i == 0 else positions[i - 1] + 1
            if any(levels[t] < lvls[i] for t in range(lo, positions[i])):
                return False
        return True

    def found() -> DecompositionWitness | None:
        for k in range(1, n + 1):
            for positions in _increasing_tuples(k, m):
                for lvls in _decreasing_tuples(k, n):
                    if not segments_stable(positions, lvls):
                        continue
                    states = _solve_states(exp, run, word, q, q2, positions, lvls)
                    if states is None:
                        continue
                    return DecompositionWitness(positions, lvls, states)
        return None

    w = found()
    if w is not None:
        return DecompositionResult(True, w)
    return DecompositionResult(False, actual_end=b.run(q, word))


def _increasing_tuples(k: int, m: int):
    """All 0 <= j_1 < ... < j_k = m."""
    if k == 1:
        yield (m,)
        return
    import itertools

    for prefix in itertools.combinations(range(m), k - 1):
        yield prefix + (m,)


def _decreasing_tuples(k: int, n: int):
    import itertools

    for combo in itertools.combinations(range(1, n + 1), k):
        yield tuple(reversed(combo))


def _solve_states(
    exp: Expansion,
    run: Sequence[Perm],
    word: Sequence[str],
    q: int,
    q2: int,
    positions: tuple[int, ...],
    lvls: tuple[int, ...],
) -> tuple[int, ...] | None:
    """States q_0..q_k satisfying the positional witness conditions, if any."""
    b = exp.b
    k = len(positions)
    if exp.level_of(q, run[0]) != lvls[0]:
        return None
    states = [q]
    for i in range(1, k):
        j = positions[i - 1]
        # the i-th stratum state is pinned by its level at the drop position
        qi = run[j][lvls[i - 1] - 1]
        nxt = b.step(qi, word[j])
        if exp.level_of(nxt, run[j + 1]) != lvls[i]:
            return None
        states.append(qi)
    qk = run[len(word)][lvls[k - 1] - 1]
    if qk != q2:
        return None
    states.append(qk)
    return tuple(states)


def expansion_dot(exp: Expansion, start: Perm, max_states: int = 200) -> str:
    """DOT of the part of the expansion reachable from one permutation."""
    b = exp.b
    seen = {start}
    order = [start]
    edges: list[tuple[Perm, str, Perm, int]] = []
    todo = [start]
    while todo and len(seen) <= max_states:
        p = todo.pop(0)
        for letter in b.alphabet:
            p2, lv = exp.step(p, letter)
            edges.append((p, letter, p2, lv))
            if p2 not in seen:
                seen.add(p2)
                order.append(p2)
                todo.append(p2)

    def label(p: Perm) -> str:
        return "(" + ",".join(f"q{q}" for q in p) + ")"

    names = {p: f"p{i}" for i, p in enumerate(order)}
    lines = ["digraph expansion {", "  rankdir=LR;"]
    for p in order:
        lines.append(f'  {names[p]} [shape=box label="{label(p)}"];')
    for p, letter, p2, lv in edges:
        if p2 in names:
            lines.append(f'  {names[p]} -> {names[p2]} [label="{letter}/{lv}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"

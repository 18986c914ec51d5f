"""Exact cover with colored secondary items.

Semantics: a solution is a set of options covering every primary item
exactly once; a secondary item may be covered by several options only if
they all assign it the same color (color 0 is an ordinary color, not a
wildcard).

The solver keeps the set of still-compatible options as a sorted index
array and filters it with vectorized bitmask operations when an option is
chosen.  Branching is deterministic: always the primary item with the
fewest active options, ties broken by lowest item id, candidate options
in ascending index order.  Node counts and solution order are therefore
reproducible across runs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

__all__ = [
    "XCCProblem",
    "Solution",
    "SolveStats",
    "solve",
    "solve_all",
    "verify_solution",
    "export_text",
    "import_text",
]


def _check_name(name: str) -> str:
    if not name or any(c.isspace() for c in name) or ":" in name or "|" in name:
        raise ValueError(f"bad item name {name!r}")
    return name


class XCCProblem:
    """Primary/secondary item lists plus options.

    Each option is (primary item ids, ((secondary item id, color), ...)).
    Every option must cover at least one primary item, may not repeat an
    item, and all colors are non-negative integers.
    """

    def __init__(self, primary, secondary=(), options=()):
        self.primary = [_check_name(n) for n in primary]
        self.secondary = [_check_name(n) for n in secondary]
        if len(set(self.primary) | set(self.secondary)) != len(self.primary) + len(
            self.secondary
        ):
            raise ValueError("duplicate item name")
        self.options: list = []
        for opt in options:
            self.add_option(*opt)

    def add_option(self, primary_ids, secondary_colored=()) -> int:
        prim = tuple(sorted(int(i) for i in primary_ids))
        sec = tuple(sorted((int(s), int(c)) for s, c in secondary_colored))
        if not prim:
            raise ValueError("option covers no primary item")
        if any(not 0 <= i < len(self.primary) for i in prim):
            raise ValueError("primary item id out of range")
        if any(not 0 <= s < len(self.secondary) for s, _ in sec):
            raise ValueError("secondary item id out of range")
        if any(c < 0 for _, c in sec):
            raise ValueError("colors must be non-negative")
        if len(set(prim)) != len(prim) or len({s for s, _ in sec}) != len(sec):
            raise ValueError("item repeated within an option")
        self.options.append((prim, sec))
        return len(self.options) - 1

    @property
    def n_options(self) -> int:
        return len(self.options)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, XCCProblem)
            and self.primary == other.primary
            and self.secondary == other.secondary
            and self.options == other.options
        )

    def __repr__(self) -> str:
        return (
            f"XCCProblem({len(self.primary)}+{len(self.secondary)} items, "
            f"{len(self.options)} options)"
        )


@dataclass(frozen=True)
class Solution:
    option_ids: tuple


@dataclass
class SolveStats:
    nodes: int = 0
    solutions: int = 0
    elapsed: float = 0.0
    limit_hit: bool = False


class _Stop(Exception):
    pass


class _Compiled:
    """Array form of a problem for the vectorized search."""

    def __init__(self, p: XCCProblem):
        n_opt = len(p.options)
        n_prim = len(p.primary)
        self.words = max(1, (n_prim + 63) // 64)
        self.pmask = np.zeros((n_opt, self.words), dtype=np.uint64)
        for o, (prim, _) in enumerate(p.options):
            for i in prim:
                self.pmask[o, i >> 6] |= np.uint64(1) << np.uint64(i & 63)
        self.full = np.zeros(self.words, dtype=np.uint64)
        for i in range(n_prim):
            self.full[i >> 6] |= np.uint64(1) << np.uint64(i & 63)
        self.item_word = [i >> 6 for i in range(n_prim)]
        self.item_bit = [np.uint64(1) << np.uint64(i & 63) for i in range(n_prim)]
        # option -> (secondary, color) pairs
        self.opt_sec = [opt[1] for opt in p.options]
        # secondary item -> (option ids, colors), ascending option id
        by_sec: list = [[] for _ in p.secondary]
        for o, (_, sec) in enumerate(p.options):
            for s, c in sec:
                by_sec[s].append((o, c))
        self.sec_opts = [
            np.array([o for o, _ in lst], dtype=np.int64) for lst in by_sec
        ]
        self.sec_colors = [
            np.array([c for _, c in lst], dtype=np.int64) for lst in by_sec
        ]
        self.n_prim = n_prim


def solve(
    problem: XCCProblem,
    mode: str = "enumerate",
    limit: int | None = None,
    on_solution=None,
    node_cap: int | None = None,
    time_cap: float | None = None,
) -> SolveStats:
    """Visit every solution exactly once in deterministic order.

    mode "enumerate" invokes on_solution per solution, "count" only counts,
    "first" stops after one solution.  A solution limit, node cap or time
    cap stops the search early and is reported via stats.limit_hit.  The
    callback must not re-enter the solver instance.
    """
    if mode not in ("enumerate", "count", "first"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "first":
        limit = 1 if limit is None else min(1, limit)
    comp = _Compiled(problem)
    stats = SolveStats()
    t0 = time.perf_counter()
    chosen: list = []
    pmask = comp.pmask
    words = comp.words
    n_prim = comp.n_prim

    def emit() -> None:
        stats.solutions += 1
        if mode != "count" and on_solution is not None:
            on_solution(Solution(tuple(sorted(chosen))))
        if limit is not None and stats.solutions >= limit:
            stats.limit_hit = True
            raise _Stop

    def search(active: np.ndarray, covered: np.ndarray) -> None:
        stats.nodes += 1
        if node_cap is not None and stats.nodes > node_cap:
            stats.limit_hit = True
            raise _Stop
        if (
            time_cap is not None
            and stats.nodes % 256 == 0
            and time.perf_counter() - t0 > time_cap
        ):
            stats.limit_hit = True
            raise _Stop
        if (covered == comp.full).all():
            emit()
            return
        sub = pmask[active]
        best_item = -1
        best_count = None
        for i in range(n_prim):
            w, b = comp.item_word[i], comp.item_bit[i]
            if covered[w] & b:
                continue
            cnt = int(np.count_nonzero(sub[:, w] & b))
            if best_count is None or cnt < best_count:
                best_item, best_count = i, cnt
                if cnt == 0:
                    break
        if best_count == 0:
            return
        w, b = comp.item_word[best_item], comp.item_bit[best_item]
        cand = active[(sub[:, w] & b) != 0]
        for o in cand:
            o = int(o)
            omask = pmask[o]
            if words == 1:
                conflict = (sub[:, 0] & omask[0]) != 0
            else:
                conflict = np.any(sub & omask, axis=1)
            new_active = active[~conflict]
            sec = comp.opt_sec[o]
            if sec:
                bad_parts = []
                for s, c in sec:
                    opts_s = comp.sec_opts[s]
                    if opts_s.size:
                        bad_parts.append(opts_s[comp.sec_colors[s] != c])
                if bad_parts:
                    bad = np.unique(np.concatenate(bad_parts))
                    if bad.size:
                        new_active = new_active[
                            ~np.isin(new_active, bad, assume_unique=False)
                        ]
            chosen.append(o)
            search(new_active, covered | omask)
            chosen.pop()

    try:
        search(
            np.arange(len(problem.options), dtype=np.int64),
            np.zeros(words, dtype=np.uint64),
        )
    except _Stop:
        pass
    stats.elapsed = time.perf_counter() - t0
    return stats


def solve_all(problem: XCCProblem, limit: int | None = None):
    """Convenience wrapper collecting the solutions; returns (list, stats)."""
    sols: list = []
    stats = solve(problem, mode="enumerate", limit=limit, on_solution=sols.append)
    return sols, stats


def verify_solution(problem: XCCProblem, option_ids) -> bool:
    """Independent replay check of the Solution invariants against the
    problem, using no solver state."""
    counts = [0] * len(problem.primary)
    colors: dict = {}
    for o in option_ids:
        prim, sec = problem.options[o]
        for i in prim:
            counts[i] += 1
        for s, c in sec:
            if s in colors and colors[s] != c:
                return False
            colors[s] = c
    return all(c == 1 for c in counts)


# ---------------------------------------------------------------------------
# text format: line 1 lists primary items, then "|", then secondary items;
# one option per line with tokens "item" (primary) or "item:color" (secondary)


def export_text(problem: XCCProblem) -> str:
    lines = [" ".join(problem.primary) + " | " + " ".join(problem.secondary)]
    for prim, sec in problem.options:
        toks = [problem.primary[i] for i in prim]
        toks += [f"{problem.secondary[s]}:{c}" for s, c in sec]
        lines.append(" ".join(toks))
    return "\n".join(lines).rstrip() + "\n"


def import_text(text: str) -> XCCProblem:
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty problem text")
    head = lines[0]
    if "|" not in head:
        raise ValueError("header line must contain '|'")
    left, _, right = head.partition("|")
    primary = left.split()
    secondary = right.split()
    p = XCCProblem(primary, secondary)
    prim_id = {n: i for i, n in enumerate(primary)}
    sec_id = {n: i for i, n in enumerate(secondary)}
    for ln, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        prim: list = []
        sec: list = []
        for tok in line.split():
            if ":" in tok:
                name, _, color = tok.partition(":")
                if name not in sec_id:
                    raise ValueError(f"line {ln}: unknown secondary item {name!r}")
                try:
                    c = int(color)
                except ValueError:
                    raise ValueError(f"line {ln}: malformed color {color!r}") from None
                if c < 0:
                    raise ValueError(f"line {ln}: malformed color {color!r}")
                sec.append((sec_id[name], c))
            else:
                if tok in prim_id:
                    prim.append(prim_id[tok])
                elif tok in sec_id:
                    raise ValueError(f"line {ln}: secondary item {tok!r} needs a color")
                else:
                    raise ValueError(f"line {ln}: unknown item {tok!r}")
        if not prim:
            raise ValueError(f"line {ln}: option covers no primary item")
        p.add_option(prim, sec)
    return p

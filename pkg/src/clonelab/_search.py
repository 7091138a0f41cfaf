"""Search engines behind decide_subfunction.

Every engine looks for h = (h_1, ..., h_m) with g(h(a)) = f(a) at each
point a of A^n, i.e. h(a) in the preimage g^{-1}(f(a)), subject to a
per-coordinate clone constraint on each h_j.  Engines either return a
witness, return None after exhausting their space, or raise CapacityError.
"""

from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import LIMITS, CapacityError
from .finops import Operation, point_grid


def preimages(g: Operation) -> dict[int, list[tuple[int, ...]]]:
    """value -> sorted list of points of g with that value."""
    out: dict[int, list[tuple[int, ...]]] = {v: [] for v in range(g.k)}
    for idx, p in enumerate(itertools.product(range(g.k), repeat=g.arity)):
        out[g.table[idx]].append(p)
    return out


class _Counter:
    def __init__(self, ceiling: int | None):
        self.nodes = 0
        self.ceiling = LIMITS.nodes if ceiling is None else ceiling

    def add(self, amount: int = 1) -> None:
        self.nodes += amount
        if self.nodes > self.ceiling:
            raise CapacityError(f"search exceeded the node ceiling {self.ceiling}", self.ceiling)


def _prefix_tables(f_table: bytes, pre, k: int, coords: Sequence[int]) -> list[np.ndarray]:
    """allowed[j][a, code]: some y in g^{-1}(f(a)) has y[coords[:j]] encoding to code."""
    per_value = {}
    for v, tuples in pre.items():
        tabs = []
        for j in range(1, len(coords) + 1):
            vec = np.zeros(k**j, dtype=bool)
            for y in tuples:
                code = 0
                for c in coords[:j]:
                    code = code * k + y[c]
                vec[code] = True
            tabs.append(vec)
        per_value[v] = tabs
    return [
        np.stack([per_value[v][j] for v in f_table]) for j in range(len(coords))
    ]


def _product_search(pools: Sequence[np.ndarray], allowed: list[np.ndarray], k: int,
                    counter: _Counter, on_complete=None):
    """Depth-first search over pools[0] x pools[1] x ... in lexicographic order.

    Each level filters a whole pool at once against the prefix tables.  If
    ``on_complete`` is given it is called with the chosen row indices and
    the search continues unless it returns a non-None value.
    """
    depth = len(pools)
    N = allowed[0].shape[0]
    cols = np.arange(N)

    def rec(level: int, codes: np.ndarray, chosen: list[int]):
        pool = pools[level]
        counter.add(len(pool))
        cand = codes[None, :] * k + pool
        ok = allowed[level][cols[None, :], cand].all(axis=1)
        for idx in np.flatnonzero(ok):
            chosen.append(int(idx))
            if level + 1 == depth:
                result = list(chosen) if on_complete is None else on_complete(chosen)
                if result is not None:
                    return result
            else:
                result = rec(level + 1, cand[idx], chosen)
                if result is not None:
                    return result
            chosen.pop()
        return None

    return rec(0, np.zeros(N, dtype=np.int64), [])


def enumerate_search(f: Operation, g: Operation, pool: np.ndarray,
                     ceiling: int | None = None) -> tuple[list[int] | None, int]:
    """Cartesian search over pool^m; returns (pool row indices, nodes)."""
    counter = _Counter(ceiling)
    pre = preimages(g)
    if any(not pre[v] for v in set(f.table)):
        return None, 0
    m = g.arity
    allowed = _prefix_tables(f.table, pre, f.k, list(range(m)))
    pool64 = pool.astype(np.int64)
    found = _product_search([pool64] * m, allowed, f.k, counter)
    return found, counter.nodes


# -- point-wise constraint search ------------------------------------------------------


@dataclass(frozen=True)
class CoordMode:
    """Which clone shapes a coordinate table may take."""

    unary: bool = False
    linear: bool = False
    budget: int = 0
    proj: bool = False
    free: bool = False


class _Coord:
    """Incremental feasibility state of one partial inner table."""

    __slots__ = ("mode", "n", "full", "counts", "nvals", "vmask", "first",
                 "umap", "uvalid", "pivots", "ldead", "pvalid")

    def __init__(self, mode: CoordMode, k: int, n: int):
        self.mode = mode
        self.n = n
        self.full = (1 << k) - 1
        self.counts = [0] * k
        self.nvals = 0
        self.vmask = 0
        self.first = -1
        self.umap = [[-1] * k for _ in range(n)]
        self.uvalid = [True] * n
        self.pivots: dict[int, tuple[int, int]] = {}
        self.ldead = False
        self.pvalid = [True] * n

    def _reduce(self, row: int) -> tuple[int, int]:
        rhs = 0
        piv = self.pivots
        while row:
            entry = piv.get(row & -row)
            if entry is None:
                return row, rhs
            row ^= entry[0]
            rhs ^= entry[1]
        return 0, rhs

    def mask(self, pt: tuple[int, ...], row: int) -> int:
        mode = self.mode
        if mode.free or (self.nvals == 0 and not mode.proj):
            return self.full
        m = 0
        if mode.unary:
            for i in range(self.n):
                if self.uvalid[i]:
                    x = self.umap[i][pt[i]]
                    if x < 0:
                        return self.full
                    m |= 1 << x
        if mode.budget:
            if self.nvals < mode.budget:
                return self.full
            if self.nvals == mode.budget:
                m |= self.vmask
        if mode.linear and not self.ldead:
            residual, rhs = self._reduce(row)
            if self.nvals == 1:
                if residual:
                    return self.full
                m |= 1 << self.first
            elif self.nvals == 2:
                if residual:
                    m |= self.vmask
                elif rhs == 0:
                    m |= 1 << self.first
                else:
                    m |= self.vmask & ~(1 << self.first)
        if mode.proj:
            for i in range(self.n):
                if self.pvalid[i]:
                    m |= 1 << pt[i]
        return m

    def assign(self, pt: tuple[int, ...], row: int, v: int, trail: list) -> None:
        mode = self.mode
        if self.counts[v] == 0:
            self.nvals += 1
            self.vmask |= 1 << v
            if self.first < 0:
                self.first = v
                trail.append((self, 0, v, True))
            else:
                trail.append((self, 0, v, False))
        else:
            trail.append((self, 0, v, None))
        self.counts[v] += 1
        if mode.unary:
            for i in range(self.n):
                if self.uvalid[i]:
                    x = self.umap[i][pt[i]]
                    if x < 0:
                        self.umap[i][pt[i]] = v
                        trail.append((self, 1, i, pt[i]))
                    elif x != v:
                        self.uvalid[i] = False
                        trail.append((self, 2, i, None))
        if mode.linear and not self.ldead:
            if self.nvals > 2:
                self.ldead = True
                trail.append((self, 3, None, None))
            else:
                bit = 0 if v == self.first else 1
                residual, rhs = self._reduce(row)
                if residual:
                    key = residual & -residual
                    self.pivots[key] = (residual, rhs ^ bit)
                    trail.append((self, 4, key, None))
                elif rhs != bit:
                    self.ldead = True
                    trail.append((self, 3, None, None))
        if mode.proj:
            for i in range(self.n):
                if self.pvalid[i] and pt[i] != v:
                    self.pvalid[i] = False
                    trail.append((self, 5, i, None))

    @staticmethod
    def undo(entry) -> None:
        coord, kind, x, y = entry
        if kind == 0:
            coord.counts[x] -= 1
            if y is not None:
                coord.nvals -= 1
                coord.vmask &= ~(1 << x)
                if y:
                    coord.first = -1
        elif kind == 1:
            coord.umap[x][y] = -1
        elif kind == 2:
            coord.uvalid[x] = True
        elif kind == 3:
            coord.ldead = False
        elif kind == 4:
            del coord.pivots[x]
        else:
            coord.pvalid[x] = True


def point_search(f: Operation, g: Operation, modes: Sequence[CoordMode | None],
                 fixed: dict[int, np.ndarray] | None = None, pre=None,
                 counter: _Counter | None = None) -> list[list[int]] | None:
    """Assign h(a) point by point.

    ``modes[j]`` constrains coordinate j; coordinates listed in ``fixed``
    (mode None) already have full tables.  Branches on the unassigned
    point with the fewest surviving candidates after forward checking;
    points are scanned by (preimage size, point index) and only those with
    a smaller preimage set than the current best are ranked.  Every
    unassigned point is checked for a wipe-out.  Returns the m tables.
    """
    k, n, m = f.k, f.arity, g.arity
    fixed = fixed or {}
    counter = counter or _Counter(None)
    pre = pre if pre is not None else preimages(g)
    search = [j for j in range(m) if j not in fixed]
    N = k**n
    pts = [tuple(int(x) for x in row) for row in point_grid(k, n)]
    rows = [sum(1 << (i * k + p[i]) for i in range(n)) for p in pts]

    base: list[list[tuple[int, ...]]] = []
    for a in range(N):
        dom = []
        seen = set()
        for y in pre[f.table[a]]:
            if all(y[j] == fixed[j][a] for j in fixed):
                sub = tuple(y[j] for j in search)
                if sub not in seen:
                    seen.add(sub)
                    dom.append(sub)
        if not dom:
            return None
        base.append(dom)

    if not search:
        return [list(map(int, fixed[j])) for j in range(m)]

    coords = [_Coord(modes[j], k, n) for j in search]
    static = sorted(range(N), key=lambda a: (len(base[a]), a))
    rank = {a: r for r, a in enumerate(static)}
    assignment: list[tuple[int, ...] | None] = [None] * N
    trail: list = []
    s = len(search)
    full = (1 << k) - 1

    def current_domain(a: int) -> list[tuple[int, ...]]:
        pt, row = pts[a], rows[a]
        masks = [c.mask(pt, row) for c in coords]
        if all(mk == full for mk in masks):
            return base[a]
        return [y for y in base[a] if all(masks[j] >> y[j] & 1 for j in range(s))]

    def alive(a: int) -> bool:
        pt, row = pts[a], rows[a]
        masks = [c.mask(pt, row) for c in coords]
        return any(all(masks[j] >> y[j] & 1 for j in range(s)) for y in base[a])

    def rec(remaining: int) -> bool:
        if remaining == 0:
            return True
        best = None
        best_dom = None
        for a in static:
            if assignment[a] is not None:
                continue
            if best is not None and len(base[a]) >= len(best_dom):
                # larger candidate pools are only checked for a wipe-out, not ranked
                if not alive(a):
                    return False
                continue
            dom = current_domain(a)
            if not dom:
                return False
            if best is None or len(dom) < len(best_dom):
                best, best_dom = a, dom
                if len(dom) == 1:
                    break
        pt, row = pts[best], rows[best]
        for y in best_dom:
            counter.add()
            mark = len(trail)
            for j in range(s):
                coords[j].assign(pt, row, y[j], trail)
            assignment[best] = y
            if rec(remaining - 1):
                return True
            assignment[best] = None
            while len(trail) > mark:
                _Coord.undo(trail.pop())
        return False

    if sys.getrecursionlimit() < N + 500:
        sys.setrecursionlimit(N + 500)
    if not rec(N):
        return None
    tables: list[list[int]] = []
    pos = {j: t for t, j in enumerate(search)}
    for j in range(m):
        if j in fixed:
            tables.append([int(x) for x in fixed[j]])
        else:
            tables.append([assignment[a][pos[j]] for a in range(N)])
    return tables


# -- type case-split for B_i, i >= 2 ------------------------------------------------------


def forced_values(f: Operation, pre, j: int) -> set[int]:
    """Values coordinate j must take: those fixed by every preimage of some f(a)."""
    out = set()
    for v in set(f.table):
        vals = {y[j] for y in pre[v]}
        if len(vals) == 1:
            out |= vals
    return out


def split_search(f: Operation, g: Operation, budget: int, counter: _Counter
                 ) -> tuple[list[list[int]] | None, list[tuple[int, ...]], tuple[int, ...]]:
    """Case split on the type of each inner function: essentially unary, or
    range size <= budget.  Coordinates forced to take more than ``budget``
    values are unary in every case.

    Returns (tables or None, refuted splits, forced-unary coordinates).
    """
    pre = preimages(g)
    m = g.arity
    if any(not pre[v] for v in set(f.table)):
        return None, [], ()
    forced = tuple(j for j in range(m) if len(forced_values(f, pre, j)) > budget)
    free = [j for j in range(m) if j not in forced]
    unary, bounded = CoordMode(unary=True), CoordMode(budget=budget)
    refuted = []
    for size in range(len(free) + 1):
        for extra in itertools.combinations(free, size):
            U = tuple(sorted(forced + extra))
            modes = [unary if j in U else bounded for j in range(m)]
            tables = point_search(f, g, modes, pre=pre, counter=counter)
            if tables is not None:
                return tables, refuted, forced
            refuted.append(U)
    return None, refuted, forced

"""Quasilinear operations g(h_1(x_1) xor ... xor h_n(x_n)) and GF(2) block matrices.

A quasilinear form stores ``g`` as a pair ``(g(0), g(1))`` and each ``h_i``
as a length-k tuple of bits.  A form is in standard form when every
``h_i(0) == 0``; a *pure* form has ``g == (0, 1)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .config import LIMITS, CapacityError, InputError
from .finops import Operation, point_grid

BitMap = tuple[int, ...]


def characteristic(k: int, subset: Iterable[int]) -> BitMap:
    """chi_S as a length-k bit tuple."""
    s = set(subset)
    if any(not 0 <= a < k for a in s):
        raise InputError(f"subset {sorted(s)} not contained in 0..{k - 1}")
    return tuple(int(a in s) for a in range(k))


def negate(h: BitMap) -> BitMap:
    return tuple(1 - b for b in h)


def inner_negate(g: tuple[int, int]) -> tuple[int, int]:
    return (g[1], g[0])


@dataclass(frozen=True)
class QuasilinearForm:
    k: int
    g: tuple[int, int]
    h: tuple[BitMap, ...]

    def __post_init__(self):
        object.__setattr__(self, "g", tuple(int(v) for v in self.g))
        object.__setattr__(self, "h", tuple(tuple(int(b) for b in hi) for hi in self.h))
        if len(self.g) != 2 or any(not 0 <= v < self.k for v in self.g):
            raise InputError(f"g must map {{0,1}} into 0..{self.k - 1}")
        if not self.h:
            raise InputError("a quasilinear form needs at least one inner map")
        for hi in self.h:
            if len(hi) != self.k or any(b not in (0, 1) for b in hi):
                raise InputError(f"each h_i must be a length-{self.k} 0/1 sequence")

    @property
    def arity(self) -> int:
        return len(self.h)

    @property
    def is_standard(self) -> bool:
        return all(hi[0] == 0 for hi in self.h)

    @property
    def is_pure(self) -> bool:
        return self.g == (0, 1)

    def to_operation(self) -> Operation:
        return from_standard_form(self)


def pure(k: int, h: Sequence[Sequence[int]]) -> QuasilinearForm:
    """The 0/1-valued form h_1(x_1) xor ... xor h_n(x_n)."""
    return QuasilinearForm(k, (0, 1), tuple(tuple(hi) for hi in h))


def from_standard_form(q: QuasilinearForm) -> Operation:
    grid = point_grid(q.k, q.arity)
    hs = np.asarray(q.h, dtype=np.int64)
    parity = np.zeros(len(grid), dtype=np.int64)
    for i in range(q.arity):
        parity ^= hs[i][grid[:, i]]
    return Operation(q.k, q.arity, np.asarray(q.g)[parity])


def normalize(q: QuasilinearForm) -> QuasilinearForm:
    """Flip every h_i with h_i(0) = 1; inner-negate g if an odd number flipped."""
    flips = 0
    h = []
    for hi in q.h:
        if hi[0]:
            h.append(negate(hi))
            flips += 1
        else:
            h.append(hi)
    g = inner_negate(q.g) if flips % 2 else q.g
    return QuasilinearForm(q.k, g, tuple(h))


def standard_form(f: Operation) -> QuasilinearForm | None:
    """The unique standard form of a nonconstant quasilinear ``f``, else None.

    Reads each h_i off the axis points (all coordinates 0 except one),
    relative to f(0, ..., 0), then checks the candidate against the table.
    """
    values = set(f.table)
    if len(values) != 2:
        return None
    k, n = f.k, f.arity
    base = f.table[0]
    (other,) = values - {base}
    h = []
    for i in range(n):
        step = k ** (n - 1 - i)
        h.append(tuple(int(f.table[a * step] != base) for a in range(k)))
    form = QuasilinearForm(k, (base, other), tuple(h))
    if from_standard_form(form) != f:
        return None
    return form


def xor_sum(f1: QuasilinearForm, f2: QuasilinearForm) -> QuasilinearForm:
    """Mod-2 sum of two pure forms; chi_S xor chi_T = chi_(S symmetric-difference T)."""
    if f1.k != f2.k or f1.arity != f2.arity:
        raise InputError("xor_sum needs forms over the same base set and arity")
    if not (f1.is_pure and f2.is_pure):
        raise InputError("xor_sum is defined on pure forms (g = identity embedding)")
    h = tuple(tuple(a ^ b for a, b in zip(h1, h2)) for h1, h2 in zip(f1.h, f2.h))
    return QuasilinearForm(f1.k, (0, 1), h)


def iter_standard_forms(k: int, n: int, nonconstant_only: bool = True) -> Iterator[QuasilinearForm]:
    """All standard forms of arity n (g ranges over maps {0,1} -> A)."""
    maps = [tuple(bits) for bits in itertools.product((0, 1), repeat=k) if bits[0] == 0]
    gs = [(a, b) for a in range(k) for b in range(k) if not nonconstant_only or a != b]
    for hs in itertools.product(maps, repeat=n):
        if nonconstant_only and not any(any(hi) for hi in hs):
            continue
        for g in gs:
            yield QuasilinearForm(k, g, hs)


# -- GF(2) block matrices -----------------------------------------------------------


@dataclass(frozen=True)
class Gf2BlockMatrix:
    """A p x q matrix over GF(2) whose columns are split into consecutive blocks."""

    entries: np.ndarray
    blocks: tuple[int, ...]

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=np.uint8)
        if arr.ndim != 2:
            raise InputError("entries must be a 2-d array")
        if np.any(arr > 1):
            raise InputError("entries must be 0 or 1")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "blocks", tuple(int(b) for b in self.blocks))
        if any(b < 1 for b in self.blocks) or sum(self.blocks) != arr.shape[1]:
            raise InputError(f"block sizes {self.blocks} do not partition {arr.shape[1]} columns")

    @property
    def p(self) -> int:
        return self.entries.shape[0]

    @property
    def q(self) -> int:
        return self.entries.shape[1]

    def block_columns(self) -> list[range]:
        cols, start = [], 0
        for size in self.blocks:
            cols.append(range(start, start + size))
            start += size
        return cols

    def __eq__(self, other):
        if not isinstance(other, Gf2BlockMatrix):
            return NotImplemented
        return self.blocks == other.blocks and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.blocks, self.entries.tobytes(), self.entries.shape))

    def to_text(self) -> str:
        lines = ["blocks=" + ",".join(map(str, self.blocks))]
        lines += ["".join(map(str, row)) for row in self.entries]
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text: str) -> Gf2BlockMatrix:
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("blocks="):
            raise InputError("matrix text must start with a 'blocks=' header")
        try:
            blocks = tuple(int(b) for b in lines[0][len("blocks="):].split(","))
            rows = [[int(ch) for ch in ln] for ln in lines[1:]]
        except ValueError as exc:
            raise InputError("malformed matrix text") from exc
        if not rows:
            raise InputError("matrix needs at least one row")
        if len({len(r) for r in rows}) != 1:
            raise InputError("ragged matrix rows")
        return cls(np.array(rows), blocks)


def gf2_rank(vectors: Iterable[int]) -> int:
    """Rank of a set of GF(2) vectors given as int bitmasks."""
    pivots: dict[int, int] = {}
    rank = 0
    for v in vectors:
        while v:
            top = v.bit_length() - 1
            if top not in pivots:
                pivots[top] = v
                rank += 1
                break
            v ^= pivots[top]
    return rank


def _column_masks(entries: np.ndarray) -> list[int]:
    p = entries.shape[0]
    return [sum(int(entries[r, c]) << r for r in range(p)) for c in range(entries.shape[1])]


def rado_condition_singular_transversals(M: Gf2BlockMatrix) -> bool:
    """True iff every p x p submatrix with columns from p distinct blocks is singular."""
    p, blocks = M.p, M.block_columns()
    if p > len(blocks):
        raise InputError(f"need p <= number of blocks, got p={p} with {len(blocks)} blocks")
    cols = _column_masks(M.entries)
    for chosen in itertools.combinations(blocks, p):
        for pick in itertools.product(*chosen):
            if gf2_rank(cols[c] for c in pick) == p:
                return False
    return True


@dataclass(frozen=True)
class RowReductionCertificate:
    Q: np.ndarray
    m: int
    rows: tuple[int, ...]
    nonnull_blocks: tuple[int, ...]


def iter_gl2(p: int) -> Iterator[np.ndarray]:
    """Invertible p x p matrices over GF(2): identity first, then lexicographic."""
    if p > LIMITS.gl_dimension:
        raise CapacityError(
            f"GL({p},2) enumeration exceeds the configured dimension ceiling {LIMITS.gl_dimension}",
            LIMITS.gl_dimension,
        )
    identity = np.eye(p, dtype=np.uint8)
    yield identity
    for bits in itertools.product((0, 1), repeat=p * p):
        Q = np.array(bits, dtype=np.uint8).reshape(p, p)
        if np.array_equal(Q, identity):
            continue
        if gf2_rank(sum(int(b) << j for j, b in enumerate(row)) for row in Q) == p:
            yield Q


def rado_condition_row_reduction(M: Gf2BlockMatrix) -> RowReductionCertificate | None:
    """Search for invertible Q and m >= 1 such that QM has m rows that are
    null outside at most m - 1 blocks.  Ascending m, then Q in GL order."""
    p, blocks = M.p, M.block_columns()
    if p > len(blocks):
        raise InputError(f"need p <= number of blocks, got p={p} with {len(blocks)} blocks")
    gl = list(iter_gl2(p))
    row_support = []
    for Q in gl:
        QM = (Q.astype(np.int64) @ M.entries.astype(np.int64)) % 2
        support = []
        for r in range(p):
            mask = 0
            for b, cols in enumerate(blocks):
                if QM[r, cols.start:cols.stop].any():
                    mask |= 1 << b
            support.append(mask)
        row_support.append(support)
    for m in range(1, p + 1):
        for Q, support in zip(gl, row_support):
            for rows in itertools.combinations(range(p), m):
                union = 0
                for r in rows:
                    union |= support[r]
                if union.bit_count() <= m - 1:
                    nonnull = tuple(b for b in range(len(blocks)) if union >> b & 1)
                    return RowReductionCertificate(Q.copy(), m, rows, nonnull)
    return None


def system_matrix(forms: Sequence[QuasilinearForm]) -> Gf2BlockMatrix:
    """Rows indexed by forms, columns by (variable j, value a != 0); entry h^i_j(a)."""
    if not forms:
        raise InputError("need at least one form")
    k, q = forms[0].k, forms[0].arity
    for form in forms:
        if form.k != k or form.arity != q:
            raise InputError("forms must share base set and arity")
        if not form.is_pure:
            raise InputError("system_matrix takes pure forms (g = identity embedding)")
        if not form.is_standard:
            raise InputError("system_matrix takes standard forms (h_i(0) = 0)")
    rows = [[form.h[j][a] for j in range(q) for a in range(1, k)] for form in forms]
    return Gf2BlockMatrix(np.array(rows, dtype=np.uint8), (k - 1,) * q)

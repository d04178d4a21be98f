"""Sparse binary linear algebra over GF(2).

Matrices are stored as sorted row and column adjacency lists (both views are
built once at construction, since decoding walks rows and columns all the
time).  Vectors are plain numpy uint8 arrays with values in {0, 1}.  Rank and
kernel computations run on a dense bit-packed copy (Python integers as row
bitmasks), which is plenty for the few-thousand-column matrices handled here.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np


class BinaryMatrix:
    """Immutable sparse GF(2) matrix with row and column adjacency access.

    Parameters
    ----------
    rows, cols : int
        Matrix dimensions.
    entries : iterable of (row, col)
        Positions of the nonzero entries. Duplicates collapse to one entry.
    """

    __slots__ = ("rows", "cols", "row_support", "col_support", "_dense")

    def __init__(self, rows: int, cols: int, entries: Iterable[tuple[int, int]]):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        by_row: list[set[int]] = [set() for _ in range(rows)]
        by_col: list[set[int]] = [set() for _ in range(cols)]
        for r, c in entries:
            if not (0 <= r < rows and 0 <= c < cols):
                raise ValueError(f"entry ({r}, {c}) outside {rows}x{cols} matrix")
            by_row[r].add(c)
            by_col[c].add(r)
        self.rows = rows
        self.cols = cols
        self.row_support: tuple[tuple[int, ...], ...] = tuple(
            tuple(sorted(s)) for s in by_row
        )
        self.col_support: tuple[tuple[int, ...], ...] = tuple(
            tuple(sorted(s)) for s in by_col
        )
        self._dense: np.ndarray | None = None

    @classmethod
    def from_dense(cls, arr: np.ndarray | Sequence[Sequence[int]]) -> "BinaryMatrix":
        a = np.asarray(arr, dtype=np.uint8) % 2
        if a.ndim != 2:
            raise ValueError("dense input must be 2-dimensional")
        rs, cs = np.nonzero(a)
        return cls(a.shape[0], a.shape[1], zip(rs.tolist(), cs.tolist()))

    @classmethod
    def from_rows(cls, rows: Sequence[np.ndarray], cols: int) -> "BinaryMatrix":
        """Stack 1-D {0,1} vectors as matrix rows."""
        entries = []
        for i, v in enumerate(rows):
            if len(v) != cols:
                raise ValueError("row length mismatch")
            entries.extend((i, int(c)) for c in np.flatnonzero(v))
        return cls(len(rows), cols, entries)

    def to_dense(self) -> np.ndarray:
        """Dense uint8 copy; cached since matrices are immutable."""
        if self._dense is None:
            d = np.zeros((self.rows, self.cols), dtype=np.uint8)
            for r, cs in enumerate(self.row_support):
                d[r, list(cs)] = 1
            self._dense = d
        return self._dense

    def transpose(self) -> "BinaryMatrix":
        return BinaryMatrix(
            self.cols,
            self.rows,
            ((c, r) for r, cs in enumerate(self.row_support) for c in cs),
        )

    def row_weights(self) -> list[int]:
        return [len(s) for s in self.row_support]

    def col_weights(self) -> list[int]:
        return [len(s) for s in self.col_support]

    def entry_count(self) -> int:
        return sum(len(s) for s in self.row_support)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and self.row_support == other.row_support
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.row_support))

    def __repr__(self):
        return f"BinaryMatrix({self.rows}x{self.cols}, {self.entry_count()} entries)"


def zeros_vec(n: int) -> np.ndarray:
    return np.zeros(n, dtype=np.uint8)


def vec_from_support(n: int, support: Iterable[int]) -> np.ndarray:
    v = np.zeros(n, dtype=np.uint8)
    for i in support:
        if not 0 <= i < n:
            raise ValueError(f"index {i} outside vector of length {n}")
        v[i] ^= 1
    return v


def mat_vec_mod2(m: BinaryMatrix, v: np.ndarray) -> np.ndarray:
    """Return m @ v over GF(2). Raises on dimension mismatch."""
    v = np.asarray(v, dtype=np.uint8)
    if v.shape != (m.cols,):
        raise ValueError(f"vector length {v.shape} does not match {m.cols} columns")
    prod = m.to_dense().astype(np.uint32) @ v.astype(np.uint32)
    return (prod & 1).astype(np.uint8)


def _rows_as_ints(m: BinaryMatrix) -> list[int]:
    out = []
    for cs in m.row_support:
        x = 0
        for c in cs:
            x |= 1 << c
        out.append(x)
    return out


def rank_mod2(m: BinaryMatrix) -> int:
    """GF(2) rank by Gaussian elimination on bit-packed rows."""
    pivots: dict[int, int] = {}  # lowest set bit -> row bitmask
    for x in _rows_as_ints(m):
        while x:
            low = x & -x
            if low not in pivots:
                pivots[low] = x
                break
            x ^= pivots[low]
    return len(pivots)


def kernel_basis_mod2(m: BinaryMatrix) -> list[np.ndarray]:
    """Basis of the right null space {v : m v = 0 (mod 2)}.

    Returned vectors are uint8 arrays of length m.cols, one per free column
    of the reduced row echelon form, in ascending free-column order.
    """
    n = m.cols
    rows = [x for x in _rows_as_ints(m) if x]
    # reduced row echelon form with pivot = lowest set bit per row
    pivot_col: list[int] = []
    reduced: list[int] = []
    for x in rows:
        for pc, pr in zip(pivot_col, reduced):
            if (x >> pc) & 1:
                x ^= pr
        if x == 0:
            continue
        pc = (x & -x).bit_length() - 1
        for i, (qc, qr) in enumerate(zip(pivot_col, reduced)):
            if (qr >> pc) & 1:
                reduced[i] = qr ^ x
        pivot_col.append(pc)
        reduced.append(x)
    pivot_set = set(pivot_col)
    basis: list[np.ndarray] = []
    for free in range(n):
        if free in pivot_set:
            continue
        v = np.zeros(n, dtype=np.uint8)
        v[free] = 1
        for pc, pr in zip(pivot_col, reduced):
            if (pr >> free) & 1:
                v[pc] = 1
        basis.append(v)
    return basis


def _reduce_against(x: int, pivots: dict[int, int]) -> int:
    """Reduce x against pivot rows keyed by lowest set bit; 0 iff in span."""
    while x:
        low = x & -x
        if low not in pivots:
            break
        x ^= pivots[low]
    return x


def _add_pivot(x: int, pivots: dict[int, int]) -> bool:
    """Insert reduced x into the pivot set; False if x lies in the span."""
    x = _reduce_against(x, pivots)
    if x == 0:
        return False
    pivots[x & -x] = x
    return True


def _vec_to_int(v: np.ndarray) -> int:
    x = 0
    for i in np.flatnonzero(v):
        x |= 1 << int(i)
    return x


def quotient_basis(
    span_small: Sequence[np.ndarray], span_large: Sequence[np.ndarray]
) -> list[np.ndarray]:
    """Vectors from span_large that extend span_small to span(span_large).

    Requires span(span_small) to be contained in span(span_large); raises
    ValueError otherwise.  For a CSS code with span_small the stabilizer
    rows and span_large a kernel basis, the result has length k.
    """
    large_pivots: dict[int, int] = {}
    for v in span_large:
        _add_pivot(_vec_to_int(v), large_pivots)
    pivots: dict[int, int] = {}
    for v in span_small:
        if _reduce_against(_vec_to_int(v), large_pivots):
            raise ValueError("span_small is not contained in span(span_large)")
        _add_pivot(_vec_to_int(v), pivots)
    out: list[np.ndarray] = []
    for v in span_large:
        if _add_pivot(_vec_to_int(v), pivots):
            out.append(np.asarray(v, dtype=np.uint8).copy())
    return out


def save_matrix(m: BinaryMatrix, path: str) -> None:
    """Write the sparse text format: 'rows cols' then one 'r c' per entry."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{m.rows} {m.cols}\n")
        for r, cs in enumerate(m.row_support):
            for c in cs:
                fh.write(f"{r} {c}\n")


def load_matrix(path: str) -> BinaryMatrix:
    """Read the sparse text format written by save_matrix."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}:1: expected 'rows cols' header")
        rows, cols = int(header[0]), int(header[1])
        entries = []
        for lineno, line in enumerate(fh, start=2):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'row col'")
            entries.append((int(parts[0]), int(parts[1])))
    return BinaryMatrix(rows, cols, entries)

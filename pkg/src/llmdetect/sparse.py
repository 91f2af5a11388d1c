"""Minimal compressed-sparse-row containers for document-term matrices.

Only what the pipeline needs: construction from per-document vectors, row
iteration, matrix-vector products against dense weight vectors, and a CSC
view for column-oriented work (histogram binning, per-column quantiles).
Column indices within a row are strictly increasing and explicit zeros are
never stored.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SparseVector:
    """One document's feature vector as parallel (column, weight) arrays."""

    cols: np.ndarray
    vals: np.ndarray
    n_cols: int

    def __post_init__(self):
        if len(self.cols) != len(self.vals):
            raise ValueError("cols and vals must be parallel")

    @property
    def nnz(self) -> int:
        return len(self.cols)

    def to_pairs(self) -> list[tuple[int, float]]:
        return list(zip(self.cols.tolist(), self.vals.tolist()))

    def toarray(self) -> np.ndarray:
        out = np.zeros(self.n_cols)
        out[self.cols] = self.vals
        return out


@dataclass
class SparseMatrix:
    """Row-major CSR matrix: row i owns ``cols[indptr[i]:indptr[i+1]]``."""

    indptr: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    n_rows: int
    n_cols: int
    _csc_cache: tuple | None = field(default=None, repr=False, compare=False)

    @classmethod
    def from_rows(cls, rows: list[SparseVector], n_cols: int) -> "SparseMatrix":
        indptr = np.zeros(len(rows) + 1, dtype=np.int64)
        for i, r in enumerate(rows):
            indptr[i + 1] = indptr[i] + r.nnz
        total = int(indptr[-1])
        cols = np.empty(total, dtype=np.int64)
        vals = np.empty(total, dtype=np.float64)
        for i, r in enumerate(rows):
            cols[indptr[i]:indptr[i + 1]] = r.cols
            vals[indptr[i]:indptr[i + 1]] = r.vals
        return cls(indptr=indptr, cols=cols, vals=vals,
                   n_rows=len(rows), n_cols=n_cols)

    @classmethod
    def from_dense(cls, dense) -> "SparseMatrix":
        dense = np.asarray(dense, dtype=np.float64)
        rows = []
        for i in range(dense.shape[0]):
            nz = np.flatnonzero(dense[i])
            rows.append(SparseVector(cols=nz.astype(np.int64),
                                     vals=dense[i, nz],
                                     n_cols=dense.shape[1]))
        return cls.from_rows(rows, dense.shape[1])

    @property
    def nnz(self) -> int:
        return len(self.cols)

    def row(self, i: int) -> SparseVector:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return SparseVector(cols=self.cols[lo:hi], vals=self.vals[lo:hi],
                            n_cols=self.n_cols)

    def iter_rows(self):
        for i in range(self.n_rows):
            yield self.row(i)

    def row_lengths(self) -> np.ndarray:
        return np.diff(self.indptr)

    def gather_positions(self, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Storage positions of every nonzero of the given rows, in row order.

        Returns (pos, lengths) where lengths[k] is the nnz count of rows[k];
        ``self.cols[pos]`` / ``self.vals[pos]`` give the gathered entries.
        """
        rows = np.asarray(rows, dtype=np.int64)
        starts = self.indptr[rows]
        lengths = self.indptr[rows + 1] - starts
        total = int(lengths.sum())
        if total == 0:
            return np.empty(0, dtype=np.int64), lengths
        offsets = np.repeat(np.cumsum(lengths) - lengths, lengths)
        pos = np.arange(total, dtype=np.int64) - offsets + np.repeat(starts, lengths)
        return pos, lengths

    def gather_rows(self, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Concatenate the nonzeros of the given rows as (cols, vals, lengths)."""
        pos, lengths = self.gather_positions(rows)
        return self.cols[pos], self.vals[pos], lengths

    def dot(self, w: np.ndarray) -> np.ndarray:
        """Matrix-vector product against a dense weight vector."""
        if len(w) != self.n_cols:
            raise ValueError(f"weight vector has {len(w)} entries, matrix has "
                             f"{self.n_cols} columns")
        if self.nnz == 0:
            return np.zeros(self.n_rows)
        contrib = self.vals * w[self.cols]
        row_ids = np.repeat(np.arange(self.n_rows), self.row_lengths())
        return np.bincount(row_ids, weights=contrib, minlength=self.n_rows)

    def to_csc(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Column-major view: (col_indptr, row_idx, vals, csr_pos).

        ``csr_pos[k]`` is the CSR position of the k-th CSC entry, so values
        computed column-wise can be scattered back into row order.
        """
        if self._csc_cache is None:
            order = np.argsort(self.cols, kind="stable")
            row_ids = np.repeat(np.arange(self.n_rows), self.row_lengths())
            counts = np.bincount(self.cols, minlength=self.n_cols)
            col_indptr = np.zeros(self.n_cols + 1, dtype=np.int64)
            np.cumsum(counts, out=col_indptr[1:])
            self._csc_cache = (col_indptr, row_ids[order], self.vals[order], order)
        return self._csc_cache

    def column_values(self, col: int, rows: np.ndarray) -> np.ndarray:
        """Values of one column at the given rows (0.0 where not stored)."""
        col_indptr, row_idx, vals, _ = self.to_csc()
        lo, hi = col_indptr[col], col_indptr[col + 1]
        rseg = row_idx[lo:hi]
        vseg = vals[lo:hi]
        if hi == lo:
            return np.zeros(len(rows))
        pos = np.searchsorted(rseg, rows)
        safe = np.minimum(pos, len(rseg) - 1)
        found = rseg[safe] == rows
        return np.where(found, vseg[safe], 0.0)

    def column_sums(self, rows: np.ndarray | None = None) -> np.ndarray:
        """Per-column value sums, optionally restricted to a row subset."""
        if rows is None:
            cols, vals = self.cols, self.vals
        else:
            cols, vals, _ = self.gather_rows(rows)
        if len(cols) == 0:
            return np.zeros(self.n_cols)
        return np.bincount(cols, weights=vals, minlength=self.n_cols)

    def toarray(self) -> np.ndarray:
        out = np.zeros((self.n_rows, self.n_cols))
        for i in range(self.n_rows):
            lo, hi = self.indptr[i], self.indptr[i + 1]
            out[i, self.cols[lo:hi]] = self.vals[lo:hi]
        return out

    def validate(self) -> None:
        """Assert CSR invariants; used by tests."""
        assert self.indptr[0] == 0 and self.indptr[-1] == self.nnz
        assert np.all(np.diff(self.indptr) >= 0), "row offsets must not decrease"
        if self.nnz:
            assert self.cols.min() >= 0 and self.cols.max() < self.n_cols
            assert np.all(self.vals != 0.0), "explicit zeros are not stored"
        for i in range(self.n_rows):
            lo, hi = self.indptr[i], self.indptr[i + 1]
            assert np.all(np.diff(self.cols[lo:hi]) > 0), \
                f"row {i} columns must strictly increase"

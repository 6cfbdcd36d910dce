"""Per-node linear relations produced by the schemes.

A ``StencilSystem`` stores, for every interior node, the implicit relation

    sum_off  a_off(node) * Phi^n[node + off]  =  rhs(node)

together with the explicit coefficients that generate ``rhs`` from the
previous time level.  Offsets are integer tuples; coefficient arrays span the
interior index space.  Ghost nodes and prescribed (inflow) nodes are known
data: their columns are folded into the right-hand side when the system is
lowered to sparse-matrix form for the sweeping solver, the dense oracle, or
the frozen-coefficient stability scanner.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .errors import AssemblyError
from .grid import Field, Grid


def _as_offset(off, dim):
    return tuple(off) if dim > 1 else (int(off[0]) if isinstance(off, tuple) else int(off),)


class StencilSystem:
    """Linear relations for one time step on one grid."""

    def __init__(self, grid: Grid, implicit, explicit, unknown_mask=None, rhs_extra=None):
        self.grid = grid
        dim = grid.dim
        self.implicit = {self._norm(off): np.asarray(c, dtype=float) for off, c in implicit.items()}
        self.explicit = {self._norm(off): np.asarray(c, dtype=float) for off, c in explicit.items()}
        for off, arr in list(self.implicit.items()) + list(self.explicit.items()):
            if arr.shape != grid.shape_interior:
                raise AssemblyError(f"coefficient array at offset {off} has shape {arr.shape}")
            if any(abs(o) > grid.ghost_width for o in off):
                raise AssemblyError(
                    f"offset {off} exceeds ghost layer width {grid.ghost_width}"
                )
        if unknown_mask is None:
            unknown_mask = np.ones(grid.shape_interior, dtype=bool)
        self.unknown_mask = np.asarray(unknown_mask, dtype=bool)
        self.rhs_extra = None if rhs_extra is None else np.asarray(rhs_extra, dtype=float)
        self.rhs = None
        self._lin = None
        self._factors = {}

    def _norm(self, off):
        if np.isscalar(off):
            off = (off,)
        off = tuple(int(o) for o in off)
        if len(off) != self.grid.dim:
            raise AssemblyError(f"offset {off} does not match grid dimension {self.grid.dim}")
        return off

    # -- right-hand side ----------------------------------------------------

    def shifted_view(self, full_array, off):
        """Interior-shaped view of a full-extent array shifted by ``off``."""
        g = self.grid.ghost_width
        sl = tuple(
            slice(g + o, g + o + n + 1)
            for o, n in zip(off, self.grid.node_counts)
        )
        return full_array[sl]

    def compute_rhs(self, prev: Field):
        """Evaluate the explicit side on the previous time level."""
        rhs = np.zeros(self.grid.shape_interior)
        for off, coeff in self.explicit.items():
            rhs += coeff * self.shifted_view(prev.values, off)
        if self.rhs_extra is not None:
            rhs += self.rhs_extra
        self.rhs = rhs
        return rhs

    # -- views for tests and the stability scanner --------------------------

    def relation_at(self, index):
        """(implicit coeffs, explicit coeffs, rhs) of one node as offset dicts."""
        index = (index,) if np.isscalar(index) else tuple(index)
        imp = {off: float(c[index]) for off, c in self.implicit.items() if c[index] != 0.0}
        exp = {off: float(c[index]) for off, c in self.explicit.items() if c[index] != 0.0}
        r = None if self.rhs is None else float(self.rhs[index])
        return imp, exp, r

    # -- sparse form ---------------------------------------------------------

    @property
    def n_unknowns(self):
        return int(self.unknown_mask.sum())

    def linear_form(self):
        """(A_uu, A_uk, unknown_flat, known_flat) with ghost/prescribed folding.

        ``A_uu`` couples unknowns to unknowns, ``A_uk`` to known full-extent
        nodes (ghosts and prescribed interior nodes); ``unknown_flat`` are the
        interior flat indices of the unknowns in row-major order and
        ``known_flat`` the full-extent flat indices of the known columns.
        """
        if self._lin is not None:
            return self._lin
        grid = self.grid
        g = grid.ghost_width
        full_shape = grid.shape_full
        interior_shape = grid.shape_interior

        # full-extent flat index of every interior node
        idx_axes = [np.arange(n + 1) for n in grid.node_counts]
        mesh = np.meshgrid(*idx_axes, indexing="ij") if grid.dim == 2 else [idx_axes[0]]
        full_of_interior = np.ravel_multi_index(
            tuple(m + g for m in mesh), full_shape
        )

        unknown_interior = self.unknown_mask.ravel()
        n_full = int(np.prod(full_shape))
        # map: full flat index -> unknown ordinal (or -1)
        uid_of_full = np.full(n_full, -1, dtype=np.int64)
        uid_of_full[full_of_interior.ravel()[unknown_interior]] = np.arange(
            unknown_interior.sum()
        )

        rows_u, cols_u, vals_u = [], [], []
        rows_k, cols_k, vals_k = [], [], []
        row_uid = uid_of_full[full_of_interior.ravel()]
        for off, coeff in self.implicit.items():
            tgt = tuple(m + g + o for m, o in zip(mesh, off))
            tgt_full = np.ravel_multi_index(tgt, full_shape).ravel()
            cvals = coeff.ravel()
            active = unknown_interior & (cvals != 0.0)
            tgt_uid = uid_of_full[tgt_full]
            to_u = active & (tgt_uid >= 0)
            to_k = active & (tgt_uid < 0)
            rows_u.append(row_uid[to_u])
            cols_u.append(tgt_uid[to_u])
            vals_u.append(cvals[to_u])
            rows_k.append(row_uid[to_k])
            cols_k.append(tgt_full[to_k])
            vals_k.append(cvals[to_k])

        m = int(unknown_interior.sum())
        A_uu = sp.csr_matrix(
            (np.concatenate(vals_u), (np.concatenate(rows_u), np.concatenate(cols_u))),
            shape=(m, m),
        )
        known_cols = np.unique(np.concatenate(cols_k)) if rows_k and sum(len(r) for r in rows_k) else np.empty(0, dtype=np.int64)
        col_pos = {int(c): p for p, c in enumerate(known_cols)}
        if known_cols.size:
            cols_k_packed = np.concatenate([
                np.asarray([col_pos[int(c)] for c in arr], dtype=np.int64)
                for arr in cols_k
            ])
            A_uk = sp.csr_matrix(
                (np.concatenate(vals_k), (np.concatenate(rows_k), cols_k_packed)),
                shape=(m, known_cols.size),
            )
        else:
            A_uk = sp.csr_matrix((m, 0))
        unknown_flat = np.flatnonzero(unknown_interior)
        self._lin = (A_uu, A_uk, unknown_flat, known_cols)
        return self._lin

    def effective_rhs(self, field: Field):
        """rhs restricted to unknowns with known new-time values folded in."""
        if self.rhs is None:
            raise AssemblyError("compute_rhs must run before solving")
        A_uu, A_uk, unknown_flat, known_cols = self.linear_form()
        b = self.rhs.ravel()[unknown_flat]
        if known_cols.size:
            b = b - A_uk @ field.values.ravel()[known_cols]
        return b

    def residuals(self, field: Field):
        """Relation residuals A.Phi - rhs at unknown nodes (interior array)."""
        A_uu, _, unknown_flat, _ = self.linear_form()
        x = field.interior.ravel()[unknown_flat]
        r = A_uu @ x - self.effective_rhs(field)
        out = np.zeros(self.grid.shape_interior)
        out.ravel()[unknown_flat] = r
        return out

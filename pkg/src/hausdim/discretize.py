"""Collocation of the transfer operator on piecewise-linear hat functions.

A mesh of n uniform cells on each domain interval carries nodal values
w_0..w_n; the interpolant is evaluated at every mapped node theta_j(x_k)
and weighted by g_j(x_k)^s.  Three row-compressed nonnegative matrices
come out of one assembly pass:

    A: entries scaled by [1 - err_hi(y)]   (lower spectral bound)
    M: plain collocation, no correction
    B: entries scaled by [1 - err_lo(y)]   (upper spectral bound)

with err_hi(y) = coef_hi * Q(y), err_lo(y) = coef_lo * Q(y) and
Q(y) = (x_{r+1} - y)(y - x_r) on the cell containing y.  The coefficients
come from certified bounds on v''/v tilted by the oscillation rate, so
r(A) <= r(L_s) <= r(B) holds for the underlying operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse

from .bounds import BoundConstants, osc_rate, second_ratio_bounds
from .errors import (
    BadParams,
    ErrTooLarge,
    MapEscapesDomain,
    NegativeEntry,
    OutOfDomain,
)
from .ifs import CLAMP_REL_TOL, MapFamily

__all__ = [
    "Mesh", "MeshUnion", "make_mesh", "interp_weights", "ErrorModel",
    "error_model", "SparseNonnegMatrix", "MatrixTriple", "assemble",
    "row_sums", "dump_matrix",
]


@dataclass(frozen=True, eq=False)
class Mesh:
    """Uniform mesh of n >= 2 cells on [a, b]; nodes x_k = a + k (b-a)/n."""

    a: float
    b: float
    n: int
    h: float
    nodes: np.ndarray

    @property
    def dim(self) -> int:
        return self.n + 1

    def key(self) -> tuple:
        return (self.a, self.b, self.n)


@dataclass(frozen=True, eq=False)
class MeshUnion:
    """Disjoint meshes over an increasing union of intervals.

    Node numbering concatenates the pieces; interpolation never crosses a
    gap because mapped points always land inside some piece.
    """

    pieces: tuple[Mesh, ...]
    nodes: np.ndarray
    offsets: tuple[int, ...]

    @property
    def dim(self) -> int:
        return int(self.offsets[-1])

    @property
    def h(self) -> float:
        return max(p.h for p in self.pieces)

    @property
    def span(self) -> tuple[float, float]:
        return self.pieces[0].a, self.pieces[-1].b

    def key(self) -> tuple:
        return tuple(p.key() for p in self.pieces)


def _mesh_interval(a: float, b: float, n: int) -> Mesh:
    if n < 2:
        raise BadParams(f"mesh needs n >= 2 cells, got {n}")
    if not b > a:
        raise BadParams(f"empty mesh interval [{a}, {b}]")
    nodes = a + np.arange(n + 1, dtype=float) * (b - a) / n
    return Mesh(a=a, b=b, n=n, h=(b - a) / n, nodes=nodes)


def make_mesh(intervals, *, n: int | None = None, h: float | None = None):
    """Mesh one interval or an ordered union with a shared target width.

    Exactly one of n (total cell count) and h (cell width) must be given.
    Per-piece counts are rounded so every piece has at least two cells;
    the realized widths can differ from h by the rounding.
    """
    if (n is None) == (h is None):
        raise BadParams("give exactly one of n and h")
    if isinstance(intervals, tuple) and np.isscalar(intervals[0]):
        intervals = [intervals]
    intervals = [(float(a), float(b)) for a, b in intervals]
    if any(b <= a for a, b in intervals):
        raise BadParams("empty interval in mesh request")
    if h is not None and h <= 0.0:
        raise BadParams(f"need h > 0, got {h}")
    if len(intervals) == 1:
        a, b = intervals[0]
        nn = int(n) if n is not None else max(2, int(round((b - a) / h)))
        return _mesh_interval(a, b, nn)
    total = sum(b - a for a, b in intervals)
    width = h if h is not None else total / int(n)
    pieces = tuple(
        _mesh_interval(a, b, max(2, int(round((b - a) / width))))
        for a, b in intervals
    )
    offsets = [0]
    for p in pieces:
        offsets.append(offsets[-1] + p.dim)
    nodes = np.concatenate([p.nodes for p in pieces])
    return MeshUnion(pieces=pieces, nodes=nodes, offsets=tuple(offsets))


def _pieces(mesh) -> tuple[tuple[Mesh, ...], tuple[int, ...]]:
    if isinstance(mesh, MeshUnion):
        return mesh.pieces, mesh.offsets
    return (mesh,), (0, mesh.dim)


def _locate(mesh, ys: np.ndarray):
    """Cells and hat weights for query points, numbered globally.

    Returns (c_left, c_right, w_left, w_right, Q) with w_left + w_right = 1
    exactly and Q(y) = (x_{r+1} - y)(y - x_r) >= 0.  Points outside every
    piece by more than the clamp tolerance raise OutOfDomain.
    """
    pieces, offsets = _pieces(mesh)
    lo = pieces[0].a
    hi = pieces[-1].b
    tol = CLAMP_REL_TOL * (hi - lo)
    ys = np.asarray(ys, dtype=float)
    if np.any(ys < lo - tol) or np.any(ys > hi + tol):
        raise OutOfDomain("interpolation point outside the meshed domain")
    c0 = np.empty(ys.shape, dtype=np.int64)
    wl = np.empty(ys.shape, dtype=float)
    q = np.empty(ys.shape, dtype=float)
    assigned = np.zeros(ys.shape, dtype=bool)
    for piece, off in zip(pieces, offsets[:-1]):
        mask = (~assigned) & (ys >= piece.a - tol) & (ys <= piece.b + tol)
        if not np.any(mask):
            continue
        y = np.clip(ys[mask], piece.a, piece.b)
        r = np.searchsorted(piece.nodes, y, side="right") - 1
        r = np.clip(r, 0, piece.n - 1)
        t = np.clip((y - piece.nodes[r]) / piece.h, 0.0, 1.0)
        c0[mask] = off + r
        wl[mask] = 1.0 - t
        q[mask] = np.maximum((piece.nodes[r + 1] - y) * (y - piece.nodes[r]), 0.0)
        assigned[mask] = True
    if not np.all(assigned):
        raise OutOfDomain("interpolation point falls in a gap between pieces")
    return c0, c0 + 1, wl, 1.0 - wl, q


def interp_weights(mesh, y: float) -> tuple[int, float, float]:
    """Cell index and hat weights of one point: y -> (r, w_left, w_right).

    Node hits give a unit weight; the left cell owns interior nodes and
    the last cell owns the right endpoint.  Weights are normalized so
    w_left + w_right = 1 exactly.
    """
    c0, _, wl, wr, _ = _locate(mesh, np.asarray([float(y)]))
    return int(c0[0]), float(wl[0]), float(wr[0])


# ---------------------------------------------------------------------------
# error model


@dataclass(frozen=True)
class ErrorModel:
    """Correction coefficients for one (family, s, h).

    err_hi(y) = coef_hi * Q(y) scales the lower matrix A and
    err_lo(y) = coef_lo * Q(y) the upper matrix B, where
    coef_hi = R_hi/2 * exp(osc*h) and coef_lo = R_lo/2 * exp(-osc*h).
    coef_lo may be negative when only the symmetric generic bound is
    available; entries stay positive because coef_hi * h^2/4 < 1 is
    enforced at construction.
    """

    coef_hi: float
    coef_lo: float
    osc: float
    h: float
    R_lo: float
    R_hi: float

    @staticmethod
    def zero(h: float) -> "ErrorModel":
        return ErrorModel(0.0, 0.0, 0.0, h, 0.0, 0.0)


def error_model(fam: MapFamily, s: float, h: float,
                constants: BoundConstants | None = None) -> ErrorModel:
    """Build the correction model from the certified v''/v enclosure."""
    if h <= 0.0:
        raise BadParams(f"need h > 0, got {h}")
    r_lo, r_hi = second_ratio_bounds(fam, s, constants)
    osc = osc_rate(fam, s, constants)
    coef_hi = 0.5 * r_hi * math.exp(osc * h)
    coef_lo = 0.5 * r_lo * math.exp(-osc * h)
    if coef_hi * h * h / 4.0 >= 1.0:
        raise ErrTooLarge(
            f"correction {coef_hi * h * h / 4.0:.3g} >= 1 at h = {h}; refine the mesh"
        )
    return ErrorModel(coef_hi=coef_hi, coef_lo=coef_lo, osc=osc, h=h,
                      R_lo=r_lo, R_hi=r_hi)


# ---------------------------------------------------------------------------
# sparse matrices


class SparseNonnegMatrix:
    """Row-compressed nonnegative matrix with a fixed entry order.

    Within each row the columns are sorted ascending and duplicate
    (row, col) contributions were accumulated in map order, so repeated
    assemblies are bit-identical.
    """

    def __init__(self, dim: int, indptr: np.ndarray, indices: np.ndarray,
                 data: np.ndarray):
        if np.any(data < 0.0):
            raise NegativeEntry("matrix entries must be nonnegative")
        self.dim = int(dim)
        self.indptr = indptr
        self.indices = indices
        self.data = data
        self._csr = scipy.sparse.csr_matrix(
            (data, indices, indptr), shape=(dim, dim)
        )

    @property
    def nnz(self) -> int:
        return int(self.indptr[-1])

    def matvec(self, w: np.ndarray) -> np.ndarray:
        return self._csr @ w

    def row(self, k: int) -> list[tuple[int, float]]:
        sl = slice(self.indptr[k], self.indptr[k + 1])
        return list(zip(self.indices[sl].tolist(), self.data[sl].tolist()))

    def row_sums(self) -> np.ndarray:
        if np.any(np.diff(self.indptr) == 0):
            out = np.zeros(self.dim)
            nz = np.flatnonzero(np.diff(self.indptr) > 0)
            out[nz] = np.add.reduceat(self.data, self.indptr[nz])
            return out
        return np.add.reduceat(self.data, self.indptr[:-1])

    def toarray(self) -> np.ndarray:
        return self._csr.toarray()


def row_sums(matrix: SparseNonnegMatrix) -> np.ndarray:
    """Per-row sums in index order (fixed summation order)."""
    return matrix.row_sums()


def dump_matrix(matrix: SparseNonnegMatrix, n: int, s: float,
                family_id: str) -> str:
    """Text dump: header 'dim n s family-id', one 'row col value' per nonzero."""
    lines = [f"{matrix.dim} {n} {s:.17g} {family_id}"]
    for k in range(matrix.dim):
        for c, v in matrix.row(k):
            lines.append(f"{k} {c} {v:.17g}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class MatrixTriple:
    """The assembled (A, M, B) at one (family, mesh, s)."""

    A: SparseNonnegMatrix
    M: SparseNonnegMatrix
    B: SparseNonnegMatrix
    s: float
    model: ErrorModel
    family_id: str


def assemble(fam: MapFamily, mesh, s: float,
             model: ErrorModel | None = None) -> MatrixTriple:
    """Assemble the lower/plain/upper collocation matrices at parameter s.

    Row k collects, for every map j in index order, the hat weights of
    theta_j(x_k) scaled by g_j(x_k)^s and the per-matrix correction
    factor.  Coincident (row, col) pairs accumulate by addition in map
    order; the three matrices share one sparsity pattern.
    """
    if model is None:
        model = error_model(fam, s, mesh.h)
    nodes = mesh.nodes
    dim = mesh.dim
    rows_parts, cols_parts = [], []
    vals_a, vals_m, vals_b = [], [], []
    lo, hi = (mesh.span if isinstance(mesh, MeshUnion) else (mesh.a, mesh.b))
    tol = CLAMP_REL_TOL * (hi - lo)
    karr = np.arange(dim, dtype=np.int64)
    for spec in fam.maps:
        ys = np.asarray(spec.eval(nodes), dtype=float)
        if np.any(ys < lo - tol) or np.any(ys > hi + tol):
            worst = float(np.max(np.maximum(lo - ys, ys - hi)))
            raise MapEscapesDomain(
                f"map {spec.label!r} leaves the meshed domain by {worst:.3g}"
            )
        try:
            c0, c1, wl, wr, q = _locate(mesh, ys)
        except OutOfDomain as exc:
            raise MapEscapesDomain(str(exc)) from None
        gpow = np.exp(s * np.asarray(spec.log_weight(nodes), dtype=float))
        fac_a = 1.0 - model.coef_hi * q
        fac_b = 1.0 - model.coef_lo * q
        if np.any(fac_a <= 0.0):
            raise ErrTooLarge("lower-matrix correction reached 1; refine the mesh")
        for cc, ww in ((c0, wl), (c1, wr)):
            rows_parts.append(karr)
            cols_parts.append(cc)
            vals_m.append(gpow * ww)
            vals_a.append(gpow * fac_a * ww)
            vals_b.append(gpow * fac_b * ww)
    rows = np.concatenate(rows_parts)
    cols = np.concatenate(cols_parts)
    # stable sort by (row, col): ties keep map order, fixing the
    # accumulation order of coincident entries
    order = np.lexsort((cols, rows))
    rows = rows[order]
    cols = cols[order]
    newseg = np.empty(rows.shape, dtype=bool)
    newseg[0] = True
    newseg[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
    starts = np.flatnonzero(newseg)
    out_rows = rows[starts]
    out_cols = cols[starts]
    indptr = np.zeros(dim + 1, dtype=np.int64)
    np.add.at(indptr, out_rows + 1, 1)
    indptr = np.cumsum(indptr)
    mats = []
    for parts in (vals_a, vals_m, vals_b):
        data = np.add.reduceat(np.concatenate(parts)[order], starts)
        mats.append(SparseNonnegMatrix(dim, indptr, out_cols, data))
    return MatrixTriple(A=mats[0], M=mats[1], B=mats[2], s=s, model=model,
                        family_id=fam.family_id)

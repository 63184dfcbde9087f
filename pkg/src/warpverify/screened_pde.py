"""Finite-difference solver for the screened Poisson equation on the disk.

Solves [lap_g - beta] f = -psi on the subdisk r <= r_max of the Poincare
disk chart, where lap_g = ((1 - r^2)^2 / 4) * (euclidean laplacian), with
Dirichlet data on the staircase boundary of a uniform Cartesian lattice.

The assembled operator is (beta I - lap_g), strictly diagonally dominant
for beta > 0, so the discrete problem is always solvable and obeys a
discrete maximum principle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence, TextIO, Union

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import SolverError

# Lattice node tags.
INTERIOR, BOUNDARY, EXTERIOR = 0, 1, 2
TAG_NAMES = {INTERIOR: "interior", BOUNDARY: "boundary", EXTERIOR: "exterior"}

# Direct sparse factorization up to this many unknowns, CG beyond.
DIRECT_SOLVE_LIMIT = 100_000
CG_MAX_ITER = 100_000
CG_RTOL = 1e-12

XYCallable = Callable[[float, float], float]


def _as_xy_callable(fn) -> Optional[XYCallable]:
    """Accept (x, y) callables or anything with a .val(Point2) interface."""
    if fn is None:
        return None
    if hasattr(fn, "val"):
        from .geometry2d import Point2
        return lambda x, y: fn.val(Point2(x, y))
    return fn


@dataclass(frozen=True)
class GridSpec:
    """Problem statement for one Dirichlet solve.

    beta > 0 is the screening parameter, the lattice covers the subdisk
    r <= r_max < 1 with spacing h, `source` is psi (None means the
    homogeneous case) and `boundary` supplies Dirichlet values, evaluated
    at the staircase boundary nodes' own coordinates.
    """

    beta: float
    r_max: float = 0.8
    h: float = 0.02
    source: Optional[object] = None
    boundary: Optional[object] = None

    def __post_init__(self):
        if self.beta <= 0.0:
            raise ValueError(f"screening parameter beta must be positive, got {self.beta}")
        if not 0.0 < self.r_max <= 1.0 - 1e-3:
            raise ValueError(f"need 0 < r_max <= 0.999, got {self.r_max}")
        if self.h <= 0.0 or self.h >= self.r_max / 4.0:
            raise ValueError(
                f"mesh spacing h = {self.h} must satisfy 0 < h < r_max/4 = {self.r_max / 4.0}")

    def source_fn(self) -> XYCallable:
        return _as_xy_callable(self.source) or (lambda x, y: 0.0)

    def boundary_fn(self) -> XYCallable:
        return _as_xy_callable(self.boundary) or (lambda x, y: 0.0)


@dataclass(frozen=True)
class GridField:
    """Values on the masked lattice.

    `axis` holds the shared 1D lattice coordinates, `tags` the per-node
    classification, `values` the solution (NaN at exterior nodes).
    """

    axis: np.ndarray
    tags: np.ndarray
    values: np.ndarray
    h: float
    r_max: float

    @property
    def interior_mask(self) -> np.ndarray:
        return self.tags == INTERIOR

    @property
    def boundary_mask(self) -> np.ndarray:
        return self.tags == BOUNDARY

    def meshes(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.axis, self.axis, indexing="ij")

    def max_error_against(self, exact: XYCallable) -> float:
        """Max |f - exact| over non-exterior nodes."""
        X, Y = self.meshes()
        mask = self.tags != EXTERIOR
        ref = np.array([exact(x, y) for x, y in zip(X[mask], Y[mask])])
        return float(np.max(np.abs(self.values[mask] - ref)))


def _classify(axis: np.ndarray, r_max: float) -> np.ndarray:
    """Tag every lattice node interior/boundary/exterior.

    Interior nodes have themselves and all four neighbors inside
    r <= r_max; inside nodes with an exterior (or off-lattice) neighbor
    are boundary nodes.
    """
    X, Y = np.meshgrid(axis, axis, indexing="ij")
    inside = X * X + Y * Y <= r_max * r_max + 1e-12
    interior = np.zeros_like(inside)
    interior[1:-1, 1:-1] = (
        inside[1:-1, 1:-1]
        & inside[:-2, 1:-1] & inside[2:, 1:-1]
        & inside[1:-1, :-2] & inside[1:-1, 2:]
    )
    tags = np.full(inside.shape, EXTERIOR, dtype=np.int8)
    tags[inside] = BOUNDARY
    tags[interior] = INTERIOR
    return tags


def _lattice_axis(spec: GridSpec) -> np.ndarray:
    n = int(math.floor(spec.r_max / spec.h + 1e-12))
    return np.arange(-n, n + 1, dtype=float) * spec.h


def _conformal_weight(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    r2 = x * x + y * y
    return (1.0 - r2) ** 2 / 4.0


def assemble_and_solve(spec: GridSpec) -> GridField:
    """Discretize (beta I - lap_g) f = psi with Dirichlet data and solve.

    Five-point Euclidean stencil scaled by the conformal weight
    (1 - r^2)^2/4 at each interior node.  Direct sparse factorization up
    to 1e5 unknowns, conjugate gradients on the symmetrized system beyond
    (the weight is positive, so dividing each row by it yields an SPD
    matrix).  Raises SolverError on a degenerate grid or CG stall.
    """
    axis = _lattice_axis(spec)
    tags = _classify(axis, spec.r_max)
    X, Y = np.meshgrid(axis, axis, indexing="ij")
    interior = tags == INTERIOR
    boundary = tags == BOUNDARY

    n_int = int(interior.sum())
    if n_int == 0:
        raise SolverError("degenerate grid: no interior nodes")

    num = np.full(tags.shape, -1, dtype=np.int64)
    num[interior] = np.arange(n_int)

    h2 = spec.h * spec.h
    w = np.zeros(tags.shape)
    w[interior] = _conformal_weight(X[interior], Y[interior])

    src = spec.source_fn()
    bnd = spec.boundary_fn()
    bvals = np.zeros(tags.shape)
    bi, bj = np.nonzero(boundary)
    for i, j in zip(bi, bj):
        bvals[i, j] = bnd(X[i, j], Y[i, j])

    rhs = np.array([src(x, y) for x, y in zip(X[interior], Y[interior])])

    rows = [np.arange(n_int)]
    cols = [np.arange(n_int)]
    vals = [spec.beta + 4.0 * w[interior] / h2]
    ii, jj = np.nonzero(interior)
    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        ni, nj = ii + di, jj + dj
        coupled = interior[ni, nj]
        rows.append(num[ii[coupled], jj[coupled]])
        cols.append(num[ni[coupled], nj[coupled]])
        vals.append(-w[ii[coupled], jj[coupled]] / h2)
        # Dirichlet neighbors contribute to the right-hand side.
        fixed = ~coupled
        rhs[num[ii[fixed], jj[fixed]]] += (
            w[ii[fixed], jj[fixed]] / h2 * bvals[ni[fixed], nj[fixed]])

    M = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_int, n_int))

    if n_int <= DIRECT_SOLVE_LIMIT:
        sol = spla.spsolve(M, rhs)
    else:
        # Symmetrize: rows share the factor w; dividing by it makes
        # beta diag(1/w) + (five-point graph laplacian), which is SPD.
        d = 1.0 / w[interior]
        D = sp.diags(d)
        sol, info = spla.cg(D @ M, d * rhs, rtol=CG_RTOL, atol=0.0,
                            maxiter=CG_MAX_ITER)
        if info != 0:
            res = float(np.linalg.norm(M @ sol - rhs) / np.linalg.norm(rhs))
            raise SolverError(
                f"conjugate-gradient solve did not converge (info={info})",
                final_residual=res)

    values = np.full(tags.shape, np.nan)
    values[interior] = sol
    values[boundary] = bvals[boundary]
    return GridField(axis=axis, tags=tags, values=values, h=spec.h,
                     r_max=spec.r_max)


def residual_field(field: GridField, spec: GridSpec) -> float:
    """Max over interior nodes of |lap_g f - beta f + psi|.

    For a field returned by `assemble_and_solve` this is the linear-solve
    residual; for an exact solution sampled on the lattice it measures the
    truncation error of the five-point stencil.
    """
    axis = _lattice_axis(spec)
    if axis.shape != field.axis.shape or not np.allclose(axis, field.axis):
        raise ValueError("lattice mismatch between field and spec")
    tags = _classify(axis, spec.r_max)
    if not np.array_equal(tags, field.tags):
        raise ValueError("lattice mismatch: node classification differs")

    f = field.values
    interior = tags == INTERIOR
    h2 = spec.h * spec.h
    lap5 = np.zeros_like(f)
    lap5[1:-1, 1:-1] = (f[:-2, 1:-1] + f[2:, 1:-1] + f[1:-1, :-2] + f[1:-1, 2:]
                        - 4.0 * f[1:-1, 1:-1]) / h2
    X, Y = field.meshes()
    w = _conformal_weight(X[interior], Y[interior])
    src = spec.source_fn()
    psi = np.array([src(x, y) for x, y in zip(X[interior], Y[interior])])
    res = w * lap5[interior] - spec.beta * f[interior] + psi
    return float(np.max(np.abs(res)))


def sample_exact(spec: GridSpec, exact: XYCallable) -> GridField:
    """Exact solution sampled on the spec's lattice (NaN at exterior)."""
    axis = _lattice_axis(spec)
    tags = _classify(axis, spec.r_max)
    X, Y = np.meshgrid(axis, axis, indexing="ij")
    values = np.full(tags.shape, np.nan)
    mask = tags != EXTERIOR
    values[mask] = [exact(x, y) for x, y in zip(X[mask], Y[mask])]
    return GridField(axis=axis, tags=tags, values=values, h=spec.h,
                     r_max=spec.r_max)


@dataclass(frozen=True)
class ConvergenceRow:
    h: float
    max_error: float
    observed_rate: Optional[float]


def convergence_study(spec: GridSpec, h_list: Sequence[float],
                      exact: XYCallable) -> list[ConvergenceRow]:
    """Solve at each mesh width, compare against the exact solution.

    Rates are log(err_i-1 / err_i) / log(h_i-1 / h_i) between consecutive
    rows; for halvings this is the usual log2 ratio, expected near 2 for
    the five-point stencil.
    """
    hs = [float(h) for h in h_list]
    if len(hs) < 2:
        raise ValueError("need at least two mesh widths")
    if any(h2 >= h1 for h1, h2 in zip(hs, hs[1:])):
        raise ValueError("mesh widths must be strictly decreasing")
    exact = _as_xy_callable(exact)

    rows: list[ConvergenceRow] = []
    prev: Optional[ConvergenceRow] = None
    for h in hs:
        run = replace(spec, h=h)
        field = assemble_and_solve(run)
        err = field.max_error_against(exact)
        rate = None
        if prev is not None and err > 0.0 and prev.max_error > 0.0:
            rate = math.log(prev.max_error / err) / math.log(prev.h / h)
        prev = ConvergenceRow(h=h, max_error=err, observed_rate=rate)
        rows.append(prev)
    return rows


def write_grid_csv(field: GridField, dest: Union[str, TextIO]):
    """Emit the lattice as CSV: header x1,x2,tag,value, row-major order.

    Exterior nodes carry an empty value column.  Floats are written with
    17 significant digits so output is bit-stable across runs.
    """
    own = isinstance(dest, str)
    fh = open(dest, "w", encoding="ascii", newline="") if own else dest
    try:
        fh.write("x1,x2,tag,value\n")
        n = len(field.axis)
        for i in range(n):
            for j in range(n):
                tag = TAG_NAMES[int(field.tags[i, j])]
                val = field.values[i, j]
                sval = "" if math.isnan(val) else format(val, ".17g")
                fh.write(f"{format(field.axis[i], '.17g')},"
                         f"{format(field.axis[j], '.17g')},{tag},{sval}\n")
    finally:
        if own:
            fh.close()


def coshdist_exact(x: float, y: float) -> float:
    """(1 + r^2)/(1 - r^2): satisfies lap_g f = 2 f on the disk chart, so
    it solves the homogeneous problem at beta = 2 and, with the
    manufactured source (beta - 2) f, the problem at any beta."""
    r2 = x * x + y * y
    return (1.0 + r2) / (1.0 - r2)


def manufactured_spec(beta: float, r_max: float = 0.8, h: float = 0.02) -> GridSpec:
    """GridSpec whose exact solution is `coshdist_exact` for any beta."""
    return GridSpec(
        beta=beta, r_max=r_max, h=h,
        source=lambda x, y: (beta - 2.0) * coshdist_exact(x, y),
        boundary=coshdist_exact,
    )

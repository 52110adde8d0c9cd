"""Derivation matrices, their null spaces, and the bilinear determinant tensor.

A degree-d polynomial vector field theta = f dx + g dy + h dz is encoded by the
stacked coefficient vector (f, g, h) of length 3*N_d in the graded-lex monomial
basis. theta is tangent to every line of an arrangement exactly when its
coefficient vector lies in the kernel of the integer derivation matrix built
here: for each line, restricting theta(alpha) to a parameterization of the line
must give the identically-zero binary form, one linear constraint per
coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import exactlinalg
from .arrangement import Arrangement, Line, _normalize_triple
from .monomials import (
    basis_size,
    monomial_basis,
    poly_to_vector,
    product_index_table,
    product_of_lines,
    variable_shift_indices,
)


class DegreeMismatch(ValueError):
    pass


class IllConditionedKernel(RuntimeError):
    """No clear spectral gap between kept and discarded singular values."""

    def __init__(self, gap: float, threshold: float):
        super().__init__(
            f"singular value gap {gap:.3e} below required {threshold:.0e}; "
            "numerical nullity is unreliable"
        )
        self.gap = gap


def line_kernel_basis(line: Line) -> tuple[tuple[int, int, int], tuple[int, int, int]]:
    """Two primitive integer vectors spanning the plane alpha = 0.

    Deterministic rule: u = (-b, a, 0), w = (-c, 0, a) when a != 0, axis-based
    choices otherwise, each gcd-reduced and sign-normalized.
    """
    a, b, c = line.coeffs
    if a != 0:
        u = _normalize_triple(-b, a, 0)
        w = _normalize_triple(-c, 0, a)
    elif b != 0:
        u = (1, 0, 0)
        w = _normalize_triple(0, -c, b)
    else:
        u = (1, 0, 0)
        w = (0, 1, 0)
    return u, w


@dataclass(frozen=True)
class DerivationMatrix:
    """Integer constraint matrix whose kernel is D(A)_d; shape n(d+1) x 3*N_d."""

    arrangement: Arrangement
    degree: int
    rows: tuple[tuple[int, ...], ...]
    row_provenance: tuple[tuple[int, int], ...]  # (line index, coefficient index)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), 3 * basis_size(self.degree))

    def as_array(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.float64)

    def dump_text(self) -> str:
        return "\n".join(" ".join(str(v) for v in row) for row in self.rows)


def _binary_form_power(u: int, w: int, e: int) -> list[int]:
    """Coefficients of (s*u + t*w)^e as a list indexed by the power of s."""
    return [math.comb(e, r) * u**r * w ** (e - r) for r in range(e + 1)]


def _conv(p: list[int], q: list[int]) -> list[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                if b:
                    out[i + j] += a * b
    return out


@lru_cache(maxsize=512)
def derivation_matrix(arr: Arrangement, d: int) -> DerivationMatrix:
    """Constraint matrix for degree-d tangent fields; entries are integers."""
    if d < 1:
        raise ValueError("degree must be at least 1")
    mons = monomial_basis(d).monomials
    nd = len(mons)
    rows: list[tuple[int, ...]] = []
    provenance: list[tuple[int, int]] = []
    for li, line in enumerate(arr.lines):
        a, b, c = line.coeffs
        u, w = line_kernel_basis(line)
        # per monomial: coefficients of m(s*u + t*w) indexed by the power of s
        lam = []
        for e1, e2, e3 in mons:
            p = _conv(_binary_form_power(u[0], w[0], e1), _binary_form_power(u[1], w[1], e2))
            lam.append(_conv(p, _binary_form_power(u[2], w[2], e3)))
        for p in range(d + 1):
            row = [0] * (3 * nd)
            for mi in range(nd):
                lp = lam[mi][p]
                if lp:
                    row[mi] = a * lp
                    row[nd + mi] = b * lp
                    row[2 * nd + mi] = c * lp
            rows.append(tuple(row))
            provenance.append((li, p))
    return DerivationMatrix(arr, d, tuple(rows), tuple(provenance))


def euler_multiples(d: int) -> list[tuple[int, ...]]:
    """Stacked coefficient vectors of m*(x dx + y dy + z dz), m over basis(d-1).

    These fields are tangent to every arrangement, so they span an
    N_{d-1}-dimensional subspace of every kernel at degree d.
    """
    if d < 1:
        raise ValueError("degree must be at least 1")
    nd = basis_size(d)
    xs, ys, zs = variable_shift_indices(d - 1)
    out = []
    for k in range(basis_size(d - 1)):
        vec = [0] * (3 * nd)
        vec[xs[k]] = 1
        vec[nd + ys[k]] = 1
        vec[2 * nd + zs[k]] = 1
        out.append(tuple(vec))
    return out


def q_coefficient_vector(arr: Arrangement) -> list[int]:
    """Exact coefficients of the defining polynomial prod alpha_i, degree n."""
    return poly_to_vector(product_of_lines(arr.lines), arr.n)


# ---------------------------------------------------------------------------
# Null spaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NullBasisFloat:
    degree: int
    basis: np.ndarray  # shape 3*N_d x k, orthonormal columns
    singular_values: np.ndarray
    gap: float  # ratio of smallest kept to largest discarded singular value

    @property
    def nullity(self) -> int:
        return self.basis.shape[1]


GAP_THRESHOLD = 1e3


def null_space_float(
    matrix: DerivationMatrix | np.ndarray,
    tol: float = 1e-9,
    force_nullity: int | None = None,
) -> NullBasisFloat:
    """Orthonormal basis of the numerical kernel via SVD.

    Nullity is the number of singular values below tol times the largest one
    (plus any structural deficit when there are fewer rows than columns). A
    spectral gap of at least 1e3 must separate kept from discarded values,
    otherwise IllConditionedKernel is raised; callers may then recompute the
    nullity exactly and pass it back via force_nullity.
    """
    if not 0 < tol < 1:
        raise ValueError("tol must be in (0, 1)")
    if isinstance(matrix, DerivationMatrix):
        a = matrix.as_array()
        degree = matrix.degree
    else:
        a = np.asarray(matrix, dtype=np.float64)
        degree = -1
    # row scaling leaves the kernel unchanged and tames the huge dynamic
    # range of high-degree integer rows (entries up to ~1e25 on real inputs)
    norms = np.linalg.norm(a, axis=1)
    norms[norms == 0.0] = 1.0
    a = a / norms[:, None]
    ncols = a.shape[1]
    _, svals, vt = np.linalg.svd(a, full_matrices=True)
    smax = svals[0] if len(svals) else 0.0
    if smax == 0.0:
        return NullBasisFloat(degree, np.eye(ncols), svals, math.inf)
    if force_nullity is not None:
        r = ncols - force_nullity
    else:
        r = int(np.sum(svals > tol * smax))
    if r == 0 or r >= len(svals):
        gap = math.inf
    else:
        gap = float(svals[r - 1] / svals[r]) if svals[r] > 0 else math.inf
    if force_nullity is None and math.isfinite(gap) and gap < GAP_THRESHOLD:
        raise IllConditionedKernel(gap, GAP_THRESHOLD)
    basis = vt[r:].T.copy()
    return NullBasisFloat(degree, basis, svals, gap)


@dataclass(frozen=True)
class NullBasisExact:
    """Primitive integer basis of the rational kernel of a derivation matrix.

    The first euler_dim vectors span the Euler-multiple subspace; the rest are
    coordinate-complement representatives, so slicing off the head implements
    the quotient by Euler multiples.
    """

    degree: int
    vectors: tuple[tuple[int, ...], ...]
    euler_dim: int

    @property
    def nullity(self) -> int:
        return len(self.vectors)

    @property
    def complement(self) -> tuple[tuple[int, ...], ...]:
        return self.vectors[self.euler_dim:]


def robust_null_basis(arr: Arrangement, d: int, tol: float = 1e-9) -> NullBasisFloat:
    """SVD basis when the spectral gap is clean, exact-kernel basis otherwise.

    Below the gap threshold the SVD tail mixes kernel and noise directions
    (measured: a verified-free input evaluated at 1.8e-4 instead of 0), so
    the fallback orthonormalizes the exact kernel instead of merely forcing
    the exact nullity. This is the float basis every pipeline consumer uses.
    """
    m = derivation_matrix(arr, d)
    try:
        return null_space_float(m, tol=tol)
    except IllConditionedKernel:
        return float_basis_from_exact(m, null_space_exact(m))


def float_basis_from_exact(matrix: DerivationMatrix, exact: "NullBasisExact") -> NullBasisFloat:
    """Orthonormal float basis spanning the exact kernel.

    Used when the SVD cannot separate kernel from noise directions: exact
    kernel vectors are scaled to unit max entry (they can be hundreds of
    digits long), converted to float and orthonormalized.
    """
    cols = []
    for vec in exact.vectors:
        scale = max(abs(v) for v in vec)
        cols.append([v / scale for v in vec])
    x = np.array(cols, dtype=np.float64).T
    q, _ = np.linalg.qr(x)
    return NullBasisFloat(matrix.degree, q[:, : exact.nullity], np.array([]), math.nan)


@lru_cache(maxsize=512)
def null_space_exact(matrix: DerivationMatrix) -> NullBasisExact:
    """Exact kernel basis: explicit Euler multiples plus a complement kernel.

    The Euler-multiple subspace E always sits inside the kernel, and the
    coefficient space splits as E (+) W where W drops the f-block columns of
    monomials divisible by x. Eliminating only the W columns gives
    ker = E (+) (ker cap W) exactly, at a third fewer columns.
    """
    d = matrix.degree
    mons = monomial_basis(d).monomials
    nd = len(mons)
    keep_f = [i for i, m in enumerate(mons) if m[0] == 0]
    col_ids = keep_f + [nd + i for i in range(nd)] + [2 * nd + i for i in range(nd)]
    sub = [[row[j] for j in col_ids] for row in matrix.rows]
    sub_kernel = exactlinalg.kernel_basis(sub, len(col_ids))
    vectors = [tuple(v) for v in euler_multiples(d)]
    for kv in sub_kernel:
        full = [0] * (3 * nd)
        for cid, v in zip(col_ids, kv):
            full[cid] = v
        vectors.append(tuple(full))
    return NullBasisExact(degree=d, vectors=tuple(vectors), euler_dim=basis_size(d - 1))


def exact_nullity(arr: Arrangement, d: int) -> int:
    return null_space_exact(derivation_matrix(arr, d)).nullity


# ---------------------------------------------------------------------------
# The bilinear determinant tensor
# ---------------------------------------------------------------------------

DENSE_TENSOR_BUDGET = 2_000_000_000  # entries


@dataclass(frozen=True)
class SaitoTensor:
    """Bilinear map sending null-space coordinates to determinant coefficients.

    tensor[beta, i, j] is the beta-th degree-n coefficient of the determinant
    det(euler, theta_i, theta_j) over columns theta_i of V1 and theta_j of V2.
    When the dense array would exceed the entry budget, tensor is None and
    contractions are computed lazily from the component polynomials.
    """

    n: int
    d1: int
    d2: int
    v1: np.ndarray
    v2: np.ndarray
    q: np.ndarray  # float coefficient vector of the defining polynomial, unit norm
    q_exact: tuple
    tensor: np.ndarray | None = field(repr=False, default=None)

    @property
    def k1(self) -> int:
        return self.v1.shape[1]

    @property
    def k2(self) -> int:
        return self.v2.shape[1]

    @property
    def out_size(self) -> int:
        return basis_size(self.n)


def _components(v: np.ndarray, d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    nd = basis_size(d)
    return v[:nd], v[nd : 2 * nd], v[2 * nd :]


@lru_cache(maxsize=64)
def _scatter_operators(d1: int, d2: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Dense 0/1 maps sending (m1, m2) product pairs to x/y/z-shifted outputs.

    Row beta of the first operator marks the pairs whose product times x is
    the beta-th monomial of basis(d1 + d2 + 1); matmul against these replaces
    slow scatter-add during tensor assembly and lazy contraction.
    """
    flat = product_index_table(d1, d2).ravel()
    xs, ys, zs = (np.array(ix) for ix in variable_shift_indices(d1 + d2))
    m = flat.size
    n_out = basis_size(d1 + d2 + 1)
    cols = np.arange(m)
    ops = []
    for shift in (xs, ys, zs):
        s = np.zeros((n_out, m))
        s[shift[flat], cols] = 1.0
        ops.append(s)
    return ops[0], ops[1], ops[2]


def _pair_products(a1: np.ndarray, b2: np.ndarray, b1: np.ndarray, a2: np.ndarray) -> np.ndarray:
    """(m1, m2)-indexed coefficients of a1*b2 - b1*a2, flattened over pairs.

    Trailing axes of the degree-d1 and degree-d2 operands are kept and
    flattened into a single column axis.
    """
    prod = np.multiply.outer(a1, b2) - np.multiply.outer(b1, a2)
    prod = np.moveaxis(prod, a1.ndim, 1)
    m = prod.shape[0] * prod.shape[1]
    return prod.reshape(m, -1)


def _det_blocks(
    f1, g1, h1, f2, g2, h2, d1: int, d2: int, n: int
) -> np.ndarray:
    """Expand x(g1 h2 - g2 h1) - y(f1 h2 - f2 h1) + z(f1 g2 - f2 g1).

    Inputs are coefficient arrays over basis(d1) and basis(d2) with an
    arbitrary number of trailing axes; output is over basis(n).
    """
    sx, sy, sz = _scatter_operators(d1, d2)
    out = sx @ _pair_products(g1, h2, h1, g2)
    out -= sy @ _pair_products(f1, h2, h1, f2)
    out += sz @ _pair_products(f1, g2, g1, f2)
    trailing = f1.shape[1:] + f2.shape[1:]
    return out.reshape((basis_size(n),) + trailing)


def assemble_saito_tensor(
    arr: Arrangement,
    v1: NullBasisFloat,
    v2: NullBasisFloat,
    budget: int = DENSE_TENSOR_BUDGET,
) -> SaitoTensor:
    """Build the determinant tensor for a pair of float null bases.

    Raises DegreeMismatch unless the degrees sum to n - 1. Falls back to the
    lazy representation when the dense tensor would exceed the budget.
    """
    n = arr.n
    d1, d2 = v1.degree, v2.degree
    if d1 + d2 != n - 1:
        raise DegreeMismatch(f"degrees {d1} + {d2} != n - 1 = {n - 1}")
    q_exact = tuple(q_coefficient_vector(arr))
    q = np.array([float(v) for v in q_exact])
    q /= np.linalg.norm(q)
    dense = None
    if basis_size(n) * v1.nullity * v2.nullity <= budget:
        f1, g1, h1 = _components(v1.basis, d1)
        f2, g2, h2 = _components(v2.basis, d2)
        dense = _det_blocks(f1, g1, h1, f2, g2, h2, d1, d2, n)
    return SaitoTensor(n=n, d1=d1, d2=d2, v1=v1.basis, v2=v2.basis, q=q, q_exact=q_exact, tensor=dense)


def contract(t: SaitoTensor, alpha1: np.ndarray, alpha2: np.ndarray) -> np.ndarray:
    """T(alpha1, alpha2): degree-n coefficient vector of the Saito determinant."""
    alpha1 = np.asarray(alpha1, dtype=np.float64)
    alpha2 = np.asarray(alpha2, dtype=np.float64)
    if alpha1.shape != (t.k1,) or alpha2.shape != (t.k2,):
        raise DegreeMismatch("parameter vector lengths do not match the null bases")
    if t.tensor is not None:
        return np.einsum("bij,i,j->b", t.tensor, alpha1, alpha2)
    f1, g1, h1 = _components(t.v1 @ alpha1, t.d1)
    f2, g2, h2 = _components(t.v2 @ alpha2, t.d2)
    return _det_blocks(f1, g1, h1, f2, g2, h2, t.d1, t.d2, t.n)


def contract_matrix(t: SaitoTensor, alpha: np.ndarray, side: int) -> np.ndarray:
    """Linear map of the remaining argument once one side is fixed.

    side=2 fixes alpha2 and returns A1 with A1 @ alpha1 = T(alpha1, alpha2);
    side=1 fixes alpha1 and returns A2.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    if t.tensor is not None:
        if side == 2:
            return np.einsum("bij,j->bi", t.tensor, alpha)
        return np.einsum("bij,i->bj", t.tensor, alpha)
    if side == 2:
        f2, g2, h2 = _components(t.v2 @ alpha, t.d2)
        f1, g1, h1 = _components(t.v1, t.d1)
        return _det_blocks(f1, g1, h1, f2, g2, h2, t.d1, t.d2, t.n)
    f1, g1, h1 = _components(t.v1 @ alpha, t.d1)
    f2, g2, h2 = _components(t.v2, t.d2)
    return _det_blocks(f1, g1, h1, f2, g2, h2, t.d1, t.d2, t.n)

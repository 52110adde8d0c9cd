"""Angular freeness loss, minimized by alternating least squares with restarts.

The loss of an arrangement at exponents (d1, d2) is one minus the best squared
cosine between an achievable Saito determinant T(alpha1, alpha2) and the
defining polynomial's coefficient vector q. Fixing either parameter vector
makes the problem a homogeneous least squares solve, so the two sides are
alternated; each half-step is accepted only if it does not lower the squared
cosine, which keeps the recorded history monotone within a restart.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .arrangement import Arrangement, candidate_exponents, no_exponent_reason
from .derivations import (
    SaitoTensor,
    assemble_saito_tensor,
    contract,
    contract_matrix,
    euler_multiples,
    robust_null_basis,
)


@dataclass(frozen=True)
class ALSConfig:
    iterations: int = 10
    restarts: int = 3
    rng_seed: int = 0
    zero_guard: float = 1e-12

    def __post_init__(self):
        if self.iterations < 1 or self.restarts < 1:
            raise ValueError("iterations and restarts must be at least 1")


@dataclass(frozen=True)
class ALSResult:
    loss: float
    alpha1: np.ndarray
    alpha2: np.ndarray
    c: float
    history: tuple[float, ...]  # squared cosine after each accepted half-step
    restart_losses: tuple[float, ...]
    all_contractions_zero: bool = False
    euler_degenerate: bool = False


def homogeneous_lsq(a_mat: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, float]:
    """Unit (alpha, c) minimizing ||a_mat @ alpha - c q||, alpha renormalized.

    The minimizer is the smallest right singular vector of [a_mat | -q],
    computed from the (k+1) x (k+1) Gram matrix since rows vastly outnumber
    columns here.
    """
    a_mat = np.atleast_2d(np.asarray(a_mat, dtype=np.float64))
    q = np.asarray(q, dtype=np.float64)
    b = np.hstack([a_mat, -q[:, None]])
    gram = b.T @ b
    _, vecs = np.linalg.eigh(gram)
    w = vecs[:, 0]
    alpha, c = w[:-1], float(w[-1])
    norm = np.linalg.norm(alpha)
    if norm > 0:
        alpha = alpha / norm
        c = c / norm
    return alpha, c


def _cos2(vec: np.ndarray, q: np.ndarray, zero_guard: float) -> float:
    nv = np.linalg.norm(vec)
    if nv <= zero_guard:
        return 0.0
    r = float(np.dot(vec, q)) ** 2 / (nv * nv * float(np.dot(q, q)))
    return min(r, 1.0)


def als_minimize(t: SaitoTensor, config: ALSConfig = ALSConfig()) -> ALSResult:
    """Best result over independent restarts; deterministic given the config.

    Within a restart, alpha1 and alpha2 are alternately re-solved through
    homogeneous_lsq; a candidate that would lower the squared cosine is
    discarded (the previous iterate is kept), so history is non-decreasing.
    """
    q = t.q
    best: ALSResult | None = None
    restart_losses: list[float] = []
    zero_flags: list[bool] = []
    for r in range(config.restarts):
        rng = np.random.default_rng(np.random.SeedSequence([config.rng_seed & (2**64 - 1), r]))
        alpha2 = rng.standard_normal(t.k2)
        alpha2 /= np.linalg.norm(alpha2)
        alpha1 = np.zeros(t.k1)
        c = 0.0
        cur = 0.0
        hist: list[float] = []
        for _ in range(config.iterations):
            for side in (2, 1):
                a_mat = contract_matrix(t, alpha2 if side == 2 else alpha1, side)
                cand, c_cand = homogeneous_lsq(a_mat, q)
                cand_cos = _cos2(a_mat @ cand, q, config.zero_guard)
                if cand_cos >= cur:
                    c = c_cand
                    if side == 2:
                        alpha1 = cand
                    else:
                        alpha2 = cand
                    cur = cand_cos
                hist.append(cur)
        restart_losses.append(1.0 - cur)
        zero_flags.append(
            np.linalg.norm(contract(t, alpha1, alpha2)) <= config.zero_guard
        )
        if best is None or 1.0 - cur < best.loss:
            best = ALSResult(
                loss=1.0 - cur,
                alpha1=alpha1,
                alpha2=alpha2,
                c=c,
                history=tuple(hist),
                restart_losses=(),
            )
    assert best is not None
    all_zero = all(zero_flags)
    return ALSResult(
        loss=1.0 if all_zero else best.loss,
        alpha1=best.alpha1,
        alpha2=best.alpha2,
        c=best.c,
        history=best.history,
        restart_losses=tuple(restart_losses),
        all_contractions_zero=all_zero,
        euler_degenerate=_euler_degenerate(t, best.alpha1, best.alpha2),
    )


def _euler_coordinates(v_basis: np.ndarray, degree: int) -> np.ndarray:
    """Orthonormal basis, in null-space coordinates, of the Euler-multiple image."""
    e = np.array(euler_multiples(degree), dtype=np.float64).T  # 3N_d x N_{d-1}
    coords = v_basis.T @ e
    qmat, rmat = np.linalg.qr(coords)
    keep = np.abs(np.diag(rmat)) > 1e-12
    return qmat[:, keep]


def _euler_degenerate(t: SaitoTensor, alpha1: np.ndarray, alpha2: np.ndarray, tol: float = 1e-8) -> bool:
    """True when either optimal parameter lies in the Euler-multiple image.

    Such optima contract to zero identically and must not be read as
    freeness witnesses.
    """
    for basis, degree, alpha in ((t.v1, t.d1, alpha1), (t.v2, t.d2, alpha2)):
        na = np.linalg.norm(alpha)
        if na == 0 or degree < 1:
            continue
        u = _euler_coordinates(basis, degree)
        if u.shape[1] == 0:
            continue
        residual = alpha / na - u @ (u.T @ (alpha / na))
        if np.linalg.norm(residual) <= tol:
            return True
    return False


@dataclass(frozen=True)
class SaitoEvaluation:
    """Full pipeline output: loss, ALS diagnostics, dimensions and timing."""

    loss: float
    d1: int
    d2: int
    k1: int
    k2: int
    result: ALSResult | None
    elapsed_ms: float
    reason: str | None = None  # set when the loss was forced without ALS
    gap1: float = float("inf")
    gap2: float = float("inf")
    tensor: SaitoTensor | None = field(repr=False, default=None)


class NoCandidateExponents(ValueError):
    def __init__(self, reason: str | None):
        super().__init__(f"no candidate exponents ({reason})")
        self.reason = reason


def saito_functional(
    arr: Arrangement,
    d1: int | None = None,
    d2: int | None = None,
    config: ALSConfig = ALSConfig(),
    svd_tol: float = 1e-9,
) -> SaitoEvaluation:
    """Evaluate the angular freeness loss of an arrangement at (d1, d2).

    When the exponents are omitted they must be derivable from the lattice,
    otherwise NoCandidateExponents is raised. An empty kernel on either side
    reports loss 1 with reason "empty-kernel" instead of running ALS.
    """
    t0 = time.perf_counter()
    if d1 is None or d2 is None:
        exps = candidate_exponents(arr)
        if exps is None:
            raise NoCandidateExponents(no_exponent_reason(arr))
        d1, d2 = exps.d1, exps.d2
    if d1 + d2 != arr.n - 1:
        raise ValueError(f"exponents ({d1}, {d2}) do not sum to n - 1 = {arr.n - 1}")
    v1 = robust_null_basis(arr, d1, svd_tol)
    v2 = robust_null_basis(arr, d2, svd_tol) if d2 != d1 else v1
    if v1.nullity == 0 or v2.nullity == 0:
        elapsed = (time.perf_counter() - t0) * 1e3
        return SaitoEvaluation(
            loss=1.0, d1=d1, d2=d2, k1=v1.nullity, k2=v2.nullity,
            result=None, elapsed_ms=elapsed, reason="empty-kernel",
            gap1=v1.gap, gap2=v2.gap,
        )
    tensor = assemble_saito_tensor(arr, v1, v2)
    result = als_minimize(tensor, config)
    elapsed = (time.perf_counter() - t0) * 1e3
    reason = "all-contractions-zero" if result.all_contractions_zero else None
    return SaitoEvaluation(
        loss=result.loss, d1=d1, d2=d2, k1=v1.nullity, k2=v2.nullity,
        result=result, elapsed_ms=elapsed, reason=reason, gap1=v1.gap, gap2=v2.gap,
        tensor=tensor,
    )

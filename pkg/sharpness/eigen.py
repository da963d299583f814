"""
Generalized eigenvalues of the Rellich forms
Shifted inverse iteration on A v = λ B v, factorizing the stencil S (A = SᵀS) instead of A
"""
import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import linalg

from config import EIGEN_CONFIG, max_threads
from seq_core import CompensatedVector, FiniteSequence
from sharpness.forms import BandedForm, assemble_form, sharp_constant

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps


class FactorizationBreakdown(RuntimeError):
    """The stencil factor is numerically singular, or no admissible shift could be applied"""


class ConvergenceFailure(RuntimeError):
    """Inverse iteration did not converge within max_iter"""


class _ShiftTooClose(ArithmeticError):
    """A - σB showed non-positive curvature, or the shifted solve stalled"""


@dataclass
class RayleighResult:
    """Smallest generalized eigenpair of a BandedForm"""
    lambda_min: float
    eigvec: FiniteSequence
    iterations: int
    residual: float
    relative_residual: float
    residual_floor: float
    shift: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            'lambda_min': self.lambda_min,
            'iterations': self.iterations,
            'residual': self.residual,
            'relative_residual': self.relative_residual,
            'residual_floor': self.residual_floor,
            'shift': self.shift,
        }


# ============================================================================
# FACTORIZATION
# ============================================================================

def _rotate_in(band: np.ndarray, row: np.ndarray, c: int) -> None:
    """Givens-rotate one stencil row, leading column c, into the upper band"""
    size = band.shape[0]
    while c < size and row.any():
        x = row[0]
        if x != 0.0:
            a = band[c, 0]
            if a == 0.0:
                band[c] = row
                return
            radius = math.hypot(a, x)
            cs, sn = a / radius, x / radius
            top = cs * band[c] + sn * row
            row = cs * row - sn * band[c]
            band[c] = top
        row = np.append(row[1:], 0.0)
        c += 1


class _StencilFactor:
    """
    Upper banded R with RᵀR = A, built by Givens QR of the integer stencil S

    Rounding acts on S rather than on A, so the factor stays usable when A
    itself is too ill-conditioned for Cholesky (large N at ℓ ≥ 3). Shifted
    systems (A - σB)x = b are solved as (I - σK)y = R⁻ᵀb, x = R⁻¹y with
    K = R⁻ᵀBR⁻¹, by conjugate gradients.
    """

    def __init__(self, form: BandedForm):
        self.form = form
        width = form.ell
        size = form.size
        band = np.zeros((size, width + 1))
        S = form.S
        for r in range(S.shape[0]):
            start, end = S.indptr[r], S.indptr[r + 1]
            if start == end:
                continue
            cols = S.indices[start:end]
            c0 = int(cols.min())
            row = np.zeros(width + 1)
            row[cols - c0] = S.data[start:end]
            _rotate_in(band, row, c0)

        diag = np.abs(band[:, 0])
        if not diag.min() > size * _EPS * diag.max():
            raise FactorizationBreakdown(
                f"Stencil factor for ell={form.ell}, N={form.N} is numerically singular "
                f"(smallest pivot {diag.min():.3e})"
            )

        self.width = width
        self._upper = np.zeros((width + 1, size))
        self._lower = np.zeros((width + 1, size))
        for k in range(width + 1):
            self._upper[width - k, k:] = band[:size - k, k]
            self._lower[k, :size - k] = band[:size - k, k]
        self.sigma = 0.0

    def solve_r(self, y: np.ndarray) -> np.ndarray:
        return linalg.solve_banded((0, self.width), self._upper, y, check_finite=False)

    def solve_rt(self, b: np.ndarray) -> np.ndarray:
        return linalg.solve_banded((self.width, 0), self._lower, b, check_finite=False)

    def _apply_k(self, y: np.ndarray) -> np.ndarray:
        return self.solve_rt(self.form.B * self.solve_r(y))

    def shifted_solve(self, rhs: np.ndarray, sigma: float) -> np.ndarray:
        """
        x = (A - σB)⁻¹ rhs

        Raises:
            _ShiftTooClose: non-positive curvature (σ ≥ λ_min) or no
                convergence within EIGEN_CONFIG['inner_max_iter']
        """
        g = self.solve_rt(rhs)
        if sigma == 0.0:
            return self.solve_r(g)
        y = np.zeros_like(g)
        r = g.copy()
        p = r.copy()
        rr = float(r @ r)
        stop = (EIGEN_CONFIG['inner_tol'] * math.sqrt(rr)) ** 2
        for _ in range(EIGEN_CONFIG['inner_max_iter']):
            q = p - sigma * self._apply_k(p)
            curvature = float(p @ q)
            if not curvature > 0.0:
                raise _ShiftTooClose(f"non-positive curvature at shift {sigma!r}")
            step = rr / curvature
            y += step * p
            r -= step * q
            rr_new = float(r @ r)
            if rr_new <= stop:
                return self.solve_r(y)
            p = r + (rr_new / rr) * p
            rr = rr_new
        raise _ShiftTooClose(f"shifted solve stalled at shift {sigma!r}")

    def step(self, rhs: np.ndarray, target: float, retries: int) -> np.ndarray:
        """
        Shifted solve at `target`, halving the gap to the last good shift on
        breakdown; falls back to the last good shift after `retries` failures
        """
        safe = self.sigma
        trial = target
        for attempt in range(retries + 1):
            try:
                x = self.shifted_solve(rhs, trial)
            except _ShiftTooClose as e:
                logger.warning(f"Shift breakdown ({e}); retry {attempt + 1} of {retries}")
                trial = safe + 0.5 * (trial - safe)
                continue
            self.sigma = trial
            return x
        try:
            return self.shifted_solve(rhs, safe)
        except _ShiftTooClose:
            self.sigma = 0.0
            return self.shifted_solve(rhs, 0.0)


# ============================================================================
# RESIDUALS
# ============================================================================

def _rayleigh(form: BandedForm, v: np.ndarray) -> float:
    return form.energy(v) / form.mass(v)


def _residual(form: BandedForm, v: np.ndarray, lam: float) -> Tuple[float, float, float]:
    """
    ‖Av - λBv‖, ‖Av‖ and the attainable floor c·eps·‖(|A| + λB)|v|‖

    Av is formed as Sᵀ(Sv) with both products compensated.
    """
    hi, lo = form.apply_stencil(v)
    acc = CompensatedVector(form.size)
    form.apply_transpose(hi, lo, acc)
    av_hi, av_lo = acc.result()
    av = av_hi + av_lo
    acc.add_product(-lam, form.B * v)
    r_hi, r_lo = acc.result()
    r = r_hi + r_lo
    scale = abs(form.A) @ np.abs(v) + lam * form.B * np.abs(v)
    floor = EIGEN_CONFIG['floor_factor'] * _EPS * float(np.linalg.norm(scale))
    return float(np.linalg.norm(r)), float(np.linalg.norm(av)), floor


def _normalize(form: BandedForm, v: np.ndarray) -> np.ndarray:
    v = v / math.sqrt(form.mass(v))
    k = int(np.argmax(np.abs(v)))
    return -v if v[k] < 0 else v


# ============================================================================
# INVERSE ITERATION
# ============================================================================

def min_generalized_eig(
    form: BandedForm,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    seed: int = 0,
) -> RayleighResult:
    """
    Smallest λ with A v = λ B v

    A warmup of unshifted inverse iteration gives a Rayleigh estimate ρ; each
    later step solves with the shift shift_factor·ρ. Every iterate's Rayleigh
    quotient is evaluated with the compensated stencil, so the reported value
    is an upper bound for λ_min. Converged when the residual is within target
    (or the rounding floor) and ρ changed by at most tol relative, or when ρ
    stopped decreasing within stall_tol: then the smallest ρ seen is returned.

    Args:
        form: Assembled BandedForm
        tol: Relative eigenvalue change for convergence
        max_iter: Iteration cap
        seed: Seed of the starting vector

    Returns:
        RayleighResult

    Raises:
        FactorizationBreakdown: the stencil factor is numerically singular
        ConvergenceFailure: no convergence after max_iter iterations
    """
    tol = EIGEN_CONFIG['tol'] if tol is None else tol
    max_iter = EIGEN_CONFIG['max_iter'] if max_iter is None else max_iter
    target = EIGEN_CONFIG['residual_target']
    factor = EIGEN_CONFIG['shift_factor']
    retries = EIGEN_CONFIG['max_retries']
    stall_tol = EIGEN_CONFIG['stall_tol']

    solver = _StencilFactor(form)

    rng = np.random.default_rng(seed)
    v = _normalize(form, rng.uniform(0.5, 1.5, size=form.size))
    for _ in range(EIGEN_CONFIG['warmup_steps']):
        v = _normalize(form, solver.shifted_solve(form.B * v, 0.0))
    rho = _rayleigh(form, v)
    best_rho, best_v = rho, v
    logger.debug(f"ell={form.ell}, N={form.N}: warmup Rayleigh {rho:.15g}")

    for iteration in range(1, max_iter + 1):
        v = _normalize(form, solver.step(form.B * v, factor * best_rho, retries))
        rho_new = _rayleigh(form, v)
        change = abs(rho_new - rho)
        stalled = rho_new >= best_rho and change <= stall_tol * abs(best_rho)
        rho = rho_new
        if rho < best_rho:
            best_rho, best_v = rho, v
        residual, av_norm, floor = _residual(form, best_v, best_rho)
        accepted = max(target * av_norm, floor)
        logger.debug(f"iter {iteration}: rho={rho:.17g} change={change:.3e} residual={residual:.3e} "
                     f"shift={solver.sigma:.15g}")
        if (change <= tol * abs(rho) or stalled) and residual <= accepted:
            if floor > target * av_norm:
                logger.warning(
                    f"ell={form.ell}, N={form.N}: residual floor {floor:.3e} is above the target "
                    f"{target * av_norm:.3e}; accepted at the floor"
                )
            eigvec = FiniteSequence.from_values(best_v.tolist(), form.ell)
            return RayleighResult(
                lambda_min=best_rho,
                eigvec=eigvec,
                iterations=iteration,
                residual=residual,
                relative_residual=residual / av_norm if av_norm > 0 else math.inf,
                residual_floor=floor,
                shift=solver.sigma,
            )

    raise ConvergenceFailure(f"Inverse iteration for ell={form.ell}, N={form.N} did not converge in {max_iter} iterations")


# ============================================================================
# SWEEPS
# ============================================================================

def _solve_one(args: Tuple[int, int, Optional[float], int]) -> RayleighResult:
    ell, N, tol, seed = args
    return min_generalized_eig(assemble_form(ell, N), tol=tol, seed=seed)


def eig_sweep(ell: int, N_list: Sequence[int], tol: Optional[float] = None, seed: int = 0) -> pd.DataFrame:
    """
    λ_min(N) for each truncation N, solved concurrently, rows in input order

    Returns:
        DataFrame with columns N, lambda_min, iterations, residual
    """
    N_list = [int(N) for N in N_list]
    if not N_list:
        raise ValueError("Sweep needs at least one truncation size")
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise ValueError(f"Truncation sizes must be strictly increasing, got {N_list}")

    jobs = [(ell, N, tol, seed) for N in N_list]
    with ThreadPoolExecutor(max_workers=min(max_threads(), len(jobs))) as executor:
        results = list(executor.map(_solve_one, jobs))

    table = pd.DataFrame({
        'N': N_list,
        'lambda_min': [r.lambda_min for r in results],
        'iterations': [r.iterations for r in results],
        'residual': [r.residual for r in results],
    })
    logger.info(f"Sweep ell={ell} over {len(N_list)} truncations finished")
    return table


def sweep_violations(table: pd.DataFrame, ell: int) -> List[Dict[str, Any]]:
    """Rows where λ_min is not above C_ℓ or increases with N"""
    constant = sharp_constant(ell)
    violations = []
    previous = None
    for row in table.itertuples(index=False):
        if not row.lambda_min > constant:
            violations.append({'N': int(row.N), 'kind': 'not_above_constant',
                               'lambda_min': float(row.lambda_min), 'constant': constant})
        if previous is not None and row.lambda_min > previous[1]:
            violations.append({'N': int(row.N), 'kind': 'increase',
                               'lambda_min': float(row.lambda_min), 'previous_N': previous[0],
                               'previous': previous[1]})
        previous = (int(row.N), float(row.lambda_min))
    return violations

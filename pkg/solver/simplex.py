"""
Reference LP solver: bounded revised simplex.

The problem min c.x, rows A.x {<=,=,>=} b, l <= x <= u is rewritten as

    [A  -I  Art] z = 0,   bounds on z

where the -I columns carry the row activities (bounded by the row sense and
right-hand side) and Art holds one artificial per row violated by the
starting point. Phase 1 drives the artificials to zero; phase 2 optimizes the
real objective with the artificials fixed at zero.

Basis solves use a sparse LU factorization refreshed every few pivots with
product-form (eta) updates in between. Rows and columns are equilibrated by
powers of two so scaling never perturbs the data.
"""
import logging
import math
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from core.config import Config
from core.exceptions import SolverError
from solver.solution import Solution

logger = logging.getLogger(__name__)

AT_LOWER, AT_UPPER, AT_ZERO, BASIC = 0, 1, 2, -1


@dataclass
class SolverOptions:
    tolerance: float = Config.FEASIBILITY_TOL
    optimality_tol: float = Config.OPTIMALITY_TOL
    max_iters: int = Config.MAX_ITERS
    scaling: bool = True
    pivot_tol: float = Config.PIVOT_TOL
    bland_after: int = Config.BLAND_AFTER_DEGENERATE
    refactor_every: int = 64
    backend: str = 'auto'
    auto_nnz_limit: int = Config.AUTO_NNZ_LIMIT
    trace: bool = True


def _extrema(M) -> Tuple[np.ndarray, np.ndarray]:
    """Largest and smallest stored magnitude of each major slice of a compressed matrix"""
    k = len(M.indptr) - 1
    mx, mn = np.zeros(k), np.zeros(k)
    nonempty = np.diff(M.indptr) > 0
    if M.data.size:
        starts = M.indptr[:-1][nonempty]
        mx[nonempty] = np.maximum.reduceat(M.data, starts)
        mn[nonempty] = np.minimum.reduceat(M.data, starts)
    return mx, mn


def geometric_scaling(A: sp.csr_matrix, passes: int = 4) -> Tuple[np.ndarray, np.ndarray]:
    """
    Row and column factors that bring every |a_ij| close to 1

    Returns:
        (R, S), both powers of two, so that diag(R) A diag(S) is well scaled
    """
    m, n = A.shape
    R, S = np.ones(m), np.ones(n)
    absA = abs(A).tocsr()
    absA.eliminate_zeros()
    for _ in range(passes):
        M = (sp.diags(R) @ absA @ sp.diags(S)).tocsr()
        hi, lo = _extrema(M)
        R *= np.where(hi > 0, 1.0 / np.sqrt(np.maximum(hi * lo, 1e-300)), 1.0)
        M = (sp.diags(R) @ absA @ sp.diags(S)).tocsc()
        hi, lo = _extrema(M)
        S *= np.where(hi > 0, 1.0 / np.sqrt(np.maximum(hi * lo, 1e-300)), 1.0)
    return np.exp2(np.round(np.log2(R))), np.exp2(np.round(np.log2(S)))


def row_bounds(senses: np.ndarray, rhs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    lo = np.where(senses == 'L', -np.inf, rhs)
    hi = np.where(senses == 'G', np.inf, rhs)
    return lo.astype(float), hi.astype(float)


class _Basis:
    """LU factors of the basis matrix plus a product-form eta file"""

    def __init__(self, Z: sp.csc_matrix, basis: np.ndarray):
        B = Z[:, basis].tocsc()
        try:
            self.lu = splu(B)
        except RuntimeError as e:
            raise SolverError(f"basis factorization failed: {e}")
        self.etas: List[Tuple[int, np.ndarray]] = []

    def ftran(self, a: np.ndarray) -> np.ndarray:
        v = self.lu.solve(a)
        for p, w in self.etas:
            vp = v[p] / w[p]
            v = v - w * vp
            v[p] = vp
        return v

    def btran(self, c: np.ndarray) -> np.ndarray:
        u = np.array(c, dtype=float)
        for p, w in reversed(self.etas):
            up = (u[p] - (w @ u - w[p] * u[p])) / w[p]
            u[p] = up
        return self.lu.solve(u, trans='T')

    def update(self, p: int, w: np.ndarray):
        self.etas.append((p, w.copy()))


class RevisedSimplex:
    """Bounded revised simplex over an annotated LP"""

    def __init__(self, A: sp.csr_matrix, c: np.ndarray, senses: np.ndarray, rhs: np.ndarray,
                 lb: np.ndarray, ub: np.ndarray, options: Optional[SolverOptions] = None):
        self.options = options or SolverOptions()
        self.A = sp.csr_matrix(A)
        self.m, self.n = self.A.shape
        self.c = np.asarray(c, dtype=float)
        self.senses = np.asarray(senses)
        self.rhs = np.asarray(rhs, dtype=float)
        self.lb = np.asarray(lb, dtype=float)
        self.ub = np.asarray(ub, dtype=float)
        self.iterations = 0
        self.trace: List[Dict[str, float]] = []

    # -- Setup ---------------------------------------------------------------

    def _setup(self):
        opts = self.options
        if opts.scaling and self.A.nnz:
            self.R, self.S = geometric_scaling(self.A)
        else:
            self.R, self.S = np.ones(self.m), np.ones(self.n)
        As = (sp.diags(self.R) @ self.A @ sp.diags(self.S)).tocsc()

        row_lo, row_hi = row_bounds(self.senses, self.rhs)
        x_lb, x_ub = self.lb / self.S, self.ub / self.S
        x0 = np.where(np.isfinite(x_lb), x_lb, np.where(np.isfinite(x_ub), x_ub, 0.0))
        status = np.where(np.isfinite(x_lb), AT_LOWER, np.where(np.isfinite(x_ub), AT_UPPER, AT_ZERO))

        beta = As @ x0
        r_lo, r_hi = row_lo * self.R, row_hi * self.R
        tol = opts.tolerance
        below = beta < r_lo - tol
        above = beta > r_hi + tol
        violated = np.flatnonzero(below | above)
        target = np.where(below, r_lo, r_hi)[violated]
        sigma = np.sign(target - beta[violated])

        n_art = violated.size
        art = sp.csc_matrix((sigma, (violated, np.arange(n_art))), shape=(self.m, n_art))
        self.Z = sp.hstack([As, -sp.identity(self.m, format='csc'), art], format='csc')
        self.ZT = self.Z.T.tocsr()
        self.n_art = n_art
        total = self.n + self.m + n_art
        self.z_lb = np.concatenate([x_lb, r_lo, np.zeros(n_art)])
        self.z_ub = np.concatenate([x_ub, r_hi, np.full(n_art, np.inf)])

        z = np.zeros(total)
        z[:self.n] = x0
        self.status = np.concatenate([status, np.full(self.m + n_art, BASIC)]).astype(int)
        basis = self.n + np.arange(self.m)
        rows_art = self.n + self.m + np.arange(n_art)
        basis[violated] = rows_art
        slack = self.n + violated
        z[slack] = target
        self.status[slack] = np.where(below[violated], AT_LOWER, AT_UPPER)
        z[rows_art] = np.abs(target - beta[violated])
        free_rows = np.setdiff1d(np.arange(self.m), violated)
        z[self.n + free_rows] = beta[free_rows]
        self.status[rows_art] = BASIC
        self.basis = basis
        self.z = z

    # -- Iterations ------------------------------------------------------------

    def _basic_values(self, factor: _Basis) -> np.ndarray:
        nonbasic = self.z.copy()
        nonbasic[self.basis] = 0.0
        return factor.ftran(-(self.Z @ nonbasic))

    def _dual_bound(self, d: np.ndarray) -> float:
        tiny = 1e-11
        pos = d > tiny
        neg = d < -tiny
        if np.any(pos & ~np.isfinite(self.z_lb)) or np.any(neg & ~np.isfinite(self.z_ub)):
            return -math.inf
        return float(d[pos] @ self.z_lb[pos] + d[neg] @ self.z_ub[neg])

    def _run_phase(self, cost: np.ndarray, phase: int) -> str:
        opts = self.options
        factor = _Basis(self.Z, self.basis)
        degenerate = 0
        bland = False
        while True:
            if self.iterations >= opts.max_iters:
                return 'iteration_limit'
            if len(factor.etas) >= opts.refactor_every:
                factor = _Basis(self.Z, self.basis)
            self.z[self.basis] = self._basic_values(factor)

            y = factor.btran(cost[self.basis])
            d = cost - self.ZT @ y
            d[self.basis] = 0.0
            if opts.trace:
                self.trace.append({'iteration': self.iterations, 'phase': phase,
                                   'objective': float(cost @ self.z), 'dual_bound': self._dual_bound(d),
                                   'bland': bland})

            tol = opts.optimality_tol
            fixed = self.z_lb == self.z_ub
            eligible = (((self.status == AT_LOWER) & (d < -tol))
                        | ((self.status == AT_UPPER) & (d > tol))
                        | ((self.status == AT_ZERO) & (np.abs(d) > tol))) & ~fixed
            candidates = np.flatnonzero(eligible)
            if candidates.size == 0:
                self._y = y
                return 'optimal'
            if bland:
                q = int(candidates[0])
            else:
                q = int(candidates[np.argmax(np.abs(d[candidates]))])
            direction = 1.0 if d[q] < 0 else -1.0

            col = self.Z[:, q].toarray().ravel()
            w = factor.ftran(col)
            delta = direction * w
            xb = self.z[self.basis]
            lb_b, ub_b = self.z_lb[self.basis], self.z_ub[self.basis]
            ratios = np.full(self.m, np.inf)
            dec = (delta > opts.pivot_tol) & np.isfinite(lb_b)
            inc = (delta < -opts.pivot_tol) & np.isfinite(ub_b)
            ratios[dec] = (xb[dec] - lb_b[dec]) / delta[dec]
            ratios[inc] = (ub_b[inc] - xb[inc]) / (-delta[inc])
            ratios = np.maximum(ratios, 0.0)

            t = float(ratios.min()) if self.m else math.inf
            flip = self.z_ub[q] - self.z_lb[q]
            if not np.isfinite(t) and not np.isfinite(flip):
                self._ray = (q, direction)
                return 'unbounded'

            if np.isfinite(flip) and flip <= t:
                step = flip
                self.z[q] += direction * step
                self.status[q] = AT_UPPER if direction > 0 else AT_LOWER
            else:
                ties = np.flatnonzero(ratios <= t + 1e-12)
                if bland:
                    p = int(ties[np.argmin(self.basis[ties])])
                else:
                    p = int(ties[np.argmax(np.abs(w[ties]))])
                step = t
                leaving = int(self.basis[p])
                self.z[q] += direction * step
                self.z[leaving] = lb_b[p] if delta[p] > 0 else ub_b[p]
                self.status[leaving] = AT_LOWER if delta[p] > 0 else AT_UPPER
                self.status[q] = BASIC
                self.basis[p] = q
                factor.update(p, w)
            self.iterations += 1

            if step <= 1e-12:
                degenerate += 1
                if degenerate >= opts.bland_after and not bland:
                    bland = True
                    logger.info("Switching to Bland's rule after %d degenerate pivots", degenerate)
            else:
                degenerate = 0
                bland = False

    def solve(self) -> Solution:
        started = time.perf_counter()
        if self.m == 0:
            return self._solve_unconstrained(started)
        self._setup()

        if self.n_art:
            cost1 = np.zeros(self.Z.shape[1])
            cost1[self.n + self.m:] = 1.0
            logger.info("Phase 1: %d artificial variables", self.n_art)
            status = self._run_phase(cost1, phase=1)
            infeas = float(self.z[self.n + self.m:].sum())
            if status == 'iteration_limit':
                return self._result(status, started)
            if infeas > self.options.tolerance * max(1.0, float(np.abs(self.rhs * self.R).max(initial=0.0))):
                logger.info("Phase 1 ended with infeasibility %.3g", infeas)
                return self._result('infeasible', started)
            self.z_ub[self.n + self.m:] = 0.0
            self.z[self.n + self.m:] = np.minimum(self.z[self.n + self.m:], 0.0)

        cost2 = np.concatenate([self.c * self.S, np.zeros(self.m + self.n_art)])
        logger.info("Phase 2 from iteration %d", self.iterations)
        status = self._run_phase(cost2, phase=2)
        return self._result(status, started)

    def _solve_unconstrained(self, started: float) -> Solution:
        x = np.where(self.c > 0, self.lb, np.where(self.c < 0, self.ub, np.where(np.isfinite(self.lb), self.lb, 0.0)))
        x = np.where(np.isfinite(x), x, 0.0)
        unbounded = np.any((self.c > 0) & ~np.isfinite(self.lb)) or np.any((self.c < 0) & ~np.isfinite(self.ub))
        status = 'unbounded' if unbounded else 'optimal'
        return Solution(status=status, objective=float(self.c @ x), primal=x, duals=np.zeros(0),
                        wall_time=time.perf_counter() - started)

    def _result(self, status: str, started: float) -> Solution:
        x = self.z[:self.n] * self.S
        duals = np.zeros(self.m)
        if status == 'optimal' and hasattr(self, '_y'):
            duals = self._y * self.R
        solution = Solution(
            status=status,
            objective=float(self.c @ x),
            primal=x,
            duals=duals,
            iterations=self.iterations,
            wall_time=time.perf_counter() - started,
            backend='reference',
            trace=self.trace,
        )
        logger.info("Reference simplex: %s after %d iterations, objective %.6g",
                    status, self.iterations, solution.objective)
        return solution


def solve_reference(problem, options: Optional[SolverOptions] = None) -> Solution:
    """Solve a PlanningProblem with the built-in simplex"""
    solver = RevisedSimplex(problem.A, problem.c, problem.senses, problem.rhs, problem.lb, problem.ub, options)
    return solver.solve()

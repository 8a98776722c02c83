"""
The assembled linear program.

Rows are collected as coefficient triplets with a sense ('L', 'G', 'E') and
a right-hand side, plus an annotation (family, coords, week, hour) for every
row. Objective terms are recorded per cost category so a solution can be
broken down by what it pays for.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Hashable, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp

from core.exceptions import BuildError
from formulation.variables import Coords, VariableIndex

logger = logging.getLogger(__name__)

SENSES = ('L', 'G', 'E')

# Two-letter family codes used to name MPS rows
ROW_CODES: Dict[str, str] = {
    'power_balance': 'PB',
    'h2_balance': 'HB',
    'gen_capacity_limit': 'GL',
    'vre_availability': 'VA',
    'energy_budget': 'EB',
    'storage_inventory': 'SI',
    'storage_cyclic': 'SY',
    'storage_linkage': 'SL',
    'soc_ceiling': 'SX',
    'soc_floor': 'SF',
    'storage_swing_up': 'SU',
    'storage_swing_down': 'SD',
    'storage_charge_limit': 'SC',
    'storage_discharge_limit': 'SW',
    'storage_energy_limit': 'SN',
    'truck_conservation': 'TK',
    'truck_zone_balance': 'TB',
    'truck_transit': 'TR',
    'loading_limit': 'LL',
    'unloading_limit': 'UL',
    'commit_limit': 'CM',
    'commit_transition': 'CT',
    'min_stable_output': 'MS',
    'max_committed_output': 'MO',
    'ramp_up': 'RU',
    'ramp_down': 'RD',
    'line_limit': 'LN',
    'pipeline_limit': 'PL',
    'pipeline_delivery_limit': 'PY',
    'linepack_balance': 'LB',
    'linepack_limit': 'LK',
}

Term = Tuple[Union[np.ndarray, Sequence[int], int], Union[np.ndarray, Sequence[float], float]]


@dataclass(frozen=True)
class RowAnnotation:
    family: str
    coords: Coords
    week: Optional[int] = None
    hour: Optional[int] = None

    def __str__(self) -> str:
        text = self.family + '[' + ','.join(str(c) for c in self.coords) + ']'
        if self.week is not None:
            text += f'@w{self.week}'
            if self.hour is not None:
                text += f'h{self.hour}'
        return text


@dataclass
class BuildOptions:
    storage_linkage: str = 'cyclic_week'
    smr_flexible: bool = True


class PlanningProblem:
    """Sparse LP: min c.x subject to annotated rows and column bounds"""

    def __init__(self, index: VariableIndex, options: Optional[BuildOptions] = None):
        self.index = index
        self.options = options or BuildOptions()
        self._rows_i: List[np.ndarray] = []
        self._rows_j: List[np.ndarray] = []
        self._rows_v: List[np.ndarray] = []
        self._sense: List[str] = []
        self._rhs: List[float] = []
        self.annotations: List[RowAnnotation] = []
        self._cost_cols: Dict[str, List[np.ndarray]] = {}
        self._cost_vals: Dict[str, List[np.ndarray]] = {}
        # Weight of the week each hourly balance row belongs to, for dual prices
        self.row_weights: Dict[int, float] = {}
        self.meta: Dict[str, Hashable] = {}
        self._frozen: Optional[Tuple[sp.csr_matrix, np.ndarray]] = None

    # -- Row construction -------------------------------------------------

    @property
    def n_rows(self) -> int:
        return len(self._sense)

    @property
    def n_vars(self) -> int:
        return self.index.n_vars

    def add_row(self, cols: Sequence[int], coefs: Sequence[float], sense: str, rhs: float,
                family: str, coords: Coords, week: Optional[int] = None, hour: Optional[int] = None) -> int:
        """Append one row and return its number"""
        if sense not in SENSES:
            raise BuildError(f"row sense must be one of {SENSES}, got {sense!r}")
        row = self.n_rows
        cols = np.asarray(cols, dtype=np.int64).ravel()
        coefs = np.broadcast_to(np.asarray(coefs, dtype=float), cols.shape).ravel()
        self._rows_i.append(np.full(cols.size, row, dtype=np.int64))
        self._rows_j.append(cols)
        self._rows_v.append(coefs.copy())
        self._sense.append(sense)
        self._rhs.append(float(rhs))
        self.annotations.append(RowAnnotation(family, tuple(coords), week, hour))
        self._frozen = None
        return row

    def add_rows(self, terms: Sequence[Term], sense: str, rhs, family: str, coords: Coords,
                 week: Optional[int] = None, n: Optional[int] = None) -> np.ndarray:
        """
        Append ``n`` rows at once, one per hour

        Args:
            terms: (columns, coefficients) pairs; columns of length n (one
                   column per row) or a scalar column shared by every row
            sense: 'L', 'G' or 'E'
            rhs: Scalar or length-n right-hand side
            family: Constraint family name
            coords: Coordinates recorded in every row annotation
            week: Week recorded in the annotations; hours are 0..n-1

        Returns:
            Row numbers of the appended rows
        """
        if sense not in SENSES:
            raise BuildError(f"row sense must be one of {SENSES}, got {sense!r}")
        if n is None:
            n = max((np.size(c) for c, _ in terms), default=0)
            rhs_size = np.size(rhs)
            n = max(n, rhs_size if rhs_size > 1 else 0) or 1
        first = self.n_rows
        rows = np.arange(first, first + n, dtype=np.int64)
        for cols, coefs in terms:
            cols = np.asarray(cols, dtype=np.int64)
            if cols.ndim == 0:
                cols = np.full(n, int(cols), dtype=np.int64)
            if cols.size != n:
                raise BuildError(f"{family}{tuple(coords)}: term with {cols.size} columns for {n} rows")
            vals = np.broadcast_to(np.asarray(coefs, dtype=float), (n,))
            self._rows_i.append(rows)
            self._rows_j.append(cols.ravel())
            self._rows_v.append(vals.copy())
        rhs_arr = np.broadcast_to(np.asarray(rhs, dtype=float), (n,))
        self._sense.extend([sense] * n)
        self._rhs.extend(float(v) for v in rhs_arr)
        coords = tuple(coords)
        self.annotations.extend(RowAnnotation(family, coords, week, h if week is not None else None)
                                for h in range(n))
        self._frozen = None
        return rows

    def set_row_weight(self, rows: np.ndarray, weight: float):
        for r in np.asarray(rows).ravel():
            self.row_weights[int(r)] = float(weight)

    # -- Objective ---------------------------------------------------------

    def add_cost(self, cols, coefs, category: str):
        cols = np.asarray(cols, dtype=np.int64).ravel()
        vals = np.broadcast_to(np.asarray(coefs, dtype=float), cols.shape).ravel()
        self._cost_cols.setdefault(category, []).append(cols)
        self._cost_vals.setdefault(category, []).append(vals.copy())
        self._frozen = None

    @property
    def cost_categories(self) -> List[str]:
        return sorted(self._cost_cols)

    def category_vector(self, category: str) -> np.ndarray:
        out = np.zeros(self.n_vars)
        for cols, vals in zip(self._cost_cols.get(category, []), self._cost_vals.get(category, [])):
            np.add.at(out, cols, vals)
        return out

    @property
    def c(self) -> np.ndarray:
        out = np.zeros(self.n_vars)
        for category in self._cost_cols:
            for cols, vals in zip(self._cost_cols[category], self._cost_vals[category]):
                np.add.at(out, cols, vals)
        return out

    def cost_breakdown(self, x: np.ndarray) -> Dict[str, float]:
        return {cat: float(self.category_vector(cat) @ x) for cat in self.cost_categories}

    def objective_value(self, x: np.ndarray) -> float:
        return float(self.c @ x)

    # -- Matrix views -----------------------------------------------------

    @property
    def A(self) -> sp.csr_matrix:
        if self._frozen is None:
            if self._rows_i:
                i = np.concatenate(self._rows_i)
                j = np.concatenate(self._rows_j)
                v = np.concatenate(self._rows_v)
            else:
                i = j = np.zeros(0, dtype=np.int64)
                v = np.zeros(0)
            A = sp.coo_matrix((v, (i, j)), shape=(self.n_rows, self.n_vars)).tocsr()
            A.sum_duplicates()
            A.eliminate_zeros()
            self._frozen = (A, self.c)
        return self._frozen[0]

    @property
    def rhs(self) -> np.ndarray:
        return np.asarray(self._rhs, dtype=float)

    @property
    def senses(self) -> np.ndarray:
        return np.asarray(self._sense, dtype='<U1')

    @property
    def lb(self) -> np.ndarray:
        return self.index.lower

    @property
    def ub(self) -> np.ndarray:
        return self.index.upper

    @property
    def nnz(self) -> int:
        return int(self.A.nnz)

    def rows_of(self, family: str) -> np.ndarray:
        return np.array([r for r, a in enumerate(self.annotations) if a.family == family], dtype=np.int64)

    def row_lookup(self, family: str, coords: Coords, week: Optional[int] = None,
                   hour: Optional[int] = None) -> Optional[int]:
        target = RowAnnotation(family, tuple(coords), week, hour)
        for r, a in enumerate(self.annotations):
            if a == target:
                return r
        return None

    def row_code(self, row: int) -> str:
        return ROW_CODES.get(self.annotations[row].family, 'RW')

    def check(self):
        """
        Fail loudly on malformed problems

        Raises:
            BuildError: for out-of-range column references, non-finite
                coefficients, NaN bounds or crossed bounds
        """
        for j in self._rows_j:
            if j.size and (j.min() < 0 or j.max() >= self.n_vars):
                raise BuildError("constraint row references a column outside the index space")
        for cols in self._cost_cols.values():
            for j in cols:
                if j.size and (j.min() < 0 or j.max() >= self.n_vars):
                    raise BuildError("objective term references a column outside the index space")
        A = self.A
        if not np.all(np.isfinite(A.data)):
            raise BuildError("constraint matrix contains non-finite coefficients")
        if not np.all(np.isfinite(self.rhs)):
            bad = int(np.flatnonzero(~np.isfinite(self.rhs))[0])
            raise BuildError(f"non-finite right-hand side in row {self.annotations[bad]}")
        if not np.all(np.isfinite(self.c)):
            raise BuildError("objective contains non-finite coefficients")
        lb, ub = self.lb, self.ub
        if np.any(np.isnan(lb)) or np.any(np.isnan(ub)):
            raise BuildError("column bounds contain NaN")
        crossed = np.flatnonzero(lb > ub)
        if crossed.size:
            raise BuildError(f"column {self.index.annotation(int(crossed[0]))} has lower bound above upper bound")
        if len(self.annotations) != self.n_rows:
            raise BuildError("row annotations do not cover every row")
        logger.debug("Problem check passed: %d rows, %d columns, %d nonzeros", self.n_rows, self.n_vars, A.nnz)

    def family_counts(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        for a in self.annotations:
            out[a.family] = out.get(a.family, 0) + 1
        return out

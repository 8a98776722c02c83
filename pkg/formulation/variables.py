"""
Decision-variable index space.

Hourly variables are allocated in (week, hour) blocks so builders can address
a whole week with numpy indexing. Investment variables are scalar columns.
Every (kind, coords, week, hour) tuple maps to exactly one column.
"""
import bisect
import logging
import math
from enum import Enum
from typing import Dict, Hashable, Iterator, List, Optional, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

Coords = Tuple[Hashable, ...]


class VarKind(str, Enum):
    GEN_CAPACITY = 'gen_capacity'
    VRE_BIN_CAPACITY = 'vre_bin_capacity'
    STORAGE_POWER = 'storage_power'
    STORAGE_ENERGY = 'storage_energy'
    GEN_OUTPUT = 'gen_output'
    COMMIT_LEVEL = 'commit_level'
    STARTUP = 'startup'
    SHUTDOWN = 'shutdown'
    CHARGE = 'charge'
    DISCHARGE = 'discharge'
    INVENTORY = 'inventory'
    TRUCK_COUNT = 'truck_count'
    TRUCKS_AT_ZONE = 'trucks_at_zone'
    TRUCKS_IN_TRANSIT = 'trucks_in_transit'
    TRUCK_LOAD = 'truck_load'
    TRUCK_UNLOAD = 'truck_unload'
    TRUCK_DEPARTURE = 'truck_departure'
    LOADING_CAPACITY = 'loading_capacity'
    PIPELINE_UNITS = 'pipeline_units'
    PIPELINE_FLOW = 'pipeline_flow'
    PIPELINE_DELIVERY = 'pipeline_delivery'
    LINEPACK = 'linepack'
    LINE_CAPACITY_ADD = 'line_capacity_add'
    LINE_FLOW = 'line_flow'
    NSE_POWER = 'nse_power'
    NSE_H2 = 'nse_h2'
    SOC_START = 'soc_start'
    SWING_UP = 'swing_up'
    SWING_DOWN = 'swing_down'


# Two-letter family codes used to name MPS columns
VAR_CODES: Dict[VarKind, str] = {
    VarKind.GEN_CAPACITY: 'GC',
    VarKind.VRE_BIN_CAPACITY: 'VB',
    VarKind.STORAGE_POWER: 'SP',
    VarKind.STORAGE_ENERGY: 'SE',
    VarKind.GEN_OUTPUT: 'GO',
    VarKind.COMMIT_LEVEL: 'CL',
    VarKind.STARTUP: 'SU',
    VarKind.SHUTDOWN: 'SD',
    VarKind.CHARGE: 'CH',
    VarKind.DISCHARGE: 'DC',
    VarKind.INVENTORY: 'IV',
    VarKind.TRUCK_COUNT: 'TC',
    VarKind.TRUCKS_AT_ZONE: 'TZ',
    VarKind.TRUCKS_IN_TRANSIT: 'TT',
    VarKind.TRUCK_LOAD: 'TL',
    VarKind.TRUCK_UNLOAD: 'TU',
    VarKind.TRUCK_DEPARTURE: 'TD',
    VarKind.LOADING_CAPACITY: 'LC',
    VarKind.PIPELINE_UNITS: 'PU',
    VarKind.PIPELINE_FLOW: 'PF',
    VarKind.PIPELINE_DELIVERY: 'PD',
    VarKind.LINEPACK: 'LP',
    VarKind.LINE_CAPACITY_ADD: 'LA',
    VarKind.LINE_FLOW: 'LF',
    VarKind.NSE_POWER: 'NP',
    VarKind.NSE_H2: 'NH',
    VarKind.SOC_START: 'SS',
    VarKind.SWING_UP: 'SW',
    VarKind.SWING_DOWN: 'SN',
}

Bound = Union[float, np.ndarray]


class VariableIndex:
    """Bijective map from (kind, coords, week, hour) to column numbers"""

    def __init__(self):
        self._scalars: Dict[Tuple[VarKind, Coords], int] = {}
        self._blocks: Dict[Tuple[VarKind, Coords], np.ndarray] = {}
        self._lb: List[np.ndarray] = []
        self._ub: List[np.ndarray] = []
        # (start column, kind, coords, shape) per allocation, in column order
        self._allocations: List[Tuple[int, VarKind, Coords, Optional[Tuple[int, int]]]] = []
        self._starts: List[int] = []
        self.n_vars = 0

    def add(self, kind: VarKind, coords: Coords, lb: float = 0.0, ub: float = math.inf) -> int:
        """Allocate one investment-type column"""
        key = (kind, tuple(coords))
        if key in self._scalars or key in self._blocks:
            raise KeyError(f"column {kind.value}{key[1]} allocated twice")
        col = self.n_vars
        self._scalars[key] = col
        self._lb.append(np.array([lb], dtype=float))
        self._ub.append(np.array([ub], dtype=float))
        self._allocations.append((col, kind, key[1], None))
        self._starts.append(col)
        self.n_vars += 1
        return col

    def add_block(self, kind: VarKind, coords: Coords, n_weeks: int, n_hours: int,
                  lb: Bound = 0.0, ub: Bound = math.inf) -> np.ndarray:
        """Allocate an (n_weeks, n_hours) block of hourly columns"""
        key = (kind, tuple(coords))
        if key in self._scalars or key in self._blocks:
            raise KeyError(f"block {kind.value}{key[1]} allocated twice")
        size = n_weeks * n_hours
        cols = np.arange(self.n_vars, self.n_vars + size).reshape(n_weeks, n_hours)
        self._blocks[key] = cols
        self._lb.append(np.broadcast_to(np.asarray(lb, dtype=float), (n_weeks, n_hours)).ravel().copy())
        self._ub.append(np.broadcast_to(np.asarray(ub, dtype=float), (n_weeks, n_hours)).ravel().copy())
        self._allocations.append((self.n_vars, kind, key[1], (n_weeks, n_hours)))
        self._starts.append(self.n_vars)
        self.n_vars += size
        return cols

    def get(self, kind: VarKind, coords: Coords, week: Optional[int] = None,
            hour: Optional[int] = None) -> Optional[int]:
        """Column number, or None when the variable is not present"""
        key = (kind, tuple(coords))
        if week is None and hour is None:
            return self._scalars.get(key)
        block = self._blocks.get(key)
        if block is None or week is None or hour is None:
            return None
        if not (0 <= week < block.shape[0] and 0 <= hour < block.shape[1]):
            return None
        return int(block[week, hour])

    def scalar(self, kind: VarKind, coords: Coords) -> Optional[int]:
        return self._scalars.get((kind, tuple(coords)))

    def block(self, kind: VarKind, coords: Coords) -> Optional[np.ndarray]:
        return self._blocks.get((kind, tuple(coords)))

    def has(self, kind: VarKind, coords: Coords) -> bool:
        key = (kind, tuple(coords))
        return key in self._scalars or key in self._blocks

    def items(self, kind: VarKind) -> Iterator[Tuple[Coords, Union[int, np.ndarray]]]:
        for _, k, coords, shape in self._allocations:
            if k is kind:
                yield coords, (self._scalars[(k, coords)] if shape is None else self._blocks[(k, coords)])

    @property
    def lower(self) -> np.ndarray:
        return np.concatenate(self._lb) if self._lb else np.zeros(0)

    @property
    def upper(self) -> np.ndarray:
        return np.concatenate(self._ub) if self._ub else np.zeros(0)

    def describe(self, col: int) -> Tuple[VarKind, Coords, Optional[int], Optional[int]]:
        """Inverse lookup: column -> (kind, coords, week, hour)"""
        if not 0 <= col < self.n_vars:
            raise IndexError(col)
        pos = bisect.bisect_right(self._starts, col) - 1
        start, kind, coords, shape = self._allocations[pos]
        if shape is None:
            return kind, coords, None, None
        offset = col - start
        return kind, coords, offset // shape[1], offset % shape[1]

    def annotation(self, col: int) -> str:
        kind, coords, week, hour = self.describe(col)
        text = kind.value + '[' + ','.join(str(c) for c in coords) + ']'
        if week is not None:
            text += f'@w{week}h{hour}'
        return text

    def code(self, col: int) -> str:
        return VAR_CODES[self.describe(col)[0]]

    def summary(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        for _, kind, _, shape in self._allocations:
            size = 1 if shape is None else shape[0] * shape[1]
            out[kind.value] = out.get(kind.value, 0) + size
        return out

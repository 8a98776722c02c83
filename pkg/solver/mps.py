"""
MPS export and import.

Row and column names are a two-letter family code followed by the row or
column number in six base-36 digits (``PB00001Z``), so every name fits the
eight-character fixed-format field and maps back to its index without a
lookup table. A ``.names.csv`` sidecar still records the full annotation of
every name for human readers.

Numbers are written in their shortest exact form, so the round trip is
bit-exact. A value that needs more than twelve characters runs past its fixed
field; readers that split on whitespace, HiGHS and ``read_mps`` included, take
it as is.
"""
import logging
import math
import os
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
import scipy.sparse as sp

from core.config import Config
from core.exceptions import DataError
from core.exporters import read_csv, write_csv
from solver.solution import Solution

logger = logging.getLogger(__name__)

OBJECTIVE_ROW = 'COST'
_DIGITS = '0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ'
_WIDTH = 6


def base36(value: int, width: int = _WIDTH) -> str:
    if value < 0 or value >= 36 ** width:
        raise ValueError(f"{value} does not fit in {width} base-36 digits")
    out = []
    for _ in range(width):
        value, r = divmod(value, 36)
        out.append(_DIGITS[r])
    return ''.join(reversed(out))


def parse_name(name: str) -> Tuple[str, int]:
    """Split an MPS name into (family code, index)"""
    if len(name) != 2 + _WIDTH:
        raise ValueError(f"not an engine MPS name: {name!r}")
    return name[:2], int(name[2:], 36)


def row_name(problem, row: int) -> str:
    return problem.row_code(row) + base36(row)


def column_name(problem, col: int) -> str:
    return problem.index.code(col) + base36(col)


def format_number(value: float) -> str:
    """
    Shortest text that parses back to exactly ``value``

    ``repr`` already gives the shortest round-tripping digits; the trailing
    ".0" and exponent padding are dropped so typical coefficients fit the
    twelve-character value field.
    """
    text = repr(float(value))
    mantissa, _, exponent = text.partition('e')
    if mantissa.endswith('.0'):
        mantissa = mantissa[:-2]
    return f'{mantissa}e{int(exponent)}' if exponent else mantissa


@dataclass
class MpsModel:
    name: str
    row_names: List[str]
    senses: np.ndarray
    rhs: np.ndarray
    col_names: List[str]
    c: np.ndarray
    A: sp.csr_matrix
    lb: np.ndarray
    ub: np.ndarray


def export_mps(problem, path: str, name: str = 'EH2PLAN') -> str:
    """
    Write the problem in fixed-format MPS plus a names sidecar

    Args:
        problem: Assembled PlanningProblem
        path: Target .mps file
        name: Model name for the NAME card

    Returns:
        Path of the names sidecar CSV
    """
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    rows = [row_name(problem, r) for r in range(problem.n_rows)]
    cols = [column_name(problem, j) for j in range(problem.n_vars)]
    A = problem.A.tocsc()
    c = problem.c
    rhs = problem.rhs
    lb, ub = problem.lb, problem.ub

    with open(path, 'w', encoding='utf-8', newline='\n') as fh:
        fh.write(f"NAME          {name}\n")
        fh.write("ROWS\n")
        fh.write(f" N  {OBJECTIVE_ROW}\n")
        for r, sense in enumerate(problem.senses):
            fh.write(f" {sense}  {rows[r]}\n")
        fh.write("COLUMNS\n")
        for j in range(problem.n_vars):
            # every column gets a cost entry, even zero, so it is declared
            fh.write(f"    {cols[j]:<8}  {OBJECTIVE_ROW:<8}  {format_number(c[j])}\n")
            start, end = A.indptr[j], A.indptr[j + 1]
            for r, v in zip(A.indices[start:end], A.data[start:end]):
                fh.write(f"    {cols[j]:<8}  {rows[r]:<8}  {format_number(v)}\n")
        fh.write("RHS\n")
        for r in np.flatnonzero(rhs != 0.0):
            fh.write(f"    RHS       {rows[r]:<8}  {format_number(rhs[r])}\n")
        fh.write("BOUNDS\n")
        for j in range(problem.n_vars):
            lo, hi = lb[j], ub[j]
            if lo == hi:
                fh.write(f" FX BND       {cols[j]:<8}  {format_number(lo)}\n")
                continue
            if math.isinf(lo) and math.isinf(hi):
                fh.write(f" FR BND       {cols[j]}\n")
                continue
            if math.isinf(lo):
                fh.write(f" MI BND       {cols[j]}\n")
            elif lo != 0.0:
                fh.write(f" LO BND       {cols[j]:<8}  {format_number(lo)}\n")
            if not math.isinf(hi):
                fh.write(f" UP BND       {cols[j]:<8}  {format_number(hi)}\n")
        fh.write("ENDATA\n")

    names_path = os.path.splitext(path)[0] + '.names.csv'
    names = pd.DataFrame({
        'kind': ['row'] * problem.n_rows + ['column'] * problem.n_vars,
        'name': rows + cols,
        'annotation': [str(a) for a in problem.annotations]
                      + [problem.index.annotation(j) for j in range(problem.n_vars)],
    })
    write_csv(names, names_path)
    logger.info("Exported %d rows and %d columns to %s", problem.n_rows, problem.n_vars, path)
    return names_path


def read_mps(path: str) -> MpsModel:
    """
    Parse an MPS file written by export_mps (fields split on whitespace)

    Raises:
        DataError: for unknown sections, rows or bound types
    """
    try:
        with open(path, 'r', encoding='utf-8') as fh:
            lines = fh.read().splitlines()
    except OSError as e:
        raise DataError(f"Cannot read MPS file: {e}", path)

    name = ''
    section = None
    row_names: List[str] = []
    senses: List[str] = []
    row_pos: Dict[str, int] = {}
    objective = None
    col_names: List[str] = []
    col_pos: Dict[str, int] = {}
    cost: Dict[int, float] = {}
    entries_i: List[int] = []
    entries_j: List[int] = []
    entries_v: List[float] = []
    rhs: Dict[int, float] = {}
    bounds: List[Tuple[str, int, Optional[float]]] = []

    for lineno, line in enumerate(lines, start=1):
        if not line.strip() or line.startswith('*'):
            continue
        fields = line.split()
        if not line[0].isspace():
            section = fields[0]
            if section == 'NAME':
                name = fields[1] if len(fields) > 1 else ''
            elif section == 'ENDATA':
                break
            elif section not in ('ROWS', 'COLUMNS', 'RHS', 'BOUNDS', 'RANGES'):
                raise DataError(f"Unknown MPS section {section!r}", path, lineno)
            continue
        try:
            if section == 'ROWS':
                sense, rname = fields
                if sense == 'N':
                    objective = objective or rname
                    continue
                row_pos[rname] = len(row_names)
                row_names.append(rname)
                senses.append(sense)
            elif section == 'COLUMNS':
                cname = fields[0]
                if cname not in col_pos:
                    col_pos[cname] = len(col_names)
                    col_names.append(cname)
                j = col_pos[cname]
                for rname, value in zip(fields[1::2], fields[2::2]):
                    if rname == objective:
                        cost[j] = cost.get(j, 0.0) + float(value)
                    else:
                        entries_i.append(row_pos[rname])
                        entries_j.append(j)
                        entries_v.append(float(value))
            elif section == 'RHS':
                for rname, value in zip(fields[1::2], fields[2::2]):
                    if rname != objective:
                        rhs[row_pos[rname]] = float(value)
            elif section == 'BOUNDS':
                kind, cname = fields[0], fields[2]
                value = float(fields[3]) if len(fields) > 3 else None
                bounds.append((kind, col_pos[cname], value))
            elif section == 'RANGES':
                raise DataError("RANGES are not supported", path, lineno)
        except (KeyError, ValueError, IndexError) as e:
            raise DataError(f"Malformed MPS line: {e}", path, lineno)

    n, m = len(col_names), len(row_names)
    lb, ub = np.zeros(n), np.full(n, np.inf)
    for kind, j, value in bounds:
        if kind == 'LO':
            lb[j] = value
        elif kind == 'UP':
            ub[j] = value
        elif kind == 'FX':
            lb[j] = ub[j] = value
        elif kind == 'MI':
            lb[j] = -np.inf
        elif kind == 'FR':
            lb[j], ub[j] = -np.inf, np.inf
        elif kind == 'PL':
            ub[j] = np.inf
        else:
            raise DataError(f"Unsupported bound type {kind!r}", path)

    A = sp.coo_matrix((entries_v, (entries_i, entries_j)), shape=(m, n)).tocsr()
    c = np.zeros(n)
    for j, v in cost.items():
        c[j] = v
    b = np.zeros(m)
    for i, v in rhs.items():
        b[i] = v
    return MpsModel(name, row_names, np.asarray(senses, dtype='<U1'), b, col_names, c, A, lb, ub)


def import_solution(problem, path: str) -> Solution:
    """
    Load a column_name,value CSV produced by an external solver

    Every column of the problem must appear exactly once and its family code
    must match the problem's column at that index.
    """
    frame, header_line = read_csv(path, Config.SOLUTION_COLUMNS, dtype={Config.SOLUTION_COLUMNS[0]: str})
    x = np.full(problem.n_vars, np.nan)
    for pos, (name, value) in enumerate(zip(frame[Config.SOLUTION_COLUMNS[0]], frame[Config.SOLUTION_COLUMNS[1]])):
        line = header_line + pos + 1
        try:
            code, col = parse_name(str(name).strip())
        except ValueError as e:
            raise DataError(str(e), path, line)
        if col >= problem.n_vars or problem.index.code(col) != code:
            raise DataError(f"Column {name!r} does not belong to this problem", path, line)
        if not np.isnan(x[col]):
            raise DataError(f"Column {name!r} listed twice", path, line)
        try:
            x[col] = float(value)
        except (TypeError, ValueError):
            raise DataError(f"Value {value!r} is not a number", path, line)
    missing = np.flatnonzero(np.isnan(x))
    if missing.size:
        raise DataError(f"{missing.size} columns missing, first {column_name(problem, int(missing[0]))}", path)
    logger.info("Imported %d column values from %s", problem.n_vars, path)
    return Solution(status='optimal', objective=problem.objective_value(x), primal=x, backend='external')

"""
Readers and writers for the engine's CSV and JSON artifacts.

Every CSV written here starts with a ``# schema_version: N`` line. Readers
accept input files without that line (hand-made series) but reject any
version other than the current one.
"""
import io
import json
import os
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from core.config import Config
from core.exceptions import DataError


def schema_line() -> str:
    return f"{Config.SCHEMA_HEADER_PREFIX} {Config.SCHEMA_VERSION}\n"


def write_csv(df: pd.DataFrame, path: str, float_format: Optional[str] = None):
    """Write a frame behind the schema-version line, no index"""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        fh.write(schema_line())
        df.to_csv(fh, index=False, float_format=float_format, lineterminator='\n')


def _split_header(path: str) -> Tuple[str, int]:
    """Return the CSV body and how many lines precede its header row"""
    try:
        with open(path, 'r', encoding=Config.DEFAULT_CSV_ENCODING) as fh:
            text = fh.read()
    except FileNotFoundError:
        raise DataError("File not found", path)
    except (OSError, UnicodeDecodeError) as e:
        raise DataError(f"Cannot read file: {e}", path)

    first, _, rest = text.partition('\n')
    if not first.startswith(Config.SCHEMA_HEADER_PREFIX):
        return text, 0
    version = first[len(Config.SCHEMA_HEADER_PREFIX):].strip()
    if version != str(Config.SCHEMA_VERSION):
        raise DataError(f"Unsupported schema version {version!r} (expected {Config.SCHEMA_VERSION})", path, 1)
    return rest, 1


def read_csv(path: str, required_columns: Optional[List[str]] = None, dtype=None) -> Tuple[pd.DataFrame, int]:
    """
    Read a CSV written by write_csv, or a plain CSV with a header row

    Args:
        path: File to read
        required_columns: Columns that must be present, in any order
        dtype: Passed to pandas

    Returns:
        (frame, line number of the header row)
    """
    body, skipped = _split_header(path)
    if not body.strip():
        raise DataError("File is empty", path)
    try:
        df = pd.read_csv(io.StringIO(body), dtype=dtype, skipinitialspace=True, float_precision='round_trip')
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataError(f"Malformed CSV: {e}", path)
    df.columns = [str(c).strip() for c in df.columns]
    if required_columns:
        missing = [c for c in required_columns if c not in df.columns]
        if missing:
            raise DataError(f"Missing columns {missing}; found {list(df.columns)}", path, skipped + 1)
    return df, skipped + 1


def read_series_csv(path: str) -> pd.DataFrame:
    """
    Read an hourly series file with header ``zone_id,hour,value``

    Any row whose fields do not parse as numbers, or whose value is not
    finite, raises DataError citing that row's line number.
    """
    raw, header_line = read_csv(path, Config.SERIES_COLUMNS, dtype=str)
    raw = raw[Config.SERIES_COLUMNS]
    parsed = raw.apply(lambda col: pd.to_numeric(col.str.strip(), errors='coerce'))
    bad = parsed.isna().any(axis=1) | ~np.isfinite(parsed['value'].fillna(0.0))
    if bad.any():
        idx = int(np.flatnonzero(bad.to_numpy())[0])
        row = raw.iloc[idx].tolist()
        raise DataError(f"Corrupt series row {row}", path, idx + header_line + 1)
    whole = (parsed['zone_id'] % 1 == 0) & (parsed['hour'] % 1 == 0)
    if not whole.all():
        idx = int(np.flatnonzero(~whole.to_numpy())[0])
        raise DataError("zone_id and hour must be integers", path, idx + header_line + 1)
    return pd.DataFrame({
        'zone_id': parsed['zone_id'].astype(int),
        'hour': parsed['hour'].astype(int),
        'value': parsed['value'].astype(float),
    })


def write_json(payload: Dict[str, Any], path: str):
    """Sorted-key JSON so identical reports are byte-identical"""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, 'w', encoding='utf-8') as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write('\n')


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        f = float(value)
        return f if np.isfinite(f) else None
    if isinstance(value, np.bool_):
        return bool(value)
    return value

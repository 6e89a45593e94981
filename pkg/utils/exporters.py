"""
Deterministic JSON and CSV writers for run results.

JSON is written with sorted keys and a fixed indent; numpy scalars and
arrays are converted to plain Python values; complex numbers become
[re, im] pairs. CSV goes through pandas with a fixed float format, so a
repeated run with the same configuration produces byte-identical files.
"""

import json
import logging
import os
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from config.settings import OUTPUT_CONFIG

logger = logging.getLogger(__name__)


def to_plain(value: Any) -> Any:
    """Recursively convert numpy and complex values to JSON-friendly types."""
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (np.floating,)):
        return float(value)
    return value


def dumps(report: Dict) -> str:
    return json.dumps(to_plain(report), indent=2, sort_keys=True) + '\n'


def write_json(report: Dict, path: str) -> str:
    """
    Write a report as JSON.

    Args:
        report: Result dict
        path: Output file; parent directories are created

    Returns:
        The path written
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(dumps(report))
    logger.info(f"Saved JSON report to {path}")
    return path


def rows_frame(rows: List[Dict], columns: Optional[List[str]] = None) -> pd.DataFrame:
    """Flat DataFrame from a list of row dicts; nested values are JSON-encoded."""
    flat = []
    for row in rows:
        flat.append({k: (json.dumps(to_plain(v), sort_keys=True) if isinstance(v, (dict, list, tuple)) else to_plain(v))
                     for k, v in row.items()})
    frame = pd.DataFrame(flat)
    if columns is not None:
        frame = frame[columns]
    return frame


def write_csv(frame: pd.DataFrame, path: str) -> str:
    """Write a DataFrame as CSV with the configured float format."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    frame.to_csv(path, index=False, float_format=OUTPUT_CONFIG['float_format'], lineterminator='\n')
    logger.info(f"Saved {len(frame)} rows to {path}")
    return path

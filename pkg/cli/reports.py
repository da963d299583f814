"""
Report serialization: CSV tables and JSON documents
"""
import io
import json
import math
import logging
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any, Dict, List, Optional, TextIO

import numpy as np
import pandas as pd

from config import OUTPUT_CONFIG, VERSION

logger = logging.getLogger(__name__)


def serialize(value: Any) -> Any:
    """Walk nested dicts and lists into JSON-ready primitives, calling to_dict() where present"""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, (str, type(None))):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): serialize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [serialize(v) for v in value]
    if isinstance(value, pd.DataFrame):
        return serialize(value.to_dict(orient='records'))
    if isinstance(value, np.ndarray):
        return serialize(value.tolist())
    if hasattr(value, 'to_dict'):
        return serialize(value.to_dict())
    return str(value)


def format_csv(table: pd.DataFrame) -> str:
    """Header row, '.' decimal separator, 17 significant digits"""
    buffer = io.StringIO()
    table.to_csv(buffer, index=False, float_format=OUTPUT_CONFIG['csv_float_format'], lineterminator='\n')
    return buffer.getvalue()


def build_report(config: Dict[str, Any], results: Any, violations: List[Dict[str, Any]],
                 timestamp: Optional[str] = None) -> Dict[str, Any]:
    """{config, results, violations, metadata}; only metadata varies between identical runs"""
    timestamp = timestamp or datetime.now(timezone.utc).isoformat()
    return {
        'config': serialize(config),
        'results': serialize(results),
        'violations': serialize(violations),
        'metadata': {'version': VERSION, 'timestamp': timestamp},
    }


def format_json(report: Dict[str, Any]) -> str:
    return json.dumps(report, indent=OUTPUT_CONFIG['json_indent'], sort_keys=False) + "\n"


def write_text(text: str, stream: TextIO) -> None:
    stream.write(text)
    stream.flush()

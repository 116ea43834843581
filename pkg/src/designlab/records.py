"""Run records: deterministic JSON with 17-digit floats, and CSV sweep tables."""
from datetime import datetime, timezone
import csv
import hashlib
import io
import json
import math

import numpy as np

from . import __version__

TOOL = "designlab"


def to_plain(obj):
    """Recursively convert numpy and complex values into JSON primitives.

    Complex numbers become ``[re, im]``; arrays become nested lists.
    """
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    return obj


def format_float(x):
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return "%.17g" % x


def dumps(obj, indent=2, _level=0):
    """JSON text with sorted keys and every float written with 17 digits."""
    obj = to_plain(obj) if _level == 0 else obj
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dumps(obj[k], indent, _level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, int):
        return str(obj)
    return json.dumps(str(obj))


def record_hash(record):
    """sha256 of the record without its ``timestamp`` and ``hash`` fields."""
    body = {k: v for k, v in record.items() if k not in ("timestamp", "hash")}
    return hashlib.sha256(dumps(body).encode()).hexdigest()


def make_record(command, config, result, timestamp=None):
    record = {
        "tool": TOOL,
        "version": __version__,
        "command": command,
        "config": to_plain(config),
        "result": to_plain(result),
    }
    record["hash"] = record_hash(record)
    if timestamp is None:
        timestamp = datetime.now(timezone.utc).isoformat()
    record["timestamp"] = timestamp
    return record


def to_csv(rows):
    """CSV text for a list of flat dicts (columns in first-row order)."""
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({
            k: format_float(v) if isinstance(v, float) else v
            for k, v in to_plain(row).items()
        })
    return buf.getvalue()

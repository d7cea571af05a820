import csv
import json
import logging
import math
from fractions import Fraction

import numpy as np

from .polynomial import Polynomial, format_polynomial, format_rational

LOGGER = logging.getLogger(__name__)


def chunks(lst, n):
    """Yield successive n-sized chunks from lst."""
    for i in range(0, len(lst), n):
        yield lst[i : i + n]


def format_number(value):
    """17 significant digits for floats, num/den for rationals."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, Fraction)):
        return format_rational(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value) or math.isinf(value):
            return str(value)
        return format(value, ".17g")
    if isinstance(value, Polynomial):
        return format_polynomial(value)
    return str(value)


def to_jsonable(value):
    """Plain JSON types; rationals and polynomials become their text forms."""
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else format_rational(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    return format_number(value)


def save_json(data, path, indent=2):
    path.parent.mkdir(parents=True, exist_ok=True)
    LOGGER.info(f"Saving JSON to '{str(path)}'")
    with open(path, "w", newline="\n") as file:
        json.dump(to_jsonable(data), file, indent=indent, sort_keys=True)
        file.write("\n")


def load_json(path):
    LOGGER.info(f"Loading JSON from '{str(path)}'")
    with open(path) as file:
        return json.load(file)


def save_csv(header, rows, path):
    path.parent.mkdir(parents=True, exist_ok=True)
    LOGGER.info(f"Saving CSV to '{str(path)}'")
    with open(path, "w", newline="") as file:
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_number(value) for value in row])

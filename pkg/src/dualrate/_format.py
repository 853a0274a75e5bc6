"""Locale-independent numeric formatting for CSV/JSON emission."""
import math


def sig12(x: float) -> str:
    """12 significant digits, '.' decimal separator, 'inf' for infinities."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".12g")

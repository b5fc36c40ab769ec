import numpy as np


def json_default(value):
    """json.dumps hook for numpy scalars, arrays, sets and tuples"""
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, (np.ndarray, set, tuple)):
        return value.tolist() if isinstance(value, np.ndarray) else list(value)
    raise TypeError(f"Cannot serialize {type(value).__name__}")

"""Empirical quantile convention used throughout the package.

For level p on m sorted values we take the ceil(p*m)-th smallest (1-based).
Levels with p*m > m (possible for conformal levels above 1) return the
maximum.  Every quantile computed anywhere in the package goes through
this function so datasets, calibration and metrics all agree.
"""

import math

import numpy as np

QUANTILE_CONVENTION = "ceil-pm-th-smallest"


def empirical_quantile(values, p: float) -> float:
    """The p-th empirical quantile of a nonempty collection of reals."""
    v = np.sort(np.asarray(values, dtype=float).ravel())
    m = v.shape[0]
    if m == 0:
        raise ValueError("empirical_quantile of empty collection")
    if p * m > m:
        return float(v[-1])
    k = max(1, math.ceil(p * m))
    return float(v[k - 1])

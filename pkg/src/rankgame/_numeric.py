import math


def sigmoid(x):
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


def logit(p, eps=1e-12):
    p = min(max(p, eps), 1.0 - eps)
    return math.log(p) - math.log1p(-p)


def bisect_increasing(f, target, lo, hi, xtol=0.0, rtol=1e-15, max_iter=400):
    """Smallest x in [lo, hi] with f(x) >= target, for nondecreasing f.

    Assumes f(lo) < target <= f(hi). Stops when the bracket stops shrinking
    in floating point or is narrower than ``xtol + rtol * |x|``.
    """
    for _ in range(max_iter):
        mid = lo + 0.5 * (hi - lo)
        if mid <= lo or mid >= hi:
            break
        if f(mid) >= target:
            hi = mid
        else:
            lo = mid
        if hi - lo <= xtol + rtol * abs(hi):
            break
    return hi


def sig12(x):
    """Round to 12 significant digits (for deterministic reports)."""
    if x is None or isinstance(x, (bool, int)) or not math.isfinite(x):
        return x
    return float(f"{x:.12g}")

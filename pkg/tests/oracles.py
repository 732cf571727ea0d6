"""Independent reference computations used to freeze expected values.

Nothing here calls into the package: closed forms, scalar arithmetic and
brute-force enumeration only.
"""

import itertools
import math

import numpy as np


def eig2x2(a: float, b: complex, d: float) -> tuple[float, float]:
    """Eigenvalues of [[a, b], [conj(b), d]], larger first."""
    mean = 0.5 * (a + d)
    rad = math.sqrt(0.25 * (a - d) ** 2 + abs(b) ** 2)
    return mean + rad, mean - rad


def entropy_bits(probs) -> float:
    return -sum(p * math.log2(p) for p in probs if p > 0)


def brute_top_product_mass(base, K, d) -> float:
    vals = sorted((math.prod(t) for t in itertools.product(base, repeat=K)), reverse=True)
    return math.fsum(vals[:d])


def dense_top_mass(rho, d) -> float:
    return float(np.sort(np.linalg.eigvalsh(rho))[::-1][:d].sum())

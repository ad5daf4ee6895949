"""Pure-numpy fallback for the compiled pairwise-dot kernel.

Each column-block pair is one BLAS product, so values can differ from the
compiled kernel in the last bits; the lexicographic tie rule is the same.
"""

import numpy as np


def max_abs_offdiag(cols, block=64):
    """Return ``(max_{i<j} |<c_i, c_j>|, i, j)`` over the rows of ``cols``."""
    cols = np.ascontiguousarray(cols, dtype=np.float64)
    p = cols.shape[0]
    if p < 2:
        raise ValueError("need at least two columns")
    if block < 1:
        raise ValueError("block must be positive")

    best, best_i, best_j = -1.0, -1, -1
    for bi in range(0, p, block):
        a = cols[bi:bi + block]
        for bj in range(bi, p, block):
            g = np.abs(a @ cols[bj:bj + block].T)
            if bi == bj:
                # strict upper triangle only
                g[np.tril_indices(g.shape[0], 0, g.shape[1])] = -1.0
            flat = int(np.argmax(g))
            r, c = divmod(flat, g.shape[1])
            v = float(g[r, c])
            i, j = bi + r, bj + c
            if v > best or (v == best and (i, j) < (best_i, best_j)):
                best, best_i, best_j = v, i, j
    return best, best_i, best_j

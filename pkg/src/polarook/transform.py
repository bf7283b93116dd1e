"""Binary polar transform and index utilities.

The transform is the n-th Kronecker power of the 2x2 kernel [[1,0],[1,1]]
applied to a row vector over GF(2), kept in natural (non-bit-reversed) index
order throughout the package. It is linear and self-inverse.
"""

from __future__ import annotations

import numpy as np


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def polar_transform(u: np.ndarray) -> np.ndarray:
    """Multiply a binary row vector by the polar kernel's Kronecker power.

    Runs the butterfly recursion in O(N log N): for each block size the first
    half absorbs the XOR of the second half. Natural index order; applying the
    transform twice returns the input.
    """
    u = np.asarray(u)
    N = u.shape[0]
    if not is_power_of_two(N):
        raise ValueError(f"transform length must be a power of two, got {N}")
    x = u.astype(np.uint8, copy=True) & 1
    half = N // 2
    while half >= 1:
        x = x.reshape(-1, 2 * half)
        x[:, :half] ^= x[:, half:]
        half //= 2
    return x.reshape(N)


def bitrev_permutation(N: int) -> np.ndarray:
    """Index permutation that reverses the n-bit binary representation."""
    if not is_power_of_two(N):
        raise ValueError(f"N must be a power of two, got {N}")
    n = N.bit_length() - 1
    perm = np.zeros(N, dtype=np.int64)
    for b in range(n):
        perm |= ((np.arange(N) >> b) & 1) << (n - 1 - b)
    return perm

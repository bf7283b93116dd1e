"""Numpy reference implementation of the SC kernel contract.

Bit-exact semantics are defined here; the Cython backend mirrors this file
operation for operation (same f/g formulas, same penalty, same tie-breaks)
so the two may be swapped freely. Internally the recursion runs on a
bit-reversed copy of the input LLRs so every butterfly stage pairs adjacent
elements; decisions come out in natural input order.
"""

from __future__ import annotations

import math

import numpy as np

FORCE, DECIDE, RANDOM, GENIE = 0, 1, 2, 3
BRANCH = 1

_LN2 = math.log(2.0)

# decision LLRs this close to zero are treated as exact ties (resolved to
# bit 0 by the sign rule and by the metric tie-break alike); the shaped
# recursion produces structural zeros that pick up ulp-level dirt
DECISION_TIE_EPS = 1e-12

_bitrev_cache: dict[int, np.ndarray] = {}


def _bitrev(N: int) -> np.ndarray:
    perm = _bitrev_cache.get(N)
    if perm is None:
        n = N.bit_length() - 1
        perm = np.zeros(N, dtype=np.int64)
        for b in range(n):
            perm |= ((np.arange(N) >> b) & 1) << (n - 1 - b)
        _bitrev_cache[N] = perm
    return perm


def _f_rows(a: np.ndarray, b: np.ndarray, exact: bool) -> np.ndarray:
    # Exact check-node combine log((1+e^{a+b})/(e^a+e^b)), in the
    # overflow-free split sgn*min + log1p(e^-|a+b|) - log1p(e^-|a-b|).
    sgn = np.where((a < 0.0) != (b < 0.0), -1.0, 1.0)
    m = sgn * np.minimum(np.abs(a), np.abs(b))
    if not exact:
        return m
    return m + np.log1p(np.exp(-np.abs(a + b))) - np.log1p(np.exp(-np.abs(a - b)))


def _sigmoid(x: float) -> float:
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _softplus(x: float) -> float:
    if x > 0.0:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))


def _flush_tie(llr):
    return np.where(np.abs(llr) < DECISION_TIE_EPS, 0.0, llr)


def _penalty_rows(bit: np.ndarray | int, llr: np.ndarray, exact: bool) -> np.ndarray:
    # Exact: log(1 + exp(-(1-2u)L)), the negative log of P(u | prefix).
    # Hard: |L| when the choice contradicts the LLR sign, else 0.
    t = (1.0 - 2.0 * np.asarray(bit, dtype=np.float64)) * _flush_tie(llr)
    if exact:
        return np.where(t > 0.0, np.log1p(np.exp(-np.abs(t))), -t + np.log1p(np.exp(-np.abs(t))))
    return np.where(t < 0.0, -t, 0.0)


def _chain(n: int, phase: int) -> list[tuple[int, int]]:
    # Levels to recompute for this phase, shallowest ancestor first.
    chain = []
    lam, ph = n, phase
    while True:
        chain.append((lam, ph))
        if (ph & 1) or lam == 1:
            break
        lam -= 1
        ph >>= 1
    chain.reverse()
    return chain


def _calc_rows(llr: list[np.ndarray], bits: list[np.ndarray], n: int, phase: int, A: int, exact_f: bool) -> None:
    for lam, ph in _chain(n, phase):
        a = llr[lam - 1][:A, 0::2]
        b = llr[lam - 1][:A, 1::2]
        if ph & 1:
            s = bits[lam][:A, 0].astype(np.float64)
            llr[lam][:A] = b + (1.0 - 2.0 * s) * a
        else:
            llr[lam][:A] = _f_rows(a, b, exact_f)


def _commit_rows(bits: list[np.ndarray], n: int, phase: int, A: int) -> None:
    lam, ph = n, phase
    while (ph & 1) and lam > 0:
        psi = ph >> 1
        c0 = bits[lam][:A, 0]
        c1 = bits[lam][:A, 1]
        parent = bits[lam - 1][:A, psi & 1]
        parent[:, 0::2] = c0 ^ c1
        parent[:, 1::2] = c1
        lam -= 1
        ph = psi


def _alloc(n: int, rows: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
    llr = [np.zeros((rows, 1 << (n - d)), dtype=np.float64) for d in range(n + 1)]
    bits = [np.zeros((rows, 2, 1 << (n - d)), dtype=np.uint8) for d in range(n + 1)]
    return llr, bits


def sc_pass(llr0, actions, forced, uniforms=None, exact_f=True, out_llr=None, out_surprisal=None, out_error=None):
    llr0 = np.ascontiguousarray(llr0, dtype=np.float64)
    N = llr0.shape[0]
    n = N.bit_length() - 1
    if N < 2 or (1 << n) != N:
        raise ValueError(f"kernel length must be a power of two >= 2, got {N}")
    actions = np.asarray(actions, dtype=np.uint8)
    forced = np.asarray(forced, dtype=np.uint8)
    llr, bits = _alloc(n, 1)
    llr[0][0] = llr0[_bitrev(N)]
    u = np.zeros(N, dtype=np.uint8)
    for i in range(N):
        _calc_rows(llr, bits, n, i, 1, exact_f)
        L = float(llr[n][0, 0])
        Ld = 0.0 if abs(L) < DECISION_TIE_EPS else L
        act = actions[i]
        if act == FORCE:
            bit = int(forced[i])
        elif act == DECIDE:
            bit = 0 if Ld >= 0.0 else 1
        elif act == RANDOM:
            bit = 0 if uniforms[i] < _sigmoid(L) else 1
        elif act == GENIE:
            dec = 0 if Ld >= 0.0 else 1
            bit = int(forced[i])
            if out_error is not None and dec != bit:
                out_error[i] = 1
        else:
            raise ValueError(f"unknown action {act} at position {i}")
        if out_llr is not None:
            out_llr[i] = L
        if out_surprisal is not None:
            out_surprisal[i] = _softplus(-(1.0 - 2.0 * bit) * L) / _LN2
        u[i] = bit
        bits[n][0, i & 1, 0] = bit
        if i & 1:
            _commit_rows(bits, n, i, 1)
    return u


def mimic_pass(llr_channel, prior_llr_value, actions, forced, uniforms, exact_f=True):
    llr_channel = np.ascontiguousarray(llr_channel, dtype=np.float64)
    N = llr_channel.shape[0]
    n = N.bit_length() - 1
    if N < 2 or (1 << n) != N:
        raise ValueError(f"kernel length must be a power of two >= 2, got {N}")
    actions = np.asarray(actions, dtype=np.uint8)
    forced = np.asarray(forced, dtype=np.uint8)
    llr_c, bits_c = _alloc(n, 1)
    llr_p, bits_p = _alloc(n, 1)
    llr_c[0][0] = llr_channel[_bitrev(N)]
    llr_p[0][0] = float(prior_llr_value)
    u = np.zeros(N, dtype=np.uint8)
    for i in range(N):
        _calc_rows(llr_c, bits_c, n, i, 1, exact_f)
        _calc_rows(llr_p, bits_p, n, i, 1, exact_f)
        act = actions[i]
        if act == FORCE:
            bit = int(forced[i])
        elif act == DECIDE:
            Lc = float(llr_c[n][0, 0])
            bit = 0 if (0.0 if abs(Lc) < DECISION_TIE_EPS else Lc) >= 0.0 else 1
        elif act == RANDOM:
            bit = 0 if uniforms[i] < _sigmoid(float(llr_p[n][0, 0])) else 1
        else:
            raise ValueError(f"unsupported action {act} in mimic_pass")
        u[i] = bit
        bits_c[n][0, i & 1, 0] = bit
        bits_p[n][0, i & 1, 0] = bit
        if i & 1:
            _commit_rows(bits_c, n, i, 1)
            _commit_rows(bits_p, n, i, 1)
    return u


def scl_pass(llr0, actions, forced, list_size, exact_f=True, exact_metric=True):
    llr0 = np.ascontiguousarray(llr0, dtype=np.float64)
    N = llr0.shape[0]
    n = N.bit_length() - 1
    if N < 2 or (1 << n) != N:
        raise ValueError(f"kernel length must be a power of two >= 2, got {N}")
    if list_size < 1:
        raise ValueError("list_size must be >= 1")
    actions = np.asarray(actions, dtype=np.uint8)
    forced = np.asarray(forced, dtype=np.uint8)
    llr, bits = _alloc(n, list_size)
    llr[0][0] = llr0[_bitrev(N)]
    u = np.zeros((list_size, N), dtype=np.uint8)
    pm = np.zeros(list_size, dtype=np.float64)
    A = 1
    for i in range(N):
        _calc_rows(llr, bits, n, i, A, exact_f)
        dec_llr = llr[n][:A, 0].copy()
        if actions[i] == BRANCH:
            cand = np.empty(2 * A, dtype=np.float64)
            cand[0::2] = pm[:A] + _penalty_rows(0, dec_llr, exact_metric)
            cand[1::2] = pm[:A] + _penalty_rows(1, dec_llr, exact_metric)
            # Keep the list_size lowest metrics; candidate index 2*rank+bit
            # makes the stable sort break ties by path rank, then bit.
            keep = np.argsort(cand, kind="stable")[: min(list_size, 2 * A)]
            src = keep >> 1
            chosen = (keep & 1).astype(np.uint8)
            A = keep.shape[0]
            for d in range(n + 1):
                llr[d][:A] = llr[d][src]
                bits[d][:A] = bits[d][src]
            u[:A] = u[src]
            pm[:A] = cand[keep]
            u[:A, i] = chosen
            bits[n][np.arange(A), i & 1, 0] = chosen
        else:
            b = int(forced[i])
            pm[:A] += _penalty_rows(b, dec_llr, exact_metric)
            u[:A, i] = b
            bits[n][:A, i & 1, 0] = b
        if i & 1:
            _commit_rows(bits, n, i, A)
    order = np.argsort(pm[:A], kind="stable")
    return u[order].copy(), pm[order].copy()

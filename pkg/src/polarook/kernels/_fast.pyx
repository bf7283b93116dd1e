# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False, language_level=3
"""Compiled twin of the numpy reference kernels.

Same contract, same arithmetic, same tie-breaks; see _reference.py for the
semantics. The list engine uses level-granular copy-on-write array banks so
one frame costs O(list_size * N log N) instead of quadratic path copying.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs, log1p
from libc.stdlib cimport free, malloc, qsort
from libc.string cimport memcpy

cnp.import_array()

FORCE, DECIDE, RANDOM, GENIE = 0, 1, 2, 3
BRANCH = 1

cdef double _LN2 = 0.6931471805599453

# decision LLRs this close to zero are exact ties (resolved to bit 0 by the
# sign rule and by the metric tie-break alike); see _reference.py
cdef double DECISION_TIE_EPS = 1e-12

_bitrev_cache = {}


def _bitrev(N):
    perm = _bitrev_cache.get(N)
    if perm is None:
        n = N.bit_length() - 1
        perm = np.zeros(N, dtype=np.int64)
        for b in range(n):
            perm |= ((np.arange(N) >> b) & 1) << (n - 1 - b)
        _bitrev_cache[N] = perm
    return perm


cdef inline double _fmin(double a, double b) noexcept nogil:
    return a if a < b else b


cdef inline double _f_fun(double a, double b, bint exact) noexcept nogil:
    cdef double sgn = -1.0 if ((a < 0.0) != (b < 0.0)) else 1.0
    cdef double m = sgn * _fmin(fabs(a), fabs(b))
    if not exact:
        return m
    return m + log1p(exp(-fabs(a + b))) - log1p(exp(-fabs(a - b)))


cdef inline double _sigmoid(double x) noexcept nogil:
    cdef double e
    if x >= 0.0:
        return 1.0 / (1.0 + exp(-x))
    e = exp(x)
    return e / (1.0 + e)


cdef inline double _softplus(double x) noexcept nogil:
    if x > 0.0:
        return x + log1p(exp(-x))
    return log1p(exp(x))


cdef inline double _flush_tie(double llr) noexcept nogil:
    return 0.0 if fabs(llr) < DECISION_TIE_EPS else llr


cdef inline double _penalty(int bit, double llr, bint exact) noexcept nogil:
    cdef double t = (1.0 - 2.0 * bit) * _flush_tie(llr)
    if exact:
        return _softplus(-t)
    return -t if t < 0.0 else 0.0


# ---------------------------------------------------------------- single path

cdef void _sp_calc(double* alpha, unsigned char* cbits, const long* off,
                   int n, long phase, bint exact) noexcept nogil:
    cdef int lam = n
    cdef long ph = phase
    cdef int l
    cdef long p_l, w, j
    cdef double* parent
    cdef double* child
    cdef unsigned char* sbits
    while (ph & 1) == 0 and lam > 1:
        lam -= 1
        ph >>= 1
    for l in range(lam, n + 1):
        p_l = phase >> (n - l)
        w = 1 << (n - l)
        parent = alpha + off[l - 1]
        child = alpha + off[l]
        if p_l & 1:
            sbits = cbits + 2 * off[l]  # slot 0 = left-sibling sums
            for j in range(w):
                child[j] = parent[2 * j + 1] + (1.0 - 2.0 * sbits[j]) * parent[2 * j]
        else:
            for j in range(w):
                child[j] = _f_fun(parent[2 * j], parent[2 * j + 1], exact)


cdef void _sp_commit(unsigned char* cbits, const long* off, int n,
                     long phase, int bit) noexcept nogil:
    cdef int lam = n
    cdef long ph = phase, psi, w, j
    cdef unsigned char* c0
    cdef unsigned char* par
    cbits[2 * off[n] + (phase & 1)] = <unsigned char> bit
    while (ph & 1) and lam > 0:
        psi = ph >> 1
        w = 1 << (n - lam)
        c0 = cbits + 2 * off[lam]
        par = cbits + 2 * off[lam - 1] + (psi & 1) * (2 * w)
        for j in range(w):
            par[2 * j] = c0[j] ^ c0[w + j]
            par[2 * j + 1] = c0[w + j]
        lam -= 1
        ph = psi


cdef class _SpState:
    """Flat single-path recursion state: one LLR and one bit block per level."""
    cdef object keep_alive
    cdef double* alpha
    cdef unsigned char* cbits
    cdef long* off
    cdef int n

    def __init__(self, cnp.ndarray[cnp.float64_t, ndim=1] llr0_perm):
        N = int(llr0_perm.shape[0])
        self.n = N.bit_length() - 1
        off_arr = np.zeros(self.n + 2, dtype=np.int64)
        for d in range(self.n + 1):
            off_arr[d + 1] = off_arr[d] + (1 << (self.n - d))
        alpha_arr = np.empty(2 * N - 1, dtype=np.float64)
        cbits_arr = np.zeros(2 * (2 * N - 1), dtype=np.uint8)
        self.keep_alive = (off_arr, alpha_arr, cbits_arr)
        self.off = <long*> cnp.PyArray_DATA(off_arr)
        self.alpha = <double*> cnp.PyArray_DATA(alpha_arr)
        self.cbits = <unsigned char*> cnp.PyArray_DATA(cbits_arr)
        memcpy(self.alpha, cnp.PyArray_DATA(llr0_perm), N * sizeof(double))


def sc_pass(llr0, actions, forced, uniforms=None, exact_f=True,
            out_llr=None, out_surprisal=None, out_error=None):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] llr0_c = np.ascontiguousarray(llr0, dtype=np.float64)
    N_py = int(llr0_c.shape[0])
    cdef long N = N_py
    cdef int n = N_py.bit_length() - 1
    if N < 2 or (1 << n) != N:
        raise ValueError(f"kernel length must be a power of two >= 2, got {N_py}")
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] acts = np.ascontiguousarray(actions, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] frc = np.ascontiguousarray(forced, dtype=np.uint8)
    if acts.shape[0] != N or frc.shape[0] != N:
        raise ValueError("actions and forced must have one entry per position")
    if np.any(acts > 3):
        raise ValueError("unknown action code")
    if uniforms is None and np.any(acts == 2):
        raise ValueError("RANDOM actions require a uniforms array")
    cdef cnp.ndarray[cnp.float64_t, ndim=1] unif = (
        np.ascontiguousarray(uniforms, dtype=np.float64) if uniforms is not None
        else np.empty(0, dtype=np.float64))

    cdef _SpState st = _SpState(llr0_c[_bitrev(N_py)])
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] u = np.zeros(N_py, dtype=np.uint8)

    empty_f = np.empty(0, dtype=np.float64)
    empty_b = np.empty(0, dtype=np.uint8)
    cdef double[::1] o_llr = out_llr if out_llr is not None else empty_f
    cdef double[::1] o_sp = out_surprisal if out_surprisal is not None else empty_f
    cdef unsigned char[::1] o_err = out_error if out_error is not None else empty_b
    cdef bint want_llr = out_llr is not None
    cdef bint want_sp = out_surprisal is not None
    cdef bint want_err = out_error is not None
    cdef bint exact = bool(exact_f)

    cdef unsigned char* au = <unsigned char*> cnp.PyArray_DATA(u)
    cdef unsigned char* aa = <unsigned char*> cnp.PyArray_DATA(acts)
    cdef unsigned char* af = <unsigned char*> cnp.PyArray_DATA(frc)
    cdef double* aun = <double*> cnp.PyArray_DATA(unif)

    cdef long i
    cdef int act, bit, dec
    cdef double L, Ld
    with nogil:
        for i in range(N):
            _sp_calc(st.alpha, st.cbits, st.off, n, i, exact)
            L = st.alpha[st.off[n]]
            Ld = _flush_tie(L)
            act = aa[i]
            if act == 0:  # FORCE
                bit = af[i]
            elif act == 1:  # DECIDE
                bit = 0 if Ld >= 0.0 else 1
            elif act == 2:  # RANDOM
                bit = 0 if aun[i] < _sigmoid(L) else 1
            else:  # GENIE
                dec = 0 if Ld >= 0.0 else 1
                bit = af[i]
                if want_err and dec != bit:
                    o_err[i] = 1
            if want_llr:
                o_llr[i] = L
            if want_sp:
                o_sp[i] = _softplus(-(1.0 - 2.0 * bit) * L) / _LN2
            au[i] = <unsigned char> bit
            _sp_commit(st.cbits, st.off, n, i, bit)
    return u


def mimic_pass(llr_channel, prior_llr_value, actions, forced, uniforms, exact_f=True):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] llr_c = np.ascontiguousarray(llr_channel, dtype=np.float64)
    N_py = int(llr_c.shape[0])
    cdef long N = N_py
    cdef int n = N_py.bit_length() - 1
    if N < 2 or (1 << n) != N:
        raise ValueError(f"kernel length must be a power of two >= 2, got {N_py}")
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] acts = np.ascontiguousarray(actions, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] frc = np.ascontiguousarray(forced, dtype=np.uint8)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] unif = np.ascontiguousarray(uniforms, dtype=np.float64)
    if np.any(acts > 2):
        raise ValueError("unsupported action in mimic_pass")
    cdef _SpState ch = _SpState(llr_c[_bitrev(N_py)])
    cdef _SpState pr = _SpState(np.full(N_py, float(prior_llr_value), dtype=np.float64))
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] u = np.zeros(N_py, dtype=np.uint8)
    cdef unsigned char* au = <unsigned char*> cnp.PyArray_DATA(u)
    cdef unsigned char* aa = <unsigned char*> cnp.PyArray_DATA(acts)
    cdef unsigned char* af = <unsigned char*> cnp.PyArray_DATA(frc)
    cdef double* aun = <double*> cnp.PyArray_DATA(unif)
    cdef bint exact = bool(exact_f)
    cdef long i
    cdef int act, bit = 0
    with nogil:
        for i in range(N):
            _sp_calc(ch.alpha, ch.cbits, ch.off, n, i, exact)
            _sp_calc(pr.alpha, pr.cbits, pr.off, n, i, exact)
            act = aa[i]
            if act == 0:
                bit = af[i]
            elif act == 1:
                bit = 0 if _flush_tie(ch.alpha[ch.off[n]]) >= 0.0 else 1
            else:
                bit = 0 if aun[i] < _sigmoid(pr.alpha[pr.off[n]]) else 1
            au[i] = <unsigned char> bit
            _sp_commit(ch.cbits, ch.off, n, i, bit)
            _sp_commit(pr.cbits, pr.off, n, i, bit)
    return u


# ------------------------------------------------------------------ list pass

cdef struct Cand:
    double m
    long k


cdef int _cand_cmp(const void* pa, const void* pb) noexcept nogil:
    cdef const Cand* a = <const Cand*> pa
    cdef const Cand* b = <const Cand*> pb
    if a.m < b.m:
        return -1
    if a.m > b.m:
        return 1
    if a.k < b.k:
        return -1
    if a.k > b.k:
        return 1
    return 0


cdef class _SclEngine:
    """Copy-on-write array banks shared between paths, one bank per level."""
    cdef object keep_alive
    cdef int n, L, A
    cdef long N
    cdef double* llr_bank        # level d: base L*off[d], array s: + s*width_d
    cdef unsigned char* bit_bank # level d: base 2*L*off[d], array s: + s*2*width_d
    cdef long* off
    cdef int* path2arr           # (n+1) x L
    cdef int* refcnt             # (n+1) x L
    cdef int* inact_arr          # (n+1) x L stacks
    cdef int* inact_top          # n+1
    cdef int* path_stack
    cdef int path_top
    cdef double* pm
    cdef unsigned char* u_hist   # L x N
    cdef int* order              # canonical rank -> path row

    def __init__(self, cnp.ndarray[cnp.float64_t, ndim=1] llr0_perm, int list_size):
        cdef int d, s, p0
        N = int(llr0_perm.shape[0])
        self.N = N
        self.n = N.bit_length() - 1
        self.L = list_size
        off_arr = np.zeros(self.n + 2, dtype=np.int64)
        for d in range(self.n + 1):
            off_arr[d + 1] = off_arr[d] + (1 << (self.n - d))
        total = int(off_arr[self.n + 1])  # 2N-1
        llr_arr = np.empty(list_size * total, dtype=np.float64)
        bit_arr = np.zeros(list_size * 2 * total, dtype=np.uint8)
        p2a_arr = np.zeros((self.n + 1) * list_size, dtype=np.int32)
        ref_arr = np.zeros((self.n + 1) * list_size, dtype=np.int32)
        ia_arr = np.zeros((self.n + 1) * list_size, dtype=np.int32)
        it_arr = np.zeros(self.n + 1, dtype=np.int32)
        ps_arr = np.zeros(list_size, dtype=np.int32)
        pm_arr = np.zeros(list_size, dtype=np.float64)
        uh_arr = np.zeros(list_size * N, dtype=np.uint8)
        ord_arr = np.zeros(list_size, dtype=np.int32)
        self.keep_alive = (off_arr, llr_arr, bit_arr, p2a_arr, ref_arr, ia_arr,
                           it_arr, ps_arr, pm_arr, uh_arr, ord_arr)
        self.off = <long*> cnp.PyArray_DATA(off_arr)
        self.llr_bank = <double*> cnp.PyArray_DATA(llr_arr)
        self.bit_bank = <unsigned char*> cnp.PyArray_DATA(bit_arr)
        self.path2arr = <int*> cnp.PyArray_DATA(p2a_arr)
        self.refcnt = <int*> cnp.PyArray_DATA(ref_arr)
        self.inact_arr = <int*> cnp.PyArray_DATA(ia_arr)
        self.inact_top = <int*> cnp.PyArray_DATA(it_arr)
        self.path_stack = <int*> cnp.PyArray_DATA(ps_arr)
        self.pm = <double*> cnp.PyArray_DATA(pm_arr)
        self.u_hist = <unsigned char*> cnp.PyArray_DATA(uh_arr)
        self.order = <int*> cnp.PyArray_DATA(ord_arr)

        self.path_top = 0
        for d in range(self.n + 1):
            self.inact_top[d] = 0
            for s in range(self.L - 1, -1, -1):  # pop order 0,1,...
                self._push_arr(d, s)
        for s in range(self.L - 1, -1, -1):
            self._push_path(s)
        p0 = self._pop_path()
        for d in range(self.n + 1):
            s = self._pop_arr(d)
            self.path2arr[d * self.L + p0] = s
            self.refcnt[d * self.L + s] = 1
        memcpy(self._llr_at(0, self.path2arr[0 * self.L + p0]),
               cnp.PyArray_DATA(llr0_perm), N * sizeof(double))
        self.order[0] = p0
        self.A = 1

    cdef inline int _pop_path(self) noexcept nogil:
        self.path_top -= 1
        return self.path_stack[self.path_top]

    cdef inline void _push_path(self, int p) noexcept nogil:
        self.path_stack[self.path_top] = p
        self.path_top += 1

    cdef inline int _pop_arr(self, int d) noexcept nogil:
        self.inact_top[d] -= 1
        return self.inact_arr[d * self.L + self.inact_top[d]]

    cdef inline void _push_arr(self, int d, int s) noexcept nogil:
        self.inact_arr[d * self.L + self.inact_top[d]] = s
        self.inact_top[d] += 1

    cdef inline double* _llr_at(self, int d, int s) noexcept nogil:
        return self.llr_bank + self.L * self.off[d] + s * (self.off[d + 1] - self.off[d])

    cdef inline unsigned char* _bits_at(self, int d, int s) noexcept nogil:
        return self.bit_bank + 2 * self.L * self.off[d] + s * 2 * (self.off[d + 1] - self.off[d])

    cdef int _writable(self, int d, int p) noexcept nogil:
        cdef int s = self.path2arr[d * self.L + p]
        cdef int s2
        cdef long w
        if self.refcnt[d * self.L + s] > 1:
            s2 = self._pop_arr(d)
            w = self.off[d + 1] - self.off[d]
            memcpy(self._llr_at(d, s2), self._llr_at(d, s), w * sizeof(double))
            memcpy(self._bits_at(d, s2), self._bits_at(d, s), 2 * w)
            self.refcnt[d * self.L + s] -= 1
            self.refcnt[d * self.L + s2] = 1
            self.path2arr[d * self.L + p] = s2
            s = s2
        return s

    cdef void _calc(self, int p, long phase, bint exact) noexcept nogil:
        cdef int lam = self.n
        cdef long ph = phase
        cdef int l, sp, sc
        cdef long p_l, w, j
        cdef double* parent
        cdef double* child
        cdef unsigned char* sbits
        while (ph & 1) == 0 and lam > 1:
            lam -= 1
            ph >>= 1
        for l in range(lam, self.n + 1):
            p_l = phase >> (self.n - l)
            w = 1 << (self.n - l)
            sp = self.path2arr[(l - 1) * self.L + p]
            parent = self._llr_at(l - 1, sp)
            sc = self._writable(l, p)
            child = self._llr_at(l, sc)
            if p_l & 1:
                sbits = self._bits_at(l, sc)  # slot 0 = left-sibling sums
                for j in range(w):
                    child[j] = parent[2 * j + 1] + (1.0 - 2.0 * sbits[j]) * parent[2 * j]
            else:
                for j in range(w):
                    child[j] = _f_fun(parent[2 * j], parent[2 * j + 1], exact)

    cdef inline double _decision_llr(self, int p) noexcept nogil:
        return self._llr_at(self.n, self.path2arr[self.n * self.L + p])[0]

    cdef void _set_bit(self, int p, long phase, int bit) noexcept nogil:
        cdef int s = self._writable(self.n, p)
        self._bits_at(self.n, s)[phase & 1] = <unsigned char> bit
        self.u_hist[<long> p * self.N + phase] = <unsigned char> bit

    cdef void _commit(self, int p, long phase) noexcept nogil:
        cdef int lam = self.n
        cdef long ph = phase, psi, w, j
        cdef int sc, spar
        cdef unsigned char* c0
        cdef unsigned char* par
        while (ph & 1) and lam > 0:
            psi = ph >> 1
            w = 1 << (self.n - lam)
            sc = self.path2arr[lam * self.L + p]
            c0 = self._bits_at(lam, sc)
            spar = self._writable(lam - 1, p)
            par = self._bits_at(lam - 1, spar) + (psi & 1) * (2 * w)
            for j in range(w):
                par[2 * j] = c0[j] ^ c0[w + j]
                par[2 * j + 1] = c0[w + j]
            lam -= 1
            ph = psi

    cdef void _kill(self, int p) noexcept nogil:
        cdef int d, s
        for d in range(self.n + 1):
            s = self.path2arr[d * self.L + p]
            self.refcnt[d * self.L + s] -= 1
            if self.refcnt[d * self.L + s] == 0:
                self._push_arr(d, s)
        self._push_path(p)

    cdef int _clone(self, int src) noexcept nogil:
        cdef int dst = self._pop_path()
        cdef int d, s
        for d in range(self.n + 1):
            s = self.path2arr[d * self.L + src]
            self.path2arr[d * self.L + dst] = s
            self.refcnt[d * self.L + s] += 1
        memcpy(self.u_hist + <long> dst * self.N, self.u_hist + <long> src * self.N, self.N)
        return dst


def scl_pass(llr0, actions, forced, list_size, exact_f=True, exact_metric=True):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] llr0_c = np.ascontiguousarray(llr0, dtype=np.float64)
    N_py = int(llr0_c.shape[0])
    cdef long N = N_py
    cdef int n = N_py.bit_length() - 1
    if N < 2 or (1 << n) != N:
        raise ValueError(f"kernel length must be a power of two >= 2, got {N_py}")
    cdef int L = int(list_size)
    if L < 1:
        raise ValueError("list_size must be >= 1")
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] acts = np.ascontiguousarray(actions, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] frc = np.ascontiguousarray(forced, dtype=np.uint8)
    if acts.shape[0] != N or frc.shape[0] != N:
        raise ValueError("actions and forced must have one entry per position")
    if np.any(acts > 1):
        raise ValueError("scl_pass accepts only FORCE and BRANCH actions")
    cdef bint exact = bool(exact_f)
    cdef bint exactm = bool(exact_metric)

    cdef _SclEngine eng = _SclEngine(llr0_c[_bitrev(N_py)], L)
    cdef unsigned char* aa = <unsigned char*> cnp.PyArray_DATA(acts)
    cdef unsigned char* af = <unsigned char*> cnp.PyArray_DATA(frc)

    cdef double* dec = <double*> malloc(L * sizeof(double))
    cdef Cand* cand = <Cand*> malloc(2 * L * sizeof(Cand))
    cdef int* keep_bit0 = <int*> malloc(L * sizeof(int))
    cdef int* keep_bit1 = <int*> malloc(L * sizeof(int))
    cdef int* new_rows = <int*> malloc(L * sizeof(int))
    cdef int* new_bits = <int*> malloc(L * sizeof(int))
    cdef double* new_pm = <double*> malloc(L * sizeof(double))
    if not (dec and cand and keep_bit0 and keep_bit1 and new_rows and new_bits and new_pm):
        free(dec); free(cand); free(keep_bit0); free(keep_bit1)
        free(new_rows); free(new_bits); free(new_pm)
        raise MemoryError

    cdef long i, kk
    cdef int r, p, M, b, row
    cdef unsigned char* ou
    cdef double* om
    try:
        with nogil:
            for i in range(N):
                for r in range(eng.A):
                    eng._calc(eng.order[r], i, exact)
                    dec[r] = eng._decision_llr(eng.order[r])
                if aa[i] == 1:  # BRANCH
                    for r in range(eng.A):
                        p = eng.order[r]
                        cand[2 * r].m = eng.pm[p] + _penalty(0, dec[r], exactm)
                        cand[2 * r].k = 2 * r
                        cand[2 * r + 1].m = eng.pm[p] + _penalty(1, dec[r], exactm)
                        cand[2 * r + 1].k = 2 * r + 1
                    M = 2 * eng.A
                    if M > L:
                        M = L
                    qsort(cand, 2 * eng.A, sizeof(Cand), _cand_cmp)
                    for r in range(eng.A):
                        keep_bit0[r] = -1
                        keep_bit1[r] = -1
                    for kk in range(M):
                        r = <int> (cand[kk].k >> 1)
                        if cand[kk].k & 1:
                            keep_bit1[r] = <int> kk
                        else:
                            keep_bit0[r] = <int> kk
                    # kills first (frees rows/arrays), then survivors, then clones
                    for r in range(eng.A):
                        if keep_bit0[r] < 0 and keep_bit1[r] < 0:
                            eng._kill(eng.order[r])
                    for r in range(eng.A):
                        p = eng.order[r]
                        if keep_bit0[r] >= 0 and keep_bit1[r] >= 0:
                            row = eng._clone(p)
                            new_rows[keep_bit0[r]] = p
                            new_bits[keep_bit0[r]] = 0
                            new_pm[keep_bit0[r]] = cand[keep_bit0[r]].m
                            new_rows[keep_bit1[r]] = row
                            new_bits[keep_bit1[r]] = 1
                            new_pm[keep_bit1[r]] = cand[keep_bit1[r]].m
                        elif keep_bit0[r] >= 0:
                            new_rows[keep_bit0[r]] = p
                            new_bits[keep_bit0[r]] = 0
                            new_pm[keep_bit0[r]] = cand[keep_bit0[r]].m
                        elif keep_bit1[r] >= 0:
                            new_rows[keep_bit1[r]] = p
                            new_bits[keep_bit1[r]] = 1
                            new_pm[keep_bit1[r]] = cand[keep_bit1[r]].m
                    eng.A = M
                    for kk in range(M):
                        row = new_rows[kk]
                        eng.order[kk] = row
                        eng.pm[row] = new_pm[kk]
                        eng._set_bit(row, i, new_bits[kk])
                else:  # FORCE
                    b = af[i]
                    for r in range(eng.A):
                        p = eng.order[r]
                        eng.pm[p] += _penalty(b, dec[r], exactm)
                        eng._set_bit(p, i, b)
                if i & 1:
                    for r in range(eng.A):
                        eng._commit(eng.order[r], i)
            # final ordering by (metric, canonical rank)
            for r in range(eng.A):
                cand[r].m = eng.pm[eng.order[r]]
                cand[r].k = r
            qsort(cand, eng.A, sizeof(Cand), _cand_cmp)
        out_u = np.zeros((eng.A, N_py), dtype=np.uint8)
        out_m = np.zeros(eng.A, dtype=np.float64)
        ou = <unsigned char*> cnp.PyArray_DATA(out_u)
        om = <double*> cnp.PyArray_DATA(out_m)
        for r in range(eng.A):
            row = eng.order[<int> cand[r].k]
            memcpy(ou + <long> r * N, eng.u_hist + <long> row * N, N)
            om[r] = cand[r].m
        return out_u, out_m
    finally:
        free(dec)
        free(cand)
        free(keep_bit0)
        free(keep_bit1)
        free(new_rows)
        free(new_bits)
        free(new_pm)

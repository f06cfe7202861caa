# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled kernels: a line-for-line port of ``_pykernel.py``.

Built with ``-ffp-contract=off`` so no fused multiply-adds change rounding;
results match the Python fallback bit for bit.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt
from libc.stdlib cimport malloc, free
from libc.string cimport memcpy, memset

cnp.import_array()

BACKEND = "cython"

cdef double REL_TOL = 1e-9
cdef double ABS_FLOOR = 1e-12


cdef inline double _sq(const double* a, const double* b, Py_ssize_t d) noexcept nogil:
    cdef double s = 0.0
    cdef double t
    cdef Py_ssize_t i
    for i in range(d):
        t = a[i] - b[i]
        s += t * t
    return s


def dist(p, q):
    cdef const double[::1] a = np.ascontiguousarray(p, dtype=np.float64)
    cdef const double[::1] b = np.ascontiguousarray(q, dtype=np.float64)
    return sqrt(_sq(&a[0], &b[0], a.shape[0]))


def pairwise_distances(pts):
    cdef const double[:, ::1] P = np.ascontiguousarray(pts, dtype=np.float64)
    cdef Py_ssize_t n = P.shape[0], d = P.shape[1], i, j
    out = np.zeros((n, n))
    cdef double[:, ::1] D = out
    cdef double v
    for i in range(n):
        for j in range(i + 1, n):
            v = sqrt(_sq(&P[i, 0], &P[j, 0], d))
            D[i, j] = v
            D[j, i] = v
    return out


cdef double _bc(const double* pts, Py_ssize_t d, const int* idx, Py_ssize_t m,
                long iters, double* c) noexcept nogil:
    cdef Py_ssize_t a, q
    cdef long it
    cdef double best, s, step
    cdef const double* far
    memcpy(c, pts + idx[0] * d, d * sizeof(double))
    for it in range(1, iters + 1):
        best = -1.0
        far = pts + idx[0] * d
        for q in range(m):
            s = _sq(pts + idx[q] * d, c, d)
            if s > best:
                best = s
                far = pts + idx[q] * d
        if best == 0.0:
            break
        step = <double>it + 1.0
        for a in range(d):
            c[a] = c[a] + (far[a] - c[a]) / step
    best = 0.0
    for q in range(m):
        s = _sq(pts + idx[q] * d, c, d)
        if s > best:
            best = s
    return sqrt(best)


def bc_meb(pts, long iters):
    cdef const double[:, ::1] P = np.ascontiguousarray(pts, dtype=np.float64)
    cdef Py_ssize_t m = P.shape[0], d = P.shape[1], i
    cdef int* idx = <int*>malloc(m * sizeof(int))
    center = np.zeros(d)
    cdef double[::1] c = center
    cdef double r
    try:
        for i in range(m):
            idx[i] = <int>i
        r = _bc(&P[0, 0], d, idx, m, iters, &c[0])
    finally:
        free(idx)
    return center, r


cdef class _Search:
    cdef Py_ssize_t n, d, k, max_depth
    cdef long cap, iters, max_nodes, nodes
    cdef double gamma
    cdef bint repair
    cdef const double* pts
    cdef const double* D
    cdef const double* excl
    cdef int* group
    cdef unsigned char* cov
    cdef signed char* own
    cdef int* cnt
    cdef int* first
    cdef double* cen
    cdef double* rad
    cdef unsigned char* hasball
    cdef int* path_pt
    cdef int* path_lab
    cdef int* scratch_idx
    cdef double* fc
    cdef double* fr
    cdef unsigned char* fdef
    cdef signed char* lab
    cdef object meb_fn
    cdef list leaves
    cdef set seen
    cdef object keep

    def __cinit__(self):
        self.cov = NULL
        self.own = NULL
        self.cnt = NULL
        self.first = NULL
        self.cen = NULL
        self.rad = NULL
        self.hasball = NULL
        self.path_pt = NULL
        self.path_lab = NULL
        self.scratch_idx = NULL
        self.fc = NULL
        self.fr = NULL
        self.fdef = NULL
        self.lab = NULL
        self.group = NULL

    def __dealloc__(self):
        free(self.cov)
        free(self.own)
        free(self.cnt)
        free(self.first)
        free(self.cen)
        free(self.rad)
        free(self.hasball)
        free(self.path_pt)
        free(self.path_lab)
        free(self.scratch_idx)
        free(self.fc)
        free(self.fr)
        free(self.fdef)
        free(self.lab)
        free(self.group)

    cdef int setup(self, pts, dmat, excl, group) except -1:
        cdef const double[:, ::1] P = pts
        cdef const double[:, ::1] Dm = dmat
        cdef const double[::1] E = excl
        cdef Py_ssize_t n = self.n, k = self.k, d = self.d, L = self.n + 1, j
        self.keep = (pts, dmat, excl)
        self.pts = &P[0, 0]
        self.D = &Dm[0, 0]
        self.excl = &E[0]
        self.group = <int*>malloc(k * sizeof(int))
        for j in range(k):
            self.group[j] = <int>group[j]
        self.cov = <unsigned char*>malloc(L * n)
        self.own = <signed char*>malloc(L * n)
        self.cnt = <int*>malloc(L * k * sizeof(int))
        self.first = <int*>malloc(L * k * sizeof(int))
        self.cen = <double*>malloc(L * k * d * sizeof(double))
        self.rad = <double*>malloc(L * k * sizeof(double))
        self.hasball = <unsigned char*>malloc(L * k)
        self.path_pt = <int*>malloc(L * sizeof(int))
        self.path_lab = <int*>malloc(L * sizeof(int))
        self.scratch_idx = <int*>malloc(L * sizeof(int))
        self.fc = <double*>malloc(k * d * sizeof(double))
        self.fr = <double*>malloc(k * sizeof(double))
        self.fdef = <unsigned char*>malloc(k)
        self.lab = <signed char*>malloc(n)
        memset(self.cov, 0, n)
        memset(self.own, -1, n)
        memset(self.cnt, 0, k * sizeof(int))
        memset(self.first, 0, k * sizeof(int))
        memset(self.cen, 0, k * d * sizeof(double))
        memset(self.rad, 0, k * sizeof(double))
        memset(self.hasball, 0, k)
        return 0

    cdef int next_point(self, Py_ssize_t t) noexcept nogil:
        cdef Py_ssize_t p, j, n = self.n, k = self.k
        cdef unsigned char* cov = self.cov + t * n
        cdef int* cnt = self.cnt + t * k
        cdef int* first = self.first + t * k
        cdef bint ok
        for p in range(n):
            if cov[p]:
                continue
            ok = True
            for j in range(k):
                if cnt[j] == 1 and self.D[first[j] * n + p] <= self.excl[j]:
                    ok = False
                    break
            if ok:
                return <int>p
        return -1

    cdef void copy_state(self, Py_ssize_t t) noexcept nogil:
        cdef Py_ssize_t n = self.n, k = self.k, d = self.d
        memcpy(self.cov + (t + 1) * n, self.cov + t * n, n)
        memcpy(self.own + (t + 1) * n, self.own + t * n, n)
        memcpy(self.cnt + (t + 1) * k, self.cnt + t * k, k * sizeof(int))
        memcpy(self.first + (t + 1) * k, self.first + t * k, k * sizeof(int))
        memcpy(self.cen + (t + 1) * k * d, self.cen + t * k * d, k * d * sizeof(double))
        memcpy(self.rad + (t + 1) * k, self.rad + t * k, k * sizeof(double))
        memcpy(self.hasball + (t + 1) * k, self.hasball + t * k, k)

    cdef int add(self, Py_ssize_t t, int p, int j) except -1:
        # state at depth t+1 already holds a copy of depth t
        cdef Py_ssize_t n = self.n, k = self.k, d = self.d, i, m, q, a
        cdef Py_ssize_t t1 = t + 1
        cdef int* cnt = self.cnt + t1 * k
        cdef double* c = self.cen + (t1 * k + j) * d
        cdef unsigned char* cov = self.cov + t1 * n
        cdef signed char* own = self.own + t1 * n
        cdef double r, radius, lim
        cnt[j] += 1
        self.path_pt[t] = p
        self.path_lab[t] = j
        if cnt[j] == 1:
            self.first[t1 * k + j] = p
            own[p] = <signed char>j
            return 0
        m = 0
        for i in range(t + 1):
            if self.path_lab[i] == j:
                self.scratch_idx[m] = self.path_pt[i]
                m += 1
        if self.iters > 0:
            r = _bc(self.pts, d, self.scratch_idx, m, self.iters, c)
        else:
            members = tuple([self.scratch_idx[i] for i in range(m)])
            center, r = self.meb_fn(members)
            for a in range(d):
                c[a] = <double>float(center[a])
        radius = self.gamma * r
        self.rad[t1 * k + j] = radius
        self.hasball[t1 * k + j] = 1
        lim = radius * (1.0 + REL_TOL) + ABS_FLOOR
        for q in range(n):
            if not cov[q] and sqrt(_sq(self.pts + q * d, c, d)) <= lim:
                cov[q] = 1
                own[q] = <signed char>j
        return 0

    cdef int emit(self, Py_ssize_t t) except -1:
        cdef Py_ssize_t n = self.n, k = self.k, d = self.d, j, q, s, jj
        cdef int* cnt = self.cnt + t * k
        cdef int* first = self.first + t * k
        cdef signed char* own = self.own + t * n
        cdef double dq
        memcpy(self.fc, self.cen + t * k * d, k * d * sizeof(double))
        memcpy(self.fr, self.rad + t * k, k * sizeof(double))
        memcpy(self.fdef, self.hasball + t * k, k)
        for j in range(k):
            if cnt[j] == 1:
                s = first[j]
                memcpy(self.fc + j * d, self.pts + s * d, d * sizeof(double))
                self.fr[j] = 0.0
                self.fdef[j] = 1
        cdef double lim_j
        if self.repair:
            memcpy(self.lab, own, n)
            for q in range(n):
                if self.lab[q] >= 0:
                    continue
                for j in range(k):
                    if cnt[j] == 1:
                        dq = self.D[first[j] * n + q]
                        if dq <= self.excl[j]:
                            self.lab[q] = <signed char>j
                            if dq > self.fr[j]:
                                self.fr[j] = dq
                            break
            for q in range(n):
                j = self.lab[q]
                if j >= 0 and cnt[j] >= 2:
                    dq = sqrt(_sq(self.pts + q * d, self.fc + j * d, d))
                    if dq > self.fr[j]:
                        self.fr[j] = dq
        else:
            for q in range(n):
                self.lab[q] = -1
                for j in range(k):
                    if self.fdef[j]:
                        lim_j = self.fr[j] * (1.0 + REL_TOL) + ABS_FLOOR
                        if sqrt(_sq(self.pts + q * d, self.fc + j * d, d)) <= lim_j:
                            self.lab[q] = <signed char>j
                            break
        key = (<char*>self.lab)[:n]
        if key in self.seen:
            return 0
        self.seen.add(key)
        centers = np.empty((k, d))
        radii = np.empty(k)
        defined = np.empty(k, dtype=bool)
        cdef double[:, ::1] cv = centers
        cdef double[::1] rv = radii
        for j in range(k):
            for jj in range(d):
                cv[j, jj] = self.fc[j * d + jj]
            rv[j] = self.fr[j]
            defined[j] = bool(self.fdef[j])
        u = tuple([self.path_lab[q] for q in range(t)])
        self.leaves.append((u, key, centers, radii, defined))
        return 0

    cdef int rec(self, Py_ssize_t t) except -1:
        cdef int p, j, i
        cdef Py_ssize_t k = self.k
        cdef int* cnt
        cdef bint blocked, branched
        self.nodes += 1
        if self.max_nodes and self.nodes > self.max_nodes:
            raise OverflowError("node budget exceeded")
        p = self.next_point(t) if t < self.max_depth else -1
        if p < 0:
            return self.emit(t)
        branched = False
        cnt = self.cnt + t * k
        for j in range(k):
            if cnt[j] >= self.cap:
                continue
            if cnt[j] == 0:
                blocked = False
                for i in range(j):
                    if self.group[i] == self.group[j] and cnt[i] == 0:
                        blocked = True
                        break
                if blocked:
                    continue
            self.copy_state(t)
            self.add(t, p, j)
            self.rec(t + 1)
            branched = True
        if not branched:
            return self.emit(t)
        return 0


def search_leaves(pts, dmat, excl, double gamma, long iters, meb_fn, cap,
                  max_depth, group, bint repair, max_nodes=0):
    """See ``_pykernel.search_leaves``; identical contract and results."""
    P = np.ascontiguousarray(pts, dtype=np.float64)
    Dm = np.ascontiguousarray(dmat, dtype=np.float64)
    E = np.ascontiguousarray(excl, dtype=np.float64)
    cdef _Search s = _Search()
    s.n = P.shape[0]
    s.d = P.shape[1]
    s.k = E.shape[0]
    s.cap = <long>min(int(cap), s.n + 1)
    s.max_depth = <Py_ssize_t>min(int(max_depth), s.n)
    s.iters = iters
    s.gamma = gamma
    s.repair = repair
    s.meb_fn = meb_fn
    s.max_nodes = <long>int(max_nodes)
    s.nodes = 0
    s.leaves = []
    s.seen = set()
    s.setup(P, Dm, E, list(group))
    s.rec(0)
    return s.leaves, s.nodes

"""Floating-point multistart Newton for square polynomial systems.

A system is flattened into term arrays (coefficient, exponent row, output
slot) for the values and for the Jacobian entries.  Two interchangeable
backends run the iteration: a numba-compiled per-seed loop and a batched
numpy version.  ``NILMAP_DISABLE_NUMBA=1`` forces the numpy path; it only
affects speed, never which exact results are reported.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .polymap import PolyMap

try:  # pragma: no cover - exercised implicitly when numba is present
    from numba import njit
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

BACKENDS = ("auto", "numba", "numpy")
_BLOWUP = 1e50


def numba_enabled() -> bool:
    return _HAVE_NUMBA and os.environ.get("NILMAP_DISABLE_NUMBA", "") not in ("1", "true", "yes")


def resolve_backend(backend: str = "auto") -> str:
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    if backend == "auto":
        return "numba" if numba_enabled() else "numpy"
    if backend == "numba" and not _HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    return backend


@dataclass(frozen=True)
class CompiledSystem:
    n: int
    coefs: np.ndarray   # (T,) complex128
    exps: np.ndarray    # (T, n) int64
    slot: np.ndarray    # (T,) int64, output component
    jcoefs: np.ndarray
    jexps: np.ndarray
    jslot: np.ndarray   # row * n + col


def _flatten(polys, n):
    coefs, exps, slots = [], [], []
    for k, p in enumerate(polys):
        for m, c in p.terms.items():
            coefs.append(complex(c))
            exps.append(m)
            slots.append(k)
    return (np.array(coefs, dtype=np.complex128),
            np.array(exps, dtype=np.int64).reshape(len(exps), n),
            np.array(slots, dtype=np.int64))


def compile_system(F: PolyMap) -> CompiledSystem:
    """Flatten F and its Jacobian into arrays for the kernels."""
    n = F.dim
    J = F.jacobian()
    jpolys = [J[i, j] for i in range(n) for j in range(n)]
    c, e, s = _flatten(F.components, n)
    jc, je, js = _flatten(jpolys, n)
    return CompiledSystem(n, c, e, s, jc, je, js)


# ---------------------------------------------------------------- numpy

def _powers_np(x, top):
    # (S, n, top+1) table of x**e by repeated multiplication
    pw = np.empty(x.shape + (top + 1,), dtype=np.complex128)
    pw[..., 0] = 1.0
    for e in range(1, top + 1):
        pw[..., e] = pw[..., e - 1] * x
    return pw


def _eval_np(x, coefs, exps, slot, width):
    # x: (S, n) -> (S, width) values and (S, width) term-magnitude sums
    S, n = x.shape
    out = np.zeros((S, width), dtype=np.complex128)
    mag = np.zeros((S, width), dtype=np.float64)
    if coefs.size == 0:
        return out, mag
    pw = _powers_np(x, int(exps.max()))
    mons = np.broadcast_to(coefs, (S, coefs.size)).copy()
    for j in range(n):
        mons *= pw[:, j, exps[:, j]]
    for k in range(width):
        sel = slot == k
        if sel.any():
            out[:, k] = mons[:, sel].sum(axis=1)
            mag[:, k] = np.abs(mons[:, sel]).sum(axis=1)
    return out, mag


def _solve_np(jac, val):
    try:
        return np.linalg.solve(jac, val[..., None])[..., 0]
    except np.linalg.LinAlgError:
        step = np.empty_like(val)
        for r in range(val.shape[0]):
            try:
                step[r] = np.linalg.solve(jac[r], val[r])
            except np.linalg.LinAlgError:
                step[r] = np.linalg.lstsq(jac[r], val[r], rcond=None)[0]
        return step


def _newton_numpy(sys: CompiledSystem, starts, tol, max_iter, step_tol, halvings):
    # the per-seed logic of the compiled kernel, batched over seeds
    n = sys.n
    x = starts.astype(np.complex128).copy()
    S = x.shape[0]
    done = np.zeros(S, dtype=bool)
    live = np.ones(S, dtype=bool)
    iters = np.zeros(S, dtype=np.int64)
    for it in range(max_iter + 1):
        idx = np.nonzero(live)[0]
        if idx.size == 0:
            break
        xa = x[idx]
        val, mag = _eval_np(xa, sys.coefs, sys.exps, sys.slot, n)
        jac, _ = _eval_np(xa, sys.jcoefs, sys.jexps, sys.jslot, n * n)
        finite = np.all(np.isfinite(val), axis=1) & np.all(np.isfinite(jac), axis=1)
        live[idx[~finite]] = False
        idx, xa, val, mag, jac = idx[finite], xa[finite], val[finite], mag[finite], jac[finite]
        step = _solve_np(jac.reshape(idx.size, n, n), val)
        res = np.max(np.abs(val) / (1.0 + mag), axis=1)
        small = np.max(np.abs(step), axis=1) <= step_tol * (1.0 + np.max(np.abs(xa), axis=1))
        conv = (res <= tol) & small
        x[idx[conv]] = xa[conv] - step[conv]
        done[idx[conv]] = True
        live[idx[conv]] = False
        if it == max_iter:
            live[idx] = False
            break
        go = ~conv
        idx, xa, step, val = idx[go], xa[go], step[go], val[go]
        # backtracking on the max-norm of the residual
        base = np.max(np.abs(val), axis=1)
        alpha = np.ones(idx.size)
        trial = xa - step
        pending = np.ones(idx.size, dtype=bool)
        for h in range(halvings):
            tv, _ = _eval_np(trial[pending], sys.coefs, sys.exps, sys.slot, n)
            better = np.max(np.abs(tv), axis=1) < base[pending]
            better &= np.all(np.isfinite(tv), axis=1)
            pos = np.nonzero(pending)[0]
            pending[pos[better]] = False
            if not pending.any() or h == halvings - 1:
                break
            alpha[pending] *= 0.5
            trial[pending] = xa[pending] - alpha[pending, None] * step[pending]
        ok = np.all(np.isfinite(trial), axis=1) & (np.max(np.abs(trial), axis=1) <= _BLOWUP)
        live[idx[~ok]] = False
        x[idx[ok]] = trial[ok]
        iters[idx[ok]] += 1
    return x, done, iters


# ---------------------------------------------------------------- numba

if _HAVE_NUMBA:
    @njit(cache=True)
    def _eval_nb(x, coefs, exps, slot, out, mag):
        out[:] = 0.0
        mag[:] = 0.0
        n = x.shape[0]
        T = coefs.shape[0]
        if T == 0:
            return
        top = 0
        for t in range(T):
            for j in range(n):
                top = max(top, exps[t, j])
        pw = np.empty((n, top + 1), dtype=np.complex128)
        for j in range(n):
            pw[j, 0] = 1.0
            for e in range(1, top + 1):
                pw[j, e] = pw[j, e - 1] * x[j]
        for t in range(T):
            v = coefs[t]
            for j in range(n):
                v *= pw[j, exps[t, j]]
            out[slot[t]] += v
            mag[slot[t]] += abs(v)

    @njit(cache=True)
    def _solve_nb(A, b):
        # in-place Gaussian elimination with partial pivoting; False if singular
        n = b.shape[0]
        for k in range(n):
            p = k
            best = abs(A[k, k])
            for r in range(k + 1, n):
                if abs(A[r, k]) > best:
                    best = abs(A[r, k])
                    p = r
            if best == 0.0:
                return False
            if p != k:
                for c in range(n):
                    tmp = A[k, c]
                    A[k, c] = A[p, c]
                    A[p, c] = tmp
                tmp = b[k]
                b[k] = b[p]
                b[p] = tmp
            for r in range(k + 1, n):
                f = A[r, k] / A[k, k]
                if f != 0:
                    for c in range(k, n):
                        A[r, c] -= f * A[k, c]
                    b[r] -= f * b[k]
        for k in range(n - 1, -1, -1):
            s = b[k]
            for c in range(k + 1, n):
                s -= A[k, c] * b[c]
            b[k] = s / A[k, k]
        return True

    @njit(cache=True)
    def _step_nb(x, jcoefs, jexps, jslot, jv, jm, A, val, step):
        n = x.shape[0]
        for k in range(n * n):
            if not (np.isfinite(jv[k].real) and np.isfinite(jv[k].imag)):
                return False
        for k in range(n):
            if not (np.isfinite(val[k].real) and np.isfinite(val[k].imag)):
                return False
        for r in range(n):
            for c in range(n):
                A[r, c] = jv[r * n + c]
        step[:] = val
        if not _solve_nb(A, step):
            # exactly singular Jacobian: minimum-norm step instead
            for r in range(n):
                for c in range(n):
                    A[r, c] = jv[r * n + c]
            step[:] = np.linalg.lstsq(A, val)[0]
        return True

    @njit(cache=True)
    def _newton_nb(starts, coefs, exps, slot, jcoefs, jexps, jslot, tol, max_iter,
                   step_tol, halvings):
        S, n = starts.shape
        xs = starts.copy()
        done = np.zeros(S, dtype=np.bool_)
        iters = np.zeros(S, dtype=np.int64)
        val = np.empty(n, dtype=np.complex128)
        mag = np.empty(n, dtype=np.float64)
        tv = np.empty(n, dtype=np.complex128)
        tm = np.empty(n, dtype=np.float64)
        jv = np.empty(n * n, dtype=np.complex128)
        jm = np.empty(n * n, dtype=np.float64)
        A = np.empty((n, n), dtype=np.complex128)
        step = np.empty(n, dtype=np.complex128)
        trial = np.empty(n, dtype=np.complex128)
        for s in range(S):
            x = xs[s]
            for it in range(max_iter + 1):
                _eval_nb(x, coefs, exps, slot, val, mag)
                _eval_nb(x, jcoefs, jexps, jslot, jv, jm)
                if not _step_nb(x, jcoefs, jexps, jslot, jv, jm, A, val, step):
                    break
                res = 0.0
                base = 0.0
                xmax = 0.0
                smax = 0.0
                for k in range(n):
                    r = abs(val[k]) / (1.0 + mag[k])
                    if r > res:
                        res = r
                    base = max(base, abs(val[k]))
                    xmax = max(xmax, abs(x[k]))
                    smax = max(smax, abs(step[k]))
                if res <= tol and smax <= step_tol * (1.0 + xmax):
                    for k in range(n):
                        x[k] -= step[k]
                    done[s] = True
                    break
                if it == max_iter:
                    break
                alpha = 1.0
                for k in range(n):
                    trial[k] = x[k] - step[k]
                for h in range(halvings):
                    _eval_nb(trial, coefs, exps, slot, tv, tm)
                    tnorm = 0.0
                    finite = True
                    for k in range(n):
                        if not (np.isfinite(tv[k].real) and np.isfinite(tv[k].imag)):
                            finite = False
                        tnorm = max(tnorm, abs(tv[k]))
                    if finite and tnorm < base:
                        break
                    if h < halvings - 1:
                        alpha *= 0.5
                        for k in range(n):
                            trial[k] = x[k] - alpha * step[k]
                ok = True
                for k in range(n):
                    y = trial[k]
                    if not (np.isfinite(y.real) and np.isfinite(y.imag)) or abs(y) > _BLOWUP:
                        ok = False
                if not ok:
                    break
                for k in range(n):
                    x[k] = trial[k]
                iters[s] += 1
        return xs, done, iters


def newton_multistart(sys: CompiledSystem, starts: np.ndarray, tol: float = 1e-10,
                      max_iter: int = 100, backend: str = "auto", step_tol: float = 1e-4,
                      halvings: int = 12, far: float = 1e12):
    """Damped Newton from every start; returns (points, converged mask, iteration counts).

    A start converges when the relative residual is at most ``tol`` and the
    next Newton step is at most ``step_tol`` relative to the point; the
    second test rejects spots far out where terms cancel without a root.
    Starts that fail with plain Newton are retried with steps halved (up to
    ``halvings`` times) until the residual drops.  Points with a coordinate
    beyond ``far`` never count as converged: out there rounding alone
    satisfies both tests.
    """
    which = resolve_backend(backend)
    starts = np.ascontiguousarray(starts, dtype=np.complex128)
    if starts.shape[1] != sys.n:
        raise ValueError(f"starts have {starts.shape[1]} columns, system has {sys.n} unknowns")
    if sys.n == 0:
        return starts.copy(), np.ones(starts.shape[0], dtype=bool), np.zeros(starts.shape[0], np.int64)

    def run(pts, h):
        if which == "numba":
            out = _newton_nb(pts, sys.coefs, sys.exps, sys.slot, sys.jcoefs, sys.jexps,
                             sys.jslot, float(tol), int(max_iter), float(step_tol), int(h))
        else:
            with np.errstate(all="ignore"):  # overflow just marks a start as diverged
                out = _newton_numpy(sys, pts, tol, max_iter, step_tol, h)
        xs, ok, its = out
        with np.errstate(invalid="ignore"):
            ok &= np.abs(xs).max(axis=1) <= far
        return xs, ok, its

    # plain Newton first (finite termination on triangular systems), then a
    # damped restart for the starts that did not converge
    x, done, iters = run(starts, 0)
    if halvings and not done.all():
        miss = np.nonzero(~done)[0]
        x2, d2, it2 = run(np.ascontiguousarray(starts[miss]), halvings)
        x[miss], done[miss], iters[miss] = x2, d2, iters[miss] + it2
    return x, done, iters


def random_starts(seed: int, count: int, n: int, scale: float = 2.0) -> np.ndarray:
    """Seeded complex Gaussian starting points, shape (count, n)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    z = rng.standard_normal((count, n, 2))
    return scale * (z[..., 0] + 1j * z[..., 1])

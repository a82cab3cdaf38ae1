"""Selberg zeta function: cycle expansion, Euler product and Fredholm determinant."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from .moebius import mobius_apply
from .schottky import SchottkyGroup
from .words import cyclic_lengths, length_spectrum

DEFAULT_PRODUCT_MARGIN = 0.1
BASIS_RADIUS = 0.75
LOST_DIGITS_WARN = 8


class RegionError(ValueError):
    """Evaluation point lies outside the region where the method converges."""


class DivergenceWarning(UserWarning):
    pass


class ConditioningWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ZetaEvaluation:
    s: complex
    value: complex
    method: str
    order: int
    error_estimate: float


# traces and cycle expansion


def transfer_trace(g: SchottkyGroup, s, n: int):
    """Tr(L_s^n) = sum over cyclically reduced |a| = n of e^{-s l}/(1 - e^{-l})."""
    if n < 1:
        raise ValueError("n must be >= 1")
    vals, counts = cyclic_lengths(g, n)
    w = counts / -np.expm1(-vals)
    s_arr = np.asarray(s, dtype=complex)
    out = np.exp(-np.multiply.outer(s_arr, vals)) @ w
    return complex(out) if out.ndim == 0 else out


def _cycle_series(g: SchottkyGroup, s, N: int):
    """Coefficients d_0..d_N of det(I - u L_s) and a propagated roundoff bound for each."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    t = np.array([transfer_trace(g, s_arr, n) for n in range(1, N + 1)])  # (N, len(s))
    d = np.zeros((N + 1, s_arr.size), dtype=complex)
    r = np.zeros((N + 1, s_arr.size))
    d[0] = 1.0
    at = np.abs(t)
    eps = np.finfo(float).eps
    for n in range(1, N + 1):
        d[n] = -sum(t[k - 1] * d[n - k] for k in range(1, n + 1)) / n
        # rounding in this step plus what the earlier coefficients carry in
        r[n] = sum(at[k - 1] * (eps * k * np.abs(d[n - k]) + r[n - k]) for k in range(1, n + 1)) / n
    return d, r


def cycle_coefficients(g: SchottkyGroup, s, N: int) -> np.ndarray:
    """Coefficients d_0..d_N of det(I - u L_s) = sum d_n u^n (Newton identities)."""
    return _cycle_series(g, s, N)[0]


def zeta_cycle(g: SchottkyGroup, s: complex, N: int = 12, burn_in: int = 4) -> ZetaEvaluation:
    """Truncated cycle expansion of exp(-sum_n Tr(L_s^n)/n) at u = 1.

    The error estimate is the last term plus the roundoff accumulated by the
    Newton recursion, which dominates where the traces are large (small Re s).
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    d, r = _cycle_series(g, s, N)
    d, r = d[:, 0], r[:, 0]
    mags = np.abs(d)
    growth = 0
    for n in range(max(burn_in, 1) + 1, N + 1):
        growth = growth + 1 if mags[n] > mags[n - 1] else 0
        if growth >= 3:
            warnings.warn(
                f"cycle expansion terms grow for 3 consecutive orders near n={n} at s={s}",
                DivergenceWarning,
                stacklevel=2,
            )
            break
    err = mags[-1] + r.sum() + np.finfo(float).eps * mags.sum()
    return ZetaEvaluation(complex(s), complex(d.sum()), "cycle", N, float(err))


def zeta_cycle_many(g: SchottkyGroup, s, N: int = 12) -> Tuple[np.ndarray, np.ndarray]:
    d, r = _cycle_series(g, s, N)
    eps = np.finfo(float).eps
    return d.sum(axis=0), np.abs(d[-1]) + r.sum(axis=0) + eps * np.abs(d).sum(axis=0)


# Euler product


def zeta_product(
    g: SchottkyGroup,
    s: complex,
    T_cut: float = 30.0,
    n_cut: Optional[int] = None,
    delta: Optional[float] = None,
    margin: float = DEFAULT_PRODUCT_MARGIN,
) -> ZetaEvaluation:
    """Truncated product over primitive oriented classes with l <= T_cut."""
    s = complex(s)
    if delta is None:
        from .thermo import hausdorff_dimension

        delta = 0.0 if g.p < 2 else hausdorff_dimension(g, check_eigenvalue=False).delta
    if s.real <= delta + margin:
        raise RegionError(f"Re(s) = {s.real} is not above delta + margin = {delta + margin}")
    spec = length_spectrum(g, T_cut)
    lengths = np.array([c.length for c in spec.primes])
    lmin = lengths.min()
    if n_cut is None:
        # drop factors with |e^{-(s+n) l}| < 1e-17
        n_cut = max(0, int(math.ceil(17 * math.log(10) / lmin - s.real)))
    logz = 0j
    for n in range(n_cut + 1):
        logz += np.sum(np.log1p(-np.exp(-(s + n) * lengths)))
    # tail: primes beyond T_cut contribute about sum e^{-Re(s) l}; bound with the
    # growth e^{delta l}: integral_T^inf e^{(delta - sigma) l} dl / (delta l)
    sig = s.real
    tail = math.exp((delta - sig) * T_cut) / max(sig - delta, 1e-12) / max(delta * T_cut, 1.0)
    return ZetaEvaluation(s, complex(np.exp(logz)), "product", n_cut, float(tail * abs(np.exp(logz))))


# transfer matrix


@dataclass(frozen=True)
class TransferMatrix:
    s: complex
    M: int
    matrix: np.ndarray
    p: int


class _Discretization:
    """s-independent parts of the transfer matrix in the scaled monomial basis.

    Block (i, t) with t = j + p maps coefficients on disc t to disc i through
    letter j (i != j):  A_it = F diag(exp(s log h_j')) B.
    """

    def __init__(self, g: SchottkyGroup, M: int):
        self.g = g
        self.M = M
        Q = 4 * M
        k = g.n_letters
        theta = 2 * np.pi * np.arange(Q) / Q
        unit = np.exp(1j * theta)
        kk = np.arange(M)
        self.F = np.exp(-1j * np.outer(kk, theta)) / (Q * BASIS_RADIUS ** kk[:, None])
        self.blocks = []
        for j in range(k):
            h = g.letters[j]
            t = g.inverse_letter(j)
            T = g.discs[t]
            for i, D in enumerate(g.discs):
                if i == j:
                    continue
                z = D.center + BASIS_RADIUS * D.radius * unit
                w = mobius_apply(h, z, g.model)
                u = (w - T.center) / T.radius
                B = u[:, None] ** kk[None, :]
                logd = transfer_log_weight(g, j, i, z)
                self.blocks.append((i, t, logd, B))

    def matrix(self, s) -> np.ndarray:
        s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
        k, M = self.g.n_letters, self.M
        A = np.zeros((s_arr.size, k * M, k * M), dtype=complex)
        growth = max(np.max(np.abs(s_arr.imag)) * np.max(np.abs(logd.imag)) for _, _, logd, _ in self.blocks)
        if growth > LOST_DIGITS_WARN * math.log(10):
            warnings.warn(
                f"transfer weights vary by e^{growth:.0f} on the sample circles; "
                f"expect about {growth / math.log(10):.0f} lost digits",
                ConditioningWarning,
                stacklevel=3,
            )
        for i, t, logd, B in self.blocks:
            W = np.exp(np.multiply.outer(s_arr, logd))  # (S, Q)
            A[:, i * M : (i + 1) * M, t * M : (t + 1) * M] = (self.F[None, :, :] * W[:, None, :]) @ B
        return A


def transfer_log_weight(g: SchottkyGroup, j: int, i: int, z):
    """log of the weight of letter j on disc i used in the transfer matrix.

    Half-plane model: log h_j', real on the real axis.  Disc model: the weight is
    gauged to h'(z) z / h(z), which is positive on the unit circle.  The gauge is
    conjugation by multiplication with z**s (branch fixed per disc), so traces
    and det(I - L_s) are unchanged while entries stay O(1) for large Im(s).
    """
    m = g.model_matrices[j]
    (a, b), (c, d) = m
    z0, L0 = g.branch_anchors[(j, i)]
    z = np.asarray(z)
    if g.model == "halfplane":
        return L0 - 2.0 * np.log((c * z + d) / (c * z0 + d))
    base = L0.real
    return (
        base
        + np.log(z / z0)
        - np.log((c * z + d) / (c * z0 + d))
        - np.log((a * z + b) / (a * z0 + b))
    )


@lru_cache(maxsize=32)
def _discretization(g: SchottkyGroup, M: int) -> _Discretization:
    return _Discretization(g, M)


def default_order(g: SchottkyGroup, target: float = 1e-12) -> int:
    """Smallest M with kappa^M < target, kappa the worst contraction ratio."""
    kappa = g.contraction_ratio
    if kappa >= 1:
        raise ValueError("group branches are not contracting")
    return max(4, int(math.ceil(math.log(target) / math.log(kappa))))


def build_transfer_matrix(g: SchottkyGroup, s: complex, M: Optional[int] = None) -> TransferMatrix:
    M = default_order(g) if M is None else M
    if M < 4:
        raise ValueError("M must be >= 4")
    if g.contraction_ratio ** M > 1e-10:
        warnings.warn(
            f"contraction ratio {g.contraction_ratio:.3f} leaves a spectral tail of "
            f"{g.contraction_ratio ** M:.1e} at M={M}",
            ConditioningWarning,
            stacklevel=2,
        )
    A = _discretization(g, M).matrix(s)[0]
    return TransferMatrix(complex(s), M, A, g.p)


def fredholm_many(g: SchottkyGroup, s, M: Optional[int] = None) -> np.ndarray:
    """det(I - A(s)) for an array of s values."""
    M = default_order(g) if M is None else M
    A = _discretization(g, M).matrix(s)
    n = A.shape[-1]
    return np.linalg.det(np.eye(n) - A)


def zeta_fredholm(g: SchottkyGroup, s: complex, M: Optional[int] = None) -> ZetaEvaluation:
    """det(I - L_s) from LU factorization of the discretized operator."""
    M = default_order(g) if M is None else M
    if M < 4:
        raise ValueError("M must be >= 4")
    if g.contraction_ratio ** M > 1e-10:
        warnings.warn(f"M={M} may be too small for contraction {g.contraction_ratio:.3f}", ConditioningWarning, stacklevel=2)
    val = complex(fredholm_many(g, s, M)[0])
    lower = complex(fredholm_many(g, s, M - 2)[0]) if M - 2 >= 1 else val
    # truncation (change from M-2 to M) plus the backward error of LU
    rounding = np.finfo(float).eps * 2 * g.p * M * max(1.0, abs(val))
    return ZetaEvaluation(complex(s), val, "fredholm", M, abs(val - lower) + rounding)


def leading_eigenvalue(g: SchottkyGroup, s: float, M: Optional[int] = None) -> complex:
    A = build_transfer_matrix(g, s, M).matrix
    ev = np.linalg.eigvals(A)
    return complex(ev[np.argmax(np.abs(ev))])


def eigenvalue_dimension(g: SchottkyGroup, M: Optional[int] = None, tol: float = 1e-12) -> float:
    """Zero of x -> log(leading eigenvalue of L_x) on (0, 1)."""
    f = lambda x: math.log(abs(leading_eigenvalue(g, x, M)))
    return brentq(f, 1e-9, 1.0, xtol=tol, rtol=1e-15)


def largest_real_zero(g: SchottkyGroup, M: Optional[int] = None, lo: float = 0.0, hi: float = 1.0, tol: float = 1e-13) -> float:
    """Largest zero of s -> det(I - L_s) on [lo, hi], scanning down from hi."""
    xs = np.linspace(hi, lo, 201)
    vals = fredholm_many(g, xs, M).real
    for a, b, fa, fb in zip(xs[:-1], xs[1:], vals[:-1], vals[1:]):
        if fa == 0:
            return float(a)
        if fa * fb < 0:
            f = lambda x: float(fredholm_many(g, [x], M)[0].real)
            return brentq(f, b, a, xtol=tol, rtol=1e-15)
    raise ValueError("no real zero found")


def conjugation_permutation(g: SchottkyGroup) -> List[int]:
    """Disc index permutation induced by complex conjugation of the geometry."""
    perm = []
    for D in g.discs:
        target = D.center.conjugate()
        k = int(np.argmin([abs(E.center - target) + abs(E.radius - D.radius) for E in g.discs]))
        perm.append(k)
    return perm


# resonances

DEFAULT_GRID_STEP = 0.05
NEWTON_TOL = 1e-10
MAX_PHASE_STEP = 0.3  # radians between consecutive contour samples


class ContourError(RuntimeError):
    """The argument principle could not be evaluated reliably on a contour."""


class CountMismatchError(RuntimeError):
    """Refined zeros disagree with the boundary winding number."""


@dataclass(frozen=True)
class Resonance:
    s: complex
    order: int
    newton_residual: float
    box: Tuple[float, float, float, float]
    method: str = "fredholm"
    M: int = 0
    box_id: int = 0


def parse_rect(text: str) -> Tuple[float, float, float, float]:
    """'re_min,re_max,im_min,im_max' -> tuple of floats."""
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 4:
        raise ValueError(f"rectangle needs 4 numbers, got {text!r}")
    r0, r1, i0, i1 = parts
    if not (r1 > r0 and i1 > i0):
        raise ValueError(f"empty rectangle {text!r}")
    return r0, r1, i0, i1


class _ZetaEvaluator:
    """Vectorized det(I - L_s) with optional thread-parallel chunks."""

    def __init__(self, g: SchottkyGroup, M: Optional[int] = None, threads: int = 1, chunk: int = 256):
        self.g = g
        self.M = default_order(g) if M is None else M
        self.threads = max(1, int(threads))
        self.chunk = chunk
        self.calls = 0

    def __call__(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=complex)).ravel()
        self.calls += s.size
        pieces = [s[k : k + self.chunk] for k in range(0, s.size, self.chunk)]
        f = lambda part: fredholm_many(self.g, part, self.M)
        if self.threads > 1 and len(pieces) > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(self.threads) as ex:
                out = list(ex.map(f, pieces))
        else:
            out = [f(part) for part in pieces]
        return np.concatenate(out) if out else np.zeros(0, complex)


def _phase_increments(values: np.ndarray) -> np.ndarray:
    return np.angle(np.roll(values, -1) / values)


def _rect_vertices(rect) -> np.ndarray:
    r0, r1, i0, i1 = rect
    return np.array([complex(r0, i0), complex(r1, i0), complex(r1, i1), complex(r0, i1)])


def _integer_winding(w: float) -> int:
    k = int(round(w))
    if abs(w - k) > 0.05:
        raise ContourError(f"non-integer winding number {w:.4f}")
    return k


def _circle_zeros(Z, c: complex, r: float, Q: int = 64):
    """Zeros of Z inside |s - c| < r from Fourier coefficients of log Z on the circle.

    On the circle, log Z(c + r e^{it}) - i m t has Fourier coefficient
    -p_n / (n r^n) at frequency -n, where p_n is the n-th power sum of the
    zeros (shifted by c).  Returns (m, zeros) with zeros from Newton's
    identities; the result is insensitive to how flat Z is near the zeros.
    """
    t = 2 * np.pi * np.arange(Q) / Q
    s = c + r * np.exp(1j * t)
    v = Z(s)
    if np.any(v == 0):
        raise ContourError("zero on the refinement circle")
    inc = _phase_increments(v)
    if np.max(np.abs(inc)) > 2 * np.pi / 3:
        raise ContourError("refinement circle too coarse")
    m = _integer_winding(inc.sum() / (2 * np.pi))
    if m <= 0:
        return m, []
    phase = np.concatenate([[np.angle(v[0])], np.angle(v[0]) + np.cumsum(inc[:-1])])
    f = np.log(np.abs(v)) + 1j * (phase - m * t)
    coef = np.fft.fft(f) / Q  # coef[k] ~ frequency +k; frequency -n at index Q-n
    psums = [-(n * r**n) * coef[(-n) % Q] for n in range(1, m + 1)]
    e = [1.0 + 0j]
    for n in range(1, m + 1):
        e.append(sum((-1) ** (k - 1) * e[n - k] * psums[k - 1] for k in range(1, n + 1)) / n)
    poly = [(-1) ** k * e[k] for k in range(m + 1)]
    roots = np.roots(poly) if m > 1 else np.array([-poly[1] / poly[0]])
    return m, list(c + roots)


def _newton(Z, s0: complex, max_iter: int = 40, m: int = 1, leash: float = math.inf):
    """Newton iteration with a central-difference derivative; stops when |step| < NEWTON_TOL."""
    s = complex(s0)
    val = complex(Z([s])[0])
    for _ in range(max_iter):
        h = 1e-6 * (1 + abs(s))
        fp, fm = Z([s + h, s - h])
        der = (fp - fm) / (2 * h)
        if der == 0 or not np.isfinite(der):
            break
        step = m * val / der
        if abs(s - step - s0) > leash:
            break
        s -= step
        val = complex(Z([s])[0])
        if abs(step) < NEWTON_TOL:
            break
    return s, abs(val)


def _sample_edges(Z, segments, spacing: float, max_rounds: int = 14):
    """Sample Z along open segments (a, b), bisecting until phase steps are small.

    Returns a list of (points, values) per segment, endpoints included.
    """
    pts = []
    for a, b in segments:
        n = max(1, int(math.ceil(abs(b - a) / spacing)))
        pts.append(a + (b - a) * np.arange(n + 1) / n)
    flat = Z(np.concatenate(pts))
    vals, k = [], 0
    for p in pts:
        vals.append(flat[k : k + p.size])
        k += p.size
    for _ in range(max_rounds):
        mids, where = [], []
        for e, (p, v) in enumerate(zip(pts, vals)):
            if np.any(v == 0) or not np.all(np.isfinite(v)):
                raise ContourError("zeta vanishes (numerically) on the contour")
            bad = np.nonzero(np.abs(np.angle(v[1:] / v[:-1])) > MAX_PHASE_STEP)[0]
            if bad.size:
                mids.append(0.5 * (p[bad] + p[bad + 1]))
                where.append((e, bad))
        if not mids:
            return list(zip(pts, vals))
        mv = Z(np.concatenate(mids))
        k = 0
        for (e, bad), m in zip(where, mids):
            pts[e] = np.insert(pts[e], bad + 1, m)
            vals[e] = np.insert(vals[e], bad + 1, mv[k : k + m.size])
            k += m.size
    raise ContourError("phase refinement limit reached; contour passes too close to a zero")


def _edge_moments(p: np.ndarray, v: np.ndarray, center: complex, kmax: int) -> np.ndarray:
    """sum over samples of (mid - center)^k * dlog Z for k = 0..kmax (midpoint rule)."""
    dlog = np.log(v[1:] / v[:-1])
    mid = 0.5 * (p[1:] + p[:-1]) - center
    return np.array([np.sum(mid**k * dlog) for k in range(kmax + 1)])


def winding_number(Z, vertices, spacing: float = 0.025) -> float:
    """Winding number of Z around 0 along the closed polygon through ``vertices``."""
    vertices = np.asarray(vertices, dtype=complex)
    edges = _sample_edges(Z, list(zip(vertices, np.roll(vertices, -1))), spacing)
    return float(sum(np.angle(v[1:] / v[:-1]).sum() for _, v in edges) / (2 * np.pi))


def _polish(Z, seeds, step: float, leash: float):
    """Newton-polish seeds, merge coincident ones, refine clusters on small circles."""
    polished = []
    for z0 in seeds:
        z, _ = _newton(Z, z0, leash=leash)
        polished.append(z)
    centers: List[complex] = []
    for z in polished:
        if not any(abs(z - c) < 1e-4 for c in centers):
            centers.append(z)
    out = []
    for c in centers:
        others = [abs(c - d) for d in centers if d is not c]
        radius = min(0.4 * step, 0.45 * min(others)) if others else 0.4 * step
        radius = max(radius, 1e-4)
        for _ in range(4):
            try:
                m, zs = _circle_zeros(Z, c, radius)
                break
            except ContourError:
                radius *= 0.6
        else:
            continue
        if m <= 0:
            continue
        if m > 1 and _all_close(zs):
            out.append((complex(np.mean(zs)), m))
        else:
            out.extend((complex(z), 1) for z in zs)
    return out


def _all_close(zs, tol: float = 1e-5) -> bool:
    zs = np.asarray(zs)
    return bool(np.max(np.abs(zs - zs.mean())) < tol)


def _dedupe(found, tol: float = 1e-7):
    out: List[Tuple[complex, int]] = []
    for z, m in found:
        if not any(abs(z - w) < tol for w, _ in out):
            out.append((z, m))
    return out


def _inside(z: complex, rect, tol: float = 0.0) -> bool:
    r0, r1, i0, i1 = rect
    return r0 - tol <= z.real <= r1 + tol and i0 - tol <= z.imag <= i1 + tol


def _cell_zeros(Z, cell, step: float, depth: int, edges=None):
    """Zeros inside a rectangular cell: (winding count, list of (zero, order))."""
    verts = _rect_vertices(cell)
    if edges is None:
        edges = _sample_edges(Z, list(zip(verts, np.roll(verts, -1))), step / 2)
    n = _integer_winding(sum(np.angle(v[1:] / v[:-1]).sum() for _, v in edges) / (2 * np.pi))
    if n == 0:
        return 0, []
    if n < 0:
        raise ContourError(f"negative winding number {n} on {cell}")
    c = complex(0.5 * (cell[0] + cell[1]), 0.5 * (cell[2] + cell[3]))
    mom = sum(_edge_moments(p, v, c, n) for p, v in edges) / (2j * np.pi)
    e = [1.0 + 0j]
    for k in range(1, n + 1):
        e.append(sum((-1) ** (j - 1) * e[k - j] * mom[j] for j in range(1, k + 1)) / k)
    seeds = c + np.roots([(-1) ** k * e[k] for k in range(n + 1)])
    diag = abs(verts[2] - verts[0])
    found = [(z, m) for z, m in _polish(Z, seeds, step, leash=diag) if _inside(z, cell, 1e-9)]
    if sum(m for _, m in found) == n:
        return n, found
    if depth <= 0:
        raise CountMismatchError(f"{sum(m for _, m in found)} refined zeros (with order) but winding number {n} on {cell}")
    r0, r1, i0, i1 = cell
    rm, im_ = r0 + 0.4615 * (r1 - r0), i0 + 0.4615 * (i1 - i0)
    found = []
    for q in ((r0, rm, i0, im_), (rm, r1, i0, im_), (r0, rm, im_, i1), (rm, r1, im_, i1)):
        found += _cell_zeros(Z, q, step / 2, depth - 1)[1]
    found = _dedupe(found)
    if sum(m for _, m in found) != n:
        raise CountMismatchError(f"{sum(m for _, m in found)} refined zeros (with order) but winding number {n} on {cell}")
    return n, found


class ResonanceList(list):
    """Resonances plus the boundary winding number of the counting contour.

    ``refined_count`` is the order-weighted number of refined zeros inside the
    contour (which may extend past the requested rectangle); it equals
    ``winding`` for every successful search.
    """

    contour: Tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    winding: int = 0
    refined_count: int = 0
    evaluations: int = 0


def _grid_lines(lo: float, hi: float, size: float, jitter: float) -> np.ndarray:
    """Cell boundaries on [lo, hi]; interior lines are shifted off the regular
    lattice so that symmetric zeros (e.g. on the real or imaginary axis) do not
    sit on them."""
    n = max(1, int(math.ceil((hi - lo) / size - 1e-9)))
    k = np.arange(n + 1, dtype=float)
    k[1:-1] += jitter * np.sin(2.39996 * k[1:-1] + 1.0)
    return lo + (hi - lo) * k / n


def _tile_search(Z, rect, step, size, eta, jitter, max_depth):
    R = (rect[0] - eta, rect[1] + eta, rect[2] - eta, rect[3] + eta)
    xs, ys = _grid_lines(R[0], R[1], size, jitter), _grid_lines(R[2], R[3], size, jitter)
    segs = [(complex(x, ys[j]), complex(x, ys[j + 1])) for x in xs for j in range(len(ys) - 1)]
    segs += [(complex(xs[i], y), complex(xs[i + 1], y)) for y in ys for i in range(len(xs) - 1)]
    sampled = _sample_edges(Z, segs, step / 2)
    nv = len(xs) * (len(ys) - 1)
    vert = lambda a, j: sampled[a * (len(ys) - 1) + j]
    horiz = lambda i, b: sampled[nv + b * (len(xs) - 1) + i]
    rev = lambda e: (e[0][::-1], e[1][::-1])

    zeros: List[Tuple[complex, int]] = []
    cell_total = 0
    for i in range(len(xs) - 1):
        for j in range(len(ys) - 1):
            cell = (xs[i], xs[i + 1], ys[j], ys[j + 1])
            edges = [horiz(i, j), vert(i + 1, j), rev(horiz(i, j + 1)), rev(vert(i, j))]
            n, found = _cell_zeros(Z, cell, step, max_depth, edges)
            cell_total += n
            zeros += found
    zeros = _dedupe(zeros)
    outer = [horiz(i, 0) for i in range(len(xs) - 1)]
    outer += [vert(len(xs) - 1, j) for j in range(len(ys) - 1)]
    outer += [rev(horiz(i, len(ys) - 1)) for i in range(len(xs) - 1)]
    outer += [rev(vert(0, j)) for j in range(len(ys) - 1)]
    winding = _integer_winding(sum(np.angle(v[1:] / v[:-1]).sum() for _, v in outer) / (2 * np.pi))
    total = sum(m for _, m in zeros)
    if winding != total or cell_total != total:
        raise CountMismatchError(f"{total} refined zeros (with order) but winding number {winding} on {R}")
    return R, zeros, winding


def find_resonances(
    g: SchottkyGroup,
    rect,
    grid_step: float = DEFAULT_GRID_STEP,
    M: Optional[int] = None,
    threads: int = 1,
    cell_factor: int = 4,
    max_depth: int = 3,
    box_id: int = 0,
) -> ResonanceList:
    """Zeros of Z = det(I - L_s) in the closed rectangle (re_min, re_max, im_min, im_max).

    The rectangle, pushed outward by a quarter step, is tiled by cells of side
    ``cell_factor * grid_step``.  Z is sampled on all cell edges with spacing
    grid_step/2 (bisected where the phase moves by more than 0.3 rad), which
    gives each cell's zero count and the power sums of its zeros.  Roots of
    the resulting polynomial seed Newton iteration; the order of each zero is
    the winding number on a small circle around it, and the position is
    refined from Fourier moments of log Z on that circle.  Cells whose refined
    zeros do not match their count are split into quadrants.
    """
    if isinstance(rect, str):
        rect = parse_rect(rect)
    rect = tuple(float(x) for x in rect)
    if not all(map(math.isfinite, rect)) or not (rect[1] > rect[0] and rect[3] > rect[2]):
        raise ValueError("rect must be bounded and nonempty")
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    Z = _ZetaEvaluator(g, M, threads)
    last = None
    for attempt in range(4):  # initial tiling plus three nudges
        eta = (0.25 + 0.13 * attempt) * grid_step
        try:
            R, zeros, winding = _tile_search(Z, rect, grid_step, cell_factor * grid_step, eta, 0.11 + 0.07 * attempt, max_depth)
            break
        except (ContourError, CountMismatchError) as exc:
            last = exc
    else:
        raise type(last)(f"{last} (after 3 nudges)")
    out = ResonanceList()
    for z, m in zeros:
        if _inside(z, rect, tol=1e-9):
            out.append(Resonance(z, m, abs(complex(Z([z])[0])), rect, "fredholm", Z.M, box_id))
    out.sort(key=lambda r: (round(r.s.imag, 9), round(r.s.real, 9)))
    out.contour, out.winding, out.evaluations = R, winding, Z.calls
    out.refined_count = sum(m for _, m in zeros)
    return out


def write_resonance_csv(resonances: List[Resonance], path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["re", "im", "order", "newton_residual", "method", "M", "box_id"])
        for r in resonances:
            w.writerow([f"{r.s.real:.15g}", f"{r.s.imag:.15g}", r.order, f"{r.newton_residual:.3e}", r.method, r.M, r.box_id])


# strip diagnostics


@dataclass(frozen=True)
class StripBounds:
    proven: float
    conjectural: float


def theorem_strip(delta: float) -> StripBounds:
    """Proven lower bound on the essential spectral gap, and the conjectured value delta/2."""
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    proven = delta * (1 - 2 * delta) / 2 if delta <= 0.5 else delta / 2 - 0.25
    return StripBounds(proven, delta / 2)


@dataclass(frozen=True)
class StripCensus:
    sigma: float
    T: float
    count: int
    distinct: int
    windows: Tuple[float, ...]
    counts: Tuple[int, ...]
    weyl_exponent: float


def strip_census(resonances: List[Resonance], sigma: float, T: float, n_windows: int = 8) -> StripCensus:
    """N(sigma, T) = #{Re s >= sigma, 0 <= Im s <= T} with order, plus a log-log growth fit."""
    def n_upto(t):
        sel = [r for r in resonances if r.s.real >= sigma and 0.0 <= r.s.imag <= t]
        return sum(r.order for r in sel), len(sel)

    count, distinct = n_upto(T)
    windows = tuple(T * (k + 1) / n_windows for k in range(n_windows))
    counts = tuple(n_upto(t)[0] for t in windows)
    pts = [(math.log(t), math.log(c)) for t, c in zip(windows, counts) if c > 0]
    if len(pts) >= 2 and len({x for x, _ in pts}) >= 2:
        x, y = np.array(pts).T
        slope = float(np.polyfit(x, y, 1)[0])
    else:
        slope = float("nan")
    return StripCensus(float(sigma), float(T), count, distinct, windows, counts, slope)

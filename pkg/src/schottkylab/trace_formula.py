"""Approximate trace formula, Gaussian mean-square sums and multiplicity moments.

The test function is the plateau bump phi (support [-2, 2], phi = 1 on
[-1, 1]) shifted and modulated: phi_{xi,T}(x) = e^{-i xi x} phi(x - T).
Its transform psi_{xi,T}(s) = int e^{su} phi_{xi,T}(u) du is entire in s.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad

from .schottky import SchottkyGroup
from .words import LengthSpectrum, TruncationWarning, length_spectrum

QUAD_TOL = 1e-12
GL_NODES = 16


class IncompleteSpectrumError(RuntimeError):
    """The length spectrum cannot be certified complete on the required window."""


class CoverageError(RuntimeError):
    """The resonance list does not reach high enough for the requested tail tolerance."""


# bump


def _smooth_step(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def bump(x):
    """S(2-|x|) / (S(2-|x|) + S(|x|-1)), S(t) = e^{-1/t} for t > 0."""
    a = np.abs(np.asarray(x, dtype=float))
    u = _smooth_step(2.0 - a)
    v = _smooth_step(a - 1.0)
    den = u + v
    out = np.where(den > 0, u / np.where(den > 0, den, 1.0), 0.0)
    out = np.where(a <= 1.0, 1.0, out)
    return out if out.ndim else float(out)


def _plateau_hat(w):
    """int_{-1}^{1} e^{-iwu} du = 2 sin(w)/w."""
    w = np.asarray(w, dtype=complex)
    small = np.abs(w) < 1e-4
    ws = np.where(small, 1.0, w)
    return np.where(small, 2.0 - w * w / 3.0, 2.0 * np.sin(ws) / ws)


def bump_hat(w: complex) -> complex:
    """phi_hat(w) = int e^{-iwu} phi(u) du by adaptive quadrature on the two ramps."""
    w = complex(w)
    a, b = w.real, w.imag  # e^{-iwu} = e^{bu} (cos(au) - i sin(au))
    total = complex(_plateau_hat(w))
    for lo, hi in ((-2.0, -1.0), (1.0, 2.0)):
        f = lambda u: math.exp(b * u) * bump(u)
        if a == 0.0:
            re = quad(f, lo, hi, epsabs=QUAD_TOL, epsrel=0, limit=200)[0]
            im = 0.0
        else:
            re = quad(f, lo, hi, weight="cos", wvar=a, epsabs=QUAD_TOL, epsrel=0, limit=200)[0]
            im = -quad(f, lo, hi, weight="sin", wvar=a, epsabs=QUAD_TOL, epsrel=0, limit=200)[0]
        total += complex(re, im)
    return total


def _ramp_rule(max_freq: float):
    """Composite Gauss-Legendre nodes/weights on [1, 2] fine enough for frequency max_freq."""
    panels = int(max(8, math.ceil(max_freq / 3.0) + 8))
    x, w = np.polynomial.legendre.leggauss(GL_NODES)
    edges = np.linspace(1.0, 2.0, panels + 1)
    h = np.diff(edges)
    nodes = (edges[:-1, None] + 0.5 * h[:, None] * (x[None, :] + 1)).ravel()
    weights = (0.5 * h[:, None] * w[None, :]).ravel()
    return nodes, weights


def bump_hat_many(w) -> np.ndarray:
    """Vectorized phi_hat on an array of complex arguments (composite Gauss-Legendre)."""
    w = np.asarray(w, dtype=complex)
    flat = w.ravel()
    if flat.size == 0:
        return w.copy()
    nodes, weights = _ramp_rule(float(np.max(np.abs(flat.real))))
    vals = bump(nodes) * weights
    out = _plateau_hat(flat).astype(complex)
    for sign in (1.0, -1.0):
        u = sign * nodes
        out += np.exp(-1j * np.multiply.outer(flat, u)) @ vals
    return out.reshape(w.shape)


@dataclass(frozen=True)
class TestFunction:
    """phi_{xi,T}(x) = scale * e^{-i xi x} * phi(x - T)."""

    xi: float = 0.0
    T: float = 0.0
    scale: float = 1.0

    __test__ = False  # not a pytest class

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.scale * np.exp(-1j * self.xi * x) * bump(x - self.T)

    @property
    def support(self) -> Tuple[float, float]:
        return self.T - 2.0, self.T + 2.0


def psi_eval(tf: TestFunction, s: complex) -> complex:
    """psi_{xi,T}(s) = e^{-i xi T} e^{sT} phi_hat(xi + i s), adaptive quadrature."""
    s = complex(s)
    return tf.scale * complex(np.exp(-1j * tf.xi * tf.T + s * tf.T)) * bump_hat(tf.xi + 1j * s)


def psi_many(tf: TestFunction, s) -> np.ndarray:
    s = np.asarray(s, dtype=complex)
    return tf.scale * np.exp(-1j * tf.xi * tf.T + s * tf.T) * bump_hat_many(tf.xi + 1j * s)


# geodesic side


def _spectrum_for(g: SchottkyGroup, upto: float, spectrum: Optional[LengthSpectrum]) -> LengthSpectrum:
    if spectrum is not None and spectrum.T >= upto and spectrum.complete:
        return spectrum
    if spectrum is not None and spectrum.T < upto:
        raise IncompleteSpectrumError(f"spectrum computed to {spectrum.T}, need {upto}")
    with warnings.catch_warnings():
        warnings.simplefilter("error", TruncationWarning)
        try:
            spec = length_spectrum(g, max(upto, 0.0))
        except TruncationWarning as exc:
            raise IncompleteSpectrumError(str(exc)) from exc
    if not spec.complete:
        raise IncompleteSpectrumError(f"length spectrum not certified complete up to {upto}")
    return spec


def geodesic_side(g: SchottkyGroup, tf: TestFunction, spectrum: Optional[LengthSpectrum] = None) -> complex:
    """sum over k >= 1 and primitive oriented gamma of l(gamma)/(1 - e^{-k l}) * phi_{xi,T}(k l)."""
    lo, hi = tf.support
    if hi <= 0:
        return 0j
    spec = _spectrum_for(g, hi, spectrum)
    total = 0j
    for ell, _, c in spec.pairs:
        if lo < ell < hi:
            total += c.length / -math.expm1(-ell) * complex(tf(ell))
    return total


# resonance side


@dataclass(frozen=True)
class TraceCheckReport:
    T: float
    rho: float
    geodesic_side: complex
    resonance_side: complex
    residual: complex
    bound_estimate: float
    eps: float
    n_resonances: int
    coverage_height: float
    tail_estimate: float
    min_abs_zeta_on_line: float = float("nan")

    @property
    def residual_abs(self) -> float:
        return abs(self.residual)


def _abs_psi_line(tf: TestFunction, sigma: float, n: int = 1 << 16, period: float = 64.0):
    """|psi(sigma + ix)| on a uniform x-grid (spacing 2 pi / period, |x + ... | up to pi n / period).

    On the line, psi = e^{-i xi T} e^{sT} phi_hat(a + i sigma) with a = xi - x, and
    phi_hat(a_k + i sigma) for a_k = 2 pi k / period is a single FFT of the
    trapezoid samples of phi(u) e^{sigma u}, spectrally accurate for the
    compactly supported smooth bump.
    """
    h = period / n
    u = -period / 2 + h * np.arange(n)
    f = bump(u) * np.exp(sigma * u)
    F = h * np.fft.fft(f) * np.where(np.arange(n) % 2, -1.0, 1.0)
    a = 2 * np.pi * np.fft.fftfreq(n, d=h)
    x = tf.xi - a
    vals = abs(tf.scale) * math.exp(sigma * tf.T) * np.abs(F)
    order = np.argsort(x)
    return x[order], vals[order], 2 * np.pi / period


def bound_estimate(tf: TestFunction, sigma: float, delta: float) -> float:
    """int (1+|x|)^delta |psi(sigma + ix)| dx over the real line."""
    x, v, dx = _abs_psi_line(tf, sigma)
    return float(np.sum((1 + np.abs(x)) ** delta * v) * dx)


def psi_tail(tf: TestFunction, sigma: float, height: float) -> float:
    """int over |x| > height of |psi(sigma + ix)| dx."""
    x, v, dx = _abs_psi_line(tf, sigma)
    return float(np.sum(v[np.abs(x) > height]) * dx)


def resonance_check(
    g: SchottkyGroup,
    tf: TestFunction,
    rho: float,
    resonances,
    coverage_height: float,
    eps: float = 0.01,
    delta: Optional[float] = None,
    tail_tol: float = 1e-10,
    spectrum: Optional[LengthSpectrum] = None,
    line_check_height: Optional[float] = 50.0,
    M: Optional[int] = None,
) -> TraceCheckReport:
    """Both sides of the approximate trace formula for tf with F_rho = {Re(s) > rho}.

    ``resonances`` holds (s, order) pairs or Resonance objects, complete in
    {Re(s) > rho, |Im(s)| <= coverage_height}; zeros above the real axis are
    mirrored when their conjugate is missing.  Raises CoverageError when the
    tail of |psi| beyond coverage_height exceeds ``tail_tol``.
    """
    pairs = _resonance_pairs(resonances)
    mirrored = list(pairs)
    for s, m in pairs:
        if abs(s.imag) > 1e-9 and not any(abs(s.conjugate() - t) < 1e-7 for t, _ in pairs):
            mirrored.append((s.conjugate(), m))
    F = [(s, m) for s, m in mirrored if s.real > rho and abs(s.imag) <= coverage_height]
    if delta is None:
        if g.p < 2:
            delta = 0.0
        else:
            from .thermo import hausdorff_dimension

            delta = hausdorff_dimension(g, check_eigenvalue=False).delta

    tail = psi_tail(tf, rho, coverage_height)
    if tail > tail_tol:
        raise CoverageError(
            f"tail of |psi| beyond |Im s| = {coverage_height} is {tail:.2e} > {tail_tol:.0e}; search higher"
        )

    # choose eps_tilde in [eps, 2 eps] with Z bounded away from 0 on the line
    eps_t = eps
    zmin = float("nan")
    if line_check_height:
        from .zeta import fredholm_many

        xs = np.arange(-line_check_height, line_check_height + 1e-12, 0.05)
        for _ in range(5):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                zmin = float(np.min(np.abs(fredholm_many(g, rho + eps_t + 1j * xs, M))))
            if zmin > 1e-6 or eps_t + eps / 4 > 2 * eps:
                break
            eps_t += eps / 4

    geo = geodesic_side(g, tf, spectrum)
    res_side = complex(np.sum(np.array([m for _, m in F]) * psi_many(tf, [s for s, _ in F]))) if F else 0j
    return TraceCheckReport(
        T=tf.T,
        rho=rho,
        geodesic_side=geo,
        resonance_side=complex(res_side),
        residual=geo - res_side,
        bound_estimate=bound_estimate(tf, rho + eps_t, delta),
        eps=eps_t,
        n_resonances=sum(m for _, m in F),
        coverage_height=coverage_height,
        tail_estimate=tail,
        min_abs_zeta_on_line=zmin,
    )


def _resonance_pairs(resonances) -> List[Tuple[complex, int]]:
    out = []
    for r in resonances:
        s, m = (r.s, r.order) if hasattr(r, "s") else (complex(r[0]), int(r[1]))
        out.append((complex(s), m))
    return out


def residual_profile(
    g: SchottkyGroup,
    T: float,
    rho: float,
    resonances,
    xis,
    spectrum: Optional[LengthSpectrum] = None,
) -> np.ndarray:
    """Residual S_{xi,T} - sum_{F_rho} psi_{xi,T}(lambda) for every xi in ``xis``."""
    xis = np.asarray(xis, dtype=float)
    spec = _spectrum_for(g, T + 2.0, spectrum)
    pairs = [(ell, c.length) for ell, _, c in spec.pairs if T - 2.0 < ell < T + 2.0]
    if pairs:
        ells, prim = np.array(pairs).T
        w = prim / -np.expm1(-ells) * bump(ells - T)
        geo = np.exp(-1j * np.multiply.outer(xis, ells)) @ w
    else:
        geo = np.zeros(xis.shape, complex)
    res = np.zeros(xis.shape, complex)
    for lam, m in _resonance_pairs(resonances):
        if lam.real > rho:
            res += m * np.exp(-1j * xis * T + lam * T) * bump_hat_many(xis + 1j * lam)
    return geo - res


@dataclass(frozen=True)
class ScalingCheck:
    T1: float
    T2: float
    sup1: float
    sup2: float
    observed_ratio: float
    predicted_ratio: float

    @property
    def discrepancy(self) -> float:
        """max(q, 1/q) with q = observed / predicted."""
        q = self.observed_ratio / self.predicted_ratio
        return max(q, 1.0 / q)


def residual_scaling(
    g: SchottkyGroup,
    rho: float,
    resonances,
    T1: float,
    T2: float,
    xis=None,
    spectrum: Optional[LengthSpectrum] = None,
) -> ScalingCheck:
    """Compare sup_xi |residual(xi, T)| at two T values with the e^{rho T} prediction.

    At fixed xi the residual is a sum of oscillating terms whose phases move
    with T; the supremum over a xi-window removes the phase dependence, since
    |psi_{xi,T}(lambda)| = e^{Re(lambda) T} |phi_hat(xi + i lambda)|.
    """
    xis = np.arange(-30.0, 30.0, 0.02) if xis is None else np.asarray(xis, dtype=float)
    spec = _spectrum_for(g, max(T1, T2) + 2.0, spectrum)
    s1 = float(np.max(np.abs(residual_profile(g, T1, rho, resonances, xis, spec))))
    s2 = float(np.max(np.abs(residual_profile(g, T2, rho, resonances, xis, spec))))
    return ScalingCheck(T1, T2, s1, s2, s2 / s1, math.exp(rho * (T2 - T1)))


def cylinder_resonances(ell: float, k_max: int, height: float) -> List[Tuple[complex, int]]:
    """Zeros -k + 2 pi i m / ell (order 2) of the hyperbolic cylinder's zeta function."""
    out = []
    m_max = int(math.floor(height * ell / (2 * math.pi)))
    for k in range(k_max + 1):
        for m in range(-m_max, m_max + 1):
            out.append((complex(-k, 2 * math.pi * m / ell), 2))
    return out


def write_trace_report_csv(reports: Sequence[TraceCheckReport], path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["T", "rho", "geodesic_side_re", "geodesic_side_im", "resonance_side_re", "resonance_side_im", "residual_abs", "bound_estimate"])
        for r in reports:
            w.writerow(
                [
                    f"{r.T:.10g}",
                    f"{r.rho:.10g}",
                    f"{r.geodesic_side.real:.15g}",
                    f"{r.geodesic_side.imag:.15g}",
                    f"{r.resonance_side.real:.15g}",
                    f"{r.resonance_side.imag:.15g}",
                    f"{r.residual_abs:.6e}",
                    f"{r.bound_estimate:.6e}",
                ]
            )


# mean square


@dataclass(frozen=True)
class MeanSquare:
    sigma: float
    T: float
    G: float
    diagonal: float
    n_lengths: int


def _window_weights(g: SchottkyGroup, T: float, spectrum: Optional[LengthSpectrum]):
    """Lengths in (T-2, T+2) with w = (sum of prime lengths) / (1 - e^{-l}) and phi(l - T)."""
    spec = _spectrum_for(g, T + 2.0, spectrum)
    ells, wts = [], []
    for e in spec.entries:
        if T - 2.0 < e.ell < T + 2.0:
            ells.append(e.ell)
            wts.append(e.weight / -math.expm1(-e.ell))
    ells = np.array(ells)
    return ells, np.array(wts) * bump(ells - T) if ells.size else np.zeros(0)


def S_xi(g: SchottkyGroup, xi, T: float, spectrum: Optional[LengthSpectrum] = None) -> np.ndarray:
    """S_{xi,T} = sum_l w_l e^{-i xi l} phi(l - T), vectorized in xi."""
    ells, c = _window_weights(g, T, spectrum)
    xi = np.asarray(xi, dtype=float)
    return np.exp(-1j * np.multiply.outer(xi, ells)) @ c


def mean_square_G(g: SchottkyGroup, sigma: float, T: float, spectrum: Optional[LengthSpectrum] = None) -> MeanSquare:
    """G(sigma, T) = sqrt(pi) sum_{l,l'} c_l c_l' exp(-(l - l')^2 / (4 sigma)) and its diagonal."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    ells, c = _window_weights(g, T, spectrum)
    if ells.size == 0:
        return MeanSquare(sigma, T, 0.0, 0.0, 0)
    d = ells[:, None] - ells[None, :]
    G = math.sqrt(math.pi) * float(c @ np.exp(-d * d / (4 * sigma)) @ c)
    diag = math.sqrt(math.pi) * float(c @ c)
    return MeanSquare(sigma, T, G, diag, int(ells.size))


def mean_square_quadrature(g: SchottkyGroup, sigma: float, T: float, spectrum: Optional[LengthSpectrum] = None) -> float:
    """sqrt(sigma) int e^{-sigma xi^2} |S_{xi,T}|^2 d xi by direct quadrature in xi."""
    ells, c = _window_weights(g, T, spectrum)
    if ells.size == 0:
        return 0.0
    f = lambda x: math.exp(-sigma * x * x) * abs(complex(S_xi(g, x, T, spectrum))) ** 2
    # substitute xi = t / sqrt(sigma) to keep the Gaussian at unit width
    h = lambda t: f(t / math.sqrt(sigma))
    val, _ = quad(h, -np.inf, np.inf, epsabs=1e-11, epsrel=1e-12, limit=2000)
    return float(val)


# multiplicities


@dataclass
class MultiplicityMoments:
    T: float
    m_sum: int
    m2_sum: int
    distinct: int
    ladder: Tuple[float, ...] = ()
    m2_ladder: Tuple[int, ...] = ()
    distinct_ladder: Tuple[int, ...] = ()
    m2_exponent: float = float("nan")
    distinct_exponent: float = float("nan")
    trace_cluster_max: Optional[int] = None
    extra: Dict[str, float] = field(default_factory=dict)


def _window(spec: LengthSpectrum, T: float):
    m = np.array([e.multiplicity for e in spec.entries if T - 1.0 <= e.ell <= T + 1.0], dtype=int)
    return int(m.sum()), int((m * m).sum()), int(m.size)


def _fit_exponent(T, y) -> float:
    T = np.asarray(T, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = y > 0
    if ok.sum() < 2:
        return float("nan")
    # log y = a T - 2 log T + b for m^2 sums; a plain linear fit in T is used for all ladders
    return float(np.polyfit(T[ok], np.log(y[ok]), 1)[0])


def multiplicity_moments(
    g: SchottkyGroup,
    T: float,
    ladder: Optional[Sequence[float]] = None,
    spectrum: Optional[LengthSpectrum] = None,
) -> MultiplicityMoments:
    """Window sums of m(l) and m(l)^2 over [T-1, T+1], with exponent fits over a T-ladder."""
    ladder = tuple(float(t) for t in (ladder if ladder is not None else [T]))
    top = max(max(ladder), T) + 1.0
    spec = _spectrum_for(g, top, spectrum)
    m_sum, m2_sum, distinct = _window(spec, T)
    rows = [_window(spec, t) for t in ladder]
    out = MultiplicityMoments(
        T=T,
        m_sum=m_sum,
        m2_sum=m2_sum,
        distinct=distinct,
        ladder=ladder,
        m2_ladder=tuple(r[1] for r in rows),
        distinct_ladder=tuple(r[2] for r in rows),
    )
    if len(ladder) >= 2:
        out.m2_exponent = _fit_exponent(ladder, out.m2_ladder)
        out.distinct_exponent = _fit_exponent(ladder, out.distinct_ladder)
    if g.integer_trace:
        out.trace_cluster_max = trace_cluster_max(spec)
    return out


def trace_cluster_max(spec: LengthSpectrum) -> int:
    """max over integers n of #(distinct |tr(gamma^k)|) in [n, n+1], over the spectrum's pairs."""
    from .words import _chebyshev_trace

    traces = sorted({_chebyshev_trace(abs(c.trace), k) for _, k, c in spec.pairs if c.trace is not None})
    if not traces:
        return 0
    tr = np.array(traces, dtype=float)
    best = 0
    for n in np.unique(np.floor(tr)):
        best = max(best, int(np.sum((tr >= n) & (tr <= n + 1))))
    return best

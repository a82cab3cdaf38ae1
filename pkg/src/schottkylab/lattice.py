"""Orbit counting N(T; z, z'), Poincare series partial sums and residual analysis."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad

from .moebius import check_point, distance_to_geodesic, geodesic_separation, hyperbolic_distance, mobius_apply
from .schottky import SchottkyGroup
from .words import Word

PRUNE_MARGIN = 1e-9
DEFAULT_BUDGET = 5_000_000


class SearchBudgetError(RuntimeError):
    """Node budget exhausted; ``partial`` holds the count so far."""

    def __init__(self, message: str, partial: "OrbitCount"):
        super().__init__(message)
        self.partial = partial


class DegenerateFitError(ValueError):
    pass


@dataclass
class OrbitCount:
    T: float
    z: complex
    zp: complex
    N: int
    pruned_nodes: int = 0
    visited_nodes: int = 0
    elements: Optional[List[Tuple[Word, float]]] = None


def default_points(g: SchottkyGroup) -> Tuple[complex, complex]:
    """Origin of the disc model and a point off the symmetry axes, in g's model."""
    z, zp = 0j, complex(0.137, 0.291)
    if g.model == "halfplane":
        from .moebius import to_halfplane

        z, zp = to_halfplane(z), to_halfplane(zp)
    return complex(z), complex(zp)


def _letter_matrices(g: SchottkyGroup) -> List[np.ndarray]:
    return [np.asarray(m, dtype=complex) for m in g.model_matrices]


def _apply(m: np.ndarray, z: complex) -> complex:
    return (m[0, 0] * z + m[0, 1]) / (m[1, 0] * z + m[1, 1])


def _base_adjugate(z: complex, model: str) -> np.ndarray:
    """Adjugate (inverse up to scale) of a map sending the base point (0 or i) to z."""
    z = complex(z)
    if model == "disc":
        return np.array([[1.0, -z], [-z.conjugate(), 1.0]])
    return np.array([[1.0, -z.real], [0.0, z.imag]], dtype=complex)


def _base_map(z: complex, model: str) -> np.ndarray:
    z = complex(z)
    if model == "disc":
        return np.array([[1.0, z], [z.conjugate(), 1.0]])
    return np.array([[z.imag, z.real], [0.0, 1.0]], dtype=complex)


def orbit_distances(Ms, z: complex, zp: complex, model: str) -> np.ndarray:
    """d(z, M z') for a stack of matrices, from the matrix entries.

    With N = A_z^{-1} M A_{z'} normalized to determinant 1, sinh(d/2) is |N_12|
    in the disc and |(N_11 - N_22, N_12 + N_21)| / 2 in the half-plane.  Unlike
    the point formula this does not cancel when M z' is near the boundary.
    """
    N = _base_adjugate(z, model) @ np.asarray(Ms, dtype=complex) @ _base_map(zp, model)
    det = N[..., 0, 0] * N[..., 1, 1] - N[..., 0, 1] * N[..., 1, 0]
    scale = np.sqrt(np.abs(det))
    if model == "disc":
        q = np.abs(N[..., 0, 1]) / scale
    else:
        q = np.hypot(np.abs(N[..., 0, 0] - N[..., 1, 1]), np.abs(N[..., 0, 1] + N[..., 1, 0])) / (2 * scale)
    return 2.0 * np.arcsinh(q)


def reduce_to_fundamental(g: SchottkyGroup, z: complex, max_steps: int = 10_000) -> Tuple[complex, List[int]]:
    """eta z outside all discs, with eta given as the list of letters applied (first applied first).

    A point in disc j is pushed out by letter j, which maps disc j onto the
    exterior of disc j + p; the number of steps is the word length of eta.
    """
    mats = _letter_matrices(g)
    applied: List[int] = []
    for _ in range(max_steps):
        j = None
        for i, D in enumerate(g.discs):
            if abs(z - D.center) < D.radius:
                j = i
                break
        if j is None:
            return z, applied
        z = complex(_apply(mats[j], z))
        applied.append(j)
    raise RuntimeError("point did not leave the discs; is it inside the model?")


def _image_disc(m: np.ndarray, center: complex, radius: float) -> Tuple[complex, float]:
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    if abs(c) < 1e-300:
        return (a * center + b) / d, radius * abs(a / d)
    mid = c * center + d
    rho = abs(c) * radius
    gap = abs(mid) ** 2 - rho * rho
    inv_center = mid.conjugate() / gap
    return a / c - inv_center / c, rho / gap / abs(c)


def orbit_count(
    g: SchottkyGroup,
    z: complex,
    zp: complex,
    T: float,
    keep_elements: bool = False,
    budget: int = DEFAULT_BUDGET,
) -> OrbitCount:
    """N(T; z, z') = #{gamma : d(z, gamma z') <= T} by pruned depth-first search.

    Both points are first moved into the region outside all discs (this only
    relabels the group elements).  For a reduced prefix a_1..a_k every
    continuation sends z' into the disc h_{a_1}...h_{a_{k-1}}(D_{a_k + p}),
    whose boundary is a geodesic; a prefix is pruned when the exact distance
    from z to that disc exceeds T.
    """
    check_point(z, g.model)
    check_point(zp, g.model)
    if T < 0:
        raise ValueError("T must be nonnegative")
    z0, eta1 = reduce_to_fundamental(g, complex(z))
    w0, eta2 = reduce_to_fundamental(g, complex(zp))
    mats = _letter_matrices(g)
    p, k = g.p, g.n_letters
    discs = g.discs
    model = g.model
    limit = T + PRUNE_MARGIN

    stats = {"N": 0, "pruned": 0, "visited": 0}
    elements: Optional[List[Tuple[Tuple[int, ...], float]]] = [] if keep_elements else None
    word: List[int] = []

    def visit(M: np.ndarray):
        stats["visited"] += 1
        if stats["visited"] > budget:
            raise _Budget()
        d = float(orbit_distances(M, z0, w0, model))
        if d <= T:
            stats["N"] += 1
            if elements is not None:
                elements.append((tuple(word), d))
        last = word[-1] if word else None
        for a in range(k):
            if last is not None and a == (last + p) % k:
                continue
            D = discs[(a + p) % k]
            c, r = _image_disc(M, D.center, D.radius)
            if float(distance_to_geodesic(z0, c, r, model)) > limit:
                stats["pruned"] += 1
                continue
            word.append(a)
            visit(M @ mats[a])
            word.pop()

    def result() -> OrbitCount:
        els = None
        if elements is not None:
            els = [(_relabel(g, w, eta1, eta2), d) for w, d in elements]
        return OrbitCount(float(T), complex(z), complex(zp), stats["N"], stats["pruned"], stats["visited"], els)

    try:
        visit(np.identity(2, dtype=complex))
    except _Budget:
        raise SearchBudgetError(f"node budget {budget} exhausted at T={T}", result()) from None
    return result()


class _Budget(Exception):
    pass


def _relabel(g: SchottkyGroup, w: Tuple[int, ...], eta1: List[int], eta2: List[int]) -> Word:
    """Word of gamma with d(z, gamma z') = d(eta1 z, w eta2 z'): gamma = eta1^{-1} w eta2."""
    p, k = g.p, g.n_letters
    eta1_word = list(eta1[::-1])  # eta1 = h_{e_m} ... h_{e_1}, applied first-to-last
    eta1_inv = [(a + p) % k for a in eta1_word[::-1]]
    letters = eta1_inv + list(w) + list(eta2[::-1])
    out: List[int] = []
    for a in letters:
        if out and out[-1] == (a + p) % k:
            out.pop()
        else:
            out.append(a)
    return Word(tuple(out), p)


def _word_matrix(mats: List[np.ndarray], letters: Sequence[int]) -> np.ndarray:
    M = np.identity(2, dtype=complex)
    for a in letters:
        M = M @ mats[a]
    return M


def min_geodesic_separation(g: SchottkyGroup) -> float:
    """Smallest distance between the geodesics bounding two different discs."""
    D = g.discs
    return min(geodesic_separation(D[i].center, D[i].radius, D[j].center, D[j].radius) for i in range(len(D)) for j in range(i))


def brute_force_count(g: SchottkyGroup, z: complex, zp: complex, T: float) -> Tuple[int, int]:
    """Count over all reduced words up to the certified depth; returns (N, depth used).

    Consecutive disc boundaries crossed by the segment from z to gamma z' are
    images of two different base geodesics, so for z, z' outside all discs a
    reduced word of length n has d >= (n - 1) d_min.  General points are
    handled through the lengths of the words moving them outside the discs.
    """
    _, eta1 = reduce_to_fundamental(g, complex(z))
    _, eta2 = reduce_to_fundamental(g, complex(zp))
    dmin = min_geodesic_separation(g)
    depth = int(math.floor(T / dmin)) + 1 + len(eta1) + len(eta2)
    mats = _letter_matrices(g)
    p, k = g.p, g.n_letters
    count = 0
    # breadth-first over reduced words; each level reuses the previous products
    level = [(np.identity(2, dtype=complex), None)]
    for n in range(depth + 1):
        for M, _ in level:
            if hyperbolic_distance(z, _apply(M, zp), g.model) <= T:
                count += 1
        if n == depth:
            break
        nxt = []
        for M, last in level:
            for a in range(k):
                if last is not None and a == (last + p) % k:
                    continue
                nxt.append((M @ mats[a], a))
        level = nxt
    return count, depth


def count_ladder(g: SchottkyGroup, z: complex, zp: complex, Ts: Sequence[float], budget: int = DEFAULT_BUDGET) -> List[OrbitCount]:
    """orbit_count on each T of a ladder (one enumeration at max T, then binned)."""
    Ts = [float(t) for t in Ts]
    top = orbit_count(g, z, zp, max(Ts), keep_elements=True, budget=budget)
    dists = np.sort(np.array([d for _, d in top.elements]))
    out = []
    for t in Ts:
        out.append(OrbitCount(t, top.z, top.zp, int(np.searchsorted(dists, t, side="right")), top.pruned_nodes, top.visited_nodes))
    return out


def growth_exponent(counts: Sequence[OrbitCount]) -> float:
    """Least-squares slope of log N(T) against T."""
    T = np.array([c.T for c in counts])
    N = np.array([c.N for c in counts], dtype=float)
    ok = N > 0
    if ok.sum() < 2:
        raise DegenerateFitError("need at least two nonzero counts")
    return float(np.polyfit(T[ok], np.log(N[ok]), 1)[0])


def write_counting_csv(counts: Sequence[OrbitCount], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["T", "N", "pruned_nodes", "visited_nodes"])
        for c in counts:
            w.writerow([f"{c.T:.10g}", c.N, c.pruned_nodes, c.visited_nodes])


# Poincare series


@dataclass(frozen=True)
class PoincarePartial:
    s: complex
    depth: int
    value: complex
    last_shell: float
    shells: Tuple[complex, ...]


def poincare_partial(g: SchottkyGroup, s: complex, z: complex, zp: complex, depth: int) -> PoincarePartial:
    """sum over reduced words of length <= depth of e^{-s d(z, gamma z')}, shell by shell."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    mats = _letter_matrices(g)
    p, k = g.p, g.n_letters
    shells = []
    level = [(np.identity(2, dtype=complex), None)]
    for n in range(depth + 1):
        d = orbit_distances(np.array([M for M, _ in level]), z, zp, g.model)
        shells.append(complex(np.sum(np.exp(-complex(s) * d))))
        if n == depth:
            break
        nxt = []
        for M, last in level:
            for a in range(k):
                if last is not None and a == (last + p) % k:
                    continue
                nxt.append((M @ mats[a], a))
        level = nxt
    return PoincarePartial(complex(s), depth, complex(sum(shells)), abs(shells[-1]), tuple(shells))


def laplace_of_count(distances: Sequence[float], s: float, T_max: float) -> float:
    """s * int_0^T_max e^{-st} N(t) dt for the step function N built from ``distances``.

    Evaluated by adaptive quadrature between consecutive jumps.  Summation by
    parts gives sum_{d <= T_max} e^{-sd} - N(T_max) e^{-s T_max}.
    """
    d = np.sort(np.asarray(distances, dtype=float))
    d = d[d <= T_max]
    knots = np.concatenate([[0.0], d, [T_max]])
    total = 0.0
    for i in range(len(knots) - 1):
        a, b = knots[i], knots[i + 1]
        if b <= a:
            continue
        n_here = int(np.searchsorted(d, a, side="right"))
        total += n_here * quad(lambda t: math.exp(-s * t), a, b, epsabs=1e-14, epsrel=1e-13)[0]
    return s * total


# expansions and residuals


@dataclass
class ExpansionModel:
    """N(T) ~ sum_j Q_j(T) e^{delta_j T}, Q_j polynomial; exponents fixed, coefficients fitted."""

    exponents: Tuple[complex, ...]
    degrees: Tuple[int, ...]
    coefficients: List[np.ndarray] = field(default_factory=list)  # a_{k,j}, complex
    window: Tuple[float, float] = (0.0, 0.0)

    def check(self, delta: float) -> None:
        for e in self.exponents:
            if e.real > delta + 1e-9:
                raise ValueError(f"exponent {e} has real part above delta = {delta}")

    def _columns(self, T: np.ndarray) -> List[np.ndarray]:
        cols = []
        for e, deg in zip(self.exponents, self.degrees):
            for k in range(deg + 1):
                cols.append(T**k * np.exp(complex(e) * T))
        return cols

    def __call__(self, T) -> np.ndarray:
        T = np.asarray(T, dtype=float)
        out = np.zeros(T.shape, complex)
        for (e, deg), a in zip(zip(self.exponents, self.degrees), self.coefficients):
            for k in range(deg + 1):
                out += a[k] * T**k * np.exp(complex(e) * T)
        return out.real


def fit_expansion(
    counts: Sequence[OrbitCount],
    exponents: Sequence[complex],
    degrees: Optional[Sequence[int]] = None,
    window: Optional[Tuple[float, float]] = None,
    delta: Optional[float] = None,
) -> ExpansionModel:
    """Linear least squares for the coefficients a_{k,j}; real N, so complex
    exponents are fitted through cos/sin columns and must come with their conjugates
    omitted (one representative per pair)."""
    exponents = tuple(complex(e) for e in exponents)
    degrees = tuple(degrees) if degrees is not None else (0,) * len(exponents)
    model = ExpansionModel(exponents, degrees)
    if delta is not None:
        model.check(delta)
    pts = [(c.T, c.N) for c in counts if window is None or window[0] <= c.T <= window[1]]
    T = np.array([t for t, _ in pts])
    N = np.array([n for _, n in pts], dtype=float)
    cols, layout = [], []
    for j, (e, deg) in enumerate(zip(exponents, degrees)):
        for k in range(deg + 1):
            base = T**k * np.exp(e.real * T)
            if abs(e.imag) > 0:
                cols += [base * np.cos(e.imag * T), base * np.sin(e.imag * T)]
                layout.append((j, k, True))
            else:
                cols.append(base)
                layout.append((j, k, False))
    if len(T) < len(cols):
        raise DegenerateFitError(f"{len(T)} points for {len(cols)} coefficients")
    A = np.column_stack(cols)
    scale = np.max(np.abs(A), axis=0)
    x, *_ = np.linalg.lstsq(A / scale, N, rcond=None)
    x = x / scale
    coeffs = [np.zeros(deg + 1, complex) for deg in degrees]
    i = 0
    for j, k, is_complex in layout:
        if is_complex:
            # c cos(bT) + d sin(bT) = Re((c - i d) e^{ibT})
            coeffs[j][k] = complex(x[i], -x[i + 1])
            i += 2
        else:
            coeffs[j][k] = x[i]
            i += 1
    model.coefficients = coeffs
    model.window = (float(T.min()), float(T.max())) if T.size else (0.0, 0.0)
    return model


@dataclass
class ResidualReport:
    T: np.ndarray
    N: np.ndarray
    model_value: np.ndarray
    residual: np.ndarray
    betas: Tuple[float, ...]
    sup_weighted: Tuple[float, ...]
    sign_changes: int


def residual_analysis(
    counts: Sequence[OrbitCount],
    model: ExpansionModel,
    betas: Sequence[float] = (0.0, 0.05, 0.1, 0.15, 0.2, 0.25),
) -> ResidualReport:
    """R(T) = N(T) - model(T) on the given counts; sup |R| e^{-beta T} and sign changes."""
    T = np.array([c.T for c in counts])
    N = np.array([c.N for c in counts], dtype=float)
    if T.size == 0:
        raise DegenerateFitError("no counts to analyse")
    mv = model(T)
    R = N - mv
    sups = tuple(float(np.max(np.abs(R) * np.exp(-b * T))) for b in betas)
    signs = np.sign(R[np.abs(R) > 1e-9 * np.maximum(1.0, np.abs(N))])
    changes = int(np.sum(signs[1:] != signs[:-1])) if signs.size > 1 else 0
    return ResidualReport(T, N, mv, R, tuple(float(b) for b in betas), sups, changes)


def write_residual_csv(report: ResidualReport, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["T", "N", "model_value", "residual"])
        for t, n, m, r in zip(report.T, report.N, report.model_value, report.residual):
            w.writerow([f"{t:.10g}", int(n), f"{m:.10g}", f"{r:.10g}"])

"""Topological pressure of the Bowen-Series map and the dimension of the limit set."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .schottky import SchottkyGroup
from .words import cyclic_lengths

DEFAULT_TOL = 1e-6


class EstimatorDisagreement(RuntimeError):
    pass


@dataclass(frozen=True)
class PressureEstimate:
    x: float
    value: float
    n_used: int
    error_bar: float


@dataclass(frozen=True)
class DimensionResult:
    delta: float
    method: str
    tolerance: float
    pressure_at_delta: float = 0.0
    eigenvalue_delta: float = float("nan")
    estimator_spread: float = float("nan")
    n_used: int = 0


def default_n_max(g: SchottkyGroup) -> int:
    # keep (2p-1)^n near 5 million words
    return max(3, int(math.log(5e6) / math.log(2 * g.p - 1))) if g.p > 1 else 12


def log_word_sum(g: SchottkyGroup, x: float, n: int) -> float:
    """log S_n(x), S_n(x) = sum over cyclically reduced |a| = n of exp(-x l_a)."""
    vals, counts = cyclic_lengths(g, n)
    return float(logsumexp(-x * vals, b=counts))


def pressure(g: SchottkyGroup, x: float, n_max: int | None = None) -> PressureEstimate:
    """P(-x) from the n-th root of S_n; error bar = distance to log(S_n / S_{n-1})."""
    n = default_n_max(g) if n_max is None else n_max
    if n < 3:
        raise ValueError("n_max must be >= 3")
    top = log_word_sum(g, x, n)
    prev = log_word_sum(g, x, n - 1)
    root = top / n
    ratio = top - prev
    return PressureEstimate(float(x), root, n, abs(root - ratio))


def pressure_curve(g: SchottkyGroup, xs, n_max: int | None = None) -> np.ndarray:
    return np.array([pressure(g, x, n_max).value for x in xs])


def _bisect(f, lo: float, hi: float, tol: float) -> float:
    flo = f(lo)
    fhi = f(hi)
    if flo * fhi > 0:
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def hausdorff_dimension(
    g: SchottkyGroup,
    tol: float = DEFAULT_TOL,
    n_max: int | None = None,
    check_eigenvalue: bool = True,
    M: int | None = None,
) -> DimensionResult:
    """delta = zero of x -> P(-x), by bisection on the word-sum estimator.

    When ``check_eigenvalue`` is set the zero of log(leading eigenvalue of the
    discretized transfer operator) is computed too, and the two must agree
    within 10 tol.
    """
    if g.p < 2:
        raise ValueError("hausdorff_dimension needs a non-elementary group (p >= 2)")
    n = default_n_max(g) if n_max is None else n_max
    f = lambda x: log_word_sum(g, x, n) / n
    delta = _bisect(f, 0.0, 1.0, tol / 4)
    ratio_delta = _bisect(lambda x: log_word_sum(g, x, n) - log_word_sum(g, x, n - 1), 0.0, 1.0, tol / 4)
    eig_delta = float("nan")
    if check_eigenvalue:
        from .zeta import eigenvalue_dimension

        eig_delta = eigenvalue_dimension(g, M=M, tol=tol / 10)
        if abs(eig_delta - delta) > 10 * tol:
            raise EstimatorDisagreement(
                f"word-sum delta {delta:.10f} and eigenvalue delta {eig_delta:.10f} differ by more than {10 * tol:g}"
            )
    return DimensionResult(
        delta=delta,
        method="word-sum",
        tolerance=tol,
        pressure_at_delta=f(delta),
        eigenvalue_delta=eig_delta,
        estimator_spread=abs(ratio_delta - delta),
        n_used=n,
    )

"""Schottky groups: discs, generators, validation and the Bowen-Series map.

Letters are 0-based: letter ``i < p`` is generator ``h_i`` and letter
``i + p`` its inverse.  Disc ``i`` is the isometric circle of letter ``i`` in
the group's model, so letter ``i`` maps disc ``i`` onto the closure of the
exterior of disc ``i + p (mod 2p)``.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .moebius import (
    MODELS,
    MoebiusMap,
    Model,
    geodesic_separation,
    image_disc,
    mobius_apply,
    mobius_classify,
    translation_length_from_trace,
)

DISJOINT_TOL = 1e-10
PAIRING_TOL = 1e-8
ORTHOGONAL_TOL = 1e-8


class GeometryError(ValueError):
    """Group data cannot be realized as a Schottky configuration."""


@dataclass(frozen=True)
class Disc:
    center: complex
    radius: float

    def contains(self, z, strict: bool = False):
        r = np.abs(np.asarray(z) - self.center)
        return r < self.radius if strict else r <= self.radius

    def boundary(self, n: int = 64) -> np.ndarray:
        t = 2 * np.pi * np.arange(n) / n
        return self.center + self.radius * np.exp(1j * t)


def isometric_circle(m: np.ndarray) -> Disc:
    """Disc |cz + d| <= 1 of a complex determinant-one matrix."""
    c, d = m[1, 0], m[1, 1]
    if abs(c) < 1e-14:
        raise GeometryError("map fixes infinity; it has no isometric circle")
    return Disc(complex(-d / c), float(1.0 / abs(c)))


@dataclass(frozen=True)
class SchottkyGroup:
    generators: Tuple[MoebiusMap, ...]
    model: Model = "disc"
    label: str = ""
    integer_trace: bool = False
    cylinder: bool = False
    discs_override: Optional[Tuple[Disc, ...]] = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        object.__setattr__(self, "generators", tuple(g.normalized() for g in self.generators))
        if self.rank < 1:
            raise GeometryError("a Schottky group needs at least one generator")
        if self.rank == 1 and not self.cylinder:
            raise GeometryError("rank 1 is elementary; pass cylinder=True to allow it")

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def p(self) -> int:
        return len(self.generators)

    @property
    def n_letters(self) -> int:
        return 2 * len(self.generators)

    def inverse_letter(self, i: int) -> int:
        return (i + self.p) % (2 * self.p)

    @cached_property
    def letters(self) -> Tuple[MoebiusMap, ...]:
        return self.generators + tuple(g.inverse() for g in self.generators)

    @cached_property
    def letter_matrices(self) -> np.ndarray:
        """Real half-plane matrices of all 2p letters, shape (2p, 2, 2)."""
        return np.array([g.array() for g in self.letters])

    @cached_property
    def model_matrices(self) -> np.ndarray:
        """Complex matrices of the letters acting in the group's model."""
        return np.array([g.matrix(self.model) for g in self.letters])

    @cached_property
    def discs(self) -> Tuple[Disc, ...]:
        if self.discs_override is not None:
            return tuple(self.discs_override)
        return tuple(isometric_circle(m) for m in self.model_matrices)

    def disc_of(self, z) -> Optional[int]:
        for i, D in enumerate(self.discs):
            if D.contains(z):
                return i
        return None

    @cached_property
    def contraction_bounds(self) -> np.ndarray:
        """b[j, i] = -log sup over disc i of |h_j'| for allowed pairs, inf otherwise.

        Letter j may be applied on disc i whenever i != j.
        """
        n = self.n_letters
        b = np.full((n, n), np.inf)
        for j, m in enumerate(self.model_matrices):
            c, d = m[1, 0], m[1, 1]
            for i, D in enumerate(self.discs):
                if i == j:
                    continue
                low = abs(c * D.center + d) - abs(c) * D.radius
                if low <= 1.0:
                    raise GeometryError(f"letter {j} does not contract disc {i}")
                b[j, i] = 2.0 * math.log(low)
        return b

    @cached_property
    def min_letter_displacement(self) -> float:
        """c_g: every cyclically reduced word of length n has l >= n * c_g."""
        b = self.contraction_bounds
        return float(np.min(b[np.isfinite(b)]))

    @cached_property
    def contraction_ratio(self) -> float:
        """Worst value of |w - c_t| / r_t over images w = h_j(D_i) inside target disc t.

        This bounds the scaled monomials of the target disc on every image disc,
        so the transfer-matrix columns decay like ratio**k.
        """
        worst = 0.0
        for j, m in enumerate(self.letters):
            target = self.discs[self.inverse_letter(j)]
            for i, D in enumerate(self.discs):
                if i == j:
                    continue
                c, r = image_disc(m, D.center, D.radius, self.model)
                worst = max(worst, (abs(c - target.center) + r) / target.radius)
        return worst

    @cached_property
    def branch_anchors(self) -> Dict[Tuple[int, int], Tuple[complex, complex]]:
        """Anchors (z0, log h_j'(z0)) fixing the branch of log h_j' on disc i.

        The branch telescopes around periodic orbits, so the product of the
        chosen powers along a closed cycle equals the positive real multiplier
        raised to s.  On the half-plane boundary h' > 0; on the unit circle
        arg h'(x) = arg h(x) - arg x, measured with the angle function of each
        disc.
        """
        anchors = {}
        for j, m in enumerate(self.model_matrices):
            c, d = m[1, 0], m[1, 1]
            target = self.discs[self.inverse_letter(j)]
            for i, D in enumerate(self.discs):
                if i == j:
                    continue
                if self.model == "halfplane":
                    z0 = complex(D.center.real, 0.0)
                    L0 = complex(-2.0 * math.log(abs(c * z0 + d)), 0.0)
                else:
                    phi_i = math.atan2(D.center.imag, D.center.real)
                    z0 = complex(math.cos(phi_i), math.sin(phi_i))
                    w = (m[0, 0] * z0 + m[0, 1]) / (c * z0 + d)
                    phi_t = math.atan2(target.center.imag, target.center.real)
                    turn = _wrap(math.atan2(w.imag, w.real) - phi_t) + phi_t - phi_i
                    L0 = complex(-2.0 * math.log(abs(c * z0 + d)), turn)
                anchors[(j, i)] = (z0, L0)
        return anchors

    def to_dict(self) -> dict:
        out = {
            "model": self.model,
            "rank": self.rank,
            "generators": [[g.a, g.b, g.c, g.d] for g in self.generators],
        }
        if self.label:
            out["label"] = self.label
        if self.integer_trace:
            out["integer_trace"] = True
        if self.cylinder:
            out["cylinder"] = True
        return out

    def hash(self) -> str:
        return hashlib.sha256(dumps_group(self).encode()).hexdigest()


def _wrap(x: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    y = math.remainder(x, 2 * math.pi)
    return math.pi if y == -math.pi else y


# construction


def symmetric_group(p: int, width: float, model: Model = "disc", label: str = "") -> SchottkyGroup:
    """Rotationally symmetric group with 2p equal discs paired across the origin.

    ``width`` is the angular half-width of each disc seen from the origin of the
    unit disc; each generator translates by 2 arccosh(1 / sin(width)).
    """
    if p < 2:
        raise GeometryError("symmetric_group needs p >= 2")
    if not 0 < width < math.pi / (2 * p):
        raise GeometryError(f"width must lie in (0, pi/{2 * p}) for disjoint discs, got {width!r}")
    ell = translation_length_for_width(width)
    ch, sh = math.cosh(ell / 2), math.sinh(ell / 2)
    shift = np.array([[ch, sh], [sh, ch]], dtype=complex)
    gens = []
    for i in range(p):
        phi = i * math.pi / p + math.pi
        rot = np.diag([np.exp(0.5j * phi), np.exp(-0.5j * phi)])
        gens.append(MoebiusMap.from_disc_matrix(rot @ shift @ rot.conj()))
    g = SchottkyGroup(tuple(gens), model=model, label=label or f"symmetric p={p} width={width!r}")
    rep = validate_schottky(g)
    if not rep.passed:
        raise GeometryError(f"symmetric group failed validation: {rep.failures()}")
    return g


def translation_length_for_width(width: float) -> float:
    return 2.0 * math.acosh(1.0 / math.sin(width))


def width_for_translation_length(ell: float) -> float:
    return math.asin(1.0 / math.cosh(ell / 2.0))


def cylinder_group(ell: float, model: Model = "halfplane") -> SchottkyGroup:
    """Hyperbolic cylinder with core geodesic of length ``ell`` (p = 1)."""
    # conjugate of diag(e^{l/2}, e^{-l/2}) with isometric circles centred at -1, 1
    ch, sh = math.cosh(ell / 2), math.sinh(ell / 2)
    m = MoebiusMap(ch, sh, sh, ch)
    return SchottkyGroup((m,), model=model, label=f"cylinder l={ell!r}", cylinder=True)


def group_from_matrices(
    mats: Sequence, model: Model = "halfplane", label: str = "", cylinder: Optional[bool] = None
) -> SchottkyGroup:
    maps = [m if isinstance(m, MoebiusMap) else MoebiusMap.from_array(m) for m in mats]
    for i, m in enumerate(maps):
        cls = mobius_classify(m)
        if cls.kind != "hyperbolic":
            raise GeometryError(f"generator {i} is {cls.kind}, not hyperbolic")
    if cylinder is None:
        cylinder = len(maps) == 1
    integral = all(m.is_integral() for m in maps)
    g = SchottkyGroup(tuple(maps), model=model, label=label, integer_trace=integral, cylinder=cylinder)
    gap = _min_disc_gap(g.discs)
    if gap <= DISJOINT_TOL:
        raise GeometryError(f"isometric circles intersect (gap {gap:.3e}); not Schottky in this realization")
    return g


def _min_disc_gap(discs: Sequence[Disc]) -> float:
    gap = math.inf
    for D, E in itertools.combinations(discs, 2):
        gap = min(gap, abs(D.center - E.center) - D.radius - E.radius)
    return gap


def search_integer_groups(p: int = 2, max_entry: int = 6, min_trace: int = 3, limit: int = 50):
    """Exhaustive search for integer matrix tuples with disjoint isometric circles."""
    singles = []
    rng = range(-max_entry, max_entry + 1)
    for a, b, c, d in itertools.product(rng, rng, range(1, max_entry + 1), rng):
        if a * d - b * c != 1 or abs(a + d) < min_trace:
            continue
        m = MoebiusMap(float(a), float(b), float(c), float(d))
        discs = (Disc(complex(-d / c), 1.0 / c), Disc(complex(a / c), 1.0 / c))
        singles.append((m, discs))
    found = []
    for combo in itertools.combinations(singles, p):
        discs = [D for _, pair in combo for D in pair]
        if _min_disc_gap(discs) > DISJOINT_TOL:
            found.append(tuple(m for m, _ in combo))
            if len(found) >= limit:
                break
    return found


# validation


@dataclass
class ValidationReport:
    checks: Dict[str, Tuple[bool, float, float]] = field(default_factory=dict)
    suggestions: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(ok for ok, _, _ in self.checks.values())

    def failures(self) -> List[str]:
        return [k for k, (ok, _, _) in self.checks.items() if not ok]

    def add(self, name: str, margin: float, threshold: float, higher_is_better: bool = True):
        ok = margin > threshold if higher_is_better else margin < threshold
        self.checks[name] = (bool(ok), float(margin), float(threshold))

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": {k: {"passed": ok, "margin": m, "threshold": t} for k, (ok, m, t) in self.checks.items()},
            "suggestions": list(self.suggestions),
        }


def validate_schottky(g: SchottkyGroup, n_samples: int = 64) -> ValidationReport:
    rep = ValidationReport()
    p = g.p
    discs = g.discs

    rep.add("rank", float(p), 1.5 if not g.cylinder else 0.5)
    if len(discs) != 2 * p:
        rep.add("disc_count", -1.0, 0.0)
        return rep

    rep.add("disjointness", _min_disc_gap(discs), DISJOINT_TOL)

    if g.model == "disc":
        dev = max(abs(abs(D.center) ** 2 - D.radius**2 - 1.0) for D in discs)
    else:
        dev = max(abs(D.center.imag) for D in discs)
    rep.add("orthogonality", dev, ORTHOGONAL_TOL, higher_is_better=False)

    worst_pair = 0.0
    worst_exterior = math.inf
    t = 2 * np.pi * (np.arange(n_samples) + 0.5) / n_samples
    for i, h in enumerate(g.letters):
        D, E = discs[i], discs[g.inverse_letter(i)]
        try:
            w = mobius_apply(h, D.center + D.radius * np.exp(1j * t), g.model)
            worst_pair = max(worst_pair, float(np.max(np.abs(np.abs(w - E.center) - E.radius) / E.radius)))
            inner = D.center + D.radius * np.sqrt((np.arange(n_samples) + 0.5) / n_samples) * np.exp(3.0j * t)
            inner = inner[np.abs(inner - D.center) > 1e-12 * D.radius]
            w = mobius_apply(h, inner, g.model)
            worst_exterior = min(worst_exterior, float(np.min(np.abs(w - E.center) / E.radius - 1.0)))
        except ZeroDivisionError:
            worst_exterior = min(worst_exterior, math.inf)
    rep.add("pairing", worst_pair, PAIRING_TOL, higher_is_better=False)
    rep.add("interior_to_exterior", worst_exterior, 0.0)

    if not rep.passed:
        if rep.checks["disjointness"][1] <= DISJOINT_TOL:
            rep.suggestions.append("discs overlap or touch; shrink them (thinner funnels) or move generators apart")
        if rep.checks["pairing"][1] >= PAIRING_TOL:
            rep.suggestions.append("generator h_i must map boundary of disc i onto boundary of disc i+p; check pairing order")
    return rep


# Bowen-Series map


def boundary_intervals(g: SchottkyGroup) -> List[Tuple[float, float]]:
    """Coding intervals I_i = boundary ∩ D_i, as real intervals or angle intervals."""
    out = []
    for D in g.discs:
        if g.model == "halfplane":
            out.append((D.center.real - D.radius, D.center.real + D.radius))
        else:
            phi = math.atan2(D.center.imag, D.center.real)
            half = math.asin(min(1.0, D.radius / abs(D.center)))
            out.append((phi - half, phi + half))
    return out


def bowen_map(g: SchottkyGroup, x) -> Tuple[complex, int, float]:
    """B(x) = h_i(x) for x in I_i; returns (B(x), i, |B'(x)|).

    Boundary points are real numbers in the half-plane model and unimodular
    complex numbers in the disc model.
    """
    x = complex(x)
    i = g.disc_of(x)
    if i is None:
        raise ValueError(f"{x!r} lies in no coding interval")
    h = g.letters[i]
    y = complex(mobius_apply(h, x, g.model))
    (_, _), (c, d) = h.matrix(g.model)
    return y, i, float(1.0 / abs(c * x + d) ** 2)


def attracting_fixed_point(h: MoebiusMap, model: Model) -> complex:
    """Attracting fixed point on the boundary of a hyperbolic map."""
    m = h.matrix(model)
    vals, vecs = np.linalg.eig(m)
    k = int(np.argmax(np.abs(vals)))
    v = vecs[:, k]
    return complex(v[0] / v[1])


# file format


def dumps_group(g: SchottkyGroup) -> str:
    d = g.to_dict()
    gens = ",\n    ".join("[" + ", ".join(f"{x:.17g}" for x in row) + "]" for row in d.pop("generators"))
    head = json.dumps(d, indent=2, sort_keys=True)[:-2]
    return head + ',\n  "generators": [\n    ' + gens + "\n  ]\n}\n"


def loads_group(text: str) -> SchottkyGroup:
    d = json.loads(text)
    model = d.get("model", "halfplane")
    gens = [MoebiusMap.from_array(np.array(row, dtype=float).reshape(2, 2)) for row in d["generators"]]
    if "rank" in d and int(d["rank"]) != len(gens):
        raise ValueError(f"rank {d['rank']} does not match {len(gens)} generators")
    g = SchottkyGroup(
        tuple(gens),
        model=model,
        label=d.get("label", ""),
        integer_trace=bool(d.get("integer_trace", False)),
        cylinder=bool(d.get("cylinder", len(gens) == 1)),
    )
    return g


def save_group(g: SchottkyGroup, path) -> None:
    Path(path).write_text(dumps_group(g))


def load_group(path) -> SchottkyGroup:
    return loads_group(Path(path).read_text())


__all__ = [
    "Disc",
    "GeometryError",
    "SchottkyGroup",
    "ValidationReport",
    "attracting_fixed_point",
    "boundary_intervals",
    "bowen_map",
    "cylinder_group",
    "dumps_group",
    "geodesic_separation",
    "group_from_matrices",
    "load_group",
    "loads_group",
    "save_group",
    "search_integer_groups",
    "symmetric_group",
    "translation_length_for_width",
    "translation_length_from_trace",
    "validate_schottky",
    "width_for_translation_length",
]

"""Reduced words, group elements and the length spectrum with multiplicities."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .moebius import MoebiusMap, translation_length_from_trace
from .schottky import SchottkyGroup

DEFAULT_BIN_TOL = 1e-7
MAX_WORD_LENGTH = 40
_RESCALE_AT = 1e150


class TruncationWarning(UserWarning):
    """Word-length cutoff needed for completeness exceeds the configured maximum."""


@dataclass(frozen=True)
class Word:
    letters: Tuple[int, ...]
    p: int

    def __len__(self):
        return len(self.letters)

    def _inv(self, i: int) -> int:
        return (i + self.p) % (2 * self.p)

    @property
    def reduced(self) -> bool:
        return all(b != self._inv(a) for a, b in zip(self.letters, self.letters[1:]))

    @property
    def cyclically_reduced(self) -> bool:
        if not self.reduced or not self.letters:
            return False
        return self.letters[0] != self._inv(self.letters[-1])

    @property
    def primitive(self) -> bool:
        return primitive_period(self.letters) == len(self.letters)

    def rotate(self, k: int) -> "Word":
        k %= max(len(self.letters), 1)
        return Word(self.letters[k:] + self.letters[:k], self.p)

    def canonical(self) -> "Word":
        return Word(min_rotation(self.letters), self.p)

    def __str__(self) -> str:
        return "-".join(str(i + 1) for i in self.letters)

    @classmethod
    def parse(cls, text: str, p: int) -> "Word":
        return cls(tuple(int(x) - 1 for x in text.split("-") if x), p)


def primitive_period(letters: Sequence[int]) -> int:
    n = len(letters)
    for d in range(1, n + 1):
        if n % d == 0 and tuple(letters[d:]) + tuple(letters[:d]) == tuple(letters):
            return d
    return n


def min_rotation(letters: Sequence[int]) -> Tuple[int, ...]:
    t = tuple(letters)
    return min(t[k:] + t[:k] for k in range(len(t))) if t else t


# enumeration


def enumerate_words(g: SchottkyGroup, n: int, mode: str = "reduced") -> Iterator[Word]:
    """All reduced (or cyclically reduced) words of length ``n`` in lexicographic order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if mode not in ("reduced", "cyclically_reduced"):
        raise ValueError(f"unknown mode {mode!r}")
    p, k = g.p, g.n_letters
    word = [0] * n

    def rec(pos: int):
        for a in range(k):
            if pos and a == (word[pos - 1] + p) % k:
                continue
            word[pos] = a
            if pos + 1 == n:
                if mode == "cyclically_reduced" and word[0] == (a + p) % k:
                    continue
                yield Word(tuple(word), p)
            else:
                yield from rec(pos + 1)

    yield from rec(0)


def count_reduced(p: int, n: int) -> int:
    return 2 * p * (2 * p - 1) ** (n - 1)


def count_cyclically_reduced(p: int, n: int) -> int:
    """Trace of the n-th power of the 2p x 2p subshift adjacency matrix."""
    k = 2 * p
    A = np.ones((k, k), dtype=object)
    for i in range(k):
        A[i, (i + p) % k] = 0
    M = np.identity(k, dtype=object)
    for _ in range(n):
        M = M.dot(A)
    return int(sum(M[i, i] for i in range(k)))


# group elements


def word_element(g: SchottkyGroup, w) -> Tuple[MoebiusMap, float]:
    """Product h_{w1} ... h_{wn} and its translation length.

    Long words are multiplied with periodic rescaling; the returned map is then
    normalized and the length is computed from the tracked log scale.
    """
    letters = w.letters if isinstance(w, Word) else tuple(w)
    if not Word(letters, g.p).reduced:
        raise ValueError(f"word {letters} is not reduced")
    M = np.identity(2)
    log_scale = 0.0
    mats = g.letter_matrices
    for a in letters:
        M = M @ mats[a]
        big = np.max(np.abs(M))
        if big > _RESCALE_AT:
            warnings.warn("matrix entries overflowing; rescaling and tracking log scale", RuntimeWarning, stacklevel=2)
            M = M / big
            log_scale += math.log(big)
    t = abs(M[0, 0] + M[1, 1])
    if log_scale == 0.0:
        ell = float(translation_length_from_trace(t)) if t > 2 else 0.0
    else:
        # |tr| = 2 cosh(l/2) ~ e^{l/2} once rescaling kicked in
        ell = 2.0 * (math.log(t) + log_scale)
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    return MoebiusMap.from_array(M / math.sqrt(det)), ell


def word_trace_int(g: SchottkyGroup, letters: Sequence[int]) -> int:
    """Exact integer trace for integer-entry groups."""
    mats = [[[int(round(x)) for x in row] for row in m] for m in g.letter_matrices]
    M = [[1, 0], [0, 1]]
    for a in letters:
        B = mats[a]
        M = [
            [M[0][0] * B[0][0] + M[0][1] * B[1][0], M[0][0] * B[0][1] + M[0][1] * B[1][1]],
            [M[1][0] * B[0][0] + M[1][1] * B[1][0], M[1][0] * B[0][1] + M[1][1] * B[1][1]],
        ]
    return M[0][0] + M[1][1]


def _shard_prefixes(g: SchottkyGroup, n: int, max_block: int) -> List[Tuple[int, ...]]:
    k = g.n_letters
    depth = 0
    while depth < n and (k - 1) ** (n - depth) > max_block:
        depth += 1
    if depth == 0:
        return [()]
    return [w.letters for w in enumerate_words(g, depth, "reduced")]


def length_blocks(g: SchottkyGroup, n: int, max_block: int = 1 << 19) -> Iterator[np.ndarray]:
    """Translation lengths of all cyclically reduced words of length ``n``.

    Words are grown breadth-first inside each prefix shard; shards are visited
    in lexicographic order so the block sequence is deterministic.
    """
    mats = g.letter_matrices
    p, k = g.p, g.n_letters
    for prefix in _shard_prefixes(g, n, max_block):
        if prefix:
            M = np.identity(2)
            for a in prefix:
                M = M @ mats[a]
            P = M[None]
            first = np.array([prefix[0]])
            last = np.array([prefix[-1]])
            depth = len(prefix)
        else:
            P = mats.copy()
            first = np.arange(k)
            last = np.arange(k)
            depth = 1
        while depth < n:
            parts_P, parts_f, parts_l = [], [], []
            for a in range(k):
                keep = last != (a + p) % k
                parts_P.append(P[keep] @ mats[a])
                parts_f.append(first[keep])
                parts_l.append(np.full(int(keep.sum()), a))
            P = np.concatenate(parts_P)
            first = np.concatenate(parts_f)
            last = np.concatenate(parts_l)
            depth += 1
        cyc = first != (last + p) % k
        t = np.abs(P[cyc, 0, 0] + P[cyc, 1, 1])
        yield translation_length_from_trace(t)


_LENGTH_CACHE: Dict[Tuple[str, int], Tuple[np.ndarray, np.ndarray]] = {}


def cyclic_lengths(g: SchottkyGroup, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Distinct lengths of cyclically reduced words of length n and their counts.

    Lengths agreeing to 1e-12 are pooled (at their mean, so pooling does not
    shift them); sums over words become weighted sums.
    """
    key = (g.hash(), n)
    hit = _LENGTH_CACHE.get(key)
    if hit is not None:
        return hit
    ls = np.concatenate(list(length_blocks(g, n)))
    _, inv, counts = np.unique(np.round(ls, 12), return_inverse=True, return_counts=True)
    vals = np.bincount(inv, weights=ls) / counts
    _LENGTH_CACHE[key] = (vals, counts)
    return vals, counts


# length spectrum


@dataclass(frozen=True)
class PrimeClass:
    """Primitive oriented conjugacy class: canonical word and length."""

    word: Word
    length: float
    trace: Optional[int] = None


@dataclass(frozen=True)
class LengthEntry:
    ell: float
    prime_length: float
    k: int
    multiplicity: int
    representative: Word
    weight: float = 0.0  # sum of l(gamma) over the (k, gamma) pairs in this bin

    def __post_init__(self):
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be >= 1")


@dataclass
class LengthSpectrum:
    T: float
    entries: List[LengthEntry]
    primes: List[PrimeClass]
    pairs: List[Tuple[float, int, PrimeClass]] = field(repr=False)  # (k*l, k, gamma)
    complete: bool = True
    word_cutoff: int = 0

    @property
    def ells(self) -> np.ndarray:
        return np.array([e.ell for e in self.entries])

    @property
    def multiplicities(self) -> np.ndarray:
        return np.array([e.multiplicity for e in self.entries])

    @property
    def weights(self) -> np.ndarray:
        return np.array([e.weight for e in self.entries])

    def count_upto(self, T: float) -> int:
        """#{(k, gamma): k l(gamma) <= T}."""
        return sum(1 for ell, _, _ in self.pairs if ell <= T)


def word_cutoff(g: SchottkyGroup, T: float) -> int:
    return int(math.floor(T / g.min_letter_displacement + 1e-12))


def prime_classes(g: SchottkyGroup, T: float, max_word_length: int = MAX_WORD_LENGTH) -> Tuple[List[PrimeClass], bool, int]:
    """Primitive conjugacy classes with l(gamma) <= T.

    Depth-first search over reduced words, pruned with the per-step contraction
    bound: along a cyclically reduced word a1..an, l >= sum_k b[a_k, a_{k+1} + p],
    every term positive.  Returns (classes, complete, cutoff used).
    """
    p, k = g.p, g.n_letters
    mats = g.letter_matrices
    b = g.contraction_bounds
    need = word_cutoff(g, T)
    cutoff = min(need, max_word_length)
    complete = need <= max_word_length
    if not complete:
        warnings.warn(
            f"completeness up to T={T} needs word length {need} > {max_word_length}",
            TruncationWarning,
            stacklevel=2,
        )
    out: List[PrimeClass] = []
    # step bound for letter a followed by letter c: a acts on disc (c + p)
    step = np.array([[b[a, (c + p) % k] for c in range(k)] for a in range(k)])
    close_min = np.min(np.where(np.isfinite(step), step, np.inf))

    word: List[int] = []

    def rec(M: np.ndarray, partial: float):
        n = len(word)
        if n:
            first, last = word[0], word[-1]
            if first != (last + p) % k:
                closing = step[last, first]
                t = abs(M[0, 0] + M[1, 1])
                if partial + closing <= T + 1e-9 and t > 2:
                    ell = float(translation_length_from_trace(t))
                    if ell <= T and tuple(word) == min_rotation(word) and primitive_period(word) == n:
                        tr = word_trace_int(g, word) if g.integer_trace else None
                        out.append(PrimeClass(Word(tuple(word), p), ell, tr))
        if n >= cutoff:
            return
        for a in range(k):
            if n and a == (word[-1] + p) % k:
                continue
            # canonical rotations start with their smallest letter
            if n and a < word[0]:
                continue
            add = step[word[-1], a] if n else 0.0
            if partial + add + close_min > T + 1e-9:
                continue
            word.append(a)
            rec(M @ mats[a], partial + add)
            word.pop()

    rec(np.identity(2), 0.0)
    out.sort(key=lambda c: (c.length, c.word.letters))
    return out, complete, cutoff


def length_spectrum(
    g: SchottkyGroup,
    T: float,
    bin_tol: float = DEFAULT_BIN_TOL,
    max_word_length: int = MAX_WORD_LENGTH,
) -> LengthSpectrum:
    primes, complete, cutoff = prime_classes(g, T, max_word_length)
    pairs = []
    for c in primes:
        kk = 1
        while kk * c.length <= T:
            pairs.append((kk * c.length, kk, c))
            kk += 1
    if g.integer_trace:
        keyed: Dict[int, list] = {}
        for ell, kk, c in pairs:
            keyed.setdefault(_chebyshev_trace(abs(c.trace), kk), []).append((ell, kk, c))
        groups = [keyed[t] for t in sorted(keyed)]
    else:
        pairs_sorted = sorted(pairs, key=lambda x: (x[0], x[2].word.letters))
        groups = []
        for item in pairs_sorted:
            if groups and item[0] - groups[-1][0][0] <= bin_tol:
                groups[-1].append(item)
            else:
                groups.append([item])
    entries = []
    for grp in groups:
        grp.sort(key=lambda x: (x[1], x[2].word.letters))
        ell0, k0, c0 = grp[0]
        rep = Word(c0.word.letters * k0, g.p)
        entries.append(
            LengthEntry(
                ell=float(np.mean([x[0] for x in grp])),
                prime_length=c0.length,
                k=k0,
                multiplicity=len(grp),
                representative=rep,
                weight=float(sum(x[2].length for x in grp)),
            )
        )
    entries.sort(key=lambda e: (e.ell, e.representative.letters))
    pairs.sort(key=lambda x: (x[0], x[1], x[2].word.letters))
    return LengthSpectrum(T=T, entries=entries, primes=primes, pairs=pairs, complete=complete, word_cutoff=cutoff)


def _chebyshev_trace(t: int, k: int) -> int:
    """|tr(g^k)| from |tr(g)| via t_k = t t_{k-1} - t_{k-2}."""
    prev, cur = 2, t
    for _ in range(k - 1):
        prev, cur = cur, t * cur - prev
    return abs(cur)


def write_spectrum_csv(spec: LengthSpectrum, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["ell", "prime_length", "k", "multiplicity", "word"])
        for e in spec.entries:
            w.writerow([f"{e.ell:.17g}", f"{e.prime_length:.17g}", e.k, e.multiplicity, str(e.representative)])

import math

import numpy as np
import pytest

from schottkylab.schottky import symmetric_group
from schottkylab.words import (
    TruncationWarning,
    Word,
    count_cyclically_reduced,
    cyclic_lengths,
    enumerate_words,
    length_spectrum,
    min_rotation,
    primitive_period,
    prime_classes,
    word_cutoff,
    word_element,
    write_spectrum_csv,
)

from conftest import integer_group


def test_reduced_counts(sym2):
    assert len(list(enumerate_words(sym2, 1))) == 4
    assert len(list(enumerate_words(sym2, 3))) == 36


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_cyclic_count_matches_adjacency_trace(sym2, n):
    A = np.ones((4, 4), dtype=int) - np.roll(np.eye(4, dtype=int), 2, axis=1)
    expected = int(np.trace(np.linalg.matrix_power(A, n)))
    words = list(enumerate_words(sym2, n, "cyclically_reduced"))
    assert len(words) == expected == count_cyclically_reduced(2, n)
    assert all(w.cyclically_reduced for w in words)


def test_single_letter_is_generator(sym2):
    h, ell = word_element(sym2, (0,))
    assert np.allclose(h.array(), sym2.generators[0].array())
    assert ell == pytest.approx(4.0, rel=1e-12)


def test_square_doubles_length(sym2):
    w = (0, 1)
    _, l1 = word_element(sym2, w)
    _, l2 = word_element(sym2, w + w)
    assert l2 == pytest.approx(2 * l1, abs=1e-9)


def test_rotation_invariance(sym2):
    w = Word((0, 1, 1, 2, 3, 3), 2)
    assert w.cyclically_reduced
    _, l0 = word_element(sym2, w)
    for k in range(1, 6):
        _, lk = word_element(sym2, w.rotate(k))
        assert lk == pytest.approx(l0, abs=1e-10)


def test_non_reduced_word_rejected(sym2):
    with pytest.raises(ValueError):
        word_element(sym2, (0, 2))


def test_cylinder_spectrum(cyl2):
    spec = length_spectrum(cyl2, 3.5 * 2.0)
    assert [e.ell for e in spec.entries] == pytest.approx([2.0, 4.0, 6.0], abs=1e-12)
    assert [e.multiplicity for e in spec.entries] == [2, 2, 2]
    assert [e.k for e in spec.entries] == [1, 2, 3]


def test_symmetric_shortest_classes(sym2):
    classes, complete, _ = prime_classes(sym2, 4.5)
    assert complete
    # h_1, h_2 and their inverses: 2p oriented classes of length 4
    assert len(classes) == 4
    assert all(c.length == pytest.approx(4.0, rel=1e-12) for c in classes)


def test_completeness_against_brute_force(sym2):
    """Every primitive class with l <= T is found; brute force one word-length deeper."""
    T = 14.0
    classes, complete, cutoff = prime_classes(sym2, T)
    assert complete and cutoff == word_cutoff(sym2, T)
    brute = set()
    for n in range(1, cutoff + 2):
        for w in enumerate_words(sym2, n, "cyclically_reduced"):
            if not w.primitive:
                continue
            _, ell = word_element(sym2, w)
            if ell <= T:
                brute.add(w.canonical().letters)
    assert {c.word.letters for c in classes} == brute


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_rotation_class_dedup(sym2, n):
    prim = [w for w in enumerate_words(sym2, n, "cyclically_reduced") if primitive_period(w.letters) == n]
    classes = {min_rotation(w.letters) for w in prim}
    assert len(classes) * n == len(prim)


def test_spectrum_multiplicities_sum(sym2):
    spec = length_spectrum(sym2, 12.0)
    assert sum(e.multiplicity for e in spec.entries) == len(spec.pairs) == spec.count_upto(12.0)
    assert np.all(np.diff(spec.ells) > 0)


def test_integer_group_merges_by_trace():
    g = integer_group([(0, 3), (6, 9)])
    spec = length_spectrum(g, 12.0)
    for e in spec.entries:
        t = 2 * math.cosh(e.ell / 2)
        assert abs(t - round(t)) < 1e-6 * t
    # distinct entries have distinct integer traces
    traces = [round(2 * math.cosh(e.ell / 2)) for e in spec.entries]
    assert len(set(traces)) == len(traces)


def test_truncation_warning(sym2):
    with pytest.warns(TruncationWarning):
        _, complete, _ = prime_classes(sym2, 40.0, max_word_length=3)
    assert not complete


def test_cyclic_lengths_pooling(sym2):
    vals, counts = cyclic_lengths(sym2, 4)
    assert counts.sum() == count_cyclically_reduced(2, 4)
    # pooled values are means of exact lengths, not rounded keys
    direct = sorted(word_element(sym2, w)[1] for w in enumerate_words(sym2, 4, "cyclically_reduced"))
    assert np.repeat(vals, counts) == pytest.approx(direct, abs=1e-13)


def test_spectrum_csv(tmp_path, cyl2):
    path = tmp_path / "s.csv"
    write_spectrum_csv(length_spectrum(cyl2, 5.0), path)
    lines = path.read_text().splitlines()
    assert lines[0] == "ell,prime_length,k,multiplicity,word"
    assert len(lines) == 3

import csv
import math

import numpy as np
import pytest

from schottkylab.zeta import (
    Resonance,
    fredholm_many,
    find_resonances,
    parse_rect,
    strip_census,
    theorem_strip,
    winding_number,
    write_resonance_csv,
)


def test_parse_rect():
    assert parse_rect("-0.5,0.5,0,7") == (-0.5, 0.5, 0.0, 7.0)
    assert parse_rect("1e-1, 2E0, -3, 4") == (0.1, 2.0, -3.0, 4.0)
    for bad in ("1,2,3", "0,0,0,1", "1,0,0,1", "a,b,c,d", "0,1,2,1"):
        with pytest.raises(ValueError):
            parse_rect(bad)


def test_cylinder_zeros(cyl2):
    res = find_resonances(cyl2, (-0.5, 0.5, 0.0, 7.0), grid_step=0.05)
    assert [r.order for r in res] == [2, 2, 2]
    for r, m in zip(res, range(3)):
        assert abs(r.s - 1j * math.pi * m) < 1e-8
        assert r.M > 0 and r.method == "fredholm"
    assert res.winding == 6


def test_simple_zero_at_delta(sym2, delta2):
    res = find_resonances(sym2, (delta2 - 0.1, delta2 + 0.1, -0.1, 0.1))
    assert len(res) == 1
    assert res[0].order == 1
    assert abs(res[0].s - delta2) < 1e-9


def test_no_zeros_right_of_delta(sym2, delta2):
    res = find_resonances(sym2, (delta2 + 0.02, 1.0, 0.0, 5.0))
    assert len(res) == 0
    assert res.winding == 0


def test_counts_match_winding(sym2):
    res = find_resonances(sym2, (-0.3, 0.45, 0.0, 5.0))
    assert sum(r.order for r in res) == res.winding
    # an independent winding number on the search contour
    Z = lambda s: fredholm_many(sym2, s)
    a, b, c, d = res.contour
    w = winding_number(Z, [complex(a, c), complex(b, c), complex(b, d), complex(a, d)], spacing=0.01)
    assert round(w) == res.winding
    for r in res:
        assert abs(fredholm_many(sym2, r.s)[0]) < 1e-8


def test_conjugate_symmetry_of_zeros(sym2):
    up = find_resonances(sym2, (0.0, 0.4, 0.5, 5.0))
    down = find_resonances(sym2, (0.0, 0.4, -5.0, -0.5))
    assert len(up) == len(down) > 0
    for r in up:
        assert min(abs(q.s - r.s.conjugate()) for q in down) < 1e-8


def test_rejects_empty_rect(sym2):
    with pytest.raises(ValueError):
        find_resonances(sym2, (0.0, 0.0, 0.0, 1.0))
    with pytest.raises(ValueError):
        find_resonances(sym2, (0.0, 1.0, 0.0, 1.0), grid_step=0.0)


def test_resonance_csv(tmp_path, cyl2):
    res = find_resonances(cyl2, (-0.5, 0.5, 2.0, 4.0), box_id=7)
    path = tmp_path / "r.csv"
    write_resonance_csv(res, path)
    rows = list(csv.DictReader(open(path)))
    assert list(rows[0]) == ["re", "im", "order", "newton_residual", "method", "M", "box_id"]
    assert len(rows) == 1 and rows[0]["order"] == "2" and rows[0]["box_id"] == "7"
    assert float(rows[0]["im"]) == pytest.approx(math.pi, abs=1e-12)


# strip arithmetic


@pytest.mark.parametrize(
    "delta, proven",
    [(0.25, 0.0625), (0.5, 0.0), (0.9, 0.2), (0.1, 0.04), (0.4, 0.04), (0.75, 0.125)],
)
def test_theorem_strip_table(delta, proven):
    b = theorem_strip(delta)
    assert b.proven == pytest.approx(proven, abs=1e-15)
    assert b.conjectural == delta / 2


def test_theorem_strip_domain():
    for bad in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ValueError):
            theorem_strip(bad)


def test_strip_census_counts(sym2, delta2):
    res = find_resonances(sym2, (-0.05, 0.5, 0.0, 6.0))
    above = strip_census(res, delta2 + 1e-6, 6.0)
    assert above.count == 0
    proven = theorem_strip(delta2).proven
    c = strip_census(res, proven, 6.0)
    assert c.count >= 1
    assert list(c.counts) == sorted(c.counts)
    assert c.counts[-1] == c.count
    # with order: s = delta is counted once
    at = strip_census(res, delta2 - 1e-6, 6.0)
    assert at.count == 1


def test_strip_census_synthetic():
    fake = [Resonance(complex(0.1, y), m, 0.0, (0, 1, 0, 1)) for y, m in ((1.0, 1), (2.0, 2), (3.0, 1))]
    c = strip_census(fake, 0.0, 4.0, n_windows=4)
    assert c.counts == (1, 3, 4, 4)
    assert c.distinct == 3
    assert strip_census(fake, 0.2, 4.0).count == 0

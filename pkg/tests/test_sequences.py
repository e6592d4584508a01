from fractions import Fraction

import pytest

from equilens.discrepancy import discrete_star_discrepancy
from equilens.lattice import LatticeRuleSpec, glp_nodes
from equilens.sequences import (
    GoodLatticePoint,
    Halton,
    Hybrid,
    Kronecker,
    load_points,
    parse_points,
    parse_sequence,
    point_at,
)


def test_halton_point():
    assert point_at(Halton([2, 3]), 5) == (Fraction(5, 8), Fraction(7, 9))
    pts = Halton([2, 3]).points(50)
    for n in range(50):
        assert pts.point(n) == Halton([2, 3]).point(n)


def test_kronecker_accuracy():
    seq = Kronecker(["sqrt2-1", "golden"])
    assert seq.point(0) == (0.0, 0.0)
    from mpmath import floor, mp, sqrt

    mp.dps = 60
    alphas = [sqrt(2) - 1, (sqrt(5) - 1) / 2]
    for n in (1, 7, 12345, 2**20):
        for got, a in zip(seq.point(n), alphas):
            x = n * a
            assert abs(got - float(x - floor(x))) < 1e-12


def test_kronecker_literals():
    assert Kronecker(["1/4"]).point(3) == (0.75,)
    assert Kronecker([0.5]).point(3) == (0.5,)
    with pytest.raises(ValueError):
        Kronecker(["sqrt4"])
    with pytest.raises(ValueError):
        Kronecker(["pi"])


def test_stateless_random_access():
    seq = parse_sequence("hybrid:(halton:2)+(kron:sqrt3-1)")
    forward = [seq.point(n) for n in range(20)]
    backward = [seq.point(n) for n in reversed(range(20))][::-1]
    assert forward == backward
    pts = seq.points(20)
    assert pts.s == 2
    assert [p[0] for p in forward] == pts.fractions(0)


def test_hybrid_concatenates_in_order():
    h = Hybrid([Halton([2]), Kronecker(["golden"])])
    p = h.point(3)
    assert p[0] == Halton([2]).point(3)[0] and p[1] == Kronecker(["golden"]).point(3)[0]


def test_glp_shares_lattice_nodes():
    seq = GoodLatticePoint((1, 5), 8)
    assert (seq.points(8).values == glp_nodes(LatticeRuleSpec((1, 5), 8)).values).all()
    with pytest.raises(IndexError):
        seq.point(8)


@pytest.mark.parametrize("g", range(1, 9))
def test_van_der_corput_prefix_fills_cells(g):
    assert discrete_star_discrepancy(Halton([2]), 2**g, 2, g) == 0


def test_point_file_parsing(tmp_path):
    pts = parse_points("0.25 0.5\n0.75 0.125\n")
    assert pts.N == 2 and pts.s == 2
    one = parse_points("# comment\n1/3 2/3\n")
    assert one.point(0) == (Fraction(1, 3), Fraction(2, 3))
    with pytest.raises(ValueError, match="line 1"):
        parse_points("1.0 0.5")
    with pytest.raises(ValueError, match="line 2"):
        parse_points("0.1 0.2\n0.3 x\n")
    with pytest.raises(ValueError, match="line 2"):
        parse_points("0.1 0.2\n0.3\n")
    f = tmp_path / "pts.txt"
    f.write_text("0.5\n0.25\n", encoding="utf-8")
    assert load_points(f).values.ravel().tolist() == [0.5, 0.25]
    assert parse_sequence(f"file:{f}").point(1) == (0.25,)


def test_parse_sequence_errors():
    for bad in ("halton", "halton:1", "glp:1,2", "glp:2,4@8", "hybrid:halton:2", "nope:1"):
        with pytest.raises(ValueError):
            parse_sequence(bad)

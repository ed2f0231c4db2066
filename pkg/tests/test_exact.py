from fractions import Fraction
from math import comb

import pytest

from gwtrees.degree_sets import DegreeSet
from gwtrees.exact import (
    enumerate_mass,
    forest_leaf_pmf,
    leaf_pmf_fixed_point,
    marked_count_pmf,
    marked_count_pmf_float,
    progeny_pmf,
    walk_pmf,
)
from gwtrees.offspring import binary_dist, collapsed_offspring, from_probs, geometric_dist

A0 = DegreeSet.of(0)
A02 = DegreeSet.of(0, 2)
ALL = DegreeSet.all_degrees()


def test_walk_pmf_examples():
    zeta = geometric_dist()
    assert walk_pmf(zeta, 1, -1, -1).prob(-1) == Fraction(1, 2)
    assert walk_pmf(zeta, 2, -1, -1).prob(-1) == Fraction(1, 4)
    assert walk_pmf(zeta, 2, -3, -3).prob(-3) == 0
    assert walk_pmf(binary_dist(), 0, 0, 0).prob(0) == 1


def test_walk_pmf_rejects_short_prefix():
    # a truncated coefficient prefix cannot cover steps reaching the window
    zeta = collapsed_offspring(binary_dist(), A0, 3)
    assert zeta.truncated
    with pytest.raises(ValueError):
        walk_pmf(zeta, 10, 5, 5)


def test_progeny_pmf_examples():
    pg = progeny_pmf(geometric_dist(), 4)
    assert pg[1] == Fraction(1, 2)
    assert pg[2] == Fraction(1, 8)
    pd = progeny_pmf(from_probs([Fraction(1)]), 4)
    assert pd[1] == 1 and pd[2] == pd[3] == pd[4] == 0


def test_marked_count_binary_leaves_catalan():
    table = marked_count_pmf(binary_dist(), A0, 10)
    assert table[1] == Fraction(1, 2)
    assert table[2] == Fraction(1, 8)
    assert table[3] == Fraction(1, 16)
    for n in range(1, 11):
        assert table[n] == Fraction(comb(2 * n - 2, n - 1), n * 2 ** (2 * n - 1))
        assert table[n] > 0


def test_marked_count_binary_all():
    table = marked_count_pmf(binary_dist(), ALL, 9)
    assert table[3] == Fraction(1, 8)
    assert table[2] == table[4] == 0  # parity


def test_leaf_routes_agree():
    # walk-formula route vs functional-equation route, exact to order 60
    for dist in (binary_dist(), geometric_dist()):
        a = marked_count_pmf(dist, A0, 60, cross_check=False)
        b = leaf_pmf_fixed_point(dist, 60)
        assert a == b


def test_marked_count_equals_collapsed_progeny():
    for dist in (binary_dist(), geometric_dist()):
        for marks in (A0, DegreeSet.of(0, 1), A02, ALL):
            zeta = collapsed_offspring(dist, marks, 40)
            assert marked_count_pmf(dist, marks, 40) == progeny_pmf(zeta, 40)


def test_forest_leaf_examples():
    assert forest_leaf_pmf(binary_dist(), 2, 2) == Fraction(1, 4)
    assert forest_leaf_pmf(binary_dist(), 1, 2) == Fraction(1, 8)
    assert forest_leaf_pmf(binary_dist(), 3, 2) == 0
    # one tree: reduces to the leaf-count law
    table = marked_count_pmf(binary_dist(), A0, 6)
    for k in range(1, 7):
        assert forest_leaf_pmf(binary_dist(), 1, k) == table[k]


def test_enumeration_examples():
    total, shapes = enumerate_mass(binary_dist(), A0, 2, 5)
    assert total == Fraction(1, 8)
    assert list(shapes.values()) == [Fraction(1, 8)]
    total, _ = enumerate_mass(binary_dist(), ALL, 3, 3)
    assert total == Fraction(1, 8)
    total, _ = enumerate_mass(geometric_dist(), A0, 1, 1)
    assert total == Fraction(1, 2)
    with pytest.raises(ValueError):
        enumerate_mass(binary_dist(), A0, 2, 40)


def test_enumeration_complete_binary():
    table = marked_count_pmf(binary_dist(), A0, 8)
    for n in range(1, 9):
        total, _ = enumerate_mass(binary_dist(), A0, n, 2 * n - 1)
        assert total == table[n]


def test_enumeration_partial_monotone_geometric():
    table = marked_count_pmf(geometric_dist(), A0, 4)
    prev = Fraction(0)
    for cap in (4, 6, 8, 10):
        part, _ = enumerate_mass(geometric_dist(), A0, 2, cap)
        assert prev <= part <= table[2]
        prev = part


def test_float_table_matches_exact():
    for dist in (binary_dist(), geometric_dist()):
        for marks in (A0, A02, ALL):
            exact = marked_count_pmf(dist, marks, 30)
            approx = marked_count_pmf_float(dist, marks, 30)
            for n in range(1, 31):
                if exact[n] == 0:
                    assert abs(approx[n]) < 1e-12
                else:
                    assert abs(approx[n] - float(exact[n])) < 1e-10 * float(exact[n])


def test_mixed_support_law_with_marked_two():
    # critical law on {0,2,3}: marked counting at {0,2} keeps enumeration finite
    dist = from_probs([Fraction(3, 5), Fraction(0), Fraction(1, 5), Fraction(1, 5)])
    table = marked_count_pmf(dist, A02, 8)
    for n in range(1, 5):
        cap = n + (n - 1) // 2
        total, _ = enumerate_mass(dist, A02, n, cap)
        assert total == table[n]

"""Piecewise-linear algebra tests: construction ops, invariants, the
envelope builder and the 2x2 system solver."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gpig import errors, numeric, plinear
from gpig.plinear import (
    OpCounter,
    PLFunction,
    affine_combine,
    breakpoint_count,
    constant,
    constant_one,
    evaluate,
    max_with_constant,
    solve_system,
    upper_envelope,
)

HALF = Fraction(1, 2)


def line(A, B):
    """PLFunction for y -> A - B*y on [0, 1]."""
    return PLFunction((0, 1), (A, A - B))


def test_constant_one_shape():
    f = constant_one()
    assert breakpoint_count(f) == 0
    assert f.slopes() == (0,)
    assert evaluate(f, 0.37) == 1


def test_evaluate_interpolates():
    f = line(1, HALF)  # 1 - y/2
    assert evaluate(f, Fraction(2, 3)) == Fraction(2, 3)
    assert evaluate(f, 0) == 1
    assert evaluate(f, 1) == HALF


def test_evaluate_out_of_domain():
    with pytest.raises(errors.OutOfDomain):
        evaluate(constant_one(), 1.5)
    with pytest.raises(errors.OutOfDomain):
        evaluate(constant_one(), -0.1)


def test_evaluate_two_branch_max():
    f = max_with_constant(line(1, HALF), Fraction(3, 5))
    assert evaluate(f, 1) == Fraction(3, 5)
    assert evaluate(f, 0) == 1


def test_invariant_checks_reject_bad_functions():
    with pytest.raises(ValueError):
        PLFunction((0, 1), (0.5, 1.0))  # increasing
    with pytest.raises(ValueError):
        PLFunction((0, 0.5, 1), (1.0, 0.9, 0.3))  # concave kink
    with pytest.raises(ValueError):
        PLFunction((0.2, 1), (1.0, 0.5))  # domain must start at 0


def test_affine_combine_identity():
    assert affine_combine([(1, constant_one())], 0) == constant_one()


def test_affine_combine_piglet_first_level():
    f = affine_combine([(HALF, constant_one())], HALF)
    assert f == line(1, HALF)


def test_affine_combine_merges_breakpoints():
    g1 = max_with_constant(line(1, HALF), Fraction(3, 5))     # kink at 4/5
    g2 = max_with_constant(line(1, HALF), Fraction(3, 4))     # kink at 1/2
    out = affine_combine([(HALF, g1), (HALF, g2)], 0)
    assert set(out.xs) <= {0, Fraction(1, 2), Fraction(4, 5), 1}
    assert evaluate(out, 1) == HALF * Fraction(3, 5) + HALF * Fraction(3, 4)


def test_affine_combine_mass_check():
    with pytest.raises(errors.WeightMassError):
        affine_combine([(HALF, constant_one())], Fraction(1, 4))


def test_max_with_constant_crossing():
    f = max_with_constant(line(1, HALF), Fraction(3, 5))
    assert f.xs == (0, Fraction(4, 5), 1)
    assert f.vs == (1, Fraction(3, 5), Fraction(3, 5))
    assert breakpoint_count(f) == 1


def test_max_with_constant_no_op_and_saturation():
    f = line(1, HALF)
    assert max_with_constant(f, 0) == f
    assert max_with_constant(f, Fraction(1, 2)) == f  # equals f(1), no kink
    assert max_with_constant(f, 1) == constant_one()


def test_counter_units():
    c = OpCounter()
    f = affine_combine([(HALF, constant_one())], HALF, counter=c)
    assert c.merges > 0
    evaluate(f, HALF, counter=c)
    assert c.evals >= 1
    assert c.total() == c.merges + c.scans + c.evals


def test_upper_envelope_two_lines():
    # slope-ascending order: steeper line first
    f = upper_envelope([(1, Fraction(3, 4)), (Fraction(2, 3), HALF)])
    # crossing at y = 4/3 > 1: the steeper line wins everywhere
    assert f == line(1, Fraction(3, 4))


def test_upper_envelope_interior_crossing():
    f = upper_envelope([(1, 1), (Fraction(3, 4), HALF)])
    assert f.xs == (0, HALF, 1)
    assert evaluate(f, HALF) == HALF
    assert evaluate(f, 1) == Fraction(1, 4)


def test_upper_envelope_drops_dominated_lines():
    f = upper_envelope([(1, 1), (HALF, HALF), (Fraction(3, 4), HALF)])
    assert breakpoint_count(f) == 1
    assert evaluate(f, 1) == Fraction(1, 4)


def test_solve_system_symmetric():
    f = line(1, HALF)
    x, y = solve_system(f, f)
    assert x == y == Fraction(2, 3)


def test_solve_system_known_asymmetric_pair():
    f_ab = line(1, HALF)
    f_ba = upper_envelope([(1, Fraction(3, 4)), (Fraction(2, 3), HALF)])
    x, y = solve_system(f_ab, f_ba)
    assert (x, y) == (Fraction(4, 5), Fraction(2, 5))


def test_solve_system_constants():
    c = Fraction(3, 7)
    x, y = solve_system(constant(c), constant(c))
    assert x == y == c


def test_solve_system_residual_is_zero():
    f_ab = max_with_constant(line(1, HALF), Fraction(2, 5))
    f_ba = max_with_constant(line(1, Fraction(2, 3)), Fraction(1, 3))
    x, y = solve_system(f_ab, f_ba)
    assert x == evaluate(f_ab, y)
    assert y == evaluate(f_ba, x)


def test_solve_system_rejects_steep_functions():
    bad = PLFunction((0, 1), (1, 0))  # slope exactly -1
    with pytest.raises(errors.NoCrossing):
        solve_system(bad, bad)


@st.composite
def stopping_lines(draw):
    """Exact line bundles shaped like real turn-value candidates:
    slopes strictly in (-1, 0], intercept-at-0 at most 1."""
    k = draw(st.integers(min_value=1, max_value=6))
    den = draw(st.integers(min_value=2, max_value=12))
    out = []
    for _ in range(k):
        B = Fraction(draw(st.integers(min_value=0, max_value=den - 1)), den)
        A = Fraction(draw(st.integers(min_value=1, max_value=den)), den)
        out.append((max(A, B + Fraction(1, den)), B))
    out.sort(key=lambda ab: -ab[1])
    return out


@given(stopping_lines())
@settings(max_examples=60, deadline=None)
def test_upper_envelope_dominates_every_line(lines):
    f = upper_envelope(lines)
    grid = [Fraction(i, 8) for i in range(9)] + [x for x in f.xs]
    for y in grid:
        want = max(A - B * y for A, B in lines)
        assert evaluate(f, y) == want


@given(stopping_lines(), stopping_lines())
@settings(max_examples=40, deadline=None)
def test_solve_system_on_random_envelopes(la, lb):
    f_ab = upper_envelope([(min(A, 1), B) for A, B in la])
    f_ba = upper_envelope([(min(A, 1), B) for A, B in lb])
    x, y = solve_system(f_ab, f_ba)
    assert x == evaluate(f_ab, y)
    assert y == evaluate(f_ba, x)
    assert 0 <= x <= 1 and 0 <= y <= 1

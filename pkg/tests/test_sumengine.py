"""Sum engine: enumeration vs DFT oracle pairs, exact identities, exports."""

import cmath
import itertools
import math
import random

import numpy as np
import pytest

from stratsums.cyclo import CycloValue, zeta_table
from stratsums.errors import CapExceeded
from stratsums.ffield import FieldCtx
from stratsums.polyring import AffineVariety, IntPolynomial, parse_poly
from stratsums.sumengine import (
    S_F_grid,
    SumGrid,
    SumSpec,
    complete_grid,
    cone_sum_identity,
    count_points,
    cyclo_dft,
    dft_grid,
    enumerate_points,
    eval_sum,
    poly_values_grid,
    power_sum_identity_check,
    r_F,
    root_count_grid,
)


def brute_dft(values, p, sign=1):
    """Oracle: O(p^{2n}) double loop."""
    n = values.ndim
    out = np.zeros_like(values, dtype=np.complex128)
    for h in np.ndindex(*values.shape):
        acc = 0j
        for x in np.ndindex(*values.shape):
            dot = sum(hi * xi for hi, xi in zip(h, x)) % p
            acc += values[x] * cmath.exp(sign * 2j * cmath.pi * dot / p)
        out[h] = acc
    return out


# -- enumeration ----------------------------------------------------------------


def test_enumerate_points_variety_examples():
    ctx3 = FieldCtx(3)
    V = AffineVariety(2, [parse_poly("x1^2 + x2^2")])
    pts = [tuple(x.coeffs[0] for x in pt) for pt in enumerate_points(V, ctx3)]
    assert pts == [(0, 0)]  # -1 is a non-residue mod 3

    ctx5 = FieldCtx(5)
    assert count_points(None, ctx5, nvars=2) == 25
    V2 = AffineVariety(3, [parse_poly("x1", nvars=3), parse_poly("x2", nvars=3)])
    assert count_points(V2, ctx5) == 5


def test_enumerate_cap():
    ctx = FieldCtx(5)
    with pytest.raises(CapExceeded):
        list(enumerate_points(None, ctx, nvars=4, cap=100))


def test_poly_values_grid_matches_pointwise():
    rng = random.Random(20)
    p = 7
    for _ in range(10):
        terms = {tuple(rng.randrange(4) for _ in range(2)): rng.randrange(-9, 10)
                 for _ in range(4)}
        f = IntPolynomial(2, terms)
        grid = poly_values_grid(f, p)
        for a in range(p):
            for b in range(p):
                assert grid[a, b] == f.eval_mod_p_int((a, b), p)


# -- single sums -------------------------------------------------------------------


def test_eval_sum_linear_space_values():
    ctx = FieldCtx(3)
    V = AffineVariety(3, [parse_poly("x1", nvars=3), parse_poly("x2", nvars=3)])
    spec = SumSpec(nvars=3, variety=V)
    inside = eval_sum(spec, ctx, h=(1, 0, 0))
    assert inside.cyclo == CycloValue.integer(3, 3)  # p^{n-2} on the dual space
    outside = eval_sum(spec, ctx, h=(0, 0, 1))
    assert outside.cyclo == CycloValue.zero(3)


def test_eval_sum_square_phase_p3():
    # sum over A^1 of e(x^2/3) = 1 + 2 e(1/3) = i sqrt(3)
    ctx = FieldCtx(3)
    spec = SumSpec(nvars=1, additive_phase=parse_poly("x1^2"))
    out = eval_sum(spec, ctx)
    assert out.cyclo == CycloValue(3, [1, 2, 0])
    assert cmath.isclose(out.value, 1j * math.sqrt(3), abs_tol=1e-12)


def test_eval_sum_with_twist_counts_zeros():
    ctx = FieldCtx(5)
    spec = SumSpec(nvars=1, mult_twist=(parse_poly("x1"), 2, 1))
    out = eval_sum(spec, ctx)
    assert out.twist_zeros == 1  # chi(0) convention: flagged, excluded
    assert abs(out.value) < 1e-9  # sum of quadratic character over F_p


def test_eval_sum_extension_field():
    # over F_9, sum of psi(trace phase) of x^2: a Gauss sum over F_9
    ctx = FieldCtx(3, 2)
    spec = SumSpec(nvars=1, additive_phase=parse_poly("x1^2"))
    out = eval_sum(spec, ctx)
    assert abs(abs(out.value) - 3.0) < 1e-9  # |Gauss sum over F_q| = sqrt(q)


# -- power-sum identity ---------------------------------------------------------


def test_power_sum_identity_examples():
    for d, p in [(3, 7), (5, 11), (4, 13)]:
        res = power_sum_identity_check(d, p)
        assert res.identity_ok and res.bound_ok


def test_power_sum_identity_d2_p5_is_sqrt5():
    res = power_sum_identity_check(2, 5)
    assert cmath.isclose(res.lhs, math.sqrt(5), abs_tol=1e-9)


def test_power_sum_identity_rejects_bad_congruence():
    with pytest.raises(ValueError):
        power_sum_identity_check(3, 5)


# -- DFT machinery ----------------------------------------------------------------


def test_dft_grid_matches_brute_force_oracle():
    rng = np.random.default_rng(21)
    p = 3
    vals = rng.normal(size=(p, p, p)) + 1j * rng.normal(size=(p, p, p))
    got = dft_grid(vals, p)
    want = brute_dft(vals, p)
    assert np.max(np.abs(got - want)) < 1e-9


def test_cyclo_dft_matches_complex_dft():
    rng = np.random.default_rng(22)
    p = 5
    idx = rng.integers(0, p, size=(p, p))
    weight = rng.integers(-3, 4, size=(p, p))
    counts = np.zeros((p, p, p), dtype=np.int64)
    for x in np.ndindex(p, p):
        counts[x + (idx[x],)] = weight[x]
    exact = cyclo_dft(counts, p)
    rendered = np.tensordot(exact, zeta_table(p), axes=([-1], [0]))
    vals = weight * zeta_table(p)[idx]
    assert np.max(np.abs(rendered - dft_grid(vals, p))) < 1e-8


def test_complete_grid_constant_function():
    spec = SumSpec(nvars=2)
    grid = complete_grid(spec, 5)
    assert grid.cyclo_at((0, 0)) == CycloValue.integer(25, 5)
    off = grid.abs_values().copy()
    off[0, 0] = 0
    assert np.max(off) < 1e-9


def test_complete_grid_linear_space_indicator():
    # indicator of {x1 = x2 = 0} in A^3 transforms to p^{n-2} on the dual plane
    p = 3
    V = AffineVariety(3, [parse_poly("x1", nvars=3), parse_poly("x2", nvars=3)])
    grid = complete_grid(SumSpec(nvars=3, variety=V), p)
    for h in np.ndindex(p, p, p):
        expect = p if h[2] == 0 else 0
        assert grid.cyclo_at(h) == CycloValue.integer(expect, p)


def test_grid_agrees_with_eval_sum_exhaustively_p3():
    ctx = FieldCtx(3)
    specs = [
        SumSpec(nvars=1, additive_phase=parse_poly("x1^2")),
        SumSpec(nvars=2, additive_phase=parse_poly("x1*x2 + x2^2")),
        SumSpec(nvars=3, variety=AffineVariety(3, [parse_poly("x1^2 + x2*x3", nvars=3)]),
                additive_phase=parse_poly("x3", nvars=3)),
    ]
    for spec in specs:
        grid = complete_grid(spec, 3)
        for h in np.ndindex(*(3,) * spec.nvars):
            want = eval_sum(spec, ctx, h=h)
            assert grid.cyclo_at(h) == want.cyclo


def test_grid_agrees_with_eval_sum_twisted():
    ctx = FieldCtx(5)
    spec = SumSpec(nvars=2, additive_phase=parse_poly("x1^2 + x2"),
                   mult_twist=(parse_poly("x1", nvars=2), 2, 1))
    grid = complete_grid(spec, 5)
    for h in itertools.product(range(5), repeat=2):
        want = eval_sum(spec, ctx, h=h)
        assert abs(grid.value_at(h) - want.value) < 1e-9


def test_dual_sign_flag_reflects_grid():
    # the minus-sign transform evaluates the plus-sign grid at -h
    spec = SumSpec(nvars=2, additive_phase=parse_poly("x1^2*x2 + x1"))
    p = 7
    plus = complete_grid(spec, p, sign=1)
    minus = complete_grid(spec, p, sign=-1)
    for h in itertools.product(range(p), repeat=2):
        neg = tuple((-x) % p for x in h)
        assert abs(plus.value_at(neg) - minus.value_at(h)) < 1e-9


def test_r_F_extension_field():
    # parabola over F_9: each x1 with a square -x1... count roots directly
    ctx = FieldCtx(3, 2)
    F = parse_poly("y^2 - x1")
    total = 0
    for x in ctx.elements():
        got = r_F(F, [x], ctx)
        brute = sum(1 for y in ctx.elements() if (y * y - x).is_zero())
        assert got == brute
        total += got
    assert total == ctx.q  # y ranges over the field, each hits one x1


def test_parseval_on_grids():
    rng = np.random.default_rng(23)
    p, n = 5, 2
    vals = rng.normal(size=(p, p)) + 1j * rng.normal(size=(p, p))
    grid = dft_grid(vals, p)
    lhs = np.sum(np.abs(grid) ** 2)
    rhs = p ** n * np.sum(np.abs(vals) ** 2)
    assert abs(lhs - rhs) <= 1e-6 * rhs


def test_parseval_on_spec_grid():
    spec = SumSpec(nvars=2, additive_phase=parse_poly("x1^2*x2 + x1"))
    p = 7
    grid = complete_grid(spec, p)
    lhs = np.sum(grid.abs_values() ** 2)
    rhs = p ** 2 * p ** 2  # |t| = 1 at every point
    assert abs(lhs - rhs) <= 1e-6 * rhs


# -- root counting ------------------------------------------------------------------


def test_r_F_parabola():
    ctx = FieldCtx(5)
    F = parse_poly("y^2 - x1")
    counts = [r_F(F, [ctx.elem(x)], ctx) for x in range(5)]
    assert set(counts) <= {0, 1, 2}
    assert sum(counts) == 5  # each y hits exactly one x1
    grid = root_count_grid(F, 5)
    assert list(grid) == counts


def test_S_F_grid_linear_is_delta():
    F = parse_poly("y - x1")
    grid = S_F_grid(F, 5)
    assert grid.cyclo_at((0,)) == CycloValue.integer(5, 5)
    for h in range(1, 5):
        assert grid.cyclo_at((h,)) == CycloValue.zero(5)


def test_S_F_grid_matches_triple_loop():
    # oracle: direct triple loop over (y, x1, x2)
    p = 5
    F = parse_poly("y^2 - x1*x2 - 1")
    grid = S_F_grid(F, p)
    h = (1, 1)
    acc = 0j
    for x1 in range(p):
        for x2 in range(p):
            r = sum(1 for y in range(p) if (y * y - x1 * x2 - 1) % p == 0)
            acc += r * cmath.exp(2j * cmath.pi * ((h[0] * x1 + h[1] * x2) % p) / p)
    assert abs(grid.value_at(h) - acc) < 1e-9
    # S_F(0) = number of points of {F = 0} in A^{n+1}
    total = sum(1 for y in range(p) for x1 in range(p) for x2 in range(p)
                if (y * y - x1 * x2 - 1) % p == 0)
    assert grid.cyclo_at((0, 0)) == CycloValue.integer(total, p)


# -- homogeneous cone identity --------------------------------------------------------


def test_cone_sum_identity_quadric_and_cubic():
    for text, p in [("x1^2 + x2^2 + x3^2", 7), ("x1^3 + x2^3 + x3^3", 7)]:
        ok, violations = cone_sum_identity(parse_poly(text), p)
        assert ok, violations


def test_cone_sum_identity_rejects_inhomogeneous():
    with pytest.raises(ValueError):
        cone_sum_identity(parse_poly("x1^2 + x2"), 5)


# -- exports -----------------------------------------------------------------------


def test_binary_round_trip(tmp_path):
    spec = SumSpec(nvars=2, additive_phase=parse_poly("x1*x2"))
    grid = complete_grid(spec, 5)
    path = tmp_path / "grid.bin"
    grid.to_binary(path)
    back = SumGrid.from_binary(path)
    assert back.p == grid.p and back.n == grid.n
    assert np.array_equal(back.counts, grid.counts)
    assert np.allclose(back.values, grid.values)


def test_binary_round_trip_complex(tmp_path):
    spec = SumSpec(nvars=1, additive_phase=parse_poly("x1^2"),
                   mult_twist=(parse_poly("x1"), 2, 1))
    grid = complete_grid(spec, 7)
    path = tmp_path / "grid.bin"
    grid.to_binary(path)
    back = SumGrid.from_binary(path)
    assert back.counts is None
    assert np.allclose(back.values, grid.values)


def test_csv_round_trip(tmp_path):
    spec = SumSpec(nvars=2, additive_phase=parse_poly("x1^2 + x2"))
    grid = complete_grid(spec, 3)
    path = tmp_path / "grid.csv"
    grid.to_csv(path)
    back = SumGrid.from_csv(path)
    assert np.allclose(back.values, grid.values)


def test_grid_cap():
    with pytest.raises(CapExceeded):
        complete_grid(SumSpec(nvars=4), 11, cap=1000)

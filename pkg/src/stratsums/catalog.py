"""Built-in sum families with known stratifications and expected exponents.

Each entry bundles: a grid builder (the sum family S(h) over all h at a
prime), the stratum chain (polynomial generators where practical, membership
masks otherwise), the constants (C, N, d) for the cascade bound
|S(h)| <= C p^{(d+i)/2}, and a table of expected doubled exponents per
stratum (the scale on which |S| ~ p^{e/2} plateaus).  Closed-form evaluators,
where a family has one, are built from Gauss sums so they stay independent
of the DFT engine they are checked against.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cyclo import zeta_table
from .errors import CapExceeded, DEFAULT_GRID_CAP
from .ffield import FieldCtx, gauss_sum
from .polyring import AffineVariety, IntPolynomial
from .strat import (
    StratReport,
    VarietyChain,
    dual_points_mask,
    smoothness_check,
    stratum_index_from_masks,
    verify_kl_masks,
)
from .sumengine import SumGrid, SumSpec, complete_grid, cyclo_dft, poly_values_grid


@dataclass
class CatalogEntry:
    name: str
    ambient: int
    d: int
    C: float
    N: int
    expected_two_exp: dict
    params: dict
    notes: str
    test_primes: tuple
    chain: VarietyChain | None = None
    mask_builder: object = None
    grid_builder: object = None
    closed_form: object = None
    flagged: str | None = None

    def masks(self, p: int):
        if self.chain is not None:
            return self.chain.masks(p)
        return self.mask_builder(p)

    def grid(self, p: int) -> SumGrid:
        return self.grid_builder(p)

    def verify(self, p: int, grid: SumGrid | None = None,
               workers: int = 1) -> StratReport:
        if grid is None:
            grid = self.grid(p)
        excluded = self.N > 1 and self.N % p == 0
        return verify_kl_masks(grid.values, self.masks(p), p, self.C, self.d,
                               excluded=excluded, workers=workers)

    def check_expected(self, p: int, grid: SumGrid | None = None):
        """Per-stratum max |S| against C * p^{e/2} from the expected table.
        Exact-zero strata carry e = -inf.  Returns (ok, rows)."""
        if grid is None:
            grid = self.grid(p)
        idx = stratum_index_from_masks(self.masks(p), grid.values.shape)
        absv = grid.abs_values()
        rows = []
        ok = True
        for i in sorted(set(int(v) for v in np.unique(idx))):
            sel = idx == i
            max_abs = float(absv[sel].max())
            e = self.expected_two_exp.get(i)
            if e is None:
                ok = False
                rows.append((i, max_abs, None, False))
                continue
            if e == float("-inf"):
                bound = 0.0
                good = max_abs <= 1e-9
            else:
                bound = self.C * p ** (e / 2)
                good = max_abs <= bound + 1e-6 * p ** (e / 2)
            ok &= good
            rows.append((i, max_abs, bound, good))
        return ok, rows


# -- linear spaces ---------------------------------------------------------------


def _int_nullspace(rows: list, n: int) -> list:
    """Integer basis of {w : row . w = 0 for all rows}; fraction-free."""
    mat = [[Fraction(x) for x in row] for row in rows]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        mat[r] = [x / mat[r][c] for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * n
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -mat[i][fc]
        lcm = 1
        for x in vec:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
        ivec = [int(x * lcm) for x in vec]
        g = 0
        for x in ivec:
            g = math.gcd(g, x)
        basis.append([x // max(g, 1) for x in ivec])
    return basis


def _matrix_rank(rows: list, n: int) -> int:
    return n - len(_int_nullspace(rows, n))


def _int_det(rows: list) -> int:
    """Exact integer determinant by Laplace expansion (small matrices)."""
    k = len(rows)
    if k == 0:
        return 1
    if k == 1:
        return rows[0][0]
    total = 0
    for j in range(k):
        if rows[0][j] == 0:
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        total += (-1) ** j * rows[0][j] * _int_det(minor)
    return total


def _minor_gcd(rows: list, n: int) -> int:
    """gcd of all maximal minors: the basis drops rank mod p exactly when
    p divides every one of them."""
    k = len(rows)
    g = 0
    for cols in itertools.combinations(range(n), k):
        sub = [[row[c] for c in cols] for row in rows]
        g = math.gcd(g, abs(_int_det(sub)))
    return max(g, 1)


def linear_space(n: int, basis: list) -> CatalogEntry:
    """Sums of psi(h.x) over a codimension-2 linear subspace V = span(basis):
    exactly p^{n-2} on the dual space V-perp, exactly 0 elsewhere.  The chain
    repeats V-perp down to depth n-2 and is empty below; C = 1, and N
    collects the primes where the basis (or its complement) loses rank."""
    basis = [list(b) for b in basis]
    if len(basis) != n - 2 or _matrix_rank(basis, n) != n - 2:
        raise ValueError(f"basis must span a {n - 2}-dimensional subspace")
    complement = _int_nullspace(basis, n)
    V = AffineVariety(n, [_linear_form(w, n) for w in complement],
                      claimed_dim=n - 2)
    dual = AffineVariety(n, [_linear_form(b, n) for b in basis], claimed_dim=2)
    chain = VarietyChain(
        n, [dual] * (n - 2) + [AffineVariety.empty(n)] * 2)
    spec = SumSpec(nvars=n, variety=V)
    expected = {0: float("-inf"), n - 2: 2 * (n - 2)}
    Nex = _minor_gcd(basis, n) * _minor_gcd(complement, n)

    def closed(p):
        mask = np.ones((p,) * n, dtype=bool)
        for b in basis:
            mask &= poly_values_grid(_linear_form(b, n), p) == 0
        return np.where(mask, float(p ** (n - 2)), 0.0).astype(np.complex128)

    return CatalogEntry(
        name="linear_space", ambient=n, d=n - 2, C=1.0, N=Nex,
        expected_two_exp=expected,
        params={"n": n, "basis": basis},
        notes="codimension-2 subspace; sums collapse to the dual plane",
        test_primes=(3, 5, 7, 11), chain=chain,
        grid_builder=lambda p: complete_grid(spec, p),
        closed_form=closed)


def _linear_form(coeffs, n) -> IntPolynomial:
    terms = {}
    for i, c in enumerate(coeffs):
        if c:
            exps = tuple(int(j == i) for j in range(n))
            terms[exps] = int(c)
    return IntPolynomial(n, terms)


# -- diagonal quadratic forms --------------------------------------------------------


def _dual_diagonal_form(coeffs) -> IntPolynomial:
    """sum_i v_i^2 prod_{j != i} a_j: vanishes exactly where
    sum v_i^2 / a_i does (p coprime to all a_j)."""
    n = len(coeffs)
    terms = {}
    for i in range(n):
        prod = 1
        for j, a in enumerate(coeffs):
            if j != i:
                prod *= a
        exps = tuple(2 * int(j == i) for j in range(n))
        terms[exps] = prod
    return IntPolynomial(n, terms)


def _diagonal_form(coeffs) -> IntPolynomial:
    n = len(coeffs)
    return IntPolynomial(n, {tuple(2 * int(j == i) for j in range(n)): int(a)
                             for i, a in enumerate(coeffs)})


def _origin_variety(n: int) -> AffineVariety:
    return AffineVariety(n, [IntPolynomial.variable(i, n) for i in range(n)],
                         claimed_dim=0)


def diagonal_quadratic(n: int, coeffs=None) -> CatalogEntry:
    """T(F, v; p) = sum over the quadric {sum a_i x_i^2 = 0} of psi(v.x).

    Chain depends on the parity of n: for odd n the only non-generic locus
    is the origin; for even n the dual quadric comes first.  The closed-form
    evaluator goes through quadratic Gauss sums (completing the square in
    each variable), independent of the DFT engine.
    """
    if coeffs is None:
        coeffs = [1] * n
    coeffs = [int(a) for a in coeffs]
    if len(coeffs) != n or any(a == 0 for a in coeffs):
        raise ValueError("need n nonzero diagonal coefficients")
    F = _diagonal_form(coeffs)
    origin = _origin_variety(n)
    if n % 2 == 1:
        strata = [origin] * (n - 1)
        expected = {0: n - 1, n - 1: 2 * (n - 1)}
    else:
        dual = AffineVariety(n, [_dual_diagonal_form(coeffs)], claimed_dim=n - 1)
        strata = [dual] + [origin] * (n - 2)
        expected = {0: n - 2, 1: n, n - 1: 2 * (n - 1)}
    chain = VarietyChain(n, strata, check_primes=(3,))
    spec = SumSpec(nvars=n, variety=AffineVariety(n, [F], claimed_dim=n - 1))
    Nex = 2
    for a in coeffs:
        Nex *= abs(a)

    def closed(p):
        if p == 2 or any(a % p == 0 for a in coeffs):
            raise ValueError("closed form needs p odd and coprime to coefficients")
        ctx = FieldCtx(p)
        tau = gauss_sum(ctx, 2, 1)
        chi = np.zeros(p)
        for a in range(1, p):
            chi[a] = 1.0 if pow(a, (p - 1) // 2, p) == 1 else -1.0
        prod_a = 1
        for a in coeffs:
            prod_a = (prod_a * a) % p
        # M[t] = sum_{a != 0} chi(a)^n psi(-t / (4a))
        zt = zeta_table(p)
        M = np.zeros(p, dtype=np.complex128)
        for a in range(1, p):
            inv4a = pow(4 * a, p - 2, p)
            signs = chi[a] ** (n % 2) if n % 2 else 1.0
            M += signs * zt[(-inv4a * np.arange(p)) % p]
        Q = np.zeros((p,) * n, dtype=np.int64)
        mesh = np.indices((p,) * n, dtype=np.int64)
        for i, a in enumerate(coeffs):
            inva = pow(a % p, p - 2, p)
            Q = (Q + inva * mesh[i] ** 2) % p
        out = (tau ** n * chi[prod_a % p] / p) * M[Q]
        out[(0,) * n] += p ** (n - 1)
        return out

    return CatalogEntry(
        name="diagonal_quadratic", ambient=n, d=n - 1, C=2.0, N=Nex,
        expected_two_exp=expected,
        params={"n": n, "coeffs": coeffs},
        notes="full-rank diagonal quadric; parity-dependent strata, "
              "Gauss-sum closed form",
        test_primes=(5, 7, 11, 13), chain=chain,
        grid_builder=lambda p: complete_grid(spec, p),
        closed_form=closed)


# -- smooth homogeneous forms ----------------------------------------------------------


def smooth_form(F: IntPolynomial, max_ext: int = 2,
                smooth_primes: tuple = (5, 7),
                test_primes: tuple = (5, 7, 11, 13)) -> CatalogEntry:
    """Sums over the cone {F = 0} for a homogeneous F cutting a smooth
    projective hypersurface.  The first stratum is the cone on the dual
    hypersurface, located by bounded search over small extensions; the
    origin sits below it.  Smoothness is screened at `smooth_primes`
    (brute force over small extensions); a failing screen flags the entry.
    """
    if not F.is_homogeneous():
        raise ValueError("F must be homogeneous")
    n = F.nvars
    flagged = None
    for p in smooth_primes:
        if F.degree() % p != 0 and not smoothness_check(F, p, max_ext=max_ext):
            flagged = f"singular projective point found at p={p}"
    spec = SumSpec(nvars=n, variety=AffineVariety(n, [F], claimed_dim=n - 1))
    test_primes = tuple(p for p in test_primes if F.degree() % p != 0)

    def masks(p):
        dual = dual_points_mask(F, p, max_ext=max_ext)
        origin = np.zeros((p,) * n, dtype=bool)
        origin[(0,) * n] = True
        return [dual, origin]

    return CatalogEntry(
        name="smooth_form", ambient=n, d=n - 1, C=8.0, N=2 * F.degree(),
        expected_two_exp={0: n - 1, 1: n, 2: 2 * (n - 1)},
        params={"F": F},
        notes="smooth hypersurface cone; first stratum = dual-variety cone "
              "via bounded extension search",
        test_primes=test_primes, mask_builder=masks,
        grid_builder=lambda p: complete_grid(spec, p),
        flagged=flagged)


# -- products of quadric blocks -----------------------------------------------------


def quadric_blocks(n_blocks: int) -> CatalogEntry:
    """n disjoint 4-variable unit quadrics in A^{4n}: the sum factors over
    blocks, producing a chain of depth 3n-1 whose strata count how many
    block forms vanish at the parameter.  X_k for k < n counts >= k
    vanishing blocks; all deeper strata until the origin need every block."""
    n = n_blocks
    if n < 1:
        raise ValueError("need at least one block")
    ambient = 4 * n
    gens = []
    for j in range(n):
        terms = {}
        for i in range(4):
            exps = [0] * ambient
            exps[4 * j + i] = 2
            terms[tuple(exps)] = 1
        gens.append(IntPolynomial(ambient, terms))
    V = AffineVariety(ambient, gens, claimed_dim=3 * n)
    spec = SumSpec(nvars=ambient, variety=V)

    def masks(p):
        block_zero = []
        for g in gens:
            block_zero.append(poly_values_grid(g, p) == 0)
        vanish = np.zeros((p,) * ambient, dtype=np.int64)
        for bz in block_zero:
            vanish += bz
        out = []
        for k in range(1, n):
            out.append(vanish >= k)
        all_vanish = vanish >= n
        for k in range(n, 3 * n - 1):
            out.append(all_vanish)
        origin = np.zeros((p,) * ambient, dtype=bool)
        origin[(0,) * ambient] = True
        out.append(origin)
        return out

    chain = None
    if n == 1:
        chain = VarietyChain(ambient, [AffineVariety(ambient, [gens[0]])]
                             + [_origin_variety(ambient)], check_primes=(3,))
    elif n == 2:
        prod = gens[0] * gens[1]
        both = AffineVariety(ambient, gens)
        chain = VarietyChain(
            ambient,
            [AffineVariety(ambient, [prod])] + [both] * 3
            + [_origin_variety(ambient)],
            check_primes=())

    expected = {k: 3 * n - 1 + k for k in range(n)}
    expected[3 * n - 2] = 4 * n - 1
    expected[3 * n - 1] = 2 * (3 * n - 1)

    return CatalogEntry(
        name="quadric_blocks", ambient=ambient, d=3 * n - 1, C=16.0, N=2,
        expected_two_exp=expected,
        params={"n_blocks": n},
        notes="product of unit 4-variable quadrics; per-stratum exponents "
              "follow the count of vanishing block forms",
        test_primes=(3, 5), chain=chain, mask_builder=masks,
        grid_builder=lambda p: complete_grid(spec, p))


# -- the quadratic family in parameters ------------------------------------------------


def _family_delta_ft_grid(n: int, p: int, cap: int = DEFAULT_GRID_CAP) -> SumGrid:
    """Exact Fourier grid of phi(a, b, x) = [sum_i a_i x_i^2 = 0] psi(-a.b)
    on A^{3n}, with dual coordinates (c, d, v)."""
    if p ** (3 * n) > cap:
        raise CapExceeded(f"family grid {p}^{3 * n} exceeds cap {cap}")
    shape = (p,) * (3 * n)
    mesh = np.indices(shape, dtype=np.int64)
    a = mesh[:n]
    b = mesh[n:2 * n]
    x = mesh[2 * n:]
    fval = np.zeros(shape, dtype=np.int64)
    ab = np.zeros(shape, dtype=np.int64)
    for i in range(n):
        fval = (fval + a[i] * x[i] ** 2) % p
        ab = (ab + a[i] * b[i]) % p
    delta = fval == 0
    counts = np.zeros(shape + (p,), dtype=np.int64)
    flat_idx = ((-ab) % p).reshape(-1)
    flat_delta = delta.reshape(-1)
    cflat = counts.reshape(-1, p)
    np.add.at(cflat, (np.arange(flat_idx.size), flat_idx),
              flat_delta.astype(np.int64))
    out = cyclo_dft(counts, p)
    out -= out.min(axis=-1, keepdims=True)
    values = np.tensordot(out, zeta_table(p), axes=([-1], [0]))
    return SumGrid(p=p, n=3 * n, values=values, counts=out)


def _fiber_quadric_grid(dvec, p: int) -> SumGrid:
    """Exact T(F_d, v; p) grid for one coefficient vector d (the zero form
    sums over all of A^n)."""
    n = len(dvec)
    terms = {}
    for i, di in enumerate(dvec):
        if di % p:
            terms[tuple(2 * int(j == i) for j in range(n))] = int(di)
    if terms:
        V = AffineVariety(n, [IntPolynomial(n, terms)])
        spec = SumSpec(nvars=n, variety=V)
    else:
        spec = SumSpec(nvars=n)
    return complete_grid(spec, p)


def family_identity_check(n: int, p: int):
    """Bit-exact check of FT(phi)(c, d, v) = p^n psi(d.c) T(F_d, v; p) over
    the full (c, d, v) grid, in cyclotomic counts.  Also verifies
    |FT(c, d, v)| = |FT(0, d, v)| for every c."""
    grid = _family_delta_ft_grid(n, p)
    pn = p ** n
    ok = True
    mismatches = []
    for dvec in itertools.product(range(p), repeat=n):
        fiber = _fiber_quadric_grid(dvec, p)
        for v in itertools.product(range(p), repeat=n):
            rhs_base = fiber.cyclo_at(v) * pn
            for cvec in itertools.product(range(p), repeat=n):
                dc = sum(di * ci for di, ci in zip(dvec, cvec)) % p
                lhs = grid.cyclo_at(cvec + dvec + v)
                rhs = rhs_base.rotate(dc)
                if lhs != rhs:
                    ok = False
                    mismatches.append((cvec, dvec, v))
    absvals = np.abs(grid.values)
    zero_c = absvals[(0,) * n]
    mod_ok = bool(np.max(np.abs(absvals - zero_c[None])) < 1e-9) \
        if n == 1 else bool(np.allclose(
            absvals, np.broadcast_to(zero_c, absvals.shape), atol=1e-9))
    return ok and mod_ok, mismatches


def _family_masks(n: int, p: int):
    """Strata of the family grid in (c, d, v): c free, and for each
    zero-pattern K of d the slice {d_K = 0, v_K = 0} enters at a depth set
    by the parity of the surviving block; the loci v = 0 and d = v = 0 sit
    at depths n-1 and n+1.  Every piece has codimension at least its depth,
    and the chain is padded with empty strata up to index 3n-1."""
    shape_dv = (p,) * (2 * n)
    mesh = np.indices(shape_dv, dtype=np.int64)
    d = mesh[:n]
    v = mesh[n:]
    depth = 3 * n - 1
    pieces = []  # (max_depth, mask over (d, v))

    vzero = np.ones(shape_dv, dtype=bool)
    for i in range(n):
        vzero &= v[i] == 0
    if n >= 2:
        pieces.append((n - 1, vzero))
    dzero = np.ones(shape_dv, dtype=bool)
    for i in range(n):
        dzero &= d[i] == 0
    pieces.append((n + 1, dzero & vzero))

    for K in _subsets(n):
        z = len(K)
        n_eff = n - z
        if n_eff == 0:
            continue
        base = np.ones(shape_dv, dtype=bool)
        for i in K:
            base &= (d[i] == 0) & (v[i] == 0)
        depth_gen = z - (1 if n_eff % 2 == 0 else 0)
        if depth_gen >= 1:
            pieces.append((depth_gen, base))
        if n_eff % 2 == 0:
            dual = np.zeros(shape_dv, dtype=np.int64)
            supp = [i for i in range(n) if i not in K]
            for i in supp:
                prod = np.ones(shape_dv, dtype=np.int64)
                for j in supp:
                    if j != i:
                        prod = (prod * d[j]) % p
                dual = (dual + v[i] ** 2 * prod) % p
            pieces.append((z + 1, base & (dual == 0)))

    masks = []
    for j in range(1, depth + 1):
        m = np.zeros(shape_dv, dtype=bool)
        for dep, piece in pieces:
            if j <= dep:
                m |= piece
        masks.append(np.broadcast_to(m, (p,) * n + shape_dv))
    return masks


def _subsets(n: int):
    items = list(range(n))
    for r in range(n + 1):
        yield from itertools.combinations(items, r)


def _per_fiber_chain_masks(dvec, p: int):
    """The parity-dependent quadric chain for one fiber F_d, built directly
    (nonzero d with no vanishing coefficient assumed)."""
    n = len(dvec)
    mesh = np.indices((p,) * n, dtype=np.int64)
    origin = np.ones((p,) * n, dtype=bool)
    for i in range(n):
        origin &= mesh[i] == 0
    if n % 2 == 1:
        return [origin] * (n - 1)
    dual = np.zeros((p,) * n, dtype=np.int64)
    for i in range(n):
        prod = 1
        for j in range(n):
            if j != i:
                prod = (prod * dvec[j]) % p
        dual = (dual + mesh[i] ** 2 * prod) % p
    return [dual == 0] + [origin] * (n - 2)


def family_specialization_check(n: int, p: int):
    """stratum_index under the family chain sliced at d must equal the
    index under the directly-built fiber chain, for every d with all
    coordinates nonzero; degenerate d are flagged, not asserted."""
    masks = _family_masks(n, p)
    dense_ok = True
    flagged = []
    for dvec in itertools.product(range(p), repeat=n):
        sliced = []
        for m in masks:
            sl = m[(0,) * n]  # c = 0 slice; strata do not involve c
            sliced.append(sl[dvec])
        got = stratum_index_from_masks(sliced, (p,) * n)
        want = stratum_index_from_masks(_per_fiber_chain_masks(dvec, p),
                                        (p,) * n)
        match = np.array_equal(got, want)
        if all(x % p for x in dvec):
            dense_ok &= match
        elif not match:
            flagged.append(tuple(dvec))
    return dense_ok, flagged


def quadratic_family(n: int) -> CatalogEntry:
    """The diagonal-quadric family over its own coefficients: phi on A^{3n},
    whose Fourier grid collapses to p^n psi(d.c) T(F_d, v; p)."""
    expected = {j: 3 * n - 1 + j for j in range(n)}
    expected[n + 1] = 4 * n  # the whole-c line over d = v = 0
    return CatalogEntry(
        name="quadratic_family", ambient=3 * n, d=3 * n - 1, C=2.0, N=2,
        expected_two_exp=expected,
        params={"n": n},
        notes="coefficient-parameterized quadrics; family strata specialize "
              "to the per-fiber parity chains",
        test_primes=(3,),
        mask_builder=lambda p: _family_masks(n, p),
        grid_builder=lambda p: _family_delta_ft_grid(n, p))


# -- Burgess product sums --------------------------------------------------------------


def burgess_sums(r: int, p: int, chi_order: int, chi_index: int = 1) -> np.ndarray:
    """B(a, b) = sum_x chi((x-a_1)...(x-a_r)) conj chi((x-b_1)...(x-b_r))
    over the full parameter grid F_p^{2r}."""
    ctx = FieldCtx(p)
    tab = ctx.mult_char_table(chi_order, chi_index)
    xs = np.arange(p, dtype=np.int64)
    prod = np.ones((p,) * r + (p,), dtype=np.int64)
    for i in range(r):
        shape = [1] * (r + 1)
        shape[i] = p
        ai = xs.reshape(shape)
        diff = (xs.reshape((1,) * r + (p,)) - ai) % p
        prod = (prod * diff) % p
    half = tab[prod]                      # shape (p,)*r + (p,), indexed by a, x
    flat = half.reshape(-1, p)
    out = flat @ flat.conj().T            # (p^r, p^r): sum over x
    return out.reshape((p,) * (2 * r))


def multiplicity_one_mask(r: int, p: int) -> np.ndarray:
    """True where some value occurs exactly once among (a_1..a_r, b_1..b_r):
    the locus where the square-root bound is asserted."""
    grids = np.indices((p,) * (2 * r), dtype=np.int64)
    any_single = np.zeros((p,) * (2 * r), dtype=bool)
    for v in range(p):
        cnt = np.zeros((p,) * (2 * r), dtype=np.int64)
        for g in grids:
            cnt += g == v
        any_single |= cnt == 1
    return any_single


@dataclass
class BurgessReport:
    r: int
    p: int
    orders: list
    max_on_good: float
    bound: float
    violations: list
    witness: tuple
    witness_value: float
    passed: bool


def burgess_check(r: int, p: int, order_cap: int | None = None) -> BurgessReport:
    """Exhaustive check of |B| <= (2r-1) sqrt(p) off the excluded stratum,
    for the quadratic character and one character of each order dividing
    p - 1 (up to order_cap); plus a no-cancellation witness inside it."""
    if p <= 2 * r:
        raise ValueError("need p > 2r")
    good = multiplicity_one_mask(r, p)
    bound = (2 * r - 1) * math.sqrt(p)
    orders = sorted({2} | {o for o in range(2, p) if (p - 1) % o == 0
                           and (order_cap is None or o <= order_cap)})
    violations = []
    max_good = 0.0
    for order in orders:
        vals = np.abs(burgess_sums(r, p, order))
        m = float(vals[good].max())
        max_good = max(max_good, m)
        if m > bound + 1e-6:
            bad = good & (vals > bound + 1e-6)
            for flat in np.flatnonzero(bad.reshape(-1))[:5]:
                violations.append(
                    (order, tuple(int(t) for t in
                                  np.unravel_index(flat, vals.shape))))
    witness = (0,) * (2 * r)
    wval = float(np.abs(burgess_sums(r, p, 2))[witness])
    passed = not violations and wval >= p - 1 - bound
    return BurgessReport(r=r, p=p, orders=orders, max_on_good=max_good,
                         bound=bound, violations=violations,
                         witness=witness, witness_value=wval, passed=passed)


def burgess_family(r: int) -> CatalogEntry:
    """Product character sums over F_p^{2r} parameters; the excluded stratum
    is the no-multiplicity-one locus where only the trivial bound holds."""
    if r < 1:
        raise ValueError("need r >= 1")

    def masks(p):
        return [~multiplicity_one_mask(r, p)]

    def grid(p):
        return SumGrid(p=p, n=2 * r, values=burgess_sums(r, p, 2))

    return CatalogEntry(
        name="burgess_family", ambient=2 * r, d=1, C=float(2 * r - 1), N=2,
        expected_two_exp={0: 1, 1: 2},
        params={"r": r},
        notes="Burgess-type product character sums; excluded stratum = "
              "no parameter value of multiplicity one",
        test_primes=(7, 11),
        mask_builder=masks, grid_builder=grid)


# -- registry ---------------------------------------------------------------------------


def _build_linear_space(params):
    n = int(params.get("n", 3))
    basis = params.get("basis")
    if basis is None:
        basis = [[int(i == j) for i in range(n)] for j in range(2, n)]
    return linear_space(n, basis)


def _build_diagonal_quadratic(params):
    n = int(params.get("n", 3))
    coeffs = params.get("coeffs")
    return diagonal_quadratic(n, coeffs)


def _build_smooth_form(params):
    from .polyring import parse_poly
    F = params.get("F", "x1^3 + x2^3 + x3^3")
    if isinstance(F, str):
        F = parse_poly(F)
    return smooth_form(F)


def _build_quadric_blocks(params):
    return quadric_blocks(int(params.get("n_blocks", 1)))


def _build_quadratic_family(params):
    return quadratic_family(int(params.get("n", 1)))


def _build_burgess(params):
    return burgess_family(int(params.get("r", 1)))


CATALOG = {
    "linear_space": _build_linear_space,
    "diagonal_quadratic": _build_diagonal_quadratic,
    "smooth_form": _build_smooth_form,
    "quadric_blocks": _build_quadric_blocks,
    "quadratic_family": _build_quadratic_family,
    "burgess_family": _build_burgess,
}


def build_entry(name: str, params: dict | None = None) -> CatalogEntry:
    if name not in CATALOG:
        raise KeyError(f"unknown catalog entry {name!r}; "
                       f"known: {', '.join(sorted(CATALOG))}")
    return CATALOG[name](params or {})

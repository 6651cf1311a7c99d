"""Exact evaluation of exponential sums: point enumeration, single sums,
and complete parameter grids via multidimensional DFT over F_p^n.

Two independent evaluation paths are kept deliberately separate so each can
serve as the other's oracle:

* `eval_sum` enumerates points and accumulates character values;
* `complete_grid` builds the pointwise trace values once and applies a
  length-p DFT per axis (naive O(p^2) transform, vectorized).

Purely additive sums are carried exactly as zeta_p-coefficient counts
(`CycloValue`), so identity checks are bit-exact rather than tolerance-based.
"""

from __future__ import annotations

import itertools
import struct
from dataclasses import dataclass

import numpy as np

from .cyclo import CycloValue, zeta_table
from .errors import CapExceeded, DEFAULT_ENUM_CAP, DEFAULT_GRID_CAP, ParseError
from .ffield import FieldCtx, gauss_sum
from .polyring import AffineVariety, IntPolynomial
from .util import parallel_map

_WEIGHT_KINDS = ("root_count", "kloosterman_phase", "kloosterman_value")


@dataclass(frozen=True)
class SumSpec:
    """Description of one exponential sum family.

    The summand over points x of the domain is

        weight(x) * chi(g(x)) * psi_m(f(x) + h.x) * q^(-half_twist/2)

    where the domain is the variety's points (all of A^n when variety is
    None), restricted to nonzero coordinates when torus is set.  The optional
    trace_weight replaces/augments the plain summand:

    * ("root_count", F): weight(x) = #{y : F(y, x) = 0}, F monic-ish in y;
    * ("kloosterman_phase", a): one variable, torus; phase f is replaced by
      x + a/x (the classical Kloosterman summand psi(x + a/x));
    * ("kloosterman_value",): one variable, torus; t(x) is the weight-zero
      normalized Kloosterman sum value -q^{-1/2} Kl(x), for mean-square
      experiments.
    """

    nvars: int
    variety: AffineVariety | None = None
    additive_phase: IntPolynomial | None = None
    mult_twist: tuple | None = None          # (g, chi_order, chi_index)
    linear_form: tuple | None = None
    trace_weight: tuple | None = None
    torus: bool = False
    half_twist: int = 0

    def __post_init__(self):
        if self.variety is not None and self.variety.nvars != self.nvars:
            raise ValueError("variety ambient dimension mismatch")
        if self.additive_phase is not None and self.additive_phase.nvars != self.nvars:
            raise ValueError("additive phase nvars mismatch")
        if self.mult_twist is not None:
            g = self.mult_twist[0]
            if g.nvars != self.nvars:
                raise ValueError("twist polynomial nvars mismatch")
        if self.linear_form is not None and len(self.linear_form) != self.nvars:
            raise ValueError("linear form length mismatch")
        if self.trace_weight is not None:
            kind = self.trace_weight[0]
            if kind not in _WEIGHT_KINDS:
                raise ValueError(f"unknown trace weight {kind!r}")
            if kind == "root_count":
                F = self.trace_weight[1]
                if F.nvars != self.nvars + 1:
                    raise ValueError("root-count polynomial needs nvars+1 variables (y first)")
            else:
                if self.nvars != 1:
                    raise ValueError("Kloosterman weights are 1-variable")
                object.__setattr__(self, "torus", True)

    def is_exact(self) -> bool:
        """True when the sum lands in Z[zeta_p] exactly."""
        if self.mult_twist is not None or self.half_twist:
            return False
        return self.trace_weight is None or \
            self.trace_weight[0] in ("root_count", "kloosterman_phase")


@dataclass
class SumValue:
    """Result of a single sum: exact cyclotomic payload when available,
    complex rendering always, plus bookkeeping flags."""

    value: complex
    cyclo: CycloValue | None
    n_points: int
    twist_zeros: int = 0

    def __abs__(self):
        return abs(self.value)


# -- grid-level polynomial evaluation (base field) ---------------------------


def poly_values_grid(f: IntPolynomial, p: int) -> np.ndarray:
    """f mod p over the full grid F_p^n, shape (p,)*n, int64."""
    n = f.nvars
    mesh = np.indices((p,) * n, dtype=np.int64)
    out = np.zeros((p,) * n, dtype=np.int64)
    pow_cache: dict[int, np.ndarray] = {}
    for exps, coeff in f.terms.items():
        term = np.full((p,) * n, coeff % p, dtype=np.int64)
        for i, e in enumerate(exps):
            if e:
                if e not in pow_cache:
                    pow_cache[e] = np.array([pow(x, e, p) for x in range(p)],
                                            dtype=np.int64)
                term = (term * pow_cache[e][mesh[i]]) % p
        out = (out + term) % p
    return out


def variety_mask(V: AffineVariety | None, p: int, nvars: int) -> np.ndarray:
    """Boolean grid of F_p-points of V (all True for the full space)."""
    mask = np.ones((p,) * nvars, dtype=bool)
    if V is not None:
        for g in V.generators:
            mask &= poly_values_grid(g, p) == 0
    return mask


def root_count_grid(F: IntPolynomial, p: int) -> np.ndarray:
    """r_F(x) = #{y in F_p : F(y, x) = 0} over the grid F_p^n; F has
    variables (y, x1..xn)."""
    if F.nvars < 2:
        raise ValueError("root-count polynomial needs (y, x1..xn)")
    n = F.nvars - 1
    counts = np.zeros((p,) * n, dtype=np.int64)
    for y in range(p):
        fy = F.specialize({0: y})
        counts += (poly_values_grid(fy, p) == 0)
    return counts


def r_F(F: IntPolynomial, x, ctx: FieldCtx) -> int:
    """Number of roots y in the context field of F(y, x) = 0."""
    if len(x) != F.nvars - 1:
        raise ValueError("point dimension mismatch")
    count = 0
    for y in ctx.elements():
        if F.eval_mod([y, *x]).is_zero():
            count += 1
    return count


# -- point enumeration ---------------------------------------------------------


def enumerate_points(V: AffineVariety | None, ctx: FieldCtx, nvars: int | None = None,
                     torus: bool = False, cap: int = DEFAULT_ENUM_CAP):
    """Yield the points of V over the context field, each exactly once."""
    if V is not None:
        nvars = V.nvars
    if nvars is None:
        raise ValueError("need nvars when no variety is given")
    total = ctx.q ** nvars
    if total > cap:
        raise CapExceeded(f"enumeration of {ctx.q}^{nvars} points exceeds cap {cap}")
    elems = list(ctx.elements())
    if torus:
        elems = [e for e in elems if not e.is_zero()]
    for point in itertools.product(elems, repeat=nvars):
        if V is None or V.contains(list(point)):
            yield list(point)


def count_points(V: AffineVariety | None, ctx: FieldCtx, nvars: int | None = None,
                 torus: bool = False, cap: int = DEFAULT_ENUM_CAP) -> int:
    return sum(1 for _ in enumerate_points(V, ctx, nvars, torus, cap))


# -- single-sum evaluation (enumeration path) -----------------------------------


def _kloosterman_raw_table(ctx: FieldCtx) -> np.ndarray:
    """Kl(x) = sum_u psi(u + x/u) for every rank, via cyclic convolution of
    psi over generator powers."""
    q, p = ctx.q, ctx.p
    tr = ctx.trace_table
    exp_ranks = ctx.exp_ranks
    f = zeta_table(p)[tr[exp_ranks]]            # psi(g^b), b = 0..q-2
    conv = np.fft.ifft(np.fft.fft(f) ** 2)      # sum_b f[b] f[a-b]
    out = np.zeros(q, dtype=np.complex128)
    out[exp_ranks] = conv
    out[0] = -1.0                                # Kl(0) = sum_{u!=0} psi(u)
    return out


def eval_sum(spec: SumSpec, ctx: FieldCtx, h=None,
             cap: int = DEFAULT_ENUM_CAP) -> SumValue:
    """Exact sum over the spec's domain by direct point enumeration."""
    p = ctx.p
    if h is None:
        h = spec.linear_form
    if h is not None and len(h) != spec.nvars:
        raise ValueError("linear form length mismatch")

    kind = spec.trace_weight[0] if spec.trace_weight else None
    chi_tab = None
    if spec.mult_twist is not None:
        _, order, index = spec.mult_twist
        if (ctx.q - 1) % order != 0:
            raise ValueError(f"character order {order} does not divide q-1")
        chi_tab = ctx.mult_char_table(order, index)

    counts = [0] * p
    acc = 0j
    zeta = zeta_table(p)
    n_points = 0
    twist_zeros = 0
    kl_values = _kloosterman_raw_table(ctx) if kind == "kloosterman_value" else None

    for point in enumerate_points(spec.variety, ctx, spec.nvars, spec.torus, cap):
        n_points += 1
        if kind == "kloosterman_phase":
            x = point[0]
            a = spec.trace_weight[1] % p
            val = x + ctx.elem(a) * x.inverse()
            idx = ctx.trace_to_base(val)
            weight = 1
        else:
            idx = 0
            if spec.additive_phase is not None:
                idx = ctx.trace_to_base(spec.additive_phase.eval_mod(point))
            weight = 1
            if kind == "root_count":
                weight = r_F(spec.trace_weight[1], point, ctx)
        if h is not None and any(h):
            lin = ctx.zero()
            for hi, xi in zip(h, point):
                if hi % p:
                    lin = lin + ctx.elem(hi) * xi
            idx = (idx + ctx.trace_to_base(lin)) % p

        if kind == "kloosterman_value":
            tval = -kl_values[point[0].rank] / np.sqrt(ctx.q)
            acc += tval * zeta[idx]
        elif chi_tab is not None:
            g = spec.mult_twist[0]
            gval = g.eval_mod(point)
            if gval.is_zero():
                twist_zeros += 1
                continue
            acc += weight * chi_tab[gval.rank] * zeta[idx]
        else:
            counts[idx] += weight

    if kind == "kloosterman_value" or chi_tab is not None:
        value, cyc = complex(acc), None
    else:
        cyc = CycloValue(p, counts)
        value = cyc.to_complex()
    if spec.half_twist:
        value = value / ctx.q ** (spec.half_twist / 2)
        cyc = None
    return SumValue(value=value, cyclo=cyc, n_points=n_points,
                    twist_zeros=twist_zeros)


# -- complete grids (DFT path) ---------------------------------------------------


def dft_grid(values: np.ndarray, p: int, sign: int = 1,
             workers: int = 1) -> np.ndarray:
    """out[h] = sum_x values[x] e(sign * h.x / p): naive length-p transform
    per axis (matrix product; adequate well past p = 101).  Workers split
    the output rows of each axis; results are worker-count independent."""
    n = values.ndim
    hs = np.arange(p)
    W = np.exp(sign * 2j * np.pi * np.outer(hs, hs) / p)
    out = values.astype(np.complex128)
    for axis in range(n):
        moved = np.moveaxis(out, axis, 0)
        rows = parallel_map(lambda h: np.tensordot(W[h], moved, axes=(0, 0)),
                            range(p), workers)
        out = np.moveaxis(np.stack(rows), 0, axis)
    return out


def cyclo_dft(counts: np.ndarray, p: int, sign: int = 1,
              workers: int = 1) -> np.ndarray:
    """Exact transform of a zeta-coefficient field: counts has shape
    (p,)*n + (p,), the trailing axis indexing zeta powers.  Multiplying by
    zeta^s is a roll of that axis.  Workers split the output rows of each
    axis and write disjoint slots, so output does not depend on the count."""
    n = counts.ndim - 1
    out = counts
    for axis in range(n):
        moved = np.moveaxis(out, axis, 0)

        def row(h):
            acc = np.zeros_like(moved[0])
            for x in range(p):
                acc += np.roll(moved[x], (sign * h * x) % p, axis=-1)
            return acc

        rows = parallel_map(row, range(p), workers)
        out = np.moveaxis(np.stack(rows), 0, axis)
    return out


@dataclass
class SumGrid:
    """Values of a sum family over all h in F_p^n.  When the family is purely
    additive, `counts` holds the exact cyclotomic payload and `values` is its
    complex rendering."""

    p: int
    n: int
    values: np.ndarray
    counts: np.ndarray | None = None

    def value_at(self, h) -> complex:
        return complex(self.values[tuple(hi % self.p for hi in h)])

    def cyclo_at(self, h) -> CycloValue | None:
        if self.counts is None:
            return None
        return CycloValue(self.p, self.counts[tuple(hi % self.p for hi in h)])

    def abs_values(self) -> np.ndarray:
        return np.abs(self.values)

    def to_csv(self, path):
        cols = [f"h{i + 1}" for i in range(self.n)] + ["re", "im", "abs"]
        with open(path, "w") as fh:
            fh.write(",".join(cols) + "\n")
            for idx in np.ndindex(*self.values.shape):
                v = complex(self.values[idx])
                row = [str(i) for i in idx] + [repr(v.real), repr(v.imag), repr(abs(v))]
                fh.write(",".join(row) + "\n")

    _MAGIC = b"SGRD"

    def to_binary(self, path):
        """Compact dump: magic, p, n, value kind (0 complex128, 1 int64
        zeta-counts), then row-major values."""
        kind = 1 if self.counts is not None else 0
        with open(path, "wb") as fh:
            fh.write(self._MAGIC)
            fh.write(struct.pack("<IIB", self.p, self.n, kind))
            if kind:
                fh.write(np.ascontiguousarray(self.counts, dtype=np.int64).tobytes())
            else:
                fh.write(np.ascontiguousarray(self.values, dtype=np.complex128).tobytes())

    @classmethod
    def from_binary(cls, path) -> "SumGrid":
        with open(path, "rb") as fh:
            magic = fh.read(4)
            if magic != cls._MAGIC:
                raise ParseError(f"bad grid magic {magic!r}")
            p, n, kind = struct.unpack("<IIB", fh.read(9))
            payload = fh.read()
        if kind:
            counts = np.frombuffer(payload, dtype=np.int64).reshape((p,) * n + (p,))
            values = np.tensordot(counts, zeta_table(p), axes=([-1], [0]))
            return cls(p=p, n=n, values=values, counts=counts.copy())
        values = np.frombuffer(payload, dtype=np.complex128).reshape((p,) * n)
        return cls(p=p, n=n, values=values.copy())

    @classmethod
    def from_csv(cls, path) -> "SumGrid":
        with open(path) as fh:
            header = fh.readline().strip().split(",")
            n = len(header) - 3
            rows = [line.strip().split(",") for line in fh if line.strip()]
        p = max(int(r[0]) for r in rows) + 1 if n else 1
        values = np.zeros((p,) * n, dtype=np.complex128)
        for r in rows:
            idx = tuple(int(c) for c in r[:n])
            values[idx] = complex(float(r[n]), float(r[n + 1]))
        return cls(p=p, n=n, values=values)


def trace_function_grid(spec: SumSpec, p: int):
    """Pointwise summand data over F_p^nvars for a base-field spec.

    Returns ("exact", weight, idx) with integer weights and additive phase
    indices, or ("complex", values)."""
    n = spec.nvars
    mask = variety_mask(spec.variety, p, n)
    if spec.torus:
        mesh = np.indices((p,) * n)
        for i in range(n):
            mask &= mesh[i] != 0
    kind = spec.trace_weight[0] if spec.trace_weight else None

    idx = np.zeros((p,) * n, dtype=np.int64)
    if spec.additive_phase is not None:
        idx = poly_values_grid(spec.additive_phase, p)
    if kind == "kloosterman_phase":
        a = spec.trace_weight[1] % p
        x = np.arange(p, dtype=np.int64)
        inv = np.array([0] + [pow(int(v), p - 2, p) for v in range(1, p)],
                       dtype=np.int64)
        idx = (x + a * inv) % p

    weight = mask.astype(np.int64)
    if kind == "root_count":
        weight = weight * root_count_grid(spec.trace_weight[1], p)

    if spec.is_exact():
        return "exact", weight, idx

    values = weight * zeta_table(p)[idx]
    if kind == "kloosterman_value":
        ctx = FieldCtx(p)
        values = values * (-_kloosterman_raw_table(ctx) / np.sqrt(p))
    if spec.mult_twist is not None:
        g, order, index = spec.mult_twist
        ctx = FieldCtx(p)
        chi = ctx.mult_char_table(order, index)
        values = values * chi[poly_values_grid(g, p)]
    if spec.half_twist:
        values = values / p ** (spec.half_twist / 2)
    return "complex", values


def complete_grid(spec: SumSpec, p: int, sign: int = 1,
                  cap: int = DEFAULT_GRID_CAP, workers: int = 1) -> SumGrid:
    """All sums S(h) = sum_x t(x) psi(h.x) at once, as an n-dimensional
    transform of the pointwise trace values.  Base field only."""
    n = spec.nvars
    if spec.linear_form is not None and any(spec.linear_form):
        raise ValueError("complete_grid sweeps all h; fix the spec's linear form to None")
    if p ** n > cap:
        raise CapExceeded(f"grid {p}^{n} exceeds cap {cap}")
    data = trace_function_grid(spec, p)
    if data[0] == "exact":
        _, weight, idx = data
        counts = np.zeros((p,) * n + (p,), dtype=np.int64)
        flat_w = weight.reshape(-1)
        flat_i = idx.reshape(-1)
        cflat = counts.reshape(-1, p)
        np.add.at(cflat, (np.arange(flat_w.size), flat_i), flat_w)
        out_counts = cyclo_dft(counts, p, sign, workers=workers)
        # canonical form per cell (min coefficient 0): exact zeros render as 0
        out_counts -= out_counts.min(axis=-1, keepdims=True)
        values = np.tensordot(out_counts, zeta_table(p), axes=([-1], [0]))
        return SumGrid(p=p, n=n, values=values, counts=out_counts)
    _, values = data
    return SumGrid(p=p, n=n, values=dft_grid(values, p, sign, workers=workers))


def S_F_grid(F: IntPolynomial, p: int, cap: int = DEFAULT_GRID_CAP) -> SumGrid:
    """Grid of S_F(h) = sum_x psi(h.x) r_F(x); exact, S_F(0) is the affine
    point count of {F = 0}."""
    spec = SumSpec(nvars=F.nvars - 1, trace_weight=("root_count", F))
    return complete_grid(spec, p, cap=cap)


# -- identities ---------------------------------------------------------------


@dataclass
class PowerSumIdentity:
    d: int
    p: int
    lhs: complex
    rhs: complex
    lhs_cyclo: CycloValue
    identity_ok: bool
    bound: float
    bound_ok: bool


def power_sum_identity_check(d: int, p: int, tol: float = 1e-6) -> PowerSumIdentity:
    """Compare the monomial character sum sum_x e(x^d/p) (enumeration) with
    the equivalent sum of d-1 Gauss sums, and check the Weil bound
    (d-1) sqrt(p)."""
    if d < 2:
        raise ValueError("need d >= 2")
    if p % d != 1:
        raise ValueError(f"need p = 1 mod d, got p={p}, d={d}")
    counts = [0] * p
    for x in range(p):
        counts[pow(x, d, p)] += 1
    lhs_cyclo = CycloValue(p, counts)
    lhs = lhs_cyclo.to_complex()
    ctx = FieldCtx(p)
    rhs = sum(gauss_sum(ctx, d, k) for k in range(1, d))
    bound = (d - 1) * p ** 0.5
    return PowerSumIdentity(
        d=d, p=p, lhs=lhs, rhs=complex(rhs), lhs_cyclo=lhs_cyclo,
        identity_ok=abs(lhs - rhs) <= tol,
        bound=bound, bound_ok=abs(lhs) <= bound + tol)


def cone_sum_identity(F: IntPolynomial, p: int, cap: int = 1 << 14):
    """For homogeneous F and each v != 0, check the exact identity

        (p-1) * T(F, v) = p * #{x : F(x) = 0, x.v = 0} - #{x : F(x) = 0}

    in Z[zeta_p].  Returns (ok, violations) with witness vectors.  Work is
    quadratic in the grid size, hence the tighter default cap."""
    if not F.is_homogeneous():
        raise ValueError("F must be homogeneous")
    n = F.nvars
    if p ** n > cap:
        raise CapExceeded(f"identity sweep {p}^{n} exceeds cap {cap} "
                          "(quadratic work)")
    spec = SumSpec(nvars=n, variety=AffineVariety(n, [F]))
    grid = complete_grid(spec, p)
    fmask = (poly_values_grid(F, p) == 0).reshape(-1)
    coords = np.indices((p,) * n).reshape(n, -1).T
    n0 = int(fmask.sum())
    violations = []
    for h in np.ndindex(*(p,) * n):
        if not any(h):
            continue
        dots = coords @ np.array(h, dtype=np.int64) % p
        n1 = int((fmask & (dots == 0)).sum())
        lhs = grid.cyclo_at(h) * (p - 1)
        rhs = CycloValue.integer(p * n1 - n0, p)
        if lhs != rhs:
            violations.append((tuple(h), lhs, rhs))
    return not violations, violations

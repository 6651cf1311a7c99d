"""Recover Frobenius eigenvalue magnitudes from extension-field power sums.

The sums S_n = sum_{x in V(k_n)} t(x) of a fixed spec over growing field
extensions form a generalized power-sum sequence sum_j eps_j m_j alpha_j^n.
`fit_recurrence` detects the minimal recurrence rank (Hankel SVD), extracts
the alpha_j as companion-matrix eigenvalues, and solves for signed integer
multiplicities; `weight_check` tests that every |alpha_j| sits on the
p^{w/2} magnitude grid with w below a given ceiling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cyclo import CycloValue, zeta_table
from .errors import CapExceeded, DEFAULT_ENUM_CAP, RankTooHigh
from .ffield import FieldCtx, least_irreducible, next_irreducible
from .sumengine import (
    SumSpec,
    SumValue,
    _kloosterman_raw_table,
    enumerate_points,
    eval_sum,
    r_F,
)

_TABLE_CAP = 1 << 22  # largest q*q mesh for the vectorized 2-variable path


@dataclass
class PowerSumSequence:
    p: int
    spec: SumSpec
    values: list
    cyclos: list

    @property
    def N(self) -> int:
        return len(self.values)


def _extension_ctx(p: int, n: int, modulus_choice: str, cap: int) -> FieldCtx:
    if modulus_choice == "least":
        return FieldCtx(p, n, cap=cap)
    if modulus_choice == "second":
        if n == 1:
            return FieldCtx(p, 1, cap=cap)
        alt = next_irreducible(p, n, least_irreducible(p, n))
        return FieldCtx(p, n, modulus=alt, cap=cap)
    raise ValueError(f"unknown modulus choice {modulus_choice!r}")


def generator_power_traces(ctx: FieldCtx) -> np.ndarray:
    """s_b = Tr(g^b) for b in [0, q-1), via the linear recurrence whose
    characteristic polynomial is the minimal polynomial of the generator.
    A generator is primitive, so its minimal polynomial has full degree m."""
    q, p, m = ctx.q, ctx.p, ctx.m
    g = ctx.generator
    mp = ctx.min_poly(g)
    if len(mp) - 1 != m:
        raise AssertionError("generator minimal polynomial is not full degree")
    s = np.zeros(q - 1, dtype=np.int64)
    acc = ctx.one()
    for b in range(min(m, q - 1)):
        s[b] = ctx.trace_to_base(acc)
        acc = ctx.mul(acc, g)
    lower = [(-c) % p for c in mp[:m]]  # s[b] = sum_k lower[k] s[b-m+k]
    sl = s.tolist()
    for b in range(m, q - 1):
        acc_v = 0
        for k in range(m):
            acc_v += lower[k] * sl[b - m + k]
        sl[b] = acc_v % p
    return np.array(sl, dtype=np.int64)


def _monomial_phase_counts(spec: SumSpec, ctx: FieldCtx) -> CycloValue:
    """Fast path for 1-variable purely additive specs: the trace of
    c x^k at x = g^b is c * s[(k b) mod (q-1)], by linearity of the trace."""
    p, q = ctx.p, ctx.q
    s = generator_power_traces(ctx)
    b = np.arange(q - 1, dtype=np.int64)
    phase = np.zeros(q - 1, dtype=np.int64)
    const = 0
    if spec.trace_weight is not None and spec.trace_weight[0] == "kloosterman_phase":
        a = spec.trace_weight[1] % p
        phase = (s + a * s[(-b) % (q - 1)]) % p
    elif spec.additive_phase is not None:
        for exps, coeff in spec.additive_phase.terms.items():
            k, c = exps[0], coeff % p
            if k == 0:
                const = (const + c) % p
                continue
            phase = (phase + c * s[(k * b) % (q - 1)]) % p
    phase = (phase + const) % p
    counts = np.bincount(phase, minlength=p)
    if not spec.torus:
        # x = 0 contributes psi(f(0))
        f0 = const if spec.additive_phase is None else \
            spec.additive_phase.eval_mod_p_int((0,), p)
        counts[f0 % p] += 1
    return CycloValue(p, counts.tolist())


def _has_fast_path(spec: SumSpec) -> bool:
    if spec.mult_twist is not None or spec.variety is not None:
        return False
    if spec.linear_form is not None and any(spec.linear_form):
        return False
    if spec.trace_weight is not None:
        return spec.trace_weight[0] == "kloosterman_phase"
    return spec.nvars == 1


class _ExtTables:
    """Rank-indexed arithmetic tables for one extension field: vectorized
    polynomial evaluation over q x q meshes."""

    def __init__(self, ctx: FieldCtx):
        q, p, m = ctx.q, ctx.p, ctx.m
        self.ctx = ctx
        dl = ctx.dlog_table
        expr = ctx.exp_ranks
        ranks = np.arange(q, dtype=np.int64)
        # multiplication via dlog: zero rows/columns stay zero
        dsum = (dl[:, None] + dl[None, :]) % (q - 1) if q > 2 else \
            np.zeros((q, q), dtype=np.int64)
        mul = expr[dsum]
        mul[0, :] = 0
        mul[:, 0] = 0
        self.mul = mul
        add = np.zeros((q, q), dtype=np.int64)
        for i in range(m):
            d1 = (ranks[:, None] // p ** i) % p
            d2 = (ranks[None, :] // p ** i) % p
            add += ((d1 + d2) % p) * p ** i
        self.add = add
        self.trace = ctx.trace_table
        self._pow: dict[int, np.ndarray] = {}
        self._scalar: dict[int, np.ndarray] = {}

    def power(self, e: int) -> np.ndarray:
        """rank -> rank of x^e."""
        if e not in self._pow:
            q = self.ctx.q
            out = np.zeros(q, dtype=np.int64)
            if e == 0:
                out[:] = 1  # rank of the unit
            else:
                dl = self.ctx.dlog_table
                nz = np.arange(q)[dl >= 0]
                out[nz] = self.ctx.exp_ranks[(e * dl[nz]) % (q - 1)]
            self._pow[e] = out
        return self._pow[e]

    def scalar(self, c: int) -> np.ndarray:
        """rank -> rank of c*x for a base-field constant c."""
        c %= self.ctx.p
        if c not in self._scalar:
            q, p, m = self.ctx.q, self.ctx.p, self.ctx.m
            ranks = np.arange(q, dtype=np.int64)
            out = np.zeros(q, dtype=np.int64)
            for i in range(m):
                out += (((ranks // p ** i) % p) * c % p) * p ** i
            self._scalar[c] = out
        return self._scalar[c]

    def poly_mesh(self, f) -> np.ndarray:
        """Ranks of f(x1, x2) over the q x q mesh (2-variable f)."""
        q = self.ctx.q
        acc = np.zeros((q, q), dtype=np.int64)
        for (e1, e2), coeff in f.terms.items():
            t = self.mul[np.ix_(self.power(e1), self.power(e2))]
            t = self.scalar(coeff)[t]
            acc = self.add[acc, t]
        return acc


def _table_sum_2var(spec: SumSpec, ctx: FieldCtx) -> CycloValue:
    """Exact 2-variable sum over the extension via rank tables."""
    p, q = ctx.p, ctx.q
    tables = _ExtTables(ctx)
    mask = np.ones((q, q), dtype=bool)
    if spec.variety is not None:
        for g in spec.variety.generators:
            mask &= tables.poly_mesh(g) == 0
    if spec.torus:
        mask[0, :] = False
        mask[:, 0] = False
    if spec.additive_phase is not None:
        phase = tables.trace[tables.poly_mesh(spec.additive_phase)]
    else:
        phase = np.zeros((q, q), dtype=np.int64)
    counts = np.bincount(phase[mask], minlength=p)
    return CycloValue(p, counts.tolist()), int(mask.sum())


def extension_sum(spec: SumSpec, ctx: FieldCtx,
                  cap: int = DEFAULT_ENUM_CAP) -> SumValue:
    """S over the given extension field, choosing the fastest exact path."""
    if spec.nvars == 1 and _has_fast_path(spec):
        cyc = _monomial_phase_counts(spec, ctx)
        npoints = ctx.q - 1 if spec.torus else ctx.q
    elif (spec.nvars == 2 and spec.is_exact() and spec.trace_weight is None
          and (spec.linear_form is None or not any(spec.linear_form))
          and ctx.q ** 2 <= _TABLE_CAP):
        if ctx.q ** 2 > cap:
            raise CapExceeded(f"mesh {ctx.q}^2 exceeds cap {cap}")
        cyc, npoints = _table_sum_2var(spec, ctx)
    else:
        return eval_sum(spec, ctx, cap=cap)
    value = cyc.to_complex()
    if spec.half_twist:
        value /= ctx.q ** (spec.half_twist / 2)
        return SumValue(value=value, cyclo=None, n_points=npoints)
    return SumValue(value=value, cyclo=cyc, n_points=npoints)


def extension_sums(spec: SumSpec, p: int, N: int,
                   modulus_choice: str = "least",
                   cap: int = DEFAULT_ENUM_CAP) -> PowerSumSequence:
    """S_1..S_N over the degree-1..N extensions.  Power sums are independent
    of the modulus model; `modulus_choice="second"` exists to test that."""
    if N < 1:
        raise ValueError("N must be >= 1")
    values, cyclos = [], []
    for n in range(1, N + 1):
        if p ** (n * spec.nvars) > cap:
            raise CapExceeded(
                f"extension enumeration {p}^{n * spec.nvars} exceeds cap {cap}")
        ctx = _extension_ctx(p, n, modulus_choice, cap=max(cap, p ** n))
        out = extension_sum(spec, ctx, cap=cap)
        values.append(out.value)
        cyclos.append(out.cyclo)
    return PowerSumSequence(p=p, spec=spec, values=values, cyclos=cyclos)


# -- recurrence fitting -----------------------------------------------------------


@dataclass
class WeightProfile:
    p: int
    roots: list
    amplitudes: list
    signs: list
    mults: list
    weights: list
    residual: float
    rank: int
    condition: float

    def reconstruct(self, N: int) -> list:
        return [sum(a * r ** n for a, r in zip(self.amplitudes, self.roots))
                for n in range(1, N + 1)]

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "p": self.p,
            "roots": [{"re": r.real, "im": r.imag, "sign": s, "mult": m}
                      for r, s, m in zip(self.roots, self.signs, self.mults)],
            "weights": self.weights,
            "residual": self.residual,
            "rank": self.rank,
            "condition": self.condition,
        }


def _pair_conjugates(roots: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    """Symmetrize near-conjugate pairs and snap near-real roots; improves
    stability without changing anything beyond tol."""
    roots = roots.astype(np.complex128).copy()
    used = [False] * len(roots)
    for i in range(len(roots)):
        if used[i]:
            continue
        if abs(roots[i].imag) <= tol * max(1.0, abs(roots[i])):
            roots[i] = complex(roots[i].real, 0.0)
            used[i] = True
            continue
        for j in range(i + 1, len(roots)):
            if used[j]:
                continue
            if abs(roots[j] - roots[i].conjugate()) <= tol * max(1.0, abs(roots[i])):
                mean = (roots[i] + roots[j].conjugate()) / 2
                roots[i], roots[j] = mean, mean.conjugate()
                used[i] = used[j] = True
                break
    return roots


def snap_weight(mag: float, p: int) -> float:
    """Nearest integer-or-half-integer w with |alpha| ~ p^{w/2}."""
    if mag <= 0:
        return float("-inf")
    w = 2 * math.log(mag) / math.log(p)
    return round(w * 2) / 2


def fit_recurrence(seq: PowerSumSequence, tol: float = 1e-6) -> WeightProfile:
    """Minimal linear recurrence of (S_n) within tol, roots and signed
    multiplicities.  Raises RankTooHigh when the sequence is too short
    (N must be at least 2*rank + 2).

    The detected rank is a lower bound for the number of underlying
    eigenvalues: opposite-sign cancellations collapse terms, and nearly equal
    magnitudes are ill-conditioned (see the reported `condition`); no
    completeness claim is made about the recovered spectrum."""
    S = np.array(seq.values, dtype=np.complex128)
    N = len(S)
    if N < 4:
        raise RankTooHigh(f"need at least 4 power sums, got {N}; raise N")
    m = N // 2
    H = np.array([[S[i + j] for j in range(m)] for i in range(m)])
    sv = np.linalg.svd(H, compute_uv=False)
    if sv[0] <= tol:
        return WeightProfile(p=seq.p, roots=[], amplitudes=[], signs=[],
                             mults=[], weights=[], residual=0.0, rank=0,
                             condition=1.0)
    rank = int(np.sum(sv > tol * sv[0]))
    if rank > N // 2 - 1:
        raise RankTooHigh(
            f"detected rank {rank} needs at least {2 * rank + 2} power sums, "
            f"got {N}; raise N")
    r = rank
    A = np.array([[S[t + k] for k in range(r)] for t in range(N - r)])
    b = np.array([S[t + r] for t in range(N - r)])
    coeffs, *_ = np.linalg.lstsq(A, b, rcond=None)
    charpoly = np.concatenate(([1.0], -coeffs[::-1]))  # monic, high power first
    roots = _pair_conjugates(np.roots(charpoly))
    V = np.array([[rt ** n for rt in roots] for n in range(1, N + 1)])
    amps, *_ = np.linalg.lstsq(V, S, rcond=None)
    recon = V @ amps
    scale = max(np.max(np.abs(S)), 1e-300)
    residual = float(np.max(np.abs(S - recon)) / scale)
    signs = [1 if a.real >= 0 else -1 for a in amps]
    mults = [max(1, round(abs(a))) for a in amps]
    weights = [snap_weight(abs(rt), seq.p) for rt in roots]
    condition = float(sv[0] / sv[r - 1])
    return WeightProfile(p=seq.p, roots=[complex(rt) for rt in roots],
                         amplitudes=[complex(a) for a in amps],
                         signs=signs, mults=mults, weights=weights,
                         residual=residual, rank=r, condition=condition)


def weight_check(profile: WeightProfile, w_max: float,
                 mag_tol: float = 1e-3):
    """Every snapped weight <= w_max and every |alpha| within mag_tol
    relative of p^{w/2}.  Returns (passed, offenders)."""
    offenders = []
    for rt, w in zip(profile.roots, profile.weights):
        grid_mag = profile.p ** (w / 2) if w != float("-inf") else 0.0
        if w > w_max + 1e-9:
            offenders.append((rt, w, "weight above ceiling"))
        elif abs(abs(rt) - grid_mag) > mag_tol * max(grid_mag, 1e-300):
            offenders.append((rt, w, "magnitude off the p^{w/2} grid"))
    return not offenders, offenders


# -- mean-square diagnostics ---------------------------------------------------------


@dataclass
class MeanSquareReport:
    values: list
    monotone_increasing: bool
    final_gap: float  # |1 - Q_N|

    @property
    def N(self) -> int:
        return len(self.values)


def quasi_orthonormality(spec: SumSpec, p: int, N: int,
                         cap: int = DEFAULT_ENUM_CAP) -> MeanSquareReport:
    """Q_n = sum_x |t_n(x)|^2 for n = 1..N.  Only the finite data and its
    trend are reported; no limit claim is made."""
    values = []
    kind = spec.trace_weight[0] if spec.trace_weight else None
    for n in range(1, N + 1):
        if p ** (n * spec.nvars) > cap:
            raise CapExceeded(f"extension {p}^{n} exceeds cap {cap}")
        ctx = FieldCtx(p, n, cap=max(cap, p ** n))
        q = ctx.q
        if kind == "kloosterman_value":
            kl = _kloosterman_raw_table(ctx)
            total = float(np.sum(np.abs(kl[1:]) ** 2) / q ** (1 + spec.half_twist))
        elif kind is None and spec.mult_twist is None and spec.variety is None:
            # |summand| = 1 on the whole domain
            npoints = (q - 1) ** spec.nvars if spec.torus else q ** spec.nvars
            total = npoints / q ** spec.half_twist
        else:
            total = 0.0
            for point in enumerate_points(spec.variety, ctx, spec.nvars,
                                          spec.torus, cap):
                total += abs(_point_value(spec, ctx, point)) ** 2
            total /= q ** spec.half_twist
        values.append(total)
    monotone = all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
    return MeanSquareReport(values=values, monotone_increasing=monotone,
                            final_gap=abs(1.0 - values[-1]))


def _point_value(spec: SumSpec, ctx: FieldCtx, point) -> complex:
    """Single summand value weight * chi * psi (no h term)."""
    idx = 0
    if spec.additive_phase is not None:
        idx = ctx.trace_to_base(spec.additive_phase.eval_mod(point))
    weight = 1
    if spec.trace_weight is not None and spec.trace_weight[0] == "root_count":
        weight = r_F(spec.trace_weight[1], point, ctx)
    chi = 1.0 + 0j
    if spec.mult_twist is not None:
        g, order, index = spec.mult_twist
        gval = g.eval_mod(point)
        if gval.is_zero():
            return 0j
        chi = ctx.mult_char(gval, order, index)
    return weight * chi * zeta_table(ctx.p)[idx]

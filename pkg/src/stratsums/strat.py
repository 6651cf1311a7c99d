"""Stratification data model and empirical verification of bound cascades.

A chain A^n >= X_1 >= ... >= X_k of subvarieties, together with an excluded
modulus N and a constant C, asserts that the sum family S(h) obeys

    |S(h)| <= C * p^((d + i) / 2)

whenever h lies on the stratum of index i (the largest i with h in X_i; 0 if
none).  `verify_kl` checks this exhaustively against a complete grid and
reports the minimal constant each stratum actually achieves, with witnesses.

Stratum dimensions are never certified symbolically; the point-count shadow
#X_j(F_p) <= kappa * p^(n-j) is checked instead (see `codim_shadow_check`).
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import CapExceeded, ChainContainmentError
from .ffield import FieldCtx
from .polyring import AffineVariety, IntPolynomial, parse_poly, poly_to_string
from .sumengine import SumGrid, variety_mask
from .util import parallel_map

# containment is checked exhaustively only while p^n stays this small
_CONTAINMENT_CHECK_LIMIT = 1 << 16


class VarietyChain:
    """Descending chain of affine varieties in a fixed ambient space.

    X_0 is implicitly the whole space.  Containment of point sets is
    validated exhaustively over the `check_primes` (skipping primes whose
    grid would be too large); violations raise at construction.
    """

    def __init__(self, ambient: int, strata, check_primes=(2, 3)):
        self.ambient = ambient
        self.strata = list(strata)
        for V in self.strata:
            if V.nvars != ambient:
                raise ValueError("stratum ambient dimension mismatch")
        for p in check_primes:
            if p ** ambient <= _CONTAINMENT_CHECK_LIMIT:
                self.check_containment(p)

    def __len__(self):
        return len(self.strata)

    def check_containment(self, p: int):
        masks = self.masks(p)
        for j in range(1, len(masks)):
            if np.any(masks[j] & ~masks[j - 1]):
                raise ChainContainmentError(
                    f"stratum {j + 1} is not contained in stratum {j} over F_{p}")

    def masks(self, p: int) -> list[np.ndarray]:
        """Boolean membership grids over F_p^ambient, one per stratum."""
        return [variety_mask(V, p, self.ambient) for V in self.strata]

    def stratum_index(self, h, p: int) -> int:
        """Largest i with h in X_i(F_p), 0 when h avoids the whole chain."""
        if len(h) != self.ambient:
            raise ValueError("point dimension mismatch")
        point = tuple(int(x) % p for x in h)
        best = 0
        for i, V in enumerate(self.strata, start=1):
            if V.contains_int(point, p):
                best = i
            else:
                break  # descending chain: deeper strata cannot contain h
        return best

    def stratum_index_grid(self, p: int) -> np.ndarray:
        idx = np.zeros((p,) * self.ambient, dtype=np.int64)
        for i, mask in enumerate(self.masks(p), start=1):
            idx[mask] = i
        return idx

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "ambient_n": self.ambient,
            "strata": [[poly_to_string(g) for g in V.generators]
                       for V in self.strata],
            "claimed_codims": [V.claimed_dim if V.claimed_dim is None
                               else self.ambient - V.claimed_dim
                               for V in self.strata],
        }

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=1)

    @classmethod
    def from_json_dict(cls, data: dict, check_primes=(2, 3)) -> "VarietyChain":
        ambient = int(data["ambient_n"])
        codims = data.get("claimed_codims") or [None] * len(data["strata"])
        strata = []
        for gens, codim in zip(data["strata"], codims):
            polys = [parse_poly(g, nvars=ambient) for g in gens]
            dim = None if codim is None else ambient - int(codim)
            strata.append(AffineVariety(ambient, polys, claimed_dim=dim))
        return cls(ambient, strata, check_primes=check_primes)

    @classmethod
    def load(cls, path, check_primes=(2, 3)) -> "VarietyChain":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh), check_primes=check_primes)


def stratum_index_from_masks(masks: list[np.ndarray], shape) -> np.ndarray:
    idx = np.zeros(shape, dtype=np.int64)
    for i, mask in enumerate(masks, start=1):
        idx[mask] = i
    return idx


@dataclass
class KLDatum:
    """Chain plus constants: excluded-prime modulus N, constant C, and the
    fiber dimension d entering the bound exponent (d + i)/2."""

    chain: VarietyChain
    N: int
    C: float
    d: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if self.C <= 0:
            raise ValueError("C must be positive")


@dataclass
class StratumRecord:
    index: int
    count: int
    max_abs: float
    min_C: float
    witness: tuple | None


@dataclass
class StratReport:
    p: int
    ambient: int
    C: float
    d: int
    excluded_prime: bool
    records: list
    violations: list
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "p": self.p,
            "ambient_n": self.ambient,
            "C": self.C,
            "d": self.d,
            "excluded_prime": self.excluded_prime,
            "passed": self.passed,
            "strata": [{
                "index": r.index,
                "count": r.count,
                "max_abs": r.max_abs,
                "min_C": r.min_C,
                "witness": list(r.witness) if r.witness is not None else None,
            } for r in self.records],
            "violations": [{
                "h": list(h), "value_abs": v, "bound": b,
            } for h, v, b in self.violations],
        }

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=1)

    def table(self) -> str:
        lines = [f"p={self.p}  C={self.C}  d={self.d}  "
                 f"{'PASS' if self.passed else 'FAIL'}"
                 + ("  (excluded prime)" if self.excluded_prime else "")]
        lines.append(f"{'i':>3} {'count':>10} {'max|S|':>14} {'min C_i':>10}  witness")
        for r in self.records:
            w = ",".join(str(x) for x in r.witness) if r.witness is not None else "-"
            lines.append(f"{r.index:>3} {r.count:>10} {r.max_abs:>14.6g} "
                         f"{r.min_C:>10.4g}  ({w})")
        for h, v, b in self.violations[:10]:
            lines.append(f"  VIOLATION at h={h}: |S|={v:.6g} > {b:.6g}")
        if len(self.violations) > 10:
            lines.append(f"  ... {len(self.violations) - 10} more violations")
        return "\n".join(lines)


def verify_kl_masks(values: np.ndarray, masks: list[np.ndarray], p: int,
                    C: float, d: int, excluded: bool = False,
                    slack: float = 1e-6, workers: int = 1) -> StratReport:
    """Bound check of |values[h]| <= C p^{(d+i)/2} for mask-defined strata.

    The slack absorbs float rendering of exact values: the comparison uses
    C p^{(d+i)/2} + slack * p^{(d+i)/2}.
    """
    ambient = values.ndim
    abs_vals = np.abs(values)
    idx = stratum_index_from_masks(masks, values.shape)
    levels = [int(v) for v in np.unique(idx)]

    def handle(i):
        sel = idx == i
        count = int(sel.sum())
        if count == 0:
            return StratumRecord(i, 0, 0.0, 0.0, None), []
        vals = np.where(sel, abs_vals, -1.0)
        flat_arg = int(np.argmax(vals))
        witness = tuple(int(v) for v in np.unravel_index(flat_arg, values.shape))
        max_abs = float(abs_vals[witness])
        scale = p ** ((d + i) / 2)
        bound = C * scale + slack * scale
        viol = []
        if max_abs > bound:
            bad = sel & (abs_vals > bound)
            for flat in np.flatnonzero(bad.reshape(-1)):
                h = tuple(int(v) for v in np.unravel_index(flat, values.shape))
                viol.append((h, float(abs_vals[h]), float(bound)))
        return StratumRecord(i, count, max_abs, max_abs / scale, witness), viol

    results = parallel_map(handle, levels, workers)
    records = [r for r, _ in results]
    violations = [v for _, vs in results for v in vs]
    total = sum(r.count for r in records)
    if total != p ** ambient:
        raise AssertionError("stratum records do not partition the grid")
    return StratReport(p=p, ambient=ambient, C=C, d=d, excluded_prime=excluded,
                       records=records, violations=violations,
                       passed=not violations)


def verify_kl(datum: KLDatum, grid: SumGrid, slack: float = 1e-6,
              workers: int = 1) -> StratReport:
    """Check one complete grid against a stratification datum.  A prime
    dividing N is flagged (soft), never fatal."""
    excluded = datum.N % grid.p == 0 if datum.N > 1 else False
    masks = datum.chain.masks(grid.p)
    return verify_kl_masks(grid.values, masks, grid.p, datum.C, datum.d,
                           excluded=excluded, slack=slack, workers=workers)


def empirical_exponent_map(grid: SumGrid) -> np.ndarray:
    """2 log_p |S(h)| per parameter, -inf at exact zeros: the doubled
    exponent scale on which strata show up as plateaus."""
    if grid.p < 3:
        raise ValueError("exponent map needs p >= 3")
    out = np.full(grid.values.shape, -np.inf)
    absv = grid.abs_values()
    nz = absv > 0
    out[nz] = 2 * np.log(absv[nz]) / math.log(grid.p)
    return out


def exponent_histogram(exponents: np.ndarray, snap: float = 0.5) -> dict:
    """Bin the exponent map to the nearest multiple of `snap` (presentation
    helper; -inf kept separate)."""
    out: dict = {}
    flat = exponents.reshape(-1)
    for v in flat:
        key = "-inf" if not np.isfinite(v) else round(float(v) / snap) * snap
        out[key] = out.get(key, 0) + 1
    return out


# -- dual-variety membership by bounded search ---------------------------------


_PROJECTIVE_CAP = 1 << 20


def _projective_points(ctx: FieldCtx, n: int):
    """One representative per projective point of P^{n-1} over ctx."""
    total = sum(ctx.q ** k for k in range(n))
    if total > _PROJECTIVE_CAP:
        raise CapExceeded(
            f"projective sweep of ~{total} points over F_{ctx.p}^{ctx.m} "
            f"exceeds cap {_PROJECTIVE_CAP}")
    zero = ctx.zero()
    one = ctx.one()
    elems = list(ctx.elements())
    for lead in range(n):
        # first nonzero coordinate normalized to 1
        for tail in itertools.product(elems, repeat=n - lead - 1):
            yield [zero] * lead + [one] + list(tail)


def dual_variety_membership(F: IntPolynomial, v, p: int, max_ext: int = 2,
                            sufficient_ext: int | None = None) -> str:
    """Search for a hyperplane-section singularity certifying that v lies on
    the dual hypersurface of {F = 0}.

    Looks for a projective point x over F_{p^e}, e <= max_ext, with F(x) = 0,
    v.x = 0, and grad F(x) proportional to v.  Returns "member" on a find;
    "nonmember" only when max_ext reaches the caller-supplied sufficient
    bound for this instance (a heuristic, documented as such); otherwise
    "undetermined".
    """
    if not F.is_homogeneous():
        raise ValueError("F must be homogeneous")
    n = F.nvars
    if len(v) != n:
        raise ValueError("v dimension mismatch")
    if all(x % p == 0 for x in v):
        raise ValueError("v must be nonzero")
    grads = F.gradient()
    for e in range(1, max_ext + 1):
        ctx = FieldCtx(p, e)
        velems = [ctx.elem(int(x) % p) for x in v]
        for x in _projective_points(ctx, n):
            if not F.eval_mod(x).is_zero():
                continue
            dot = ctx.zero()
            for vi, xi in zip(velems, x):
                dot = dot + vi * xi
            if not dot.is_zero():
                continue
            gvals = [g.eval_mod(x) for g in grads]
            if _proportional(gvals, velems, ctx):
                return "member"
    if sufficient_ext is not None and max_ext >= sufficient_ext:
        return "nonmember"
    return "undetermined"


def _proportional(a, b, ctx) -> bool:
    """All 2x2 minors of the two vectors vanish."""
    n = len(a)
    for i in range(n):
        for j in range(i + 1, n):
            if not (a[i] * b[j] - a[j] * b[i]).is_zero():
                return False
    return True


def dual_points_mask(F: IntPolynomial, p: int, max_ext: int = 2) -> np.ndarray:
    """Membership mask over F_p^n of the affine cone on the dual hypersurface,
    found by sweeping x over F_{p^e}, e <= max_ext: every found gradient
    direction that is projectively rational over F_p marks its F_p-line.

    By the Euler relation (p coprime to deg F), v.x = 0 holds automatically
    at marked points, so the sweep needs only F(x) = 0.
    """
    if not F.is_homogeneous():
        raise ValueError("F must be homogeneous")
    if F.degree() % p == 0:
        raise ValueError("Euler-relation shortcut needs p coprime to deg F")
    n = F.nvars
    mask = np.zeros((p,) * n, dtype=bool)
    mask[(0,) * n] = True  # the cone vertex
    grads = F.gradient()
    for e in range(1, max_ext + 1):
        ctx = FieldCtx(p, e)
        for x in _projective_points(ctx, n):
            if not F.eval_mod(x).is_zero():
                continue
            gvals = [g.eval_mod(x) for g in grads]
            direction = _rational_direction(gvals, ctx)
            if direction is None:
                continue
            for lam in range(1, p):
                mask[tuple((lam * c) % p for c in direction)] = True
    return mask


def _rational_direction(gvals, ctx) -> tuple | None:
    """Normalize a nonzero extension vector by its first nonzero coordinate;
    return base-field coordinates if all ratios land in F_p, else None."""
    lead = None
    for gv in gvals:
        if not gv.is_zero():
            lead = gv
            break
    if lead is None:
        return None
    inv = lead.inverse()
    coords = []
    for gv in gvals:
        w = gv * inv
        if any(c != 0 for c in w.coeffs[1:]):
            return None
        coords.append(w.coeffs[0])
    return tuple(coords)


def smoothness_check(F: IntPolynomial, p: int, max_ext: int = 2) -> bool:
    """No projective singular point (all partials zero) over F_{p^e},
    e <= max_ext: brute-force smoothness screen for the cone away from 0."""
    grads = F.gradient()
    for e in range(1, max_ext + 1):
        ctx = FieldCtx(p, e)
        for x in _projective_points(ctx, F.nvars):
            if all(g.eval_mod(x).is_zero() for g in grads):
                return False
    return True


def codim_shadow_check(chain: VarietyChain, p: int, kappa: float = 4.0):
    """Point-count proxy for 'X_j has codimension >= j':
    #X_j(F_p) <= kappa * p^(n-j).  Returns (ok, per-stratum counts)."""
    counts = [int(m.sum()) for m in chain.masks(p)]
    ok = all(c <= kappa * p ** (chain.ambient - j)
             for j, c in enumerate(counts, start=1))
    return ok, counts

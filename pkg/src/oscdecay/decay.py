"""Decay-rate verification for the oscillatory form.

Four instruments, all driven by the quadrature module: a log-log regression
that extracts the decay power and the log correction from a sweep; a lower
bound built from a dual-polyhedron vertex, realized by indicator boxes thin
enough that the phase never turns; a brute-force evaluation of the dyadic
box-sum envelope; and a sweep along rays in extended frequency space where
the last coordinate multiplies the phase.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .exponent import ExponentQuery, ExponentReport, ray_scaling, varchenko_exponent
from .oscint import (CutoffSpec, OscResult, QuadratureConfig, TestFunctionSpec,
                     evaluate_lambda)
from .phase import PhasePolynomial
from .polytope import NewtonPolyhedron, build_polyhedron, dual_polyhedron
from .ratlin import dot

__all__ = [
    "DecayError", "DecayFit", "SharpnessRow", "SharpnessWitness",
    "SummationRow", "SummationReport", "FourierSweep", "fit_decay",
    "fit_samples", "dual_lambda_grid", "sharpness_test",
    "check_dual_domination", "summation_oracle", "fourier_decay_sweep",
]


class DecayError(ValueError):
    pass


# ---------------------------------------------------------------------------
# regression

@dataclass(frozen=True)
class DecayFit:
    """Least squares of log|value| against [1, log lam, log log lam].

    All rate fields live on the 1/nu scale, where the regression is linear
    and tolerances are honest; nu itself is exposed as a property.  The free
    fit estimates the log power m too; the pinned fit fixes m to the
    prediction, which breaks the near-collinearity of the two regressors
    over desk-scale grids.
    """
    lams: tuple[float, ...]
    mags: tuple[float, ...]
    inv_nu_free: float
    m_free: float
    residual_free: float
    inv_nu_pinned: float
    residual_pinned: float
    inv_nu_predicted: float
    m_predicted: float
    tol: float
    excluded: int

    @property
    def inv_nu_gap(self) -> float:
        return abs(self.inv_nu_pinned - self.inv_nu_predicted)

    @property
    def passed(self) -> bool:
        return self.inv_nu_gap <= self.tol

    @property
    def nu_free(self) -> float:
        return 1.0 / self.inv_nu_free if self.inv_nu_free > 0 else math.inf

    @property
    def nu_pinned(self) -> float:
        return 1.0 / self.inv_nu_pinned if self.inv_nu_pinned > 0 else math.inf

    def to_json_dict(self) -> dict:
        return {
            "schema": "decay-fit/1",
            "samples": [[l, m] for l, m in zip(self.lams, self.mags)],
            "excluded": self.excluded,
            "free": {"inv_nu": self.inv_nu_free, "m": self.m_free,
                     "residual": self.residual_free},
            "pinned": {"inv_nu": self.inv_nu_pinned,
                       "residual": self.residual_pinned},
            "predicted": {"inv_nu": self.inv_nu_predicted,
                          "m": self.m_predicted},
            "tol": self.tol,
            "inv_nu_gap": self.inv_nu_gap,
            "verdict": "PASS" if self.passed else "FAIL",
        }


def _solve(a: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    if np.linalg.matrix_rank(a) < a.shape[1]:
        raise DecayError("degenerate regression matrix")
    coef, _, _, _ = np.linalg.lstsq(a, y, rcond=None)
    return coef, float(np.linalg.norm(a @ coef - y))


def fit_samples(lams: Sequence[float], mags: Sequence[float],
                inv_nu_predicted: float, m_predicted: float, *,
                tol: float = 0.05, min_samples: int = 8,
                min_octaves: float = 4.0, excluded: int = 0) -> DecayFit:
    lams = tuple(float(x) for x in lams)
    mags = tuple(float(x) for x in mags)
    if len(lams) < min_samples:
        raise DecayError(f"need at least {min_samples} clean samples, got {len(lams)}")
    if any(l < 2 for l in lams) or any(m <= 0 for m in mags):
        raise DecayError("samples must have lam >= 2 and positive magnitude")
    if math.log2(max(lams) / min(lams)) < min_octaves:
        raise DecayError(f"samples must span at least {min_octaves} octaves")
    x = np.log(np.array(lams))
    xx = np.log(x)
    y = np.log(np.array(mags))
    free, res_free = _solve(np.column_stack([np.ones_like(x), x, xx]), y)
    pin, res_pin = _solve(np.column_stack([np.ones_like(x), x]),
                          y - float(m_predicted) * xx)
    return DecayFit(lams, mags, -float(free[1]), float(free[2]), res_free,
                    -float(pin[1]), res_pin, float(inv_nu_predicted),
                    float(m_predicted), tol, excluded)


def fit_decay(sweep: Sequence[OscResult], predicted: ExponentReport, *,
              tol: float = 0.05, min_samples: int = 8,
              min_octaves: float = 4.0) -> DecayFit:
    """Fit the decay law on the clean part of a sweep and compare rates."""
    clean = [(r.lam, abs(r.value)) for r in sweep
             if r.lam >= 2 and not r.low_confidence]
    excluded = len(sweep) - len(clean)
    return fit_samples([l for l, _ in clean], [m for _, m in clean],
                       1.0 / float(predicted.nu), predicted.m, tol=tol,
                       min_samples=min_samples, min_octaves=min_octaves,
                       excluded=excluded)


# ---------------------------------------------------------------------------
# sharpness via dual-polyhedron boxes

@dataclass(frozen=True)
class SharpnessRow:
    lam: float
    half_widths: tuple[float, ...]
    f_norm1: float
    measured: complex
    ratio: float          # |measured| / f_norm1
    phase_bound: float    # exact bound on |lam * phase| over the box


@dataclass(frozen=True)
class SharpnessWitness:
    w: tuple[Fraction, ...]
    delta: Fraction
    decay_power: Fraction       # <1, w>: the box volume scales as lam^(-power)
    rows: tuple[SharpnessRow, ...]
    halvings: int
    band: tuple[float, float]
    chain_ok: bool              # exact <nu/p', w> >= 1 for the query used

    @property
    def passed(self) -> bool:
        return self.chain_ok and all(
            self.band[0] <= r.ratio <= self.band[1] for r in self.rows)

    def to_json_dict(self) -> dict:
        return {
            "schema": "sharpness/1",
            "w": [str(x) for x in self.w],
            "delta": str(self.delta),
            "decay_power": str(self.decay_power),
            "halvings": self.halvings,
            "band": list(self.band),
            "chain_ok": self.chain_ok,
            "rows": [{"lam": r.lam, "f_norm1": r.f_norm1,
                      "measured": [r.measured.real, r.measured.imag],
                      "ratio": r.ratio, "phase_bound": r.phase_bound}
                     for r in self.rows],
            "verdict": "PASS" if self.passed else "FAIL",
        }


def dual_lambda_grid(w: Sequence[Fraction], count: int = 8,
                     start: int = 6) -> tuple[float, ...]:
    """Powers of two whose exponent clears the denominators of w, so the box
    corners delta * lam^(-w_j) stay exactly dyadic."""
    if count < 1:
        raise DecayError("grid needs at least one point")
    ws = [Fraction(x) for x in w]
    step = math.lcm(*(x.denominator for x in ws)) if ws else 1
    e0 = max(step, step * math.ceil(start / step))
    return tuple(float(2 ** (e0 + k * step)) for k in range(count))


def _exact_corner(delta: Fraction, e: int, wj: Fraction) -> Fraction:
    exp = e * wj
    if exp.denominator != 1:
        raise DecayError("lambda grid incompatible with the dual vertex")
    return delta * Fraction(1, 2 ** int(exp)) if exp >= 0 else delta * 2 ** int(-exp)


def sharpness_test(p: PhasePolynomial, n: NewtonPolyhedron, q: ExponentQuery,
                   w: Sequence[Fraction], delta, lambdas: Sequence[float], *,
                   chi: CutoffSpec | None = None,
                   quad: QuadratureConfig | None = None,
                   max_halvings: int = 80,
                   band: tuple[float, float] = (0.9, 1.1)) -> SharpnessWitness:
    """Realize the decay rate from below with boxes dual to the polyhedron.

    Indicator boxes |x_j| <= delta * lam^(-w_j) built from a dual vertex w
    keep |lam * phase| below 1e-10 once delta is small enough (the exponent
    of lam is 1 - <alpha, w> <= 0 termwise, so halving delta always wins).
    On such boxes the integrand is flat and the form measures plain volume:
    |value| must sit inside `band` times the L1 norm of f.
    """
    ws = tuple(Fraction(x) for x in w)
    dual = dual_polyhedron(n)
    if ws not in set(dual.vertices):
        raise DecayError("w must be a vertex of the dual polyhedron")
    assert all(dot(v, ws) >= 1 for v in n.vertices)
    if chi is None:
        chi = CutoffSpec()
    if chi.positive_orthant:
        raise DecayError("sharpness boxes are symmetric; need a full cutoff")
    if quad is None:
        quad = QuadratureConfig()
    exps = []
    for lam in lambdas:
        e = round(math.log2(lam))
        if lam < 4 or 2.0 ** e != lam:
            raise DecayError("sharpness grid needs lambdas that are powers of two, >= 4")
        exps.append(e)

    absterms = [(alpha, abs(c)) for alpha, c in sorted(p.terms.items())]
    cap = Fraction(1, 10 ** 10)
    delta = Fraction(delta)
    if not 0 < delta <= Fraction(chi.inner * chi.radius).limit_denominator(10 ** 6):
        raise DecayError("delta must sit inside the cutoff plateau")

    def worst_bound(dlt: Fraction) -> Fraction:
        worst = Fraction(0)
        for e in exps:
            corners = [_exact_corner(dlt, e, wj) for wj in ws]
            total = sum(c * math.prod(h ** a for h, a in zip(corners, alpha))
                        for alpha, c in absterms)
            worst = max(worst, 2 ** e * total)
        return worst

    halvings = 0
    while worst_bound(delta) > cap:
        delta /= 2
        halvings += 1
        if halvings > max_halvings:
            raise DecayError("phase bound unattainable within retry budget")

    rows = []
    for lam, e in zip(lambdas, exps):
        corners = [_exact_corner(delta, e, wj) for wj in ws]
        bound = 2 ** e * sum(c * math.prod(h ** a for h, a in zip(corners, alpha))
                             for alpha, c in absterms)
        half = [float(h) for h in corners]
        f = TestFunctionSpec.boxes([(-h, h) for h in half])
        r = evaluate_lambda(p, f, chi, lam, quad=quad)
        vol = math.prod(2.0 * h for h in half)
        rows.append(SharpnessRow(lam, tuple(half), vol, r.value,
                                 abs(r.value) / vol, float(bound)))

    nu = ray_scaling(n, q.dual_reciprocals)[0]
    chain_ok = all(dot([nu * x for x in q.dual_reciprocals], v) >= 1
                   for v in dual.vertices)
    power = sum(ws)
    return SharpnessWitness(ws, delta, power, tuple(rows), halvings, band, chain_ok)


def check_dual_domination(n: NewtonPolyhedron, q: ExponentQuery) -> tuple[bool, list]:
    """Exact check that nu/p' clears every dual vertex: <nu/p', w> >= 1."""
    nu = ray_scaling(n, q.dual_reciprocals)[0]
    point = [nu * x for x in q.dual_reciprocals]
    table = [(w, dot(point, w)) for w in dual_polyhedron(n).vertices]
    return all(val >= 1 for _, val in table), table


# ---------------------------------------------------------------------------
# brute-force envelope summation

@dataclass(frozen=True)
class SummationRow:
    lam: float
    jmax: int
    total: float       # truncated sum plus analytic tail bound
    tail: float
    normalized: float  # total / (lam^(-1/nu) * log(lam)^m)


@dataclass(frozen=True)
class SummationReport:
    nu: Fraction
    log_power: int
    z: tuple[Fraction, ...]
    rows: tuple[SummationRow, ...]
    spread: float      # max/min of the normalized column
    bound_factor: float

    @property
    def passed(self) -> bool:
        return self.spread <= self.bound_factor

    def to_json_dict(self) -> dict:
        return {
            "schema": "summation/1",
            "nu": str(self.nu),
            "log_power": self.log_power,
            "z": [str(x) for x in self.z],
            "rows": [{"lam": r.lam, "jmax": r.jmax, "total": r.total,
                      "tail": r.tail, "normalized": r.normalized}
                     for r in self.rows],
            "spread": self.spread,
            "bound_factor": self.bound_factor,
            "verdict": "PASS" if self.passed else "FAIL",
        }


def summation_oracle(n: NewtonPolyhedron, z: Sequence, lambdas: Sequence[float],
                     *, margin: int = 8,
                     bound_factor: float = 10.0) -> SummationReport:
    """Brute-force the dyadic box-sum envelope and normalize by the claim.

    Every box contributes its volume factor 2^(-<z,j>) damped by the
    oscillation gain min(1, (2^t / lam)^(1/2)) at the dominant vertex scale
    t = min_alpha <alpha, j>.  The grid is truncated where the volume factor
    alone is negligible and the remainder is added as a geometric tail.
    """
    zz = tuple(Fraction(x) for x in z)
    if len(zz) != n.dimension or any(x <= 0 for x in zz):
        raise DecayError("z must be strictly positive of matching dimension")
    nu, _, face = ray_scaling(n, zz)
    if nu <= 2:
        raise DecayError(f"scaling exponent {nu} is not above 2; envelope not applicable")
    m = n.dimension - 1 - face.dim
    lams = [float(x) for x in lambdas]
    if any(l < 2 for l in lams):
        raise DecayError("envelope grid needs lam >= 2")

    d = n.dimension
    verts = [tuple(v) for v in n.vertices]
    zf = [float(x) for x in zz]
    # the full-orthant volume series factors per axis
    geo = [1.0 / (1.0 - 2.0 ** -x) for x in zf]
    rows = []
    for lam in lams:
        jmax = math.ceil(math.log2(lam) / min(zf)) + margin
        log2lam = math.log2(lam)
        pieces = []
        for j in product(range(jmax + 1), repeat=d):
            t = min(dot(v, j) for v in verts)
            gain = 1.0 if t >= log2lam else math.sqrt(math.ldexp(1.0 / lam, t))
            pieces.append(2.0 ** -sum(zk * jk for zk, jk in zip(zf, j)) * gain)
        # gain <= 1 outside the truncation, so the exact volume remainder
        # prod(geo) * (1 - prod(1 - 2^-z(J+1))) bounds the tail without the
        # corner double-counting a per-axis union bound would add
        tail = math.prod(geo) * (
            1.0 - math.prod(1.0 - 2.0 ** (-x * (jmax + 1)) for x in zf))
        total = math.fsum(pieces) + tail
        normalized = total / (lam ** (-1.0 / float(nu)) * math.log(lam) ** m)
        rows.append(SummationRow(lam, jmax, total, tail, normalized))
    values = [r.normalized for r in rows]
    spread = max(values) / min(values)
    return SummationReport(nu, m, zz, tuple(rows), spread, bound_factor)


# ---------------------------------------------------------------------------
# extended-frequency rays

@dataclass(frozen=True)
class FourierSweep:
    ray: tuple[float, ...]
    ts: tuple[float, ...]
    results: tuple[OscResult, ...]
    fit: DecayFit
    predicted: ExponentReport


def fourier_decay_sweep(p: PhasePolynomial, chi: CutoffSpec,
                        ray: Sequence[float], ts: Sequence[float], *,
                        quad: QuadratureConfig | None = None,
                        tol: float = 0.05, min_samples: int = 8,
                        min_octaves: float = 4.0) -> FourierSweep:
    """Decay along a ray in extended frequency space.

    The first d ray components drive complex-exponential factors, the last
    multiplies the phase.  Along the pure last-coordinate ray this is
    exactly the plain sweep with constant factors.
    """
    d = p.dimension
    if d > 2:
        raise DecayError("extended-frequency sweeps are limited to dimension <= 2")
    ray = tuple(float(x) for x in ray)
    if len(ray) != d + 1 or not any(ray):
        raise DecayError("ray must be a nonzero vector of dimension d + 1")
    ts = tuple(float(t) for t in ts)
    if any(b <= a for a, b in zip(ts, ts[1:])) or (ts and ts[0] < 2):
        raise DecayError("ray parameters must be increasing and >= 2")
    if quad is None:
        quad = QuadratureConfig()
    predicted = varchenko_exponent(build_polyhedron(p))
    results = []
    for t in ts:
        xi = [t * r for r in ray]
        f = TestFunctionSpec.exponentials(xi[:d])
        results.append(evaluate_lambda(p, f, chi, xi[d], quad=quad))
    clean = [(t, abs(r.value)) for t, r in zip(ts, results) if not r.low_confidence]
    fit = fit_samples([a for a, _ in clean], [b for _, b in clean],
                      1.0 / float(predicted.nu), predicted.m, tol=tol,
                      min_samples=min_samples, min_octaves=min_octaves,
                      excluded=len(ts) - len(clean))
    return FourierSweep(ray, ts, tuple(results), fit, predicted)

"""Checks for the conditional-symmetry functional equation.

For distributions mu1, mu2 on X and an automorphism alpha, independent
variables xi_1 ~ mu1 and xi_2 ~ mu2 give L1 = xi_1 + xi_2 and
L2 = xi_1 + alpha(xi_2).  L2 is conditionally symmetric given L1 exactly
when the characteristic functions satisfy, for all dual u, v,

    f1(u + v) * f2(u + B v) = f1(u - v) * f2(u - B v)

with B the adjoint of alpha.  This module evaluates that identity on
grids (continuous dual coordinates sampled, finite ones exhausted), by
Monte Carlo on sampled variables, and exactly for measures supported on
the finite part.  It also decides the order-2 convolution relation
between two finite-part distributions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ambient import AmbientGroup, XAutomorphism, YPoint
from .finite_abelian import GroupAutomorphism, char_table
from .measures import AtomicSignedMeasure, char_fn, sample_arrays

__all__ = [
    "SGrid",
    "ResidualReport",
    "equation_residual",
    "equation_residual_report",
    "McReport",
    "mc_symmetry_test",
    "finite_exact_check",
    "DeltaRelation",
    "delta_relation",
    "char_sup_distance",
    "ratio_probe_scale",
]

VANISH_TOL = 1e-10


def default_s_scale(*measures: AtomicSignedMeasure) -> float:
    """Half-width 5/sqrt(min positive sigma), or 10 when no Gaussian part."""
    sigmas = [
        t.atom.sigma for mu in measures for t in mu.terms if t.atom.sigma > 0.0
    ]
    if not sigmas:
        return 10.0
    return 5.0 / math.sqrt(min(sigmas))


def ratio_probe_scale(*measures: AtomicSignedMeasure) -> float:
    """Half-width for probes feeding characteristic-function ratios.

    3/sqrt(max sigma) keeps every Gaussian factor at exp(-9) or larger, so
    ratios stay far from the underflow regime while still discriminating
    mismatched variances and shifts.
    """
    sigmas = [
        t.atom.sigma for mu in measures for t in mu.terms if t.atom.sigma > 0.0
    ]
    if not sigmas:
        return 10.0
    return 3.0 / math.sqrt(max(sigmas))


@dataclass(frozen=True)
class SGrid:
    """Symmetric grid of real dual coordinates; smax = None auto-scales."""

    smax: float | None = None
    points: int = 33

    def __post_init__(self) -> None:
        if self.points < 2:
            raise ValueError("grid needs at least 2 points")

    def values(self, *measures: AtomicSignedMeasure) -> np.ndarray:
        smax = self.smax if self.smax is not None else default_s_scale(*measures)
        return np.linspace(-smax, smax, self.points)


class _DualIndex:
    """Index tables for the finite dual Z(2) x H."""

    def __init__(self, group: AmbientGroup):
        G = group.G
        self.group = group
        self.size = G.order
        self.coords = G.all_coords()
        self.orders = np.array(G.cyclic_orders, dtype=np.int64)
        self.radix = np.ones(G.rank, dtype=np.int64)
        for k in range(G.rank - 2, -1, -1):
            self.radix[k] = self.radix[k + 1] * G.cyclic_orders[k + 1]
        # trivial rank-0 guard is unnecessary: AmbientGroup always has rank >= 1
        self.table = char_table(G)  # table[g_idx, h_idx]
        sums = (self.coords[:, None, :] + self.coords[None, :, :]) % self.orders
        self.add = np.tensordot(sums, self.radix, axes=([2], [0]))
        self.neg = np.tensordot((-self.coords) % self.orders, self.radix, axes=([1], [0]))

    def encode(self, coords) -> int:
        return int(np.dot(np.asarray(coords, dtype=np.int64) % self.orders, self.radix))

    def automorphism_map(self, alpha: GroupAutomorphism) -> np.ndarray:
        return alpha.index_map()


class _CharEvaluator:
    """Batched characteristic-function evaluation via the factorization

    char(s, n, h) = sum over distinct real atoms u of
        exp(-sigma_u s**2 + i shift_u s) * T_u[n, h]

    where T_u collects the finite-coordinate weights of the atom.
    """

    def __init__(self, mu: AtomicSignedMeasure, dual: _DualIndex):
        self.dual = dual
        groups: dict[tuple[float, float], np.ndarray] = {}
        for t in mu.terms:
            key = (t.atom.sigma, t.atom.shift)
            w = groups.setdefault(key, np.zeros((2, dual.size)))
            g_idx = dual.encode(t.g.coords)
            w[t.m if t.m in (0, 1) else t.m % 2, g_idx] += t.c
        self.sigmas = np.array([k[0] for k in groups])
        self.shifts = np.array([k[1] for k in groups])
        tables = []
        for w in groups.values():
            # T[n] = sum_m (-1)**(m*n) * (w[m] @ char_table)
            row0 = w[0] @ dual.table
            row1 = w[1] @ dual.table
            tables.append(np.stack([row0 + row1, row0 - row1]))
        self.tables = np.array(tables)  # (U, 2, |H|)

    def on(self, s: np.ndarray, n_idx: np.ndarray, h_idx: np.ndarray) -> np.ndarray:
        """char at the outer product of s values and finite probes.

        s has shape (P,), n_idx/h_idx shape (Q,); the result is (P, Q).
        """
        E = np.exp(
            -self.sigmas[None, :] * (s * s)[:, None] + 1j * self.shifts[None, :] * s[:, None]
        )  # (P, U)
        T = self.tables[:, n_idx, h_idx]  # (U, Q)
        return E @ T


@dataclass(frozen=True)
class ResidualReport:
    residual: float
    smax: float
    points: int
    flags: tuple[str, ...] = ()


def equation_residual_report(
    mu1: AtomicSignedMeasure,
    mu2: AtomicSignedMeasure,
    alpha: XAutomorphism,
    grid: SGrid | None = None,
) -> ResidualReport:
    """Max deviation of the symmetry identity over the probe grid.

    Real dual coordinates of u and v run over the grid; the finite dual
    coordinates are exhausted.  The two sides depend on the Z(2) duals only
    through their sum, so that sum is what is enumerated.
    """
    if mu1.group != mu2.group or alpha.group != mu1.group:
        raise ValueError("measures and automorphism must share one group")
    grid = grid or SGrid()
    s = grid.values(mu1, mu2)
    smax = float(abs(s).max())
    dual = _DualIndex(mu1.group)
    adj_map = dual.automorphism_map(alpha.alpha_G.adjoint())
    ev1 = _CharEvaluator(mu1, dual)
    ev2 = _CharEvaluator(mu2, dual)

    s1, s2 = np.meshgrid(s, s, indexing="ij")
    s1 = s1.ravel()
    s2 = s2.ravel()
    a = alpha.a
    s_up, s_um = s1 + s2, s1 - s2
    s_ap, s_am = s1 + a * s2, s1 - a * s2

    H = dual.size
    residual = 0.0
    worst_vanish = math.inf
    h_block = max(1, 4096 // max(H, 1))
    for start in range(0, H, h_block):
        h1 = np.arange(start, min(start + h_block, H))
        h1g, h2g = np.meshgrid(h1, np.arange(H), indexing="ij")
        h1f, h2f = h1g.ravel(), h2g.ravel()
        n_sum = np.repeat(np.array([0, 1]), h1f.size)
        h_plus = np.tile(dual.add[h1f, h2f], 2)
        h_minus = np.tile(dual.add[h1f, dual.neg[h2f]], 2)
        h_aplus = np.tile(dual.add[h1f, adj_map[h2f]], 2)
        h_aminus = np.tile(dual.add[h1f, dual.neg[adj_map[h2f]]], 2)

        A1p = ev1.on(s_up, n_sum, h_plus)
        A2p = ev2.on(s_ap, n_sum, h_aplus)
        A1m = ev1.on(s_um, n_sum, h_minus)
        A2m = ev2.on(s_am, n_sum, h_aminus)
        diff = np.abs(A1p * A2p - A1m * A2m)
        residual = max(residual, float(diff.max()))
        for arr in (A1p, A2p, A1m, A2m):
            worst_vanish = min(worst_vanish, float(np.abs(arr).min()))

    flags = ("vanishing_char",) if worst_vanish < VANISH_TOL else ()
    return ResidualReport(residual, smax, grid.points, flags)


def equation_residual(
    mu1: AtomicSignedMeasure,
    mu2: AtomicSignedMeasure,
    alpha: XAutomorphism,
    grid: SGrid | None = None,
) -> float:
    return equation_residual_report(mu1, mu2, alpha, grid).residual


def char_sup_distance(
    mu: AtomicSignedMeasure,
    nu: AtomicSignedMeasure,
    s_values: np.ndarray | None = None,
) -> float:
    """Sup of |char(mu) - char(nu)| over an s-grid times the full finite dual."""
    if mu.group != nu.group:
        raise ValueError("measures live on different groups")
    diff = mu + nu * (-1.0)
    if not diff.terms:
        return 0.0
    if s_values is None:
        s_values = SGrid().values(mu, nu)
    s = np.asarray(s_values, dtype=float)
    dual = _DualIndex(mu.group)
    ev = _CharEvaluator(diff, dual)
    h = np.tile(np.arange(dual.size), 2)
    n = np.repeat(np.array([0, 1]), dual.size)
    return float(np.abs(ev.on(s, n, h)).max())


@dataclass(frozen=True)
class McReport:
    statistic: float
    threshold: float
    passed: bool
    n_samples: int
    probe_count: int


def _default_probe_pairs(
    group: AmbientGroup, *measures: AtomicSignedMeasure
) -> list[tuple[YPoint, YPoint]]:
    """A small deterministic set of (u, v) dual probe pairs."""
    sigmas = [t.atom.sigma for mu in measures for t in mu.terms if t.atom.sigma > 0.0]
    s0 = 0.5 / math.sqrt(max(sigmas)) if sigmas else 0.7
    G = group.G
    # one generator per cyclic factor, else atoms varying only along a
    # later factor are invisible to every probe
    hs = [G.trivial_character()]
    for k in range(G.rank):
        gen = G.character([1 if j == k else 0 for j in range(G.rank)])
        if not gen.is_trivial:
            hs.append(gen)
    singles = []
    for s in (0.0, s0):
        for n in (0, 1):
            for h in hs:
                singles.append(YPoint(group, s, n, h))
    return [(u, v) for u in singles for v in singles if not (u.s == 0.0 and u.n == 0 and u.h.is_trivial and v.s == 0.0 and v.n == 0 and v.h.is_trivial)]


def _pair_values(
    group: AmbientGroup,
    t: np.ndarray,
    m: np.ndarray,
    g: np.ndarray,
    y: YPoint,
) -> np.ndarray:
    G = group.G
    lcm = G.exponent_lcm
    weights = np.array(
        [h * (lcm // n) for h, n in zip(y.h.coords, G.cyclic_orders)], dtype=np.int64
    )
    phase = (g @ weights) % lcm
    vals = np.exp(1j * (y.s * t + 2.0 * np.pi * phase / lcm))
    if y.n % 2:
        vals = vals * np.where(m % 2 == 1, -1.0, 1.0)
    return vals


def mc_symmetry_test(
    mu1: AtomicSignedMeasure,
    mu2: AtomicSignedMeasure,
    alpha: XAutomorphism,
    n_samples: int,
    probes: Sequence[tuple[YPoint, YPoint]] | None = None,
    seed: int = 0,
) -> McReport:
    """Monte Carlo check of conditional symmetry of L2 given L1.

    The statistic is the max over probe pairs (u, v) of

        | mean pair(L1,u)*pair(L2,v) - mean pair(L1,u)*pair(-L2,v) |

    and the acceptance threshold is 4/sqrt(n_samples): the probes are
    bounded test functions, so a true symmetry keeps every difference
    within a few multiples of the Monte Carlo scale 1/sqrt(n).
    """
    group = mu1.group
    if probes is None:
        probes = _default_probe_pairs(group, mu1, mu2)
    seeds = np.random.SeedSequence(seed).spawn(2)
    rng1 = np.random.default_rng(seeds[0])
    rng2 = np.random.default_rng(seeds[1])
    t1, m1, g1 = sample_arrays(mu1, rng1, n_samples)
    t2, m2, g2 = sample_arrays(mu2, rng2, n_samples)

    mat = np.array(alpha.alpha_G.matrix, dtype=np.int64)
    orders = np.array(group.G.cyclic_orders, dtype=np.int64)
    g2a = (g2 @ mat.T) % orders[None, :]

    L1 = (t1 + t2, (m1 + m2) % 2, (g1 + g2) % orders[None, :])
    L2 = (t1 + alpha.a * t2, (m1 + m2) % 2, (g1 + g2a) % orders[None, :])

    # probe pairs share their u and v singles; evaluate each exp once
    cache1: dict[tuple[float, int, tuple[int, ...]], np.ndarray] = {}
    cache2: dict[tuple[float, int, tuple[int, ...]], np.ndarray] = {}

    def values(cache, coords, y):
        key = (y.s, y.n, y.h.coords)
        if key not in cache:
            cache[key] = _pair_values(group, *coords, y)
        return cache[key]

    stat = 0.0
    for u, v in probes:
        w1 = values(cache1, L1, u)
        w2 = values(cache2, L2, v)
        direct = (w1 * w2).mean()
        reflected = (w1 * np.conj(w2)).mean()
        stat = max(stat, abs(direct - reflected))
    threshold = 4.0 / math.sqrt(n_samples)
    return McReport(float(stat), threshold, bool(stat <= threshold), n_samples, len(probes))


def finite_exact_check(
    w1: AtomicSignedMeasure,
    w2: AtomicSignedMeasure,
    alpha_G: GroupAutomorphism,
) -> float:
    """Exact residual of the identity for finite-part measures.

    Both measures must be supported on Z(2) x G (every atom at t = 0); the
    automorphism is (I, alpha_G) on Z(2) x G, and all dual pairs are
    enumerated.
    """
    if w1.group != w2.group:
        raise ValueError("measures live on different groups")
    for name, w in (("first", w1), ("second", w2)):
        if not w.is_finite_supported:
            raise ValueError(f"{name} measure is not supported on the finite part")
    dual = _DualIndex(w1.group)
    adj_map = dual.automorphism_map(alpha_G.adjoint())
    ev1 = _CharEvaluator(w1, dual)
    ev2 = _CharEvaluator(w2, dual)
    H = dual.size
    # finite-part chars carry no s dependence; evaluate at s = 0 only
    zero = np.zeros(1)
    h1, h2 = np.meshgrid(np.arange(H), np.arange(H), indexing="ij")
    h1, h2 = h1.ravel(), h2.ravel()
    n_sum = np.repeat(np.array([0, 1]), h1.size)
    h1t, h2t = np.tile(h1, 2), np.tile(h2, 2)
    lhs = ev1.on(zero, n_sum, dual.add[h1t, h2t]) * ev2.on(
        zero, n_sum, dual.add[h1t, adj_map[h2t]]
    )
    rhs = ev1.on(zero, n_sum, dual.add[h1t, dual.neg[h2t]]) * ev2.on(
        zero, n_sum, dual.add[h1t, dual.neg[adj_map[h2t]]]
    )
    return float(np.abs(lhs - rhs).max())


@dataclass(frozen=True)
class DeltaRelation:
    """Outcome of the order-2 convolution comparison of two distributions."""

    branch: str  # "tau1_eq_tau2_conv_delta" | "tau2_eq_tau1_conv_delta" | "neither"
    d: float | None = None
    delta: AtomicSignedMeasure | None = None
    flags: tuple[str, ...] = ()

    @property
    def holds(self) -> bool:
        return self.branch != "neither"


def _delta_measure(group: AmbientGroup, d: float) -> AtomicSignedMeasure:
    zero = group.G.zero()
    return AtomicSignedMeasure.from_terms(
        group, [((1.0 + d) / 2.0, 0.0, 0.0, 0, zero), ((1.0 - d) / 2.0, 0.0, 0.0, 1, zero)]
    )


def delta_relation(
    tau1: AtomicSignedMeasure,
    tau2: AtomicSignedMeasure,
    tol: float = 1e-9,
    s_values: Sequence[float] | None = None,
) -> DeltaRelation:
    """Decide whether tau1 = tau2 * delta or tau2 = tau1 * delta.

    delta ranges over distributions on {0, p} with p the order-2 point.  The
    characteristic ratio r = char(tau1)/char(tau2) must be 1 wherever the
    dual pairs trivially with p and a real constant on the complement; the
    constant (or its reciprocal) is the delta parameter.  Ties at |d| = 1
    report the first branch and are flagged.
    """
    if tau1.group != tau2.group:
        raise ValueError("measures live on different groups")
    group = tau1.group
    if s_values is None:
        if tau1.is_finite_supported and tau2.is_finite_supported:
            s_values = [0.0]
        else:
            scale = ratio_probe_scale(tau1, tau2)
            s_values = list(np.linspace(-scale, scale, 7))
    probes: list[YPoint] = []
    for s in s_values:
        for n in (0, 1):
            for h in group.G.characters():
                probes.append(YPoint(group, float(s), n, h))
    ratios = {0: [], 1: []}
    for y in probes:
        c2 = char_fn(tau2, y)
        c1 = char_fn(tau1, y)
        if abs(c2) < VANISH_TOL or abs(c1) < VANISH_TOL:
            raise ValueError("vanishing characteristic function on a probe")
        ratios[y.n].append(c1 / c2)
    r0 = np.array(ratios[0])
    r1 = np.array(ratios[1])
    if np.abs(r0 - 1.0).max() > tol:
        return DeltaRelation("neither")
    d_c = complex(r1.mean())
    if np.abs(r1 - d_c).max() > tol or abs(d_c.imag) > tol:
        return DeltaRelation("neither")
    d = float(d_c.real)
    flags: tuple[str, ...] = ()
    if abs(abs(d) - 1.0) <= tol:
        flags = ("both_branches_fit",)
        d = math.copysign(1.0, d)
    if abs(d) <= 1.0:
        return DeltaRelation("tau1_eq_tau2_conv_delta", d, _delta_measure(group, d), flags)
    d_rec = 1.0 / d
    return DeltaRelation("tau2_eq_tau1_conv_delta", d_rec, _delta_measure(group, d_rec), flags)

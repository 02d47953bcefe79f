"""Constructive structure behind the characterization theorem.

Given two distributions whose linear forms satisfy the symmetry equation,
this module recovers the canonical factorization mu_j = gamma_j * omega_j
* E_shift (gamma_j in the two-Gaussian class, omega_j supported on
Z(2) x K with K = Ker(I + alpha_G)), and conversely manufactures instances
that satisfy the equation exactly from such building blocks.  It also
carries the convolution positivity criterion, the factor-exchange move
on (gamma, omega) pairs, and the decision of whether that move admits any
nondegenerate application (rigidity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .ambient import AmbientGroup, XAutomorphism, XPoint, YPoint
from .finite_abelian import GroupAutomorphism, GroupElement, kernel_of_I_plus
from .measures import (
    AtomicSignedMeasure,
    char_fn,
    is_distribution,
    two_term_bound,
)
from .symmetry import (
    char_sup_distance,
    delta_relation,
    equation_residual_report,
    ratio_probe_scale,
)
from .theta import (
    PiMeasure,
    ThetaParams,
    is_in_theta,
    lambda_signed,
    rho_extremal,
    theta_to_measure,
)

__all__ = [
    "InfeasibleSpec",
    "DecompositionError",
    "InstanceSpec",
    "GeneratedInstance",
    "Decomposition",
    "check_cross_constraints",
    "cross_constraint_residuals",
    "derive_partner_params",
    "generate_instance",
    "decompose",
    "lambda_tau_criterion",
    "tau_from_coefficients",
    "factor_exchange",
    "RigidityResult",
    "rigidity_decision",
]

BRANCH_GENERIC = "a_not_minus_one"
BRANCH_MINUS_ONE = "a_minus_one"

# direction labels for the order-2 link between the two omega factors
OMEGA1_FROM_OMEGA2 = "omega1_eq_omega2_conv_vartheta"
OMEGA2_FROM_OMEGA1 = "omega2_eq_omega1_conv_vartheta"

_GROUP_WEIGHT_TOL = 1e-12


class InfeasibleSpec(ValueError):
    """Instance spec violates a generation precondition; lists every failure."""

    def __init__(self, failures: Sequence[str]):
        self.failures = tuple(failures)
        super().__init__("; ".join(failures))


class DecompositionError(ValueError):
    """Input violates a hypothesis of the decomposition; carries diagnostics."""

    def __init__(self, diagnostics: Sequence[str] | str):
        if isinstance(diagnostics, str):
            diagnostics = [diagnostics]
        self.diagnostics = tuple(diagnostics)
        super().__init__("; ".join(diagnostics))


def cross_constraint_residuals(
    theta1: ThetaParams, theta2: ThetaParams, a: float
) -> tuple[float, float, float, float]:
    """Residuals of sigma1 + a*sigma2, sigma'1 + a*sigma'2, and the shifts."""
    return (
        abs(theta1.sigma + a * theta2.sigma),
        abs(theta1.sigma_p + a * theta2.sigma_p),
        abs(theta1.m + a * theta2.m),
        abs(theta1.m_p + a * theta2.m_p),
    )


def check_cross_constraints(
    theta1: ThetaParams, theta2: ThetaParams, a: float, tol: float = 1e-10
) -> bool:
    return max(cross_constraint_residuals(theta1, theta2, a)) <= tol


def _extremal_or_one(p: ThetaParams) -> float:
    """Extremal coefficient bound: two-term bound strictly, 1 degenerately."""
    if 0.0 < p.sigma_p < p.sigma:
        return rho_extremal(p)
    return 1.0


def derive_partner_params(
    theta2: ThetaParams, a: float, kappa1: float | None = None
) -> ThetaParams:
    """theta1 forced by the cross constraints, with kappa1 chosen or defaulted.

    The default keeps the ratio |kappa|/extremal equal on both sides, which
    preserves class membership whenever theta2 is a member.
    """
    if kappa1 is None:
        rho2 = _extremal_or_one(theta2)
        trial = ThetaParams(
            -a * theta2.sigma, -a * theta2.sigma_p, -a * theta2.m, -a * theta2.m_p, 1.0
        )
        rho1 = _extremal_or_one(trial)
        kappa1 = math.copysign(rho1 * abs(theta2.kappa) / rho2, theta2.kappa)
    return ThetaParams(
        -a * theta2.sigma, -a * theta2.sigma_p, -a * theta2.m, -a * theta2.m_p, kappa1
    )


def _vartheta_measure(group: AmbientGroup, d: float) -> AtomicSignedMeasure:
    zero = group.G.zero()
    return AtomicSignedMeasure.from_terms(
        group,
        [((1.0 + d) / 2.0, 0.0, 0.0, 0, zero), ((1.0 - d) / 2.0, 0.0, 0.0, 1, zero)],
    )


@dataclass(frozen=True)
class InstanceSpec:
    """Building blocks for an instance that satisfies the equation exactly.

    vartheta_d parametrizes the Z(2) link measure by its odd-character
    value d in [-1, 1]; omega2 must be a distribution on Z(2) x K.
    """

    group: AmbientGroup
    a: float
    alpha_G: GroupAutomorphism
    theta2: ThetaParams
    omega2: AtomicSignedMeasure
    vartheta_d: float = 1.0
    x2: XPoint | None = None
    kappa1: float | None = None


@dataclass(frozen=True)
class GeneratedInstance:
    mu1: AtomicSignedMeasure
    mu2: AtomicSignedMeasure
    alpha: XAutomorphism
    theta1: ThetaParams
    theta2: ThetaParams
    omega1: AtomicSignedMeasure
    omega2: AtomicSignedMeasure
    vartheta_d: float
    x1: XPoint
    x2: XPoint
    kernel: tuple[GroupElement, ...]

    def effective_thetas(self) -> tuple[ThetaParams, ThetaParams]:
        """Class parameters as read off the characteristic functions.

        The real part of each shift folds into the exponential centers, so
        the recoverable centers are m + t_j and m' + t_j.
        """
        out = []
        for p, x in ((self.theta1, self.x1), (self.theta2, self.x2)):
            out.append(ThetaParams(p.sigma, p.sigma_p, p.m + x.t, p.m_p + x.t, p.kappa))
        return (out[0], out[1])

    def to_json(self) -> dict:
        return {
            "mu1": self.mu1.to_json(),
            "mu2": self.mu2.to_json(),
            "alpha": self.alpha.to_json(),
            "truth": {
                "theta1": self.theta1.to_json(),
                "theta2": self.theta2.to_json(),
                "omega1": self.omega1.to_json(),
                "omega2": self.omega2.to_json(),
                "vartheta_d": self.vartheta_d,
                "x1": self.x1.to_json(),
                "x2": self.x2.to_json(),
            },
        }


def generate_instance(spec: InstanceSpec) -> GeneratedInstance:
    """Build (mu1, mu2, alpha) satisfying the symmetry equation identically.

    mu2 = theta2-measure * omega2 * E_x2 and mu1 = theta1-measure *
    (omega2 * vartheta) * E_x1, with theta1 from the cross constraints and
    x1 = -alpha(x2).  Every precondition failure is reported, not just the
    first.
    """
    group = spec.group
    failures: list[str] = []
    if spec.a == 0.0:
        failures.append("a must be nonzero")
    if spec.alpha_G.group != group.G:
        failures.append("alpha_G acts on a different group")
    t2 = spec.theta2
    if spec.a > 0.0 and (t2.sigma > 0.0 or t2.sigma_p > 0.0):
        failures.append(
            "a > 0 forces sigma = sigma' = 0 (otherwise the partner variance "
            "-a*sigma would be negative)"
        )
    if not is_in_theta(t2):
        failures.append("theta2 is not in the admissible class")
    theta1 = None
    if spec.a != 0.0:
        try:
            theta1 = derive_partner_params(t2, spec.a, spec.kappa1)
        except ValueError as e:
            failures.append(f"cannot derive theta1: {e}")
        else:
            if not is_in_theta(theta1):
                failures.append(
                    f"derived theta1 with kappa1={theta1.kappa} is not in the class"
                )
    kernel = tuple(kernel_of_I_plus(spec.alpha_G)) if spec.alpha_G.group == group.G else ()
    if spec.omega2.group != group:
        failures.append("omega2 lives on a different ambient group")
    else:
        kset = {k.coords for k in kernel}
        for term in spec.omega2.terms:
            if term.atom.sigma != 0.0 or term.atom.shift != 0.0:
                failures.append("omega2 must be supported on the finite part")
                break
            if term.g.coords not in kset:
                failures.append(
                    f"omega2 atom at g={term.g.coords} is outside K = Ker(I + alpha_G)"
                )
                break
        if abs(spec.omega2.total_mass() - 1.0) > 1e-12:
            failures.append("omega2 total mass is not 1")
        elif spec.omega2.terms and is_distribution(spec.omega2).is_no:
            failures.append("omega2 is not a distribution")
    if not (-1.0 <= spec.vartheta_d <= 1.0):
        failures.append("vartheta_d must lie in [-1, 1]")
    x2 = spec.x2 if spec.x2 is not None else group.zero_point()
    if x2.group != group:
        failures.append("x2 lives on a different ambient group")
    if failures:
        raise InfeasibleSpec(failures)

    alpha = XAutomorphism(group, spec.a, spec.alpha_G)
    x1 = -alpha(x2)
    vt = _vartheta_measure(group, spec.vartheta_d)
    omega1 = spec.omega2.convolve(vt)
    mu2 = theta_to_measure(t2, group).convolve(spec.omega2).shifted(x2)
    mu1 = theta_to_measure(theta1, group).convolve(omega1).shifted(x1)
    return GeneratedInstance(
        mu1, mu2, alpha, theta1, t2, omega1, spec.omega2, spec.vartheta_d, x1, x2, kernel
    )


@dataclass(frozen=True)
class Decomposition:
    """Canonical factorization recovered from a valid equation instance.

    branch a_not_minus_one: mu_j = gamma_j-measure * omega_j * E_shift_j
    with omega_j on Z(2) x K and |gamma_j.kappa| at the extremal bound.
    branch a_minus_one: mu_j = omega_j * E_shift_j with omega_j on
    R x Z(2) x K and gamma absent.  In both, one of the omegas equals the
    other convolved with a Z(2) distribution of odd-character value
    vartheta_d (direction in vartheta_direction).
    """

    branch: str
    gamma: tuple[ThetaParams, ThetaParams] | None
    omega: tuple[AtomicSignedMeasure, AtomicSignedMeasure]
    shift: tuple[XPoint, XPoint]
    vartheta_direction: str
    vartheta_d: float
    vartheta: AtomicSignedMeasure
    kernel: tuple[GroupElement, ...]
    kappa_raw: tuple[float, float] | None
    rho: tuple[float, float] | None
    residual: float
    reconstruction_error: float
    flags: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()
    vartheta_alternatives: tuple[tuple[str, float], ...] = ()

    def to_json(self) -> dict:
        return {
            "branch": self.branch,
            "gamma": None if self.gamma is None else [p.to_json() for p in self.gamma],
            "omega": [w.to_json() for w in self.omega],
            "shift": [x.to_json() for x in self.shift],
            "vartheta": {
                "direction": self.vartheta_direction,
                "d": self.vartheta_d,
                "alternatives": [list(alt) for alt in self.vartheta_alternatives],
            },
            "kernel": [list(k.coords) for k in self.kernel],
            "kappa_raw": None if self.kappa_raw is None else list(self.kappa_raw),
            "rho": None if self.rho is None else list(self.rho),
            "residual": self.residual,
            "reconstruction_error": self.reconstruction_error,
            "flags": list(self.flags),
            "notes": list(self.notes),
        }


def _coset_representative(
    mu: AtomicSignedMeasure, kernel: Sequence[GroupElement], label: str
) -> GroupElement:
    """All finite coordinates must fall in one K-coset; return its lex-min."""
    if not mu.terms:
        raise DecompositionError(f"{label} has no atoms")
    kset = {k.coords for k in kernel}
    base = mu.terms[0].g
    for term in mu.terms:
        if (term.g - base).coords not in kset:
            raise DecompositionError(
                f"{label} support spans more than one coset of K"
            )
    return min((base + k for k in kernel), key=lambda g: g.coords)


@dataclass(frozen=True)
class _Extraction:
    sigma: float
    m_eff: float
    sigma_p: float
    m_p_eff: float
    kappa_raw: float


def _extract_exponentials(mu: AtomicSignedMeasure, label: str) -> _Extraction:
    """Read the two exponential profiles off a reduced measure's atoms.

    Grouping atoms by (sigma, center), the even-parity weights must form a
    single unit-mass exponential and the odd-parity weights a single
    nonzero one; those are the characteristic functions at the trivial
    character for n = 0 and n = 1.
    """
    even: dict[tuple[float, float], float] = {}
    odd: dict[tuple[float, float], float] = {}
    for t in mu.terms:
        key = (t.atom.sigma, t.atom.shift)
        even[key] = even.get(key, 0.0) + t.c
        odd[key] = odd.get(key, 0.0) + (t.c if t.m % 2 == 0 else -t.c)
    even_live = {k: w for k, w in even.items() if abs(w) > _GROUP_WEIGHT_TOL}
    odd_live = {k: w for k, w in odd.items() if abs(w) > _GROUP_WEIGHT_TOL}
    if len(even_live) != 1:
        raise DecompositionError(
            f"{label}: even-parity profile is not a single exponential "
            f"({len(even_live)} found)"
        )
    (sigma, m_eff), w0 = next(iter(even_live.items()))
    if abs(w0 - 1.0) > 1e-9:
        raise DecompositionError(f"{label}: total mass {w0} is not 1")
    if not odd_live:
        raise DecompositionError(
            f"{label}: characteristic function vanishes identically on the "
            "odd dual slice, violating the nonvanishing hypothesis"
        )
    if len(odd_live) != 1:
        raise DecompositionError(
            f"{label}: odd-parity profile is not a single exponential "
            f"({len(odd_live)} found)"
        )
    (sigma_p, m_p_eff), kappa_raw = next(iter(odd_live.items()))
    return _Extraction(sigma, m_eff, sigma_p, m_p_eff, kappa_raw)


def _finite_marginal(mu: AtomicSignedMeasure) -> AtomicSignedMeasure:
    """Pushforward onto Z(2) x G: coefficients summed per finite coset."""
    return AtomicSignedMeasure.from_terms(
        mu.group, [(t.c, 0.0, 0.0, t.m, t.g) for t in mu.terms]
    )


def _kernel_alignment(
    omega1: AtomicSignedMeasure,
    omega2: AtomicSignedMeasure,
    kernel: Sequence[GroupElement],
    tol: float,
) -> GroupElement:
    """Find dk in K with char(omega1 * E_dk) matching char(omega2) on n = 0.

    The coset representatives are chosen per measure, so the two omegas can
    disagree by a K-translation; the even dual slice determines it.
    """
    group = omega1.group
    targets = []
    hs = list(group.G.characters())
    for h in hs:
        c1 = char_fn(omega1, YPoint(group, 0.0, 0, h))
        c2 = char_fn(omega2, YPoint(group, 0.0, 0, h))
        if abs(c1) < 1e-10 or abs(c2) < 1e-10:
            raise DecompositionError(
                "vanishing characteristic function on the even dual slice; "
                "cannot align the K-supported factors"
            )
        targets.append(c2 / c1)
    best, best_err = None, math.inf
    for k in kernel:
        err = max(abs(h(k) - t) for h, t in zip(hs, targets))
        if err < best_err:
            best, best_err = k, err
    if best is None or best_err > math.sqrt(tol):
        raise DecompositionError(
            "no K-translation aligns the two omega factors "
            f"(best mismatch {best_err:.3e})"
        )
    return best


def _fit_t_shift(
    omega1: AtomicSignedMeasure, omega2: AtomicSignedMeasure, tol: float
) -> float:
    """Least-squares real-shift aligning the even-slice phases, or 0."""
    group = omega1.group
    scale = ratio_probe_scale(omega1, omega2)
    s_vals = np.asarray([s for s in np.linspace(-scale, scale, 9) if s != 0.0])
    r = np.array(
        [
            char_fn(omega2, YPoint(group, float(s), 0, group.G.trivial_character()))
            / char_fn(omega1, YPoint(group, float(s), 0, group.G.trivial_character()))
            for s in s_vals
        ]
    )
    if np.abs(np.abs(r) - 1.0).max() > math.sqrt(tol):
        return 0.0  # moduli differ; a shift cannot reconcile them
    order = np.argsort(s_vals)
    phase = np.unwrap(np.angle(r[order]))
    s_sorted = s_vals[order]
    dt = float(np.dot(s_sorted, phase) / np.dot(s_sorted, s_sorted))
    return dt if abs(dt) > tol else 0.0


def _delta_between(
    omega1: AtomicSignedMeasure, omega2: AtomicSignedMeasure, tol: float
) -> tuple[str, float, AtomicSignedMeasure, tuple[tuple[str, float], ...], tuple[str, ...]]:
    rel = delta_relation(omega1, omega2, tol=max(tol, 1e-11))
    if not rel.holds:
        raise DecompositionError(
            "the two omega factors are not linked by an order-2 convolution"
        )
    if rel.branch == "tau1_eq_tau2_conv_delta":
        direction = OMEGA1_FROM_OMEGA2
        other = OMEGA2_FROM_OMEGA1
    else:
        direction = OMEGA2_FROM_OMEGA1
        other = OMEGA1_FROM_OMEGA2
    alternatives: tuple[tuple[str, float], ...] = ()
    if "both_branches_fit" in rel.flags:
        alternatives = ((other, rel.d),)
    return direction, rel.d, rel.delta, alternatives, rel.flags


def decompose(
    mu1: AtomicSignedMeasure,
    mu2: AtomicSignedMeasure,
    alpha: XAutomorphism,
    tol: float = 1e-9,
) -> Decomposition:
    """Recover the canonical factorization from a valid equation instance.

    Gate: the grid residual of the symmetry equation must be at most tol.
    The generic branch reads the exponential profiles, renormalizes the
    two-Gaussian factor to its extremal coefficient (pushing the remainder
    into omega through an order-2 signed factor), and reduces the finite
    support to the canonical K-coset representative.  a = -1 skips the
    gamma factor entirely and keeps the real part inside omega.
    """
    group = mu1.group
    if mu2.group != group or alpha.group != group:
        raise DecompositionError("measures and automorphism must share one group")
    for label, mu in (("mu1", mu1), ("mu2", mu2)):
        if abs(mu.total_mass() - 1.0) > 1e-9:
            raise DecompositionError(f"{label} total mass is not 1")
        if is_distribution(mu).is_no:
            raise DecompositionError(f"{label} is not a distribution")
    report = equation_residual_report(mu1, mu2, alpha)
    if report.residual > tol:
        raise DecompositionError(
            f"equation residual {report.residual:.3e} exceeds tolerance {tol:.1e}; "
            "the symmetry hypothesis fails"
        )
    flags = list(report.flags)
    notes: list[str] = []
    kernel = tuple(kernel_of_I_plus(alpha.alpha_G))

    reps = []
    reduced = []
    for label, mu in (("mu1", mu1), ("mu2", mu2)):
        rep = _coset_representative(mu, kernel, label)
        reps.append(rep)
        reduced.append(mu.shifted(XPoint(group, 0.0, 0, -rep)))

    if abs(alpha.a + 1.0) < 1e-12:
        omega1, omega2 = reduced
        t_fix = 0.0
        if omega1.has_continuous_part or omega2.has_continuous_part:
            t_fix = _fit_t_shift(omega1, omega2, tol)
            if t_fix != 0.0:
                omega1 = omega1.shifted(XPoint(group, t_fix, 0, group.G.zero()))
                flags.append("t_shift_aligned")
        dk = _kernel_alignment(omega1, omega2, kernel, tol)
        if not dk.is_zero:
            omega1 = omega1.shifted(XPoint(group, 0.0, 0, dk))
            flags.append("k_alignment_applied")
        direction, d, vt, alternatives, dflags = _delta_between(omega1, omega2, tol)
        flags.extend(dflags)
        shift1 = XPoint(group, -t_fix, 0, reps[0] - dk)
        shift2 = XPoint(group, 0.0, 0, reps[1])
        rec_err = max(
            char_sup_distance(omega1.shifted(shift1), mu1),
            char_sup_distance(omega2.shifted(shift2), mu2),
        )
        if rec_err > tol:
            raise DecompositionError(
                f"reconstruction error {rec_err:.3e} exceeds tolerance"
            )
        notes.append(
            "a = -1 branch: shifts are full ambient points (real and finite "
            "coordinates), not finite elements only"
        )
        return Decomposition(
            BRANCH_MINUS_ONE,
            None,
            (omega1, omega2),
            (shift1, shift2),
            direction,
            d,
            vt,
            kernel,
            None,
            None,
            report.residual,
            rec_err,
            tuple(flags),
            tuple(notes),
            alternatives,
        )

    exts = [
        _extract_exponentials(m, label)
        for m, label in zip(reduced, ("mu1", "mu2"))
    ]
    gammas: list[ThetaParams] = []
    omegas: list[AtomicSignedMeasure] = []
    rhos: list[float] = []
    for ext, label, mu_red in zip(exts, ("mu1", "mu2"), reduced):
        degenerate = (ext.sigma_p, ext.m_p_eff) == (ext.sigma, ext.m_eff)
        if degenerate:
            rho = 1.0
        else:
            if not (0.0 < ext.sigma_p < ext.sigma):
                raise DecompositionError(
                    f"{label}: exponential profiles (sigma={ext.sigma}, "
                    f"sigma'={ext.sigma_p}) violate the class ordering"
                )
            rho = two_term_bound(ext.sigma, ext.m_eff, ext.sigma_p, ext.m_p_eff)
        if abs(ext.kappa_raw) > rho * (1.0 + 1e-9):
            raise DecompositionError(
                f"{label}: odd-slice coefficient {ext.kappa_raw:.6g} exceeds the "
                f"extremal bound {rho:.6g}; no distribution factorization exists"
            )
        sign = 1.0 if ext.kappa_raw >= 0.0 else -1.0
        # extremal normalization: the gamma factor takes kappa = rho * sign
        # and the leftover scalar sign/rho moves into omega as an order-2
        # signed factor, keeping the product exactly equal to mu
        pi = PiMeasure(sign / rho)
        tau = _finite_marginal(mu_red)
        omega = tau.convolve(pi.to_measure(group))
        verdict = is_distribution(omega)
        if verdict.is_no:
            raise DecompositionError(
                f"{label}: renormalized omega factor is not a distribution "
                f"(min {verdict.min_value:.3e})"
            )
        gammas.append(
            ThetaParams(ext.sigma, ext.sigma_p, ext.m_eff, ext.m_p_eff, rho * sign)
        )
        omegas.append(omega)
        rhos.append(rho)

    if not check_cross_constraints(gammas[0], gammas[1], alpha.a, tol=math.sqrt(tol)):
        raise DecompositionError(
            "recovered exponential parameters violate the cross constraints "
            f"for a = {alpha.a}"
        )

    omega1, omega2 = omegas
    dk = _kernel_alignment(omega1, omega2, kernel, tol)
    if not dk.is_zero:
        omega1 = omega1.shifted(XPoint(group, 0.0, 0, dk))
        flags.append("k_alignment_applied")
    direction, d, vt, alternatives, dflags = _delta_between(omega1, omega2, tol)
    flags.extend(dflags)

    shift1 = XPoint(group, 0.0, 0, reps[0] - dk)
    shift2 = XPoint(group, 0.0, 0, reps[1])
    rec1 = theta_to_measure(gammas[0], group).convolve(omega1).shifted(shift1)
    rec2 = theta_to_measure(gammas[1], group).convolve(omega2).shifted(shift2)
    rec_err = max(char_sup_distance(rec1, mu1), char_sup_distance(rec2, mu2))
    if rec_err > tol:
        raise DecompositionError(
            f"reconstruction error {rec_err:.3e} exceeds tolerance"
        )
    return Decomposition(
        BRANCH_GENERIC,
        (gammas[0], gammas[1]),
        (omega1, omega2),
        (shift1, shift2),
        direction,
        d,
        vt,
        kernel,
        (exts[0].kappa_raw, exts[1].kappa_raw),
        (rhos[0], rhos[1]),
        report.residual,
        rec_err,
        tuple(flags),
        tuple(notes),
        alternatives,
    )


def tau_from_coefficients(
    group: AmbientGroup,
    coeffs: Mapping[tuple[int, ...] | GroupElement, tuple[float, float]],
) -> AtomicSignedMeasure:
    """Finite-part measure sum of a_g E_(m=0,g) + b_g E_(m=1,g)."""
    terms = []
    for g, (a_w, b_w) in coeffs.items():
        terms.append((a_w, 0.0, 0.0, 0, g))
        terms.append((b_w, 0.0, 0.0, 1, g))
    return AtomicSignedMeasure.from_terms(group, terms)


def lambda_tau_criterion(
    sigma: float,
    m: float,
    sigma_p: float,
    m_p: float,
    coeffs: Mapping[tuple[int, ...] | GroupElement, tuple[float, float]],
) -> bool:
    """Positivity of the signed two-Gaussian combination convolved with tau.

    tau has weights (a_g, b_g) on the two parity cosets over each g; the
    convolution is a distribution exactly when every imbalance ratio
    |a - b| / (a + b) stays within the two-term density bound.
    """
    if not (0.0 < sigma_p < sigma):
        raise ValueError("need 0 < sigma_p < sigma")
    total = 0.0
    for g, (a_w, b_w) in coeffs.items():
        if a_w < 0.0 or b_w < 0.0:
            raise ValueError(f"negative coefficient at g={g}")
        total += a_w + b_w
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"coefficients sum to {total}, expected 1")
    bound = two_term_bound(sigma, m, sigma_p, m_p)
    for a_w, b_w in coeffs.values():
        if a_w + b_w <= 0.0:
            continue
        if abs(a_w - b_w) > bound * (a_w + b_w):
            return False
    return True


def factor_exchange(
    gamma: ThetaParams,
    omega: AtomicSignedMeasure,
    pi: PiMeasure,
    check_nonvanishing: bool = True,
) -> tuple[ThetaParams, AtomicSignedMeasure]:
    """Move an order-2 factor between the two-Gaussian part and omega.

    Returns (gamma * pi, omega * pi^-1); the convolution product of the
    pair is unchanged.  The exchanged gamma may leave the admissible class;
    callers decide whether that matters.
    """
    if not (0.0 < gamma.sigma_p < gamma.sigma):
        raise ValueError("gamma must have 0 < sigma' < sigma")
    group = omega.group
    if check_nonvanishing:
        for n in (0, 1):
            for h in group.G.characters():
                if abs(char_fn(omega, YPoint(group, 0.0, n, h))) < 1e-10:
                    raise ValueError(
                        "omega characteristic function vanishes at a dual point"
                    )
    gamma_new = ThetaParams(
        gamma.sigma, gamma.sigma_p, gamma.m, gamma.m_p, gamma.kappa * pi.c
    )
    omega_new = omega.convolve(pi.invert().to_measure(group))
    return gamma_new, omega_new


@dataclass(frozen=True)
class RigidityResult:
    rigid: bool
    witness: PiMeasure | None
    rho: float
    kappa: float
    flags: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "rigid": self.rigid,
            "witness_c": None if self.witness is None else self.witness.c,
            "rho": self.rho,
            "kappa": self.kappa,
            "flags": list(self.flags),
        }


def _parity_pairs(
    omega: AtomicSignedMeasure,
) -> dict[tuple[int, ...], tuple[float, float]]:
    pairs: dict[tuple[int, ...], list[float]] = {}
    for t in omega.terms:
        if t.atom.sigma != 0.0 or t.atom.shift != 0.0:
            raise ValueError("omega must be supported on the finite part")
        slot = pairs.setdefault(t.g.coords, [0.0, 0.0])
        slot[t.m % 2] += t.c
    return {g: (a_w, b_w) for g, (a_w, b_w) in pairs.items()}


def rigidity_decision(
    gamma: ThetaParams, omega: AtomicSignedMeasure, rel_tol: float = 1e-12
) -> RigidityResult:
    """Decide whether the (gamma, omega) factorization admits any exchange.

    Rigid exactly when |kappa| sits at the extremal bound AND some finite
    coset pair has one parity weight zero and the other positive; otherwise
    a concrete nondegenerate exchange factor is returned.  A vanishing
    omega characteristic value is reported as a flag, not an error, so the
    decision stays available at such boundary inputs.
    """
    if not (0.0 < gamma.sigma_p < gamma.sigma):
        raise ValueError("gamma must have 0 < sigma' < sigma")
    if gamma.kappa == 0.0:
        raise ValueError("kappa must be nonzero")
    if is_distribution(omega).is_no:
        raise ValueError("omega must be a distribution")
    if abs(omega.total_mass() - 1.0) > 1e-9:
        raise ValueError("omega total mass is not 1")
    pairs = _parity_pairs(omega)
    rho = rho_extremal(gamma)
    kappa = gamma.kappa
    flags: list[str] = []
    group = omega.group
    for n in (0, 1):
        for h in group.G.characters():
            if abs(char_fn(omega, YPoint(group, 0.0, n, h))) < 1e-10:
                flags.append("vanishing_characteristic_function")
                break
        else:
            continue
        break

    extremal = abs(abs(kappa) - rho) <= rel_tol * rho
    zero_pattern = False
    for a_w, b_w in pairs.values():
        lo, hi = min(a_w, b_w), max(a_w, b_w)
        if lo <= 1e-15 and hi > 1e-12:
            zero_pattern = True
            break
    if extremal and zero_pattern:
        return RigidityResult(True, None, rho, kappa, tuple(flags))

    if not extremal:
        # |kappa| < rho: any |c| in (1, rho/|kappa|] scales kappa toward the
        # extremal value while pi^-1 stays a genuine distribution; the
        # midpoint keeps both factors strictly inside despite roundoff
        c = math.copysign((1.0 + rho / abs(kappa)) / 2.0, kappa)
        witness = PiMeasure(c)
    else:
        # extremal but every pair has both weights positive: a factor with
        # c strictly between the worst imbalance and 1 keeps both parts valid
        q = 0.0
        for a_w, b_w in pairs.values():
            if a_w + b_w > 0.0:
                q = max(q, abs(a_w - b_w) / (a_w + b_w))
        witness = PiMeasure((1.0 + q) / 2.0)
    gamma_new, omega_new = factor_exchange(gamma, omega, witness, check_nonvanishing=False)
    if not is_in_theta(gamma_new) or is_distribution(omega_new).is_no:
        raise AssertionError(
            "internal witness validation failed; flexible decision unsound"
        )
    return RigidityResult(False, witness, rho, kappa, tuple(flags))

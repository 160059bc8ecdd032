"""Checkable first-order optimality certificates for the extremal problems.

Each certificate is a pure function of (candidate, moment data, tolerance):
it never re-estimates moments, so a verdict is reproducible from its
inputs.  Stochastic moment errors are propagated; a residual only counts
as a violation when it exceeds the tolerance plus three combined standard
errors, otherwise sampling noise would flip verdicts.

* l1 problem: the explicit dual construction from the optimality system.
  With s_alpha = moment(alpha) / moment(d*e_1), the multipliers
  u = max(s, 0), v = max(-s, 0), psi = 1 - |s| are feasible iff every
  |s_alpha| <= 1 (moment dominance), and complementarity forces
  sign(g_alpha) * s_alpha = 1 on the support.
* weighted l2 problem: the coefficient proportionality
  g_alpha = l2 * (n+d)/n * moment(alpha) / volume, which is invariant
  under rescaling of the candidate, so no volume normalization is needed.
* Gram trace problem: A = I - (n+d) trace(Q) / (n rho_d) * M must be
  positive semidefinite and orthogonal to Q, at volume rho_d exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .jacobi import jacobi_eigh
from .polynomials import (
    MULTINOMIAL,
    GeneralizedPolynomial,
    GramForm,
    enumerate_indices,
    multinomial_coefficient,
)
from .volume import (
    CLOSED_FORM,
    SPHERICAL,
    MomentMatrix,
    MomentTable,
    closed_form_ball_volume,
)

PASS = "pass"
FAIL = "fail"

_DETERMINISTIC = (SPHERICAL, CLOSED_FORM)


class CertificatePreconditionError(ValueError):
    """The candidate violates a certificate precondition (e.g. wrong volume)."""


class MomentCoverageError(ValueError):
    """The supplied moment data does not cover the required index set."""


@dataclass(frozen=True)
class Certificate:
    """Structured optimality verdict with residual magnitudes and duals."""

    kind: str
    verdict: str
    tolerance: float
    residuals: dict[str, float]
    duals: dict[str, object]

    @property
    def passed(self) -> bool:
        return self.verdict == PASS


def _default_tol(backend: str, tol: float | None) -> float:
    if tol is not None:
        return float(tol)
    return 1e-6 if backend in _DETERMINISTIC else 1e-2


def _alpha_key(alpha) -> str:
    return "g(" + ",".join(str(a) for a in alpha) + ")"


def _ratio_error(m, sm, m1, sm1) -> float:
    # standard error of m / m1 by first-order propagation
    if m1 == 0.0:
        return math.inf
    rel1 = sm1 / abs(m1)
    return abs(m / m1) * math.hypot(sm / abs(m) if m != 0.0 else 0.0, rel1) + (
        sm / abs(m1) if m == 0.0 else 0.0
    )


def certify_p1(
    g: GeneralizedPolynomial,
    moments: MomentTable,
    tol: float | None = None,
) -> Certificate:
    """Check the l1 optimality system at a candidate normalized to vol(B_d).

    Requires moments for the full degree-d lattice slice of g's index set
    and a volume estimate at vol(B_d) within tolerance.
    """
    tol = _default_tol(moments.normalization.backend, tol)
    if moments.q != g.q:
        raise MomentCoverageError(
            f"moment table lattice q={moments.q} does not match candidate q={g.q}"
        )
    basis = enumerate_indices(g.n, int(g.degree * g.q))
    missing = [a for a in basis if a not in moments.entries]
    if missing:
        raise MomentCoverageError(f"missing moment entries, e.g. {missing[0]}")

    rho = closed_form_ball_volume(g.n, g.degree)
    vol = moments.normalization.value
    vol_err = moments.normalization.std_error
    volume_residual = abs(vol - rho) / rho
    if volume_residual > tol + 3.0 * vol_err / rho:
        raise CertificatePreconditionError(
            f"candidate volume {vol:.6g} is not at vol(B_d) = {rho:.6g} "
            f"within tolerance {tol:g}"
        )

    axis = tuple(int(g.degree * g.q) if i == 0 else 0 for i in range(g.n))
    m1, sm1 = moments.entries[axis]
    if not m1 > 0.0:
        raise CertificatePreconditionError(
            f"axis moment at {axis} is {m1:.6g}, expected positive"
        )
    mono = g.to_convention("monomial") if g.q == 1 else g
    cutoff = tol * max((abs(c) for c in mono.terms.values()), default=0.0)
    support = set(mono.support(cutoff))

    theta = (g.degree_float / (g.n + g.degree_float)) / m1
    ratios: dict[tuple, float] = {}
    ratio_errs: dict[tuple, float] = {}
    for alpha in basis:
        m, sm = moments.entries[alpha]
        ratios[alpha] = m / m1
        ratio_errs[alpha] = _ratio_error(m, sm, m1, sm1)

    dominance = 0.0
    dominance_ok = True
    for alpha in basis:
        excess = abs(ratios[alpha]) - 1.0
        dominance = max(dominance, excess)
        if excess > tol + 3.0 * ratio_errs[alpha]:
            dominance_ok = False

    stationarity = 0.0
    stationarity_ok = True
    slackness = 0.0
    slackness_ok = True
    for alpha in support:
        coeff = mono.terms[alpha]
        gap = abs(math.copysign(1.0, coeff) * ratios[alpha] - 1.0)
        stationarity = max(stationarity, gap)
        if gap > tol + 3.0 * ratio_errs[alpha]:
            stationarity_ok = False
        slack = abs(coeff) * max(0.0, 1.0 - abs(ratios[alpha]))
        slackness = max(slackness, slack)
        if slack > tol + 3.0 * abs(coeff) * ratio_errs[alpha]:
            slackness_ok = False

    ok = dominance_ok and stationarity_ok and slackness_ok
    residuals = {
        "volume": volume_residual,
        "dominance": max(0.0, dominance),
        "support_stationarity": stationarity,
        "complementary_slackness": slackness,
    }
    duals = {
        "theta": theta,
        "u": {",".join(map(str, a)): max(ratios[a], 0.0) for a in basis},
        "v": {",".join(map(str, a)): max(-ratios[a], 0.0) for a in basis},
        "psi": {",".join(map(str, a)): 1.0 - abs(ratios[a]) for a in basis},
    }
    return Certificate("p1_kkt", PASS if ok else FAIL, tol, residuals, duals)


def certify_p2(
    g: GeneralizedPolynomial,
    moments: MomentTable,
    tol: float | None = None,
) -> Certificate:
    """Check the weighted l2 proportionality at a multinomial-convention candidate.

    The characterization is scale invariant (both sides scale linearly in
    the candidate), so the candidate may sit at any volume; the moments
    must simply belong to its own sublevel set.
    """
    tol = _default_tol(moments.normalization.backend, tol)
    if g.q == 1 and g.convention != MULTINOMIAL:
        raise ValueError(
            "certify_p2 expects multinomial-convention coefficients; "
            "convert with to_convention('multinomial')"
        )
    if moments.q != g.q:
        raise MomentCoverageError(
            f"moment table lattice q={moments.q} does not match candidate q={g.q}"
        )
    basis = enumerate_indices(g.n, int(g.degree * g.q))
    missing = [a for a in basis if a not in moments.entries]
    if missing:
        raise MomentCoverageError(f"missing moment entries, e.g. {missing[0]}")

    vol = moments.normalization.value
    vol_err = moments.normalization.std_error
    if not vol > 0.0:
        raise CertificatePreconditionError(f"volume estimate {vol:.6g} is not positive")

    # q = 1 uses the multinomial weights; generalized lattices use weight 1
    weights = {a: float(multinomial_coefficient(a)) if g.q == 1 else 1.0 for a in basis}
    coeffs = {a: g.terms.get(a, 0.0) for a in basis}
    l2_sq = sum(weights[a] * coeffs[a] ** 2 for a in basis)
    factor = l2_sq * (g.n + g.degree_float) / g.n

    residuals: dict[str, float] = {}
    worst = 0.0
    ok = True
    for alpha in basis:
        m, sm = moments.entries[alpha]
        predicted = factor * m / vol
        r = coeffs[alpha] - predicted
        err = factor * _ratio_error(m, sm, vol, vol_err)
        residuals[_alpha_key(alpha)] = abs(r)
        worst = max(worst, abs(r))
        if abs(r) > tol + 3.0 * err:
            ok = False
    residuals["max_coefficient"] = worst

    # strict positivity of the even-index coefficients accompanies any optimum
    even = [a for a in basis if all(x % 2 == 0 for x in a)] if g.q == 1 else basis
    positivity = max((0.0 - coeffs[a] for a in even), default=0.0)
    residuals["even_coefficient_positivity"] = max(0.0, positivity)
    if positivity >= 0.0 and any(coeffs[a] <= 0.0 for a in even):
        ok = False

    duals = {
        "l2_star": l2_sq,
        "lambda_star": 4.0 * l2_sq * g.degree_float / (g.n * vol),
    }
    return Certificate("p2_moment", PASS if ok else FAIL, tol, residuals, duals)


def certify_p3(
    gram: GramForm,
    mm: MomentMatrix,
    tol: float | None = None,
) -> Certificate:
    """Check the trace-optimality matrix condition at volume vol(B_d).

    Forms A = I - (n+d) trace(Q) / (n rho_d) * M and verifies that A is
    positive semidefinite with <Q, A> = 0, the first-order system of the
    trace-minimization problem.
    """
    tol = _default_tol(mm.normalization.backend, tol)
    size = gram.Q.shape[0]
    if mm.values.shape != (size, size):
        raise ValueError(
            f"moment matrix has shape {mm.values.shape}, expected ({size}, {size})"
        )
    n, d = gram.n, float(gram.degree)
    rho = closed_form_ball_volume(n, gram.degree)
    vol = mm.normalization.value
    vol_err = mm.normalization.std_error
    volume_residual = abs(vol - rho) / rho
    if volume_residual > tol + 3.0 * vol_err / rho:
        raise CertificatePreconditionError(
            f"candidate volume {vol:.6g} is not at vol(B_d) = {rho:.6g} "
            f"within tolerance {tol:g}"
        )

    trace = gram.trace
    scale = (n + d) * trace / (n * rho)
    a_matrix = np.eye(size) - scale * mm.values
    eigenvalues, _ = jacobi_eigh(a_matrix)
    min_eig = float(eigenvalues[0])
    eig_allowance = 3.0 * scale * float(np.linalg.norm(mm.errors))

    inner = float(np.tensordot(gram.Q, a_matrix))
    compl = abs(inner) / max(1.0, abs(trace))
    compl_allowance = (
        3.0
        * scale
        * float(np.sqrt(((np.asarray(gram.Q) * mm.errors) ** 2).sum()))
        / max(1.0, abs(trace))
    )

    ok = (min_eig >= -(tol + eig_allowance)) and (compl <= tol + compl_allowance)
    residuals = {
        "volume": volume_residual,
        "min_eigenvalue": max(0.0, -min_eig),
        "complementarity": compl,
    }
    duals = {
        "lambda": d * trace / (n * rho),
        "psi_spectrum": [float(v) for v in eigenvalues],
    }
    return Certificate("p3_psd", PASS if ok else FAIL, tol, residuals, duals)


@dataclass(frozen=True)
class RefutationReport:
    """Outcome of testing the axis-power Gram form against the trace certificate."""

    gram: GramForm
    certificate: Certificate
    min_eigenvalue: float


def minimal_trace_axis_gram(n: int, d: int) -> GramForm:
    """The minimal-trace Gram form of sum_i x_i**d: diagonal, trace n.

    The only PSD representations of the axis-power polynomial put weight 1
    on each pure power x_i**(d/2) and adjust off-diagonal pairs against the
    middle diagonal; trace is minimized by the plain diagonal.
    """
    if d < 2 or d % 2 != 0:
        raise ValueError(f"degree must be an even integer >= 2, got {d}")
    basis = enumerate_indices(n, d // 2)
    diag = np.zeros(len(basis))
    for i in range(n):
        pure = tuple(d // 2 if j == i else 0 for j in range(n))
        diag[basis.index(pure)] = 1.0
    return GramForm(n, d, np.diag(diag))


def refute_ld_for_p3(
    n: int,
    d: int,
    backend: str = SPHERICAL,
    budget: int | None = None,
    seed: int = 0,
    tol: float | None = None,
) -> RefutationReport:
    """Show the axis-power ball cannot minimize the Gram trace for d >= 4.

    Builds the minimal-trace Gram of sum_i x_i**d, runs the trace
    certificate against the moment matrix of B_d, and reports the negative
    eigenvalue that witnesses the failure: the cross moment puts a nonzero
    off-diagonal entry next to a zero diagonal in A.
    """
    if d % 2 != 0 or d < 2:
        raise ValueError(f"degree must be an even integer >= 2, got {d}")
    if d == 2:
        raise ValueError(
            "not applicable at d = 2: the quadratic identity Gram satisfies the "
            "trace certificate, so there is nothing to refute"
        )
    from .volume import moment_matrix  # local import to avoid cycle noise

    gram = minimal_trace_axis_gram(n, d)
    mm = moment_matrix(gram.expand(), d // 2, backend=backend, budget=budget, seed=seed)
    certificate = certify_p3(gram, mm, tol)
    spectrum = certificate.duals["psi_spectrum"]
    return RefutationReport(gram, certificate, float(min(spectrum)))

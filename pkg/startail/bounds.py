""" Closed-form quantities and explicit probability bounds

Everything here is plain double precision arithmetic, except star_mean and
star_variance which stay exact for Fraction input. Probability bounds are
formed in log space and exponentiated last, so bounds far below e^-700 keep
their logarithm.
"""

import enum
from fractions import Fraction
import json
import logging
import math
from typing import Any, Dict, List, NamedTuple, Optional, Union

import numpy as np
from scipy.special import xlog1py

from .common import (
    ParameterError, Prob, Scalar, check_count, check_positive,
    check_probability, comb0, dyadic_ceil, format_float, safe_log)
from .config import Constants
from .const import (
    A_FLOOR, BETA_T, BETA_TPLUS, GAMMA_CONST_DIV, GATE_POWER)

log = logging.getLogger(__name__)

Real = Union[int, float, Fraction]

# below this argument phi is evaluated by its power series
_PHI_SERIES_CUTOFF = 1e-3
# relative slack for the floating point checks of phi_inequalities
_PHI_RTOL = 1e-12


class GateStatus(enum.Enum):
    """ Validity gate of the packing tail bound """
    PASSED = 'passed'
    FAILED = 'failed'


class RegimeCase(enum.Enum):
    """ Hypothesis under which the general pipeline is covered """
    LARGE_NP = 'i'
    """ np >= gamma log n """
    SMALL_NP = 'ii'
    """ np <= n^-gamma """
    LARGE_T = 'iii'
    """ t^2 / mu exceeds the gamma-weighted clustering scale """
    NONE = 'none'


def max_star_count(n: int, r: int) -> int:
    """ Number of K_{1,r} copies in K_n, n C(n-1, r). """
    check_count(n, "n")
    check_count(r, "r", 1)
    return n * comb0(n - 1, r)


def star_mean(n: int, p: Prob, r: int) -> Real:
    """ Expected number of K_{1,r} copies in G(n, p). """
    p = check_probability(p)
    return max_star_count(n, r) * p ** r


def star_variance(n: int, p: Prob, r: int) -> Real:
    """ Exact variance of the K_{1,r} count in G(n, p).

    Sums p^|a u b| - p^2r over ordered pairs of copies sharing an edge:
    equal copies, copies with a common center and i common leaves, and
    copies centered at the two ends of a common edge.
    """
    p = check_probability(p)
    check_count(n, "n")
    check_count(r, "r", 1)
    p_2r = p ** (2 * r)
    copies = n * comb0(n - 1, r)
    variance = copies * (p ** r - p_2r)
    for shared in range(1, r):
        pairs = copies * comb0(r, shared) * comb0(n - 1 - r, r - shared)
        variance += pairs * (p ** (2 * r - shared) - p_2r)
    variance += n * (n - 1) * comb0(n - 2, r - 1) ** 2 * (p ** (2 * r - 1) - p_2r)
    return variance


def chernoff_phi(x: float) -> float:
    """ phi(x) = (1 + x) log(1 + x) - x for x >= 0. """
    if x < 0:
        raise ParameterError(f"phi is evaluated for x >= 0 only, got {x}")
    x = float(x)
    if x < _PHI_SERIES_CUTOFF:
        return x * x * (1 / 2 - x * (1 / 6 - x * (1 / 12 - x / 20)))
    return float(xlog1py(1 + x, x)) - x


class PhiCheck(NamedTuple):
    """ Which of the elementary phi inequalities hold at a point """
    x: float
    halving: bool
    quadratic_upper: bool
    quadratic_lower: bool
    log_lower: Optional[bool]

    @property
    def holds(self) -> bool:
        """ True if every applicable inequality holds """
        return (self.halving and self.quadratic_upper and self.quadratic_lower
                and self.log_lower is not False)


def phi_inequalities(x: float) -> PhiCheck:
    """ Checks phi(x/2) >= phi(x)/4, x^2 >= phi(x) >= min(x, x^2)/3 and,
    for x >= e^2, phi(x) >= x log(x) / 2.
    """
    phi = chernoff_phi(x)
    slack = 1 - _PHI_RTOL
    log_lower = None
    if x >= math.exp(2):
        log_lower = phi >= slack * x * math.log(x) / 2
    return PhiCheck(
        x=x,
        halving=chernoff_phi(x / 2) >= slack * phi / 4,
        quadratic_upper=x * x >= slack * phi,
        quadratic_lower=phi >= slack * min(x, x * x) / 3,
        log_lower=log_lower,
    )


def deviation_scale_M(t: float, n: int, r: int) -> float:
    """ M(t) = max(t^(1/r), t / n^(r-1)). """
    check_positive(t, "t")
    check_count(n, "n", 1)
    check_count(r, "r", 1)
    return max(float(t) ** (1 / r), float(t) / float(n) ** (r - 1))


def _clustering_scale(mu: float, n: int, r: int) -> float:
    return max(mu ** (1 / r), mu / float(n) ** (r - 1))


def _check_open_p(p: Prob) -> float:
    p = check_probability(p)
    if p == 0:
        raise ParameterError("p must be positive here.")
    return float(p)


def exponent_const_eps(n: int, p: Prob, r: int) -> float:
    """ min(mu, max(mu^(1/r), mu / n^(r-1)) log(1/p)). """
    check_count(n, "n", 1)
    float_p = _check_open_p(p)
    mu = float(star_mean(n, p, r))
    if mu == 0:
        return 0.0
    return min(mu, _clustering_scale(mu, n, r) * math.log(1 / float_p))


def _check_variance(variance: float) -> float:
    if not variance > 0:
        raise ParameterError(f"Variance must be positive, got {variance}")
    return float(variance)


def exponent_eps(
        n: int,
        p: Prob,
        r: int,
        eps: float,
        *,
        mean: Optional[float] = None,
        variance: Optional[float] = None,
) -> float:
    """ min(phi(eps) mu^2 / sigma^2, M(eps mu) log(e/p)). """
    check_positive(eps, "eps")
    check_count(n, "n", 1)
    float_p = _check_open_p(p)
    mu = float(star_mean(n, p, r) if mean is None else mean)
    var = _check_variance(
        star_variance(n, p, r) if variance is None else variance)
    gaussian = chernoff_phi(eps) * mu * mu / var
    if mu == 0:
        return gaussian
    clustered = deviation_scale_M(eps * mu, n, r) * (1 - math.log(float_p))
    return min(gaussian, clustered)


def exponent_psi(
        n: int,
        p: Prob,
        r: int,
        t: float,
        *,
        variance: Optional[float] = None,
) -> float:
    """ Psi(t) = min(t^2 / sigma^2, M(t) log(e/p)). """
    check_positive(t, "t")
    float_p = _check_open_p(p)
    var = _check_variance(
        star_variance(n, p, r) if variance is None else variance)
    return min(t * t / var,
               deviation_scale_M(t, n, r) * (1 - math.log(float_p)))


class BoundPair(NamedTuple):
    """ A bound in its sharp form and in its simplified form """
    first: float
    second: float
    log_first: float
    log_second: float


def _pair(log_first: float, log_second: float) -> BoundPair:
    return BoundPair(
        math.exp(log_first), math.exp(log_second), log_first, log_second)


def zc_tail_bound(mu: float, C: float, t: float) -> BoundPair:
    """ Bounds on Pr(Z_C >= mu + t).

    Returns exp(-phi(t/mu) mu / C) and exp(-t^2 / (2C(mu + t))).
    """
    check_positive(mu, "mu")
    check_positive(C, "C")
    check_positive(t, "t")
    return _pair(
        -chernoff_phi(t / mu) * mu / C,
        -t * t / (2 * C * (mu + t)))


def bounded_star_tail_bound(mu: float, D: float, r: int, t: float
                            ) -> BoundPair:
    """ Bounds on Pr(X_D >= mu + t/2).

    Returns exp(-phi(t/mu) mu / (16 D^(r-1))) and
    exp(-min(t^2/mu, t) / (48 D^(r-1))).
    """
    check_positive(mu, "mu")
    check_positive(D, "D")
    check_positive(t, "t")
    check_count(r, "r", 1)
    scale = float(D) ** (r - 1)
    return _pair(
        -chernoff_phi(t / mu) * mu / (16 * scale),
        -min(t * t / mu, t) / (48 * scale))


class GateCheck(NamedTuple):
    """ The validity gate (e^3 np / D)^D <= n^-8 in log space """
    status: GateStatus
    log_lhs: float
    log_rhs: float


def packing_gate(n: int, p: Prob, D: float) -> GateCheck:
    """ Evaluates the validity gate of packing_tail_bound. """
    check_count(n, "n", 1)
    float_p = float(check_probability(p))
    check_positive(D, "D")
    log_rhs = -GATE_POWER * math.log(n)
    if float_p == 0:
        log_lhs = -math.inf
    else:
        log_lhs = D * (3 + math.log(n * float_p) - math.log(D))
    status = GateStatus.PASSED if log_lhs <= log_rhs else GateStatus.FAILED
    return GateCheck(status, log_lhs, log_rhs)


class PackingTail(NamedTuple):
    """ Bound on Pr(N_{D_j} >= x); value is None when the gate failed """
    gate: GateStatus
    value: Optional[float]
    log_value: Optional[float]


def packing_tail_bound(n: int, p: Prob, D: float, j: int, x: float
                       ) -> PackingTail:
    """ n^-3 (np / (e ceil(D_j)))^(x D_j / 2) for D_j = 2^j D <= n, else 0. """
    check_count(j, "j")
    check_positive(x, "x")
    gate = packing_gate(n, p, D)
    if gate.status is GateStatus.FAILED:
        return PackingTail(gate.status, None, None)
    level = D * 2 ** j
    if level > n:
        return PackingTail(gate.status, 0.0, -math.inf)
    log_base = safe_log(n * float(p)) - 1 - math.log(dyadic_ceil(level))
    log_value = -3 * math.log(n) + x * level / 2 * log_base
    return PackingTail(gate.status, math.exp(log_value), log_value)


def packing_union_bound(n: int, p: Prob, D_j: float, x: float) -> float:
    """ n^ceil(x) C(n, ceil(D_j))^ceil(x) p^(ceil(x) ceil(D_j)).

    Bounds Pr(N_{D_j} >= x) for every n with no validity gate.
    """
    check_count(n, "n", 1)
    float_p = float(check_probability(p))
    check_positive(D_j, "D_j")
    stars = max(0, math.ceil(x))
    size = dyadic_ceil(D_j)
    if stars == 0:
        return 1.0
    if size > n or float_p == 0:
        return 0.0
    log_value = stars * (
        math.log(n) + math.log(math.comb(n, size)) + size * math.log(float_p))
    return math.exp(log_value)


def dyadic_levels(D: float, limit: float) -> List[float]:
    """ D_j = 2^j D for all j >= 0 with D_j <= limit. """
    check_positive(D, "D")
    levels: List[float] = []
    level = float(D)
    while level <= limit:
        levels.append(level)
        level *= 2
    return levels


def level_count(D: float, mean_bar: float) -> int:
    """ Smallest J >= 0 with 2^J D >= mean_bar. """
    check_positive(D, "D")
    count = 0
    level = float(D)
    while level < mean_bar:
        level *= 2
        count += 1
    return count


def tier_boundary(mean_bar: float, s: float, r: int) -> float:
    """ min(M, n) / s^(1/(r-1)), the level below which thresholds gain s. """
    return mean_bar / s ** (1 / (r - 1))


def event_threshold(
        M: float,
        level: float,
        beta: float,
        s: Optional[float] = None,
        boundary: Optional[float] = None,
) -> float:
    """ Threshold on N_{D_j}: beta M s / D_j below the boundary, else
    beta M / D_j. Without s the single tier beta M / D_j applies.
    """
    if s is not None and boundary is not None and level < boundary:
        return beta * M * s / level
    return beta * M / level


class BoundReport:
    """ Ordered named scalars with formulas, flags and labels.

    :param kind: Name of the pipeline that produced the report.
    :param inputs: Input parameters, echoed in the serialized form.
    """

    def __init__(self, kind: str, inputs: Dict[str, Any]) -> None:
        self.kind = kind
        self.inputs = dict(inputs)
        self.scalars: Dict[str, Scalar] = {}
        self.flags: Dict[str, bool] = {}
        self.labels: Dict[str, str] = {}

    def add(self, name: str, value: float, formula: str,
            log_value: Optional[float] = None) -> float:
        """ Records a scalar and returns its value. """
        if log_value is None and value >= 0:
            log_value = safe_log(value)
        self.scalars[name] = Scalar(name, float(value), log_value, formula)
        return float(value)

    def add_log(self, name: str, log_value: float, formula: str) -> float:
        """ Records a scalar known by its logarithm. """
        return self.add(name, math.exp(log_value), formula, log_value)

    def __getitem__(self, name: str) -> float:
        return self.scalars[name].value

    def __contains__(self, name: str) -> bool:
        return name in self.scalars

    def log_value(self, name: str) -> Optional[float]:
        """ Logarithm of a recorded scalar """
        return self.scalars[name].log_value

    def to_dict(self) -> Dict[str, Any]:
        """ JSON compatible representation. """
        return {
            "kind": self.kind,
            "inputs": {key: _json_real(val) for key, val in self.inputs.items()},
            "scalars": [
                {"name": scalar.name,
                 "value": _json_real(scalar.value),
                 "log_value": _json_real(scalar.log_value),
                 "formula": scalar.formula}
                for scalar in self.scalars.values()],
            "flags": dict(self.flags),
            "labels": dict(self.labels),
        }

    def to_json(self) -> str:
        """ Serializes to JSON text with a stable key order. """
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def rows(self) -> List[List[str]]:
        """ CSV rows: name, value, log value, formula. """
        return [
            [scalar.name, format_float(scalar.value),
             format_float(scalar.log_value), scalar.formula]
            for scalar in self.scalars.values()]


def _json_real(value: Any) -> Any:
    if isinstance(value, Fraction):
        value = float(value)
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, enum.Enum):
        return value.value
    return value


def _log_sum(*logs: float) -> float:
    return float(np.logaddexp.reduce(np.array(logs, dtype=float)))


def _add_totals(report: BoundReport, log_terms: List[float], name: str,
                formula: str) -> None:
    log_total = _log_sum(*log_terms)
    report.add_log(f"{name}_unclamped", log_total, formula)
    report.add(name, min(1.0, math.exp(log_total)), f"min(1, {formula})",
               min(0.0, log_total))


def _add_rigorous_total(
        report: BoundReport,
        gate: GateCheck,
        log_first: float,
        n: int,
        p: float,
        D: float,
        thresholds: List[float],
) -> None:
    report.flags["gate_passed"] = gate.status is GateStatus.PASSED
    report.labels["gate"] = gate.status.value
    report.add("gate_log_lhs", gate.log_lhs, "D (3 + log(np) - log D)")
    if gate.status is GateStatus.FAILED:
        return
    log_terms = [log_first]
    for j, threshold in enumerate(thresholds):
        tail = packing_tail_bound(n, p, D, j, threshold)
        if tail.log_value is not None and tail.log_value > -math.inf:
            log_terms.append(tail.log_value)
    report.add_log(
        "event_failure_union",
        _log_sum(*log_terms[1:]) if len(log_terms) > 1 else -math.inf,
        "sum_j n^-3 (np/(e ceil(D_j)))^(x_j D_j/2), D_j <= n")
    _add_totals(report, log_terms, "rigorous_total",
                "exp(-phi(t/mu) mu/(16 D^(r-1))) + event_failure_union")


def _check_pipeline_args(n: int, p: Prob, r: int) -> float:
    check_count(n, "n", 1)
    check_count(r, "r", 2)
    return _check_open_p(p)


def pipeline_const_eps(
        n: int,
        p: Prob,
        r: int,
        eps: float,
        *,
        constants: Constants = Constants(),
        beta: float = BETA_T,
        mean: Optional[float] = None,
        max_count: Optional[int] = None,
) -> BoundReport:
    """ Evaluates the constant-deviation upper tail bound with its literal
    constants.

    The reported total is the two-term bound
    exp(-min(eps, eps^2) mu / (48 D^(r-1))) + n^-2 exp(-beta M s / 2).
    The rigorous total replaces the second term with the union of packing
    tail bounds over the event levels; it holds for every n once the gate
    passes.

    :param mean: Replaces mu, for models other than G(n, p).
    :param max_count: Replaces the largest possible count n C(n-1, r).
    """
    float_p = _check_pipeline_args(n, p, r)
    check_positive(eps, "eps")
    if not 0 < beta <= BETA_T:
        raise ParameterError(f"beta must lie in (0, {BETA_T}], got {beta}")
    mu = float(star_mean(n, p, r) if mean is None else mean)
    check_positive(mu, "mu")
    top = max_star_count(n, r) if max_count is None else max_count

    report = BoundReport("const_eps", {
        "n": n, "p": float_p, "r": r, "eps": eps, "beta": beta})
    report.add("mu", mu, "mu = n C(n-1, r) p^r")
    gamma = 1 / (GAMMA_CONST_DIV * r)
    report.add("gamma", gamma, "gamma = 1/(16 r)")
    A = report.add("A", max(A_FLOOR, 8 / gamma), "A = max(e^4, 8/gamma)")
    s = report.add("s", 1 - gamma * math.log(float_p), "s = log(e/p^gamma)")
    D = report.add(
        "D", A * max(1.0, min(mu ** (1 / r), n) / s ** (1 / (r - 1))),
        "D = A max(1, min(mu^(1/r), n) / s^(1/(r-1)))")
    t = report.add("t", eps * mu, "t = eps mu")
    M = report.add("M", deviation_scale_M(t, n, r),
                   "M = max(t^(1/r), t/n^(r-1))")
    mean_bar = report.add("M_bar", min(M, n), "M_bar = min(M, n)")
    report.add("C", 4 * D ** (r - 1), "C = 4 D^(r-1)")
    report.add("J", level_count(D, mean_bar), "J = min{j : 2^j D >= M_bar}")
    phi = report.add("phi", chernoff_phi(eps), "phi(t/mu) = phi(eps)")
    report.add("Phi", min(mu, _clustering_scale(mu, n, r) * math.log(1 / float_p)),
               "Phi = min(mu, max(mu^(1/r), mu/n^(r-1)) log(1/p))")

    log_term1 = -min(eps, eps * eps) * mu / (48 * D ** (r - 1))
    log_term2 = -2 * math.log(n) - beta * M * s / 2
    report.add_log("term_bounded", log_term1,
                   "exp(-min(eps, eps^2) mu / (48 D^(r-1)))")
    report.add_log("term_event", log_term2, "n^-2 exp(-beta M s / 2)")
    _add_totals(report, [log_term1, log_term2], "total",
                "term_bounded + term_event")

    zeta = report.add("zeta", min(eps, eps * eps, eps ** (1 / r)),
                      "zeta = min(eps, eps^2, eps^(1/r))")
    Pi = report.add("Pi", min(mu, _clustering_scale(mu, n, r) * s),
                    "Pi = min(mu, max(mu^(1/r), mu/n^(r-1)) s)")
    report.add_log("combined",
                   math.log1p(float(n) ** -2) - constants.c * zeta * Pi,
                   "(1 + n^-2) exp(-c zeta Pi)")
    report.add("markov", 1 / (1 + eps), "1/(1+eps)")
    report.add_log("markov_exp", -eps / (1 + eps), "exp(-eps/(1+eps))")
    report.add("best", min(report["total"], 1 / (1 + eps)),
               "min(total, 1/(1+eps))")

    log_first = -phi * mu / (16 * D ** (r - 1))
    report.add_log("term_bounded_sharp", log_first,
                   "exp(-phi(eps) mu / (16 D^(r-1)))")
    thresholds = [
        event_threshold(M, level, beta) for level in dyadic_levels(D, n)]
    _add_rigorous_total(report, packing_gate(n, p, D), log_first, n, float_p,
                        D, thresholds)

    threshold = (1 + eps) * mu
    report.flags["range_lower"] = threshold >= 1
    report.flags["range_upper"] = threshold <= top
    report.flags["n_at_least_n0"] = n >= constants.n0
    report.labels["constants"] = _constants_label(constants)
    log.debug("const_eps pipeline n=%d p=%s r=%d eps=%s total=%s",
              n, float_p, r, eps, report["total"])
    return report


def _regime_case(n: int, p: float, t: float, mu: float, M: float, s: float,
                 gamma: float, r: int) -> RegimeCase:
    np_ = n * p
    log_n = math.log(n)
    if np_ >= gamma * log_n:
        return RegimeCase.LARGE_NP
    if np_ <= n ** -gamma:
        return RegimeCase.SMALL_NP
    weight = 1.0 if t <= min(mu, float(n) ** r) else 0.0
    scale = min(t ** (1 / r) * log_n ** r, M * s * log_n ** (r - 1))
    if t * t / mu >= weight * gamma * scale:
        return RegimeCase.LARGE_T
    return RegimeCase.NONE


def pipeline_general(
        n: int,
        p: Prob,
        r: int,
        t: float,
        gamma: float,
        *,
        constants: Constants = Constants(),
        beta: float = BETA_TPLUS,
        xi: float = 0.1,
        mean: Optional[float] = None,
        variance: Optional[float] = None,
        max_count: Optional[int] = None,
) -> BoundReport:
    """ Evaluates the general-deviation upper tail bound.

    The reported total is
    exp(-phi(t/mu) mu / (16 D^(r-1))) + n^-1 exp(-(beta/2) min(Psi, M s))
    with Psi = phi(t/mu) mu^2 / Lambda. The regime label names the first
    case hypothesis that holds for the given gamma; a gamma above 1/(16 r)
    is accepted and capped at 1/(16 r) inside A, s and D.
    """
    float_p = _check_pipeline_args(n, p, r)
    check_positive(t, "t")
    check_positive(gamma, "gamma")
    if not 0 < beta <= BETA_TPLUS:
        raise ParameterError(
            f"beta must lie in (0, {BETA_TPLUS}], got {beta}")
    if not 0 < xi < 1:
        raise ParameterError(f"xi must lie in (0, 1), got {xi}")
    mu = float(star_mean(n, p, r) if mean is None else mean)
    check_positive(mu, "mu")
    var = float(star_variance(n, p, r) if variance is None else variance)
    top = max_star_count(n, r) if max_count is None else max_count

    report = BoundReport("general", {
        "n": n, "p": float_p, "r": r, "t": t, "gamma": gamma, "beta": beta,
        "xi": xi})
    report.add("mu", mu, "mu = n C(n-1, r) p^r")
    report.add("sigma2", var, "sigma^2 = Var X")
    lam = report.add("Lambda", mu * (1 + (n * float_p) ** (r - 1)),
                     "Lambda = mu (1 + (np)^(r-1))")
    gamma_eff = report.add("gamma_eff", min(gamma, 1 / (GAMMA_CONST_DIV * r)),
                           "min(gamma, 1/(16 r))")
    A = report.add(
        "A", max(A_FLOOR, 8 * (3 / gamma_eff) ** (1 / (r - 1)), 8 / gamma_eff),
        "A = max(e^4, 8 (3/gamma)^(1/(r-1)), 8/gamma)")
    s = report.add("s", 1 - gamma_eff * math.log(float_p), "s = log(e/p^gamma)")
    M = report.add("M", deviation_scale_M(t, n, r),
                   "M = max(t^(1/r), t/n^(r-1))")
    mean_bar = report.add("M_bar", min(M, n), "M_bar = min(M, n)")
    phi = report.add("phi", chernoff_phi(t / mu), "phi(t/mu)")
    D = report.add(
        "D", A * max(1 + n * float_p, (phi * mu / (M * s)) ** (1 / (r - 1))),
        "D = A max(1 + np, (phi(t/mu) mu / (M s))^(1/(r-1)))")
    report.add("C", 4 * D ** (r - 1), "C = 4 D^(r-1)")
    report.add("J", level_count(D, mean_bar), "J = min{j : 2^j D >= M_bar}")
    psi_pipe = report.add("Psi_pipeline", phi * mu * mu / lam,
                          "phi(t/mu) mu^2 / Lambda")
    if var > 0:
        report.add("Psi", exponent_psi(n, float_p, r, t, variance=var),
                   "Psi(t) = min(t^2/sigma^2, M log(e/p))")
        report.add("Phi_eps", exponent_eps(
            n, float_p, r, t / mu, mean=mu, variance=var),
            "min(phi(eps) mu^2/sigma^2, M(eps mu) log(e/p))")

    log_term1 = -phi * mu / (16 * D ** (r - 1))
    log_term2 = -math.log(n) - beta / 2 * min(psi_pipe, M * s)
    report.add_log("term_bounded", log_term1,
                   "exp(-phi(t/mu) mu / (16 D^(r-1)))")
    report.add_log("term_event", log_term2,
                   "n^-1 exp(-(beta/2) min(Psi_pipeline, M s))")
    _add_totals(report, [log_term1, log_term2], "total",
                "term_bounded + term_event")
    report.add_log("combined",
                   math.log1p(1 / n) - constants.c * min(psi_pipe, M * s),
                   "(1 + n^-1) exp(-c min(Psi_pipeline, M s))")

    boundary = report.add("tier_boundary", tier_boundary(mean_bar, s, r),
                          "M_bar / s^(1/(r-1))")
    thresholds = [
        event_threshold(M, level, beta, s, boundary)
        for level in dyadic_levels(D, n)]
    _add_rigorous_total(report, packing_gate(n, p, D), log_term1, n, float_p,
                        D, thresholds)

    s_given = 1 - gamma * math.log(float_p)
    case = _regime_case(n, float_p, t, mu, M, s_given, gamma, r)
    report.labels["regime"] = case.value
    report.flags["covered"] = case is not RegimeCase.NONE
    report.flags["range_lower"] = mu + t >= 1
    report.flags["range_upper"] = mu + t <= top
    report.flags["p_bounded_away"] = float_p <= 1 - xi
    report.flags["moderate_regime"] = (
        float_p >= math.log(n) / n and t * t >= var)
    report.flags["clustered_regime"] = (
        mu >= xi and var > 0
        and t * t / var >= M * (1 - math.log(float_p)) * math.log(n) ** (2 * r))
    report.flags["n_at_least_n0"] = n >= constants.n0
    report.labels["constants"] = _constants_label(constants)
    log.debug("general pipeline n=%d p=%s r=%d t=%s regime=%s total=%s",
              n, float_p, r, t, case.value, report["total"])
    return report


def _constants_label(constants: Constants) -> str:
    return " ".join(
        f"{name}={format_float(value)}"
        for name, value in constants._asdict().items())


class RegimeComparison(NamedTuple):
    """ Quantities compared by the regime simplifications """
    t_sq_over_var: float
    phi_over_var: float
    phi_over_lambda: float
    m_log: float
    bracket_low: float
    bracket_high: float
    small_deviation: bool
    large_deviation: bool
    bounded_below: bool

    @property
    def bracket_holds(self) -> bool:
        """ phi(t/mu) mu^2 / sigma^2 lies inside its elementary bracket """
        slack = 1 + _PHI_RTOL
        return (self.bracket_low <= self.phi_over_var * slack
                and self.phi_over_var <= self.bracket_high * slack)


def regime_simplify(
        n: int,
        p: Prob,
        r: int,
        t: float,
        xi: float,
        *,
        mean: Optional[float] = None,
        variance: Optional[float] = None,
) -> RegimeComparison:
    """ Compares the Gaussian and clustered exponents.

    small_deviation: t <= mu. large_deviation: t >= mu with
    t^(1-1/r) >= log(n) [p < 1/n] and p >= n^-9. bounded_below:
    t^2/sigma^2 >= min(M, 1) and mu + t >= 1. The bracket is
    [t^2/(3 sigma^2) min(1, mu/t), t^2/sigma^2], which contains
    phi(t/mu) mu^2/sigma^2 for every t.
    """
    check_count(n, "n", 1)
    if not 0 < xi < 1:
        raise ParameterError(f"xi must lie in (0, 1), got {xi}")
    float_p = _check_open_p(p)
    if float_p > 1 - xi:
        raise ParameterError(f"p must lie in (0, 1 - xi], got {float_p}")
    check_positive(t, "t")
    mu = float(star_mean(n, p, r) if mean is None else mean)
    check_positive(mu, "mu")
    var = _check_variance(
        star_variance(n, p, r) if variance is None else variance)
    lam = mu * (1 + (n * float_p) ** (r - 1))
    phi = chernoff_phi(t / mu)
    M = deviation_scale_M(t, n, r)
    t_sq = t * t / var
    indicator = 1.0 if float_p < 1 / n else 0.0
    return RegimeComparison(
        t_sq_over_var=t_sq,
        phi_over_var=phi * mu * mu / var,
        phi_over_lambda=phi * mu * mu / lam,
        m_log=M * (1 - math.log(float_p)),
        bracket_low=t_sq / 3 * min(1.0, mu / t),
        bracket_high=t_sq,
        small_deviation=t <= mu,
        large_deviation=(
            t >= mu and t ** (1 - 1 / r) >= math.log(n) * indicator
            and float_p >= float(n) ** -9),
        bounded_below=t_sq >= min(M, 1.0) and mu + t >= 1,
    )


def variance_ratio(n: int, p: Prob, r: int) -> float:
    """ sigma^2 / ((1-p) mu (1 + (np)^(r-1))), a diagnostic ratio. """
    float_p = _check_open_p(p)
    if float_p == 1:
        raise ParameterError("The variance ratio is undefined at p = 1.")
    mu = float(star_mean(n, float_p, r))
    check_positive(mu, "mu")
    return float(star_variance(n, float_p, r)) / (
        (1 - float_p) * mu * (1 + (n * float_p) ** (r - 1)))

""" Sums of binomial coefficients of independent binomials

The model X = sum_i C(Y_i, r) with Y_1, ..., Y_n independent Bin(n, p)
replaces the degree sequence of G(n, p) by independent copies. Its law is an
n-fold convolution, so it is exactly computable far beyond graph
enumeration.
"""

from fractions import Fraction
from itertools import product
import logging
import math
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt
from scipy.stats import binom

from .bounds import (
    BoundReport, deviation_scale_M, dyadic_levels, event_threshold,
    level_count, pipeline_const_eps, pipeline_general)
from .common import (
    BudgetExceededError, LemmaViolation, ParameterError, Prob, Verdict,
    as_exact, check_count, check_positive, check_probability, comb0,
    dyadic_ceil)
from .config import Constants
from .const import BETA_T, GAMMA_CONST_DIV, MAX_IID_SUPPORT, SEED_MASK
from .oracles import Distribution, Real

log = logging.getLogger(__name__)

# (n + 1)^n outcomes are enumerated by iid_bruteforce_distribution
_MAX_BRUTEFORCE_OUTCOMES = 10 ** 5


class IidSumModel:
    """ n independent Bin(n, p) terms, each contributing C(Y_i, r).

    :param n: Number of terms and binomial size.
    :param p: Success probability.
    :param r: Arm count.
    """

    def __init__(self, n: int, p: Prob, r: int) -> None:
        self.n = check_count(n, "n", 1)
        self.p = check_probability(p)
        self.r = check_count(r, "r", 1)

    @property
    def max_count(self) -> int:
        """ n C(n, r), reached when every Y_i = n """
        return self.n * math.comb(self.n, self.r)

    @property
    def mean(self) -> Real:
        """ n C(n, r) p^r; exact for rational p """
        return self.max_count * self.p ** self.r

    @property
    def variance(self) -> Real:
        """ n Var C(Y, r) """
        return self.n * per_term_law(self).variance

    def to_dict(self) -> Dict[str, Any]:
        """ JSON compatible representation. """
        return {"n": self.n, "p": float(self.p), "r": self.r}

    def __repr__(self) -> str:
        return f"IidSumModel(n={self.n}, p={self.p!r}, r={self.r})"


def per_term_law(model: IidSumModel) -> Distribution:
    """ Law of C(Y, r) for Y ~ Bin(n, p).

    Values Y < r all collapse to zero. Rational p gives an exact law,
    anything else goes through scipy's binomial pmf.
    """
    n, r = model.n, model.r
    exact_p = as_exact(model.p)
    support: Dict[int, Real] = {}
    if exact_p is not None:
        for y in range(n + 1):
            weight = math.comb(n, y) * exact_p ** y * (1 - exact_p) ** (n - y)
            value = comb0(y, r)
            support[value] = support.get(value, Fraction(0)) + weight
        return Distribution(support)
    pmf = binom.pmf(np.arange(n + 1), n, float(model.p))
    for y, weight in enumerate(pmf):
        value = comb0(y, r)
        support[value] = support.get(value, 0.0) + float(weight)
    total = math.fsum(support.values())
    return Distribution({value: weight / total
                         for value, weight in support.items()})


def _check_support_budget(model: IidSumModel) -> None:
    if model.max_count + 1 > MAX_IID_SUPPORT:
        raise BudgetExceededError(
            f"Support of size {model.max_count + 1} exceeds the budget of "
            f"{MAX_IID_SUPPORT}.")


def _convolve_exact(term: Dict[int, Real], count: int) -> Dict[int, Real]:
    acc: Dict[int, Real] = {0: Fraction(1)}
    for _ in range(count):
        nxt: Dict[int, Real] = {}
        for total, weight in acc.items():
            for value, prob in term.items():
                key = total + value
                nxt[key] = nxt.get(key, Fraction(0)) + weight * prob
        acc = nxt
    return acc


def _convolve_float(term: Dict[int, Real], count: int, size: int
                    ) -> npt.NDArray[np.float64]:
    acc = np.zeros(size, dtype=np.float64)
    acc[0] = 1.0
    top = 0
    for _ in range(count):
        nxt = np.zeros(size, dtype=np.float64)
        for value, prob in term.items():
            nxt[value:value + top + 1] += float(prob) * acc[:top + 1]
        top += max(term)
        acc = nxt
    return acc


def iid_exact_distribution(model: IidSumModel) -> Distribution:
    """ Exact law of X by n-fold convolution of the per-term law.

    :raises BudgetExceededError: if n C(n, r) + 1 exceeds the support
        budget.
    """
    _check_support_budget(model)
    term = per_term_law(model)
    if term.exact:
        return Distribution(_convolve_exact(term.support, model.n))
    dense = _convolve_float(term.support, model.n, model.max_count + 1)
    nonzero = np.flatnonzero(dense)
    dense /= math.fsum(dense[nonzero])
    log.debug("Convolved %d terms over %d support points",
              model.n, model.max_count + 1)
    return Distribution({int(value): float(dense[value]) for value in nonzero})


def iid_bruteforce_distribution(model: IidSumModel) -> Distribution:
    """ Law of X by enumerating every outcome (Y_1, ..., Y_n).

    :raises BudgetExceededError: if (n + 1)^n exceeds 10^5 outcomes.
    """
    n, r = model.n, model.r
    if (n + 1) ** n > _MAX_BRUTEFORCE_OUTCOMES:
        raise BudgetExceededError(
            f"Enumerating {(n + 1) ** n} outcomes exceeds the budget of "
            f"{_MAX_BRUTEFORCE_OUTCOMES}.")
    exact_p = as_exact(model.p)
    if exact_p is not None:
        weights: List[Real] = [
            math.comb(n, y) * exact_p ** y * (1 - exact_p) ** (n - y)
            for y in range(n + 1)]
    else:
        weights = [float(w) for w in binom.pmf(np.arange(n + 1), n,
                                               float(model.p))]
    support: Dict[int, Real] = {}
    for outcome in product(range(n + 1), repeat=n):
        weight = math.prod(weights[y] for y in outcome)
        value = sum(comb0(y, r) for y in outcome)
        support[value] = support.get(value, 0) + weight
    if exact_p is None:
        total = math.fsum(support.values())
        support = {value: weight / total for value, weight in support.items()}
    return Distribution(support)


def sample_terms(model: IidSumModel, seed: int) -> Tuple[int, ...]:
    """ One draw of (Y_1, ..., Y_n) from a Philox generator keyed by seed. """
    if not 0 <= seed <= SEED_MASK:
        raise ParameterError(f"seed must fit in 64 bits, got {seed}")
    gen = np.random.Generator(np.random.Philox(key=seed))
    draws = gen.binomial(model.n, float(model.p), size=model.n)
    return tuple(int(y) for y in draws)


class IidLevel(NamedTuple):
    """ N_{D_j} of the terms against its threshold """
    j: int
    level: float
    arm: int
    count: int
    threshold: float


class IidSandwichReport(NamedTuple):
    """ Counts around the degree chain of one sample """
    verdict: Verdict
    stars: int
    bounded_stars: int
    chain_binomial: int
    chain_power: float
    half_t: float
    J: int
    levels: Tuple[IidLevel, ...]

    @property
    def checked(self) -> bool:
        """ True if the chain was asserted """
        return self.verdict is Verdict.HOLDS

    def to_dict(self) -> Dict[str, Any]:
        """ JSON compatible representation. """
        return {
            "verdict": self.verdict.value,
            "X": self.stars,
            "X_D": self.bounded_stars,
            "chain_binomial": self.chain_binomial,
            "chain_power": self.chain_power,
            "half_t": self.half_t,
            "J": self.J,
            "levels": [level._asdict() for level in self.levels],
        }


def iid_peel_and_sandwich(
        samples: Sequence[int],
        D: float,
        t: float,
        beta: float = BETA_T,
        r: int = 2,
        n: Optional[int] = None,
) -> IidSandwichReport:
    """ Certifies N_{D_j} < beta M / D_j for the terms of one sample and,
    when that holds, asserts
    X_D <= X <= X_D + sum_{j<J} N_{D_j} C(floor(D_{j+1}), r)
    <= X_D + 2 sum_{j<J} N_{D_j} D_j^r <= X_D + t/2.

    Here X_x sums C(Y_i, r) over Y_i <= floor(x) and N_x counts Y_i >= ceil(x).
    Every N is computed exactly, so the verdict is never unknown.

    :param samples: The values Y_1, ..., Y_n.
    :param n: Binomial size, defaulting to the number of samples.
    :raises ParameterError: on a sample outside [0, n] or beta above 1/32.
    :raises LemmaViolation: if the chain fails on a certified sample.
    """
    check_count(r, "r", 2)
    check_positive(D, "D")
    check_positive(t, "t")
    if not 0 < beta <= BETA_T:
        raise ParameterError(f"beta must lie in (0, {BETA_T}], got {beta}")
    size = len(samples) if n is None else n
    check_count(size, "n", 1)
    for y in samples:
        check_count(y, "sample")
        if y > size:
            raise ParameterError(f"Sample {y} exceeds the binomial size {size}")

    M = deviation_scale_M(t, size, r)
    J = level_count(D, min(M, size))
    levels = []
    for j, level in enumerate(dyadic_levels(D, size)):
        arm = dyadic_ceil(level)
        levels.append(IidLevel(
            j, level, arm, sum(1 for y in samples if y >= arm),
            event_threshold(M, level, beta)))
    holds = all(level.count < level.threshold for level in levels)
    verdict = Verdict.HOLDS if holds else Verdict.FAILS

    stars = sum(comb0(y, r) for y in samples)
    cap = math.floor(D)
    bounded = sum(comb0(y, r) for y in samples if y <= cap)
    counts = {level.j: level.count for level in levels}
    chain_binomial = sum(
        counts.get(j, 0) * comb0(math.floor(D * 2 ** (j + 1)), r)
        for j in range(J))
    chain_power = 2 * sum(
        counts.get(j, 0) * (D * 2 ** j) ** r for j in range(J))
    half_t = t / 2
    if holds and not (
            bounded <= stars <= bounded + chain_binomial
            and chain_binomial <= chain_power <= half_t):
        raise LemmaViolation(
            f"Degree chain fails: X={stars}, X_D={bounded}, "
            f"binomial sum={chain_binomial}, power sum={chain_power}, "
            f"t/2={half_t}")
    return IidSandwichReport(
        verdict=verdict,
        stars=stars,
        bounded_stars=bounded,
        chain_binomial=chain_binomial,
        chain_power=chain_power,
        half_t=half_t,
        J=J,
        levels=tuple(levels),
    )


def iid_bound_transfer(
        model: IidSumModel,
        *,
        eps: Optional[float] = None,
        t: Optional[float] = None,
        gamma: Optional[float] = None,
        constants: Constants = Constants(),
) -> BoundReport:
    """ Runs the upper tail pipelines with the mean, variance and largest
    value of the model in place of those of G(n, p).

    Exactly one of eps and t selects the constant-deviation or the
    general-deviation pipeline; gamma defaults to 1/(16 r).
    """
    if (eps is None) == (t is None):
        raise ParameterError("Give exactly one of eps and t.")
    mu = float(model.mean)
    if eps is not None:
        report = pipeline_const_eps(
            model.n, model.p, model.r, eps, constants=constants, mean=mu,
            max_count=model.max_count)
    else:
        assert t is not None
        report = pipeline_general(
            model.n, model.p, model.r, t,
            gamma if gamma is not None else 1 / (GAMMA_CONST_DIV * model.r),
            constants=constants, mean=mu, variance=float(model.variance),
            max_count=model.max_count)
    report.labels["model"] = "iid"
    return report


class TailRatio(NamedTuple):
    """ -log Pr(X >= mu + t) against M(t) log(1/p) at one p """
    p: float
    log_tail: float
    scale: float

    @property
    def ratio(self) -> float:
        """ -log tail / scale; infinite for a zero tail """
        return -self.log_tail / self.scale


def iid_log_tail_ratios(n: int, r: int, t: float, ps: Sequence[Prob]
                        ) -> List[TailRatio]:
    """ Exact tail exponents of the model as p sweeps, scaled by
    M(t) log(1/p).
    """
    check_positive(t, "t")
    ratios = []
    for p in ps:
        model = IidSumModel(n, p, r)
        float_p = float(model.p)
        if not 0 < float_p < 1:
            raise ParameterError(f"p must lie in (0, 1), got {p}")
        tail = float(iid_exact_distribution(model).tail(float(model.mean) + t))
        log_tail = math.log(tail) if tail > 0 else -math.inf
        ratios.append(TailRatio(
            float_p, log_tail,
            deviation_scale_M(t, n, r) * math.log(1 / float_p)))
    return ratios

"""Price-taking subscription dynamics with an incumbent and an entrant.

The incumbent serves at fixed quality ``q1``; the entrant's quality
``g(lam2)`` degrades with its own share and sits strictly below ``q1``.
Given posted prices ``p1 >= 0`` and ``p2 >= 0``, last period's entrant
share fixes two valuation thresholds:

    theta1 = (p1 - p2) / (q1 - g)      incumbent vs entrant
    theta2 = p2 / g                    entrant vs nothing

Users above ``theta1`` take the incumbent, users between take the
entrant, provided the entrant's price per quality beats the incumbent's
(``p1/q1 > p2/g``); otherwise the entrant attracts no one and the
incumbent serves the tail above ``p1/q1``.

The entrant side of the update depends only on ``lam2``, so the
equilibrium reduces to a one-dimensional root problem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._optim import bisect_root
from .errors import DomainError, ModelError
from .monopoly import ConditionReport, DynamicsTrace, _COND_GRID, _EQ_FTOL, _EQ_XTOL
from .qos import QoSModel
from .valuation import ValuationDistribution

__all__ = [
    "DuopolyMarket",
    "Regime",
    "DuopolyEquilibrium",
    "step_duopoly",
    "simulate_duopoly",
    "equilibrium_duopoly",
    "convergence_condition_duopoly",
    "bertrand_revenues",
]


class Regime(Enum):
    ENTRANT_SHUT_OUT = "entrant-shut-out"
    INTERIOR = "interior"


@dataclass(frozen=True)
class DuopolyMarket:
    """Two providers at posted prices.

    ``q1`` is the incumbent's constant quality; ``qos2`` the entrant's
    curve, which must stay strictly below ``q1`` everywhere.
    """

    dist: ValuationDistribution
    q1: float
    qos2: QoSModel
    p1: float
    p2: float

    def __post_init__(self) -> None:
        q1 = float(self.q1)
        if not math.isfinite(q1) or q1 <= 0.0:
            raise ModelError(f"q1 must be positive, got {self.q1}")
        object.__setattr__(self, "q1", q1)
        for field in ("p1", "p2"):
            v = float(getattr(self, field))
            if not math.isfinite(v) or v < 0.0:
                raise ModelError(f"{field} must be >= 0, got {v}")
            object.__setattr__(self, field, v)
        if self.qos2.max_value() >= q1:
            raise ModelError(
                f"entrant quality must stay below q1={q1}, "
                f"but reaches {self.qos2.max_value()}"
            )


@dataclass(frozen=True)
class DuopolyEquilibrium:
    """Fixed point of the two-provider update.

    ``theta1``/``theta2`` are the defining thresholds in the interior
    regime and ``None`` when the entrant is shut out.
    """

    lam1: float
    lam2: float
    regime: Regime
    theta1: float | None = None
    theta2: float | None = None


def _check_pair(lam1: float, lam2: float) -> tuple[float, float]:
    l1, l2 = float(lam1), float(lam2)
    if not (math.isfinite(l1) and math.isfinite(l2)):
        raise DomainError(f"shares must be finite, got ({lam1!r}, {lam2!r})")
    if l1 < 0.0 or l2 < 0.0 or l1 + l2 > 1.0 + 1e-12:
        raise DomainError(f"share pair outside the simplex: ({lam1!r}, {lam2!r})")
    return l1, l2


def step_duopoly(
    market: DuopolyMarket, lam1_prev: float, lam2_prev: float
) -> tuple[float, float]:
    """One synchronous update of both shares.

    Only the entrant's previous share matters: it sets the quality users
    expect from the entrant this period.
    """
    _, l2 = _check_pair(lam1_prev, lam2_prev)
    g = market.qos2.evaluate(l2)
    F = market.dist.cdf
    if market.p1 / market.q1 > market.p2 / g:
        theta1 = (market.p1 - market.p2) / (market.q1 - g)
        theta2 = market.p2 / g
        f1 = F(theta1)
        return 1.0 - f1, max(0.0, f1 - F(theta2))
    return 1.0 - F(market.p1 / market.q1), 0.0


def simulate_duopoly(
    market: DuopolyMarket,
    start: tuple[float, float],
    max_iter: int = 10_000,
    tol: float = 1e-10,
) -> DynamicsTrace:
    """Iterate the two-share update and record the path.

    Convergence is measured in the max norm of one step's change.
    Non-convergence is reported on the trace, not raised.
    """
    l1, l2 = _check_pair(*start)
    if max_iter < 1:
        raise DomainError(f"max_iter must be >= 1, got {max_iter}")
    if not tol > 0.0:
        raise DomainError(f"tol must be positive, got {tol}")
    shares = [(l1, l2)]
    converged = False
    residual = math.inf
    for _ in range(max_iter):
        n1, n2 = step_duopoly(market, l1, l2)
        residual = max(abs(n1 - l1), abs(n2 - l2))
        l1, l2 = n1, n2
        shares.append((l1, l2))
        if residual < tol:
            converged = True
            break
    return DynamicsTrace(
        shares=np.asarray(shares),
        converged=converged,
        iterations=len(shares) - 1,
        residual=residual,
    )


def equilibrium_duopoly(market: DuopolyMarket) -> DuopolyEquilibrium:
    """The unique fixed point of the two-share update.

    The entrant is shut out exactly when its price per quality is no
    better than the incumbent's even with an empty network:
    ``p1/q1 <= p2/g(0)``.  Otherwise the entrant share solves a
    one-dimensional root problem (the entrant update never depends on
    the incumbent share) and the incumbent share follows from theta1.
    """
    F = market.dist.cdf
    g0 = market.qos2.evaluate(0.0)
    if market.p1 / market.q1 <= market.p2 / g0:
        return DuopolyEquilibrium(
            lam1=1.0 - F(market.p1 / market.q1),
            lam2=0.0,
            regime=Regime.ENTRANT_SHUT_OUT,
        )

    def h_tilde(lam2: float) -> float:
        g = market.qos2.evaluate(lam2)
        if market.p1 / market.q1 <= market.p2 / g:
            return -lam2
        theta1 = (market.p1 - market.p2) / (market.q1 - g)
        return F(theta1) - F(market.p2 / g) - lam2

    lam2 = bisect_root(h_tilde, 0.0, 1.0, ftol=_EQ_FTOL, xtol=_EQ_XTOL)
    g = market.qos2.evaluate(lam2)
    theta1 = (market.p1 - market.p2) / (market.q1 - g)
    theta2 = market.p2 / g
    return DuopolyEquilibrium(
        lam1=1.0 - F(theta1),
        lam2=lam2,
        regime=Regime.INTERIOR,
        theta1=theta1,
        theta2=theta2,
    )


def convergence_condition_duopoly(
    dist: ValuationDistribution, q1: float, qos2: QoSModel
) -> ConditionReport:
    """Sufficient condition for the two-share iteration to contract.

    Holds when ``max( (-g'/g) * q1 / (q1 - g) ) < 1 / K`` over the curve's
    domain (10,001-point grid).  Validates that the entrant curve stays
    strictly below ``q1`` first.
    """
    q1 = float(q1)
    if not math.isfinite(q1) or q1 <= 0.0:
        raise ModelError(f"q1 must be positive, got {q1}")
    if qos2.max_value() >= q1:
        raise ModelError("entrant quality must stay strictly below q1")
    lo, hi = qos2.domain
    lam = np.linspace(max(lo, 0.0), min(hi, 1.0), _COND_GRID)
    g = qos2.evaluate(lam)
    vals = (-qos2.derivative(lam) / g) * (q1 / (q1 - g))
    lhs = float(np.max(vals))
    rhs = 1.0 / dist.k_constant()
    return ConditionReport(holds=lhs < rhs, lhs=lhs, rhs=rhs)


def bertrand_revenues(market: DuopolyMarket) -> tuple[float, float]:
    """Per-provider revenue at the posted-price equilibrium."""
    eq = equilibrium_duopoly(market)
    return market.p1 * eq.lam1, market.p2 * eq.lam2

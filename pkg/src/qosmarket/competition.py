"""Quantity competition between the incumbent and the entrant.

Both providers pick target market shares; prices are read off inverse
demand, i.e. the valuations of the marginal users that make those shares
self-fulfilling.  With shares ``lam1`` (incumbent) and ``lam2``
(entrant), the top ``lam1`` of the valuation range buys the incumbent
and the next ``lam2`` buys the entrant, so with
``a1 = quantile(1 - lam1)`` and ``a2 = quantile(1 - lam1 - lam2)``:

    p1 = a1 * (q1 - g(lam2)) + a2 * g(lam2)
    p2 = a2 * g(lam2)

Revenue is own share times own price, and zero for infeasible share
pairs.  With a non-increasing valuation density each best response lies
in (0, 1/2]; :func:`nash_solve` finds the equilibrium by alternating
best responses and verifies it by re-optimizing both players.
:func:`supermodularity_check` reports whether the revenue cross-partials
are nonpositive, which makes the best responses monotone and the
iteration reliable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._optim import scan_then_refine
from .errors import DomainError, ModelError, NonConvergenceError
from .qos import QoSKind, QoSModel
from .valuation import ValuationDistribution

__all__ = [
    "CournotGame",
    "NashOutcome",
    "SupermodularityReport",
    "marginal_valuations",
    "inverse_demand",
    "revenues",
    "best_response",
    "best_response_closed",
    "supermodularity_check",
    "nash_solve",
    "nash_solve_multi",
]

_BR_SCAN = 2_001
_SUPERMOD_GRID = 10_001
_FD_STEP = 1e-4
_FD_SLACK = 1e-6
_VERIFY_TOL = 1e-8

DEFAULT_STARTS = ((0.0, 0.0), (0.0, 0.5), (0.5, 0.0), (0.5, 0.5), (0.25, 0.25))


@dataclass(frozen=True)
class CournotGame:
    """Share-setting competition between incumbent (q1) and entrant (qos2)."""

    dist: ValuationDistribution
    q1: float
    qos2: QoSModel

    def __post_init__(self) -> None:
        q1 = float(self.q1)
        if not math.isfinite(q1) or q1 <= 0.0:
            raise ModelError(f"q1 must be positive, got {self.q1}")
        object.__setattr__(self, "q1", q1)
        if self.qos2.max_value() >= q1:
            raise ModelError(
                f"entrant quality must stay below q1={q1}, "
                f"but reaches {self.qos2.max_value()}"
            )


@dataclass(frozen=True)
class NashOutcome:
    """A share equilibrium with its prices, revenues, and diagnostics.

    ``iterations`` counts best-response rounds; ``supermodular_check``
    records whether the cross-partial condition held for this game;
    ``path`` lists the visited share pairs, starting with the start point.
    """

    lam1: float
    lam2: float
    p1: float
    p2: float
    r1: float
    r2: float
    iterations: int
    supermodular_check: bool
    path: tuple[tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        for name in ("lam1", "lam2"):
            v = getattr(self, name)
            if not 0.0 < v < 0.5:
                raise ModelError(f"equilibrium {name}={v!r} outside (0, 1/2)")


@dataclass(frozen=True)
class SupermodularityReport:
    """Whether revenue cross-partials are nonpositive over [0, 1/2]^2."""

    holds: bool
    worst_point: tuple[float, float]
    worst_margin: float


def marginal_valuations(
    dist: ValuationDistribution, lam1: float, lam2: float
) -> tuple[float, float]:
    """Valuations of the two marginal users for a feasible share pair."""
    l1, l2 = _check_pair(lam1, lam2)
    return (
        float(dist.quantile(1.0 - l1)),
        float(dist.quantile(max(0.0, 1.0 - l1 - l2))),
    )


def _check_pair(lam1: float, lam2: float) -> tuple[float, float]:
    l1, l2 = float(lam1), float(lam2)
    if not (math.isfinite(l1) and math.isfinite(l2)):
        raise DomainError(f"shares must be finite, got ({lam1!r}, {lam2!r})")
    if l1 < 0.0 or l2 < 0.0 or l1 + l2 > 1.0 + 1e-12:
        raise DomainError(f"share pair outside the simplex: ({lam1!r}, {lam2!r})")
    return l1, l2


def inverse_demand(
    game: CournotGame, lam1: float, lam2: float
) -> tuple[float, float]:
    """Prices that make the share pair self-fulfilling."""
    a1, a2 = marginal_valuations(game.dist, lam1, lam2)
    g = game.qos2.evaluate(float(lam2))
    return a1 * (game.q1 - g) + a2 * g, a2 * g


def revenues(game: CournotGame, lam1: float, lam2: float) -> tuple[float, float]:
    """Own share times own price; (0, 0) when the shares exceed the market."""
    l1, l2 = float(lam1), float(lam2)
    if not (0.0 <= l1 <= 1.0 and 0.0 <= l2 <= 1.0):
        raise DomainError(f"shares outside [0, 1]: ({lam1!r}, {lam2!r})")
    if l1 + l2 > 1.0:
        return 0.0, 0.0
    p1, p2 = inverse_demand(game, l1, l2)
    return l1 * p1, l2 * p2


def _revenue_surface(game: CournotGame, own: np.ndarray, other: float, player: int) -> np.ndarray:
    """Vectorized own-revenue over an array of own shares, rival fixed."""
    own = np.asarray(own, dtype=float)
    rest = 1.0 - own - other
    feasible = rest >= 0.0
    rest_c = np.where(feasible, np.clip(rest, 0.0, 1.0), 0.0)
    if player == 1:
        g = game.qos2.evaluate(other)
        a1 = game.dist.quantile(np.clip(1.0 - own, 0.0, 1.0))
        a2 = game.dist.quantile(rest_c)
        r = own * (a1 * (game.q1 - g) + a2 * g)
    else:
        g = game.qos2.evaluate(own)
        a2 = game.dist.quantile(rest_c)
        r = own * a2 * g
    return np.where(feasible, r, 0.0)


def best_response(game: CournotGame, player: int, lam_other: float) -> float:
    """Revenue-maximizing own share against a fixed rival share.

    Requires a non-increasing valuation density, under which the result
    is guaranteed to lie in (0, 1/2].  Scans 2,001 grid points on
    [0, 1/2] and refines by golden section; ties resolve toward the
    smaller share.
    """
    if player not in (1, 2):
        raise DomainError(f"player must be 1 or 2, got {player!r}")
    other = float(lam_other)
    if not math.isfinite(other) or not 0.0 <= other < 1.0:
        raise DomainError(f"rival share outside [0, 1): {lam_other!r}")
    if not game.dist.is_nonincreasing_pdf():
        raise ModelError("best response guarantees need a non-increasing density")
    hi = 0.5
    if player == 2:
        hi = min(hi, game.qos2.domain[1])
    best, _ = scan_then_refine(
        lambda lam: _revenue_surface(game, lam, other, player), 0.0, hi, _BR_SCAN
    )
    assert 0.0 < best <= 0.5, f"best response {best} escaped (0, 1/2]"
    return best


def best_response_closed(
    q1: float, q_bar2: float, c: float, player: int, lam_other: float
) -> float:
    """Exact best responses for uniform valuations and a linear entrant curve.

    Requires ``0 < c < q_bar2 < q1``.  Incumbent:

        B1(lam2) = (q1 - lam2 * (q_bar2 - c * lam2)) / (2 q1)

    Entrant, writing ``w = 1 - lam1``:

        B2(lam1) = (c w + q_bar2 - sqrt(q_bar2^2 + c^2 w^2 - c q_bar2 w)) / (3 c)
    """
    q1 = float(q1)
    q_bar2 = float(q_bar2)
    c = float(c)
    if not (0.0 < c < q_bar2 < q1) or not all(
        map(math.isfinite, (q1, q_bar2, c))
    ):
        raise ModelError(f"need 0 < c < q_bar2 < q1, got c={c}, q_bar2={q_bar2}, q1={q1}")
    if player not in (1, 2):
        raise DomainError(f"player must be 1 or 2, got {player!r}")
    other = float(lam_other)
    if not math.isfinite(other) or not 0.0 <= other < 1.0:
        raise DomainError(f"rival share outside [0, 1): {lam_other!r}")
    if player == 1:
        return (q1 - other * (q_bar2 - c * other)) / (2.0 * q1)
    w = 1.0 - other
    s = math.sqrt(q_bar2 * q_bar2 + c * c * w * w - c * q_bar2 * w)
    return (c * w + q_bar2 - s) / (3.0 * c)


def supermodularity_check(game: CournotGame) -> SupermodularityReport:
    """Check that both revenue cross-partials are nonpositive on [0, 1/2]^2.

    For uniform valuations the condition reduces to
    ``g(lam2) + lam2 * g'(lam2) >= 0``, checked on a 10,001-point grid
    over the entrant-share axis (the incumbent share drops out; the
    reported worst point carries 0 in that slot).  Otherwise the
    cross-partials of both revenue surfaces are estimated by central
    finite differences (h = 1e-4) on a 101x101 grid, with a small slack
    absorbing differencing noise; this needs a non-increasing density.
    """
    hi = min(0.5, game.qos2.domain[1])
    if game.dist.is_uniform():
        lam2 = np.linspace(max(0.0, game.qos2.domain[0]), hi, _SUPERMOD_GRID)
        m = game.qos2.evaluate(lam2) + lam2 * game.qos2.derivative(lam2)
        i = int(np.argmin(m))
        return SupermodularityReport(
            holds=bool(m[i] >= 0.0),
            worst_point=(0.0, float(lam2[i])),
            worst_margin=float(m[i]),
        )
    if not game.dist.is_nonincreasing_pdf():
        raise ModelError("supermodularity check needs a non-increasing density")
    h = _FD_STEP
    pts = np.linspace(0.0, 0.5, 101)
    pts = pts[(pts >= h) & (pts <= 0.5 - h)]
    worst = math.inf
    worst_point = (pts[0], pts[0])
    for player in (1, 2):
        for b in pts:
            # cross-partial in (own, rival) via four corner evaluations
            r_pp = _revenue_surface(game, pts + h, float(b) + h, player)
            r_pm = _revenue_surface(game, pts + h, float(b) - h, player)
            r_mp = _revenue_surface(game, pts - h, float(b) + h, player)
            r_mm = _revenue_surface(game, pts - h, float(b) - h, player)
            cross = (r_pp - r_pm - r_mp + r_mm) / (4.0 * h * h)
            margin = -cross  # condition: cross-partial <= 0
            i = int(np.argmin(margin))
            if margin[i] < worst:
                worst = float(margin[i])
                own, rival = float(pts[i]), float(b)
                worst_point = (own, rival) if player == 1 else (rival, own)
    return SupermodularityReport(
        holds=bool(worst >= -_FD_SLACK), worst_point=worst_point, worst_margin=worst
    )


def _br_pair(game: CournotGame):
    """Best-response functions, closed-form when available."""
    if (
        game.dist.is_uniform()
        and game.qos2.kind is QoSKind.LINEAR
        and game.qos2.c > 0.0
    ):
        q1, qb, c = game.q1, game.qos2.q_bar, game.qos2.c
        return (
            lambda lam2: best_response_closed(q1, qb, c, 1, lam2),
            lambda lam1: best_response_closed(q1, qb, c, 2, lam1),
        )
    return (
        lambda lam2: best_response(game, 1, lam2),
        lambda lam1: best_response(game, 2, lam1),
    )


def nash_solve(
    game: CournotGame,
    start: tuple[float, float] = (0.25, 0.25),
    max_rounds: int = 1_000,
    tol: float = 1e-10,
) -> NashOutcome:
    """Alternating best responses from ``start`` until a fixed point.

    One round updates the incumbent and then the entrant.  On
    convergence the point is verified as an equilibrium by re-optimizing
    each player numerically (improvements below 1e-8 required).  Raises
    NonConvergenceError (carrying the visited path) if the round budget
    runs out.
    """
    l1, l2 = float(start[0]), float(start[1])
    if not (0.0 <= l1 <= 0.5 and 0.0 <= l2 <= 0.5):
        raise DomainError(f"start must lie in [0, 1/2]^2, got {start!r}")
    if not game.dist.is_nonincreasing_pdf():
        raise ModelError("equilibrium guarantees need a non-increasing density")
    br1, br2 = _br_pair(game)
    path = [(l1, l2)]
    rounds = 0
    converged = False
    for rounds in range(1, max_rounds + 1):
        n1 = br1(l2)
        n2 = br2(n1)
        delta = max(abs(n1 - l1), abs(n2 - l2))
        l1, l2 = n1, n2
        path.append((l1, l2))
        if delta < tol:
            converged = True
            break
    if not converged:
        raise NonConvergenceError(
            f"best-response iteration did not converge in {max_rounds} rounds", path
        )
    r1, r2 = revenues(game, l1, l2)
    alt1 = best_response(game, 1, l2)
    alt2 = best_response(game, 2, l1)
    best_r1 = revenues(game, alt1, l2)[0]
    best_r2 = revenues(game, l1, alt2)[1]
    if best_r1 - r1 >= _VERIFY_TOL or best_r2 - r2 >= _VERIFY_TOL:
        raise NonConvergenceError(
            "converged point failed equilibrium verification "
            f"(improvements {best_r1 - r1:.3g}, {best_r2 - r2:.3g})",
            path,
        )
    p1, p2 = inverse_demand(game, l1, l2)
    return NashOutcome(
        lam1=l1,
        lam2=l2,
        p1=p1,
        p2=p2,
        r1=r1,
        r2=r2,
        iterations=rounds,
        supermodular_check=supermodularity_check(game).holds,
        path=tuple(path),
    )


def nash_solve_multi(
    game: CournotGame,
    starts: tuple[tuple[float, float], ...] = DEFAULT_STARTS,
    max_rounds: int = 1_000,
    tol: float = 1e-10,
) -> list[NashOutcome]:
    """Solve from several deterministic starts, sorted by (lam1, lam2).

    Disagreement between the returned outcomes flags multiple equilibria
    (or a failure of the monotonicity the iteration relies on).
    """
    outcomes = [nash_solve(game, s, max_rounds, tol) for s in starts]
    outcomes.sort(key=lambda o: (o.lam1, o.lam2))
    return outcomes

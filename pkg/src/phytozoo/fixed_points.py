"""Boundary and interior fixed points, existence counts and the v' >= 0 interval."""
from __future__ import annotations

import math
from dataclasses import dataclass

from phytozoo.errors import DomainError
from phytozoo.model import Params, State, bisect_root, psi, ubar

E0, E1, EMINUS, EPLUS = "E0", "E1", "Eminus", "Eplus"

# Absolute tolerance for ties between beta and the analytic thresholds.
TIE_TOL = 1e-12


@dataclass(frozen=True)
class FixedPoint:
    state: State
    label: str
    degenerate: bool = False

    @property
    def u(self) -> float:
        return self.state.u

    @property
    def v(self) -> float:
        return self.state.v


@dataclass(frozen=True)
class ExistenceVerdict:
    """Number of interior fixed points predicted from the shape of psi.

    ``regime`` names the branch that decided the count.  ``note`` flags the
    measure-zero ties: a double root at ``ubar`` or a root sitting on ``u = 1``.
    """

    count: int
    regime: str
    ubar: float
    psi_ubar: float
    psi_one: float
    double_root: bool = False
    root_at_one: bool = False
    note: str = ""


def boundary_fixed_points(params: Params) -> list[FixedPoint]:
    return [FixedPoint(State(0.0, 0.0), E0), FixedPoint(State(1.0, 0.0), E1)]


def psi_at_one(params: Params) -> float:
    return (1.0 + params.c) * (params.r + params.theta)


def existence_verdict(params: Params) -> ExistenceVerdict:
    ub = ubar(params)
    psu = psi(ub, params)
    ps1 = psi_at_one(params)
    beta = params.beta
    at_one = abs(beta - ps1) <= TIE_TOL
    note = "root at u=1 coincides with E1 and is excluded" if at_one else ""

    if ub >= 1.0:
        if beta <= ps1 or at_one:
            return ExistenceVerdict(0, "ubar>=1, beta<=(c+1)(r+theta)", ub, psu, ps1, root_at_one=at_one, note=note)
        return ExistenceVerdict(1, "ubar>=1, beta>(c+1)(r+theta)", ub, psu, ps1)

    if abs(beta - psu) <= TIE_TOL:
        return ExistenceVerdict(
            1, "ubar<1, beta=psi(ubar)", ub, psu, ps1, double_root=True, note="double root at ubar"
        )
    if beta < psu:
        return ExistenceVerdict(0, "ubar<1, beta<psi(ubar)", ub, psu, ps1)
    if beta >= ps1 or at_one:
        return ExistenceVerdict(1, "ubar<1, beta>=(c+1)(r+theta)", ub, psu, ps1, root_at_one=at_one, note=note)
    return ExistenceVerdict(2, "ubar<1, psi(ubar)<beta<(c+1)(r+theta)", ub, psu, ps1)


def _interior_v(u: float, params: Params) -> float:
    # v forced by u' = u at an interior fixed point
    if params.h == 1:
        return (1.0 - u) * (1.0 + params.c * u)
    return (1.0 - u) * (1.0 + params.c * u * u) / u


def _quadratic_roots(a: float, b: float, c: float) -> list[float]:
    """Real roots of ``a x^2 + b x + c`` (a != 0), cancellation-free, ascending."""
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return []
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    if q == 0.0:
        return [0.0, 0.0]
    return sorted([q / a, c / q])


def _roots_h1(params: Params) -> list[float]:
    # u * (psi(u) - beta) = c theta u^2 - (beta - r c - theta) u + r
    b, r, th, c = params.beta, params.r, params.theta, params.c
    return _quadratic_roots(c * th, -(b - r * c - th), r)


def _roots_h2(params: Params) -> list[float]:
    # u^2 * (psi(u) - beta) = theta c u^3 + (r c - beta) u^2 + theta u + r
    b, r, th, c = params.beta, params.r, params.theta, params.c

    def cubic(x: float) -> float:
        return ((th * c * x + (r * c - b)) * x + th) * x + r

    crits = [x for x in _quadratic_roots(3.0 * th * c, 2.0 * (r * c - b), th) if 0.0 < x < 1.0]
    knots = [0.0, *sorted(set(crits)), 1.0]
    roots = []
    for lo, hi in zip(knots, knots[1:]):
        glo, ghi = cubic(lo), cubic(hi)
        if glo == 0.0 and lo > 0.0:
            roots.append(lo)
        elif glo * ghi < 0.0:
            # bisect to floating-point resolution (finer than 1e-12)
            roots.append(bisect_root(cubic, lo, hi, 0.0))
    return roots


def positive_fixed_points(params: Params) -> list[FixedPoint]:
    """Interior fixed points with ``0 < u < 1``, ``v > 0``, ascending in ``u``.

    h = 1 uses the closed-form quadratic roots; h = 2 isolates sign changes
    of the fixed-point cubic between its critical points and bisects them.
    A double root at ``ubar`` is returned once, flagged ``degenerate``; a root
    on ``u = 1`` is dropped because it is ``E1``.
    """
    verdict = existence_verdict(params)
    if verdict.double_root:
        ub = verdict.ubar
        return [FixedPoint(State(ub, _interior_v(ub, params)), EMINUS, degenerate=True)]

    raw = _roots_h1(params) if params.h == 1 else _roots_h2(params)
    us = sorted(u for u in raw if 0.0 < u < 1.0)
    if verdict.root_at_one and len(us) > verdict.count:
        us = us[:-1]
    points = []
    for u in us:
        v = _interior_v(u, params)
        if v > 0.0:
            points.append(State(u, v))
    labels = [EMINUS, EPLUS]
    return [FixedPoint(s, labels[i]) for i, s in enumerate(points[:2])]


def all_fixed_points(params: Params) -> list[FixedPoint]:
    return boundary_fixed_points(params) + positive_fixed_points(params)


def uhat_bounds(params: Params) -> tuple[float, float]:
    """Endpoints of the u-interval on which ``v' >= 0`` whenever ``v >= 0`` (h = 1).

    They are the roots of ``c theta u^2 - (beta + c - theta - r c) u + (r - 1)``.
    Raises DomainError for h = 2, or when the quadratic has no real roots
    (then ``v' < 0`` for every u).
    """
    if params.h != 1:
        raise DomainError("the v' >= 0 interval is only defined for h = 1")
    b, r, th, c = params.beta, params.r, params.theta, params.c
    roots = _quadratic_roots(c * th, -(b + c - th - r * c), r - 1.0)
    if not roots:
        raise DomainError("v' < 0 for every u: the bounding quadratic has no real roots")
    return roots[0], roots[1]

"""Discrete phytoplankton-zooplankton maps with Holling type II/III responses.

The state ``(u, v)`` is advanced by

    u' = u(2 - u) - f(u) v
    v' = beta f(u) v + (1 - r) v - theta u v

with ``f(u) = u**h / (1 + c u**h)``; ``h = 1`` is the type II response and
``h = 2`` the type III response.  Interior fixed points are the roots in
``(0, 1)`` of ``beta = psi(u)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from phytozoo.errors import DomainError, MapOverflowError

UBAR_TOL = 1e-12


@dataclass(frozen=True)
class Params:
    """Model parameters: response order ``h`` and positive ``beta, r, theta, c``."""

    h: int
    beta: float
    r: float
    theta: float
    c: float

    def __post_init__(self) -> None:
        if self.h not in (1, 2):
            raise DomainError(f"h must be 1 or 2 (got {self.h!r})")
        for name in ("beta", "r", "theta", "c"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise DomainError(f"{name} must be finite and positive (got {value!r})")

    def replace(self, **changes) -> Params:
        fields = {"h": self.h, "beta": self.beta, "r": self.r, "theta": self.theta, "c": self.c}
        fields.update(changes)
        return Params(**fields)

    def as_dict(self) -> dict:
        return {"h": self.h, "beta": self.beta, "r": self.r, "theta": self.theta, "c": self.c}


@dataclass(frozen=True)
class State:
    u: float
    v: float

    def as_tuple(self) -> tuple[float, float]:
        return (self.u, self.v)


def bisect_root(f, lo: float, hi: float, tol: float) -> float:
    """Bisect a sign change of ``f`` on ``[lo, hi]`` down to width ``tol``.

    Stops early when the midpoint stops moving in floating point.  Returns
    an endpoint when ``f`` vanishes there exactly.
    """
    flo = f(lo)
    if flo == 0.0:
        return lo
    if f(hi) == 0.0:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0.0) == (flo > 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def functional_response(u: float, params: Params) -> float:
    """Return ``u**h / (1 + c u**h)``."""
    uh = u ** params.h
    denom = 1.0 + params.c * uh
    if denom == 0.0:
        raise DomainError(f"functional response has a pole at u={u!r}")
    return uh / denom


def step(u: float, v: float, h: int, beta: float, r: float, theta: float, c: float) -> tuple[float, float]:
    """One application of the map on bare floats (hot loop helper, no checks)."""
    uh = u * u if h == 2 else u
    g = uh / (1.0 + c * uh) * v
    return u * (2.0 - u) - g, beta * g + (1.0 - r) * v - theta * u * v


def apply_map(s: State, params: Params) -> State:
    """Image of ``s`` under the map; no clamping to the positive quadrant.

    Raises MapOverflowError when the image is not finite.
    """
    try:
        u1, v1 = step(s.u, s.v, params.h, params.beta, params.r, params.theta, params.c)
    except (OverflowError, ZeroDivisionError) as exc:
        raise MapOverflowError(f"map overflow at {s}") from exc
    if not (math.isfinite(u1) and math.isfinite(v1)):
        raise MapOverflowError(f"map overflow at {s}")
    return State(u1, v1)


def psi(u: float, params: Params) -> float:
    """Level function whose solutions of ``psi(u) = beta`` give interior fixed points."""
    if not u > 0:
        raise DomainError(f"psi is defined for u > 0 (got {u!r})")
    uh = u ** params.h
    return (params.r + params.theta * u) * (1.0 + params.c * uh) / uh


def _ubar_cubic(x: float, params: Params) -> float:
    return params.theta * params.c * x**3 - params.theta * x - 2.0 * params.r


def ubar(params: Params) -> float:
    """Unique positive minimiser of ``psi``.

    For ``h = 1`` this is ``sqrt(r / (c theta))``.  For ``h = 2`` it is the
    positive root of ``theta c x^3 - theta x - 2 r``, which is negative on
    ``(0, ubar)`` and positive beyond; it is bracketed by doubling and then
    bisected to ``UBAR_TOL``.
    """
    if params.h == 1:
        return math.sqrt(params.r / (params.c * params.theta))
    lo, hi = 0.0, 1.0
    while _ubar_cubic(hi, params) <= 0.0:
        lo, hi = hi, 2.0 * hi
    return bisect_root(lambda x: _ubar_cubic(x, params), lo, hi, UBAR_TOL)


def phi(u: float, params: Params) -> float:
    """``theta (1 + c u^2)^2 / (2u)``; meets ``psi`` only at ``ubar`` (h = 2 only).

    ``beta > phi(u)`` at an interior fixed point is equivalent to the
    characteristic polynomial being positive at 1.
    """
    if params.h != 2:
        raise DomainError("phi is only defined for h = 2")
    if not u > 0:
        raise DomainError(f"phi is defined for u > 0 (got {u!r})")
    return params.theta * (1.0 + params.c * u * u) ** 2 / (2.0 * u)

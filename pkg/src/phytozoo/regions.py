"""Invariant regions, the h = 1 parameter taxonomy and hypothesis checklists.

Regions (``h = 1``)::

    M1 = {0 <= u <= 2, v = 0}             M2 = {u = 0, v >= 0}
    M3 = {0 <= u <= 1, 0 <= v <= 2}       M4 = {0 <= u <= 1, 0 <= v <= (2-u)(1+cu)}
    S1 = {0 < u <= 1, 0 <= v <= (1-u)(1+cu)}
    S2 = {0 < u <= 1, (1-u)(1+cu) < v <= 2}
    S3 = {0 < u <= 1, 2 < v <= (2-u)(1+cu)}

Regions (``h = 2``), with ``g(u) = (2-u)(1+cu^2)/u`` and
``k(u) = (1-u)(1+cu^2)/u``::

    N  = {0 <= u <= 1, 0 <= v <= g(u)}    (every v >= 0 belongs at u = 0)
    N1 = {0 < u < 1, 0 < v <= k(u)}
    N2 = {0 < u < u-, k(u) <= v <= g(u)}
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from phytozoo.errors import DomainError
from phytozoo.fixed_points import TIE_TOL, positive_fixed_points, psi_at_one
from phytozoo.model import Params, State, apply_map, psi, ubar
from phytozoo.stability import char_coeffs

H1_REGIONS = ("M1", "M2", "M3", "M4", "S1", "S2", "S3")
H2_REGIONS = ("N", "N1", "N2")
REGIONS = H1_REGIONS + H2_REGIONS

# v-range used when sampling the unbounded half-line M2
M2_SAMPLE_VMAX = 10.0
N_SAMPLE_UMIN = 1e-6


def _le(a: float, b: float, tol: float) -> bool:
    return a <= b + tol * max(1.0, abs(b))


def _parabola(u: float, params: Params, offset: float) -> float:
    # (offset - u)(1 + c u^h) / u^(h-1)
    if params.h == 1:
        return (offset - u) * (1.0 + params.c * u)
    return (offset - u) * (1.0 + params.c * u * u) / u


def _eminus_u(params: Params) -> float:
    interior = positive_fixed_points(params)
    if not interior:
        raise DomainError("N2 is defined only when Eminus exists")
    return interior[0].u


def membership(s: State, region: str, params: Params, tol: float = 0.0) -> bool:
    """Whether ``s`` satisfies the defining inequalities of ``region``.

    Boundary points belong to the region.  ``tol`` loosens each inequality
    by ``tol * max(1, |bound|)``.
    """
    if region not in REGIONS:
        raise DomainError(f"unknown region {region!r}")
    if region in H1_REGIONS and params.h != 1:
        raise DomainError(f"{region} is defined for h = 1 only")
    if region in H2_REGIONS and params.h != 2:
        raise DomainError(f"{region} is defined for h = 2 only")
    u, v = s.u, s.v
    if not (math.isfinite(u) and math.isfinite(v)):
        return False

    if region == "M1":
        return _le(0.0, u, tol) and _le(u, 2.0, tol) and abs(v) <= tol
    if region == "M2":
        return abs(u) <= tol and _le(0.0, v, tol)
    if not (_le(0.0, u, tol) and _le(u, 1.0, tol) and _le(0.0, v, tol)):
        return False
    if region == "M3":
        return _le(v, 2.0, tol)
    if region == "M4":
        return _le(v, _parabola(u, params, 2.0), tol)
    if region == "N":
        return u <= 0.0 or _le(v, _parabola(u, params, 2.0), tol)

    if u <= 0.0:
        return False
    low = _parabola(u, params, 1.0)
    if region == "S1":
        return _le(v, low, tol)
    if region == "S2":
        return low < v and _le(v, 2.0, tol)
    if region == "S3":
        return 2.0 < v and _le(v, _parabola(u, params, 2.0), tol)
    if region == "N1":
        return u < 1.0 and v > 0.0 and _le(v, low, tol)
    # N2
    return u < _eminus_u(params) and _le(low, v, tol) and _le(v, _parabola(u, params, 2.0), tol)


@dataclass(frozen=True)
class ParameterSubclass:
    subclass: str
    cls: str


def _subclass_table(params: Params) -> dict[str, bool]:
    th, r, b, c = params.theta, params.r, params.beta, params.c
    s1 = r + th - 1.0  # v' at u = 1 is positive iff beta/(1+c) > s1
    s2 = r + 2.0 * th - 1.0  # v' at u = 2 is non-negative iff 2 beta/(1+2c) >= s2
    c1_max = b / s1 - 1.0 if s1 > 0 else math.inf
    c2_max = b / s2 - 0.5 if s2 > 0 else math.inf
    return {
        "a1": 0 < th <= 1 and 0 < r <= 1 - th,
        "a2": 0 < th <= 1 and 1 - th < r < 1 and b > s1 and 0 < c < c1_max,
        "a3": th > 1 and 0 < r < 1 and b > s1 and 0 < c < c1_max,
        "b1": r > 1 and b > s1 and 0 < c < c1_max,
        "c1": 0 < th <= 0.5 and 0 < r <= 1 - 2 * th,
        "c2": 0 < th <= 0.5 and 1 - 2 * th < r <= 1 and b > s2 / 2 and 0 < c <= c2_max,
        "c3": th > 0.5 and 0 < r <= 1 and b > s2 / 2 and 0 < c <= c2_max,
        "d1": 0 < th <= 0.5 and 1 - 2 * th < r <= 1 - th and 0 < b <= s2 / 2,
        "d2": 0 < th <= 0.5 and 1 - 2 * th < r <= 1 - th and b > s2 / 2 and c > c2_max,
        "d3": 0.5 < th <= 1 and 0 < r <= 1 - th and 0 < b <= s2 / 2,
        "d4": 0.5 < th <= 1 and 0 < r <= 1 - th and b > s2 / 2 and c > c2_max,
        "d5": 0 < th <= 1 and 1 - th < r < 1 and s1 < b <= s2 / 2 and 0 < c < c1_max,
        "d6": 0 < th <= 1 and 1 - th < r < 1 and b > s2 / 2 and c2_max < c < c1_max,
        "d7": th > 1 and 0 < r < 1 and s1 < b <= s2 / 2 and 0 < c < c1_max,
        "d8": th > 1 and 0 < r < 1 and b > s2 / 2 and c2_max < c < c1_max,
    }


def parameter_subclasses(params: Params) -> list[ParameterSubclass]:
    """Every subclass (a1 ... d8) whose inequalities the parameters satisfy.

    Classes overlap, so several may match.  An empty list means ``v' < 0``
    somewhere on the relevant u-range.
    """
    if params.h != 1:
        raise DomainError("the parameter taxonomy is defined for h = 1 only")
    return [ParameterSubclass(name, name[0].upper()) for name, ok in _subclass_table(params).items() if ok]


def class_signature_holds(cls: str, uhat: tuple[float, float], tol: float = 1e-9) -> bool:
    """Check the defining location of the v' >= 0 interval for class A, B, C or D."""
    lo, hi = uhat
    if cls == "A":
        return lo < tol and hi > 1.0 - tol
    if cls == "B":
        return -tol < lo < 1.0 + tol and hi > 1.0 - tol
    if cls == "C":
        return lo <= tol and hi >= 2.0 - tol
    if cls == "D":
        return lo < tol and 1.0 - tol < hi < 2.0 + tol
    raise DomainError(f"unknown class {cls!r}")


@dataclass
class Checklist:
    """Named hypotheses with pass/fail flags."""

    name: str
    items: list[tuple[str, bool]] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(ok for _, ok in self.items)


def _near(a: float, b: float) -> bool:
    return abs(a - b) <= TIE_TOL


def _beta_below_psi_h1(params: Params) -> bool:
    th, r, c, b = params.theta, params.r, params.c, params.beta
    return (r >= c * th and b <= psi_at_one(params)) or (
        r <= c * th and b <= (math.sqrt(th) + math.sqrt(c * r)) ** 2
    )


def _subclass_names(params: Params) -> set[str]:
    return {sc.subclass for sc in parameter_subclasses(params)}


def _eminus_q(params: Params) -> float | None:
    interior = positive_fixed_points(params)
    return char_coeffs(interior[0], params).q if interior else None


def invariance_checklist(region: str, params: Params) -> Checklist:
    """Hypotheses under which one step of the map keeps ``region`` inside itself."""
    th, r, c, b = params.theta, params.r, params.c, params.beta
    cl = Checklist(f"{region} invariance")
    if region == "M1":
        return cl
    if region == "M2":
        cl.items.append(("r <= 1", r <= 1.0))
    elif region in ("M3", "M4"):
        cl.items.append(("one of a1-a3", bool(_subclass_names(params) & {"a1", "a2", "a3"})))
        cl.items.append(
            ("r >= c theta and beta <= (c+1)(r+theta), or r <= c theta and beta <= (sqrt(theta)+sqrt(c r))^2",
             _beta_below_psi_h1(params))
        )
        if region == "M4":
            cl.items.append(("c <= 1/2", c <= 0.5))
    elif region == "N":
        ub = ubar(params)
        cl.items.append(("r + theta <= 1", r + th <= 1.0))
        cl.items.append(("c <= 27/4", c <= 27.0 / 4.0))
        cl.items.append(
            ("ubar >= 1 and beta <= (c+1)(r+theta), or ubar < 1 and beta <= psi(ubar)",
             (ub >= 1.0 and b <= psi_at_one(params)) or (ub < 1.0 and b <= psi(ub, params)))
        )
    else:
        raise DomainError(f"no invariance statement for region {region!r}")
    return cl


def convergence_checklists(params: Params) -> list[Checklist]:
    """Hypothesis blocks of the global convergence statements for these parameters."""
    th, r, c, b = params.theta, params.r, params.c, params.beta
    ps1 = psi_at_one(params)
    q = _eminus_q(params)
    q_ok = q is not None and q < 1.0
    out = []
    if params.h == 1:
        names = _subclass_names(params)
        a_class = bool(names & {"a1", "a2", "a3"})
        b_class = "b1" in names
        psu = (math.sqrt(th) + math.sqrt(c * r)) ** 2

        cl = Checklist("E1 attracts M3 (M4 if c <= 1/2)")
        cl.items.append(("one of a1-a3 (or b1 from the strip above uhat-)", a_class or b_class))
        cl.items.append(("beta below psi on [0, 1]", _beta_below_psi_h1(params)))
        out.append(cl)

        cl = Checklist("E1 attracts starts with 1 < u < 2")
        cl.items.append(("one of c1-c3 or d1-d8", any(n[0] in "cd" for n in names)))
        cl.items.append(
            ("r >= 4 c theta and beta <= (2c+1)(r+2 theta)/2, or r <= 4 c theta and beta <= (sqrt(theta)+sqrt(c r))^2",
             (r >= 4 * c * th and b <= (2 * c + 1) * (r + 2 * th) / 2) or (r <= 4 * c * th and b <= psu))
        )
        out.append(cl)

        cl = Checklist("Eminus attracts the region below the prey nullcline")
        cl.items.append(
            ("beta > (c+1)(r+theta), or r < c theta and beta in {(c+1)(r+theta), (sqrt(theta)+sqrt(c r))^2}",
             b > ps1 or (r < c * th and (_near(b, ps1) or _near(b, psu))))
        )
        cl.items.append(("q(u-) < 1", q_ok))
        cl.items.append(("one of a1-a3 or b1", a_class or b_class))
        out.append(cl)

        cl = Checklist("bistability: stable curve of Eplus splits M4 between Eminus and E1")
        cl.items.append(("r < c theta", r < c * th))
        cl.items.append(("(sqrt(theta)+sqrt(r c))^2 < beta < (c+1)(r+theta)", psu < b < ps1))
        cl.items.append(("q(u-) < 1", q_ok))
        cl.items.append(("one of a1-a3 or b1", a_class or b_class))
        out.append(cl)
        return out

    ub = ubar(params)
    psu = psi(ub, params)
    base = [("r + theta <= 1", r + th <= 1.0), ("c <= 27/4", c <= 27.0 / 4.0)]
    cl = invariance_checklist("N", params)
    cl.name = "N invariant and E1 attracts N"
    out.append(cl)

    cl = Checklist("Eminus attracts N1 and N2", list(base))
    cl.items.append(
        ("beta > (c+1)(r+theta), or ubar < 1 and beta in {(c+1)(r+theta), psi(ubar)}",
         b > ps1 or (ub < 1.0 and (_near(b, ps1) or _near(b, psu))))
    )
    cl.items.append(("q(u-) < 1", q_ok))
    out.append(cl)

    cl = Checklist("bistability: stable curve of Eplus splits N between Eminus and E1", list(base))
    cl.items.append(("ubar < 1", ub < 1.0))
    cl.items.append(("psi(ubar) < beta < (c+1)(r+theta)", psu < b < ps1))
    cl.items.append(("q(u-) < 1", q_ok))
    out.append(cl)
    return out


def sample_region(region: str, params: Params, samples: int, seed: int) -> np.ndarray:
    """Deterministic pseudo-random points of ``region`` as an (n, 2) array.

    u is uniform on the region's u-range and v uniform between the u-dependent
    bounds; S- and N1/N2-type regions use rejection from that envelope.
    """
    rng = np.random.default_rng(seed)
    if region == "M1":
        return np.column_stack([rng.uniform(0.0, 2.0, samples), np.zeros(samples)])
    if region == "M2":
        return np.column_stack([np.zeros(samples), rng.uniform(0.0, M2_SAMPLE_VMAX, samples)])

    umin = N_SAMPLE_UMIN if params.h == 2 else 0.0
    umax = _eminus_u(params) if region == "N2" else 1.0
    out = []
    attempts = 0
    while len(out) < samples:
        attempts += 1
        if attempts > 1000 * samples + 10_000:
            raise DomainError(f"region {region} is empty or too thin to sample for {params}")
        u = float(rng.uniform(umin, umax))
        if region == "M3":
            vmax = 2.0
        elif region == "S2":
            vmax = 2.0
        else:
            vmax = _parabola(u, params, 2.0)
        v = float(rng.uniform(0.0, vmax))
        if region in ("M3", "M4", "N") or membership(State(u, v), region, params):
            out.append((u, v))
    return np.array(out)


@dataclass(frozen=True)
class Violation:
    start: State
    image: State


@dataclass
class InvarianceReport:
    region: str
    samples: int
    violations: list[Violation]
    hypotheses: Checklist

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_invariance(
    region: str,
    params: Params,
    samples: int = 10_000,
    seed: int = 0,
    points=None,
    tol: float = 1e-12,
) -> InvarianceReport:
    """Map sampled points of ``region`` once and collect those whose image leaves it.

    ``points`` replaces the random sample with explicit starts.  The
    hypothesis checklist is attached but not enforced: callers decide whether
    an empty violation list is guaranteed.
    """
    try:
        hyp = invariance_checklist(region, params)
    except DomainError:
        hyp = Checklist(f"{region} invariance", [("no invariance statement for this region", False)])
    starts = sample_region(region, params, samples, seed) if points is None else np.asarray(points, dtype=float)
    violations = []
    for u, v in starts:
        s = State(float(u), float(v))
        try:
            image = apply_map(s, params)
        except OverflowError:
            violations.append(Violation(s, State(math.nan, math.nan)))
            continue
        if not membership(image, region, params, tol):
            violations.append(Violation(s, image))
    return InvarianceReport(region, len(starts), violations, hyp)

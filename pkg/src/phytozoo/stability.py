"""Jacobians, characteristic coefficients and fixed-point type classification.

The characteristic polynomial at a fixed point is written
``lambda^2 - p lambda + q`` (p = trace, q = determinant).  The root-location
test in :func:`classify_roots` works with ``lambda^2 + B lambda + C``, so
callers pass ``B = -p`` and ``C = q``.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from phytozoo.errors import PreconditionError
from phytozoo.fixed_points import E0, E1, EMINUS, EPLUS, FixedPoint
from phytozoo.model import Params, State, apply_map, functional_response, ubar

ATTRACTIVE = "Attractive"
REPELLING = "Repelling"
SADDLE = "Saddle"
NONHYPERBOLIC = "NonHyperbolic"

# Width of the band around each class boundary that counts as equality.
HYPERBOLIC_TOL = 1e-9
FIXED_POINT_TOL = 1e-8


@dataclass(frozen=True)
class CharCoeffs:
    p: float
    q: float

    def at(self, lam: float) -> float:
        """Characteristic polynomial evaluated at ``lam``."""
        return lam * lam - self.p * lam + self.q


@dataclass(frozen=True)
class RootCase:
    """Outcome of the root-location test.

    ``moduli`` holds one of ``"<"``, ``"="``, ``">"`` per root, comparing
    its modulus with 1.
    """

    label: str
    moduli: tuple[str, str]

    @property
    def fp_class(self) -> str:
        return class_from_moduli(self.moduli)


@dataclass(frozen=True)
class StabilityReport:
    label: str
    coeffs: CharCoeffs
    eigenvalues: tuple[complex, complex]
    fp_class: str
    ns_flag: bool = False
    case: str = ""
    note: str = ""


def class_from_moduli(moduli) -> str:
    if "=" in moduli:
        return NONHYPERBOLIC
    if moduli[0] == moduli[1]:
        return ATTRACTIVE if moduli[0] == "<" else REPELLING
    return SADDLE


def _sign(x: float, tol: float) -> int:
    if abs(x) <= tol:
        return 0
    return 1 if x > 0 else -1


def _cmp_one(x: float, tol: float) -> str:
    return "=" if abs(x - 1.0) <= tol else ("<" if x < 1.0 else ">")


def classify_roots(f_of_1: float, f_of_minus1: float, b: float, c: float, tol: float = HYPERBOLIC_TOL) -> RootCase:
    """Locate the roots of ``lambda^2 + b lambda + c`` relative to the unit circle.

    Decides from the signs of F(1), F(-1) and the value of ``c`` alone,
    returning the case label ("i.1" ... "i.6", "ii", "iii.1", "iii.2").
    Quantities within ``tol`` of a threshold are treated as equal to it.
    """
    scale = max(1.0, abs(b), abs(c))
    if abs(f_of_1 - (1.0 + b + c)) > 1e-12 * scale or abs(f_of_minus1 - (1.0 - b + c)) > 1e-12 * scale:
        raise PreconditionError("F(1) and F(-1) are inconsistent with the coefficients")

    s1 = _sign(f_of_1, tol)
    sm1 = _sign(f_of_minus1, tol)
    if s1 > 0:
        if abs(c - 1.0) <= tol and -2.0 < b < 2.0:
            return RootCase("i.5", ("=", "="))
        if sm1 == 0:
            if abs(b - 2.0) <= tol:
                return RootCase("i.6", ("=", "="))
            # one root is -1, so the other is -c
            return RootCase("i.2", ("=", _cmp_one(abs(c), tol)))
        if sm1 < 0:
            return RootCase("i.3", ("<", ">"))
        return RootCase("i.1", ("<", "<")) if c < 1.0 else RootCase("i.4", (">", ">"))
    if s1 == 0:
        # one root is 1, so the other is c
        return RootCase("ii", ("=", _cmp_one(abs(c), tol)))
    if sm1 > 0:
        return RootCase("iii.2", (">", "<"))
    return RootCase("iii.1", (">", "=" if sm1 == 0 else ">"))


def eigenvalues(coeffs: CharCoeffs) -> tuple[complex, complex]:
    root = cmath.sqrt(coeffs.p * coeffs.p - 4.0 * coeffs.q)
    return (0.5 * (coeffs.p + root), 0.5 * (coeffs.p - root))


def _check_fixed(state: State, params: Params) -> None:
    image = apply_map(state, params)
    if max(abs(image.u - state.u), abs(image.v - state.v)) > FIXED_POINT_TOL:
        raise PreconditionError(f"{state} is not a fixed point of the map")


def jacobian(fp: FixedPoint, params: Params) -> np.ndarray:
    """Jacobian of the map at a fixed point, from the analytic partials."""
    _check_fixed(fp.state, params)
    return jacobian_at(fp.state, params)


def jacobian_at(s: State, params: Params) -> np.ndarray:
    u, v = s.u, s.v
    h, c = params.h, params.c
    uh = u**h
    f = functional_response(u, params)
    df = h * u ** (h - 1) / (1.0 + c * uh) ** 2
    return np.array(
        [
            [2.0 - 2.0 * u - df * v, -f],
            [params.beta * df * v - params.theta * v, params.beta * f + 1.0 - params.r - params.theta * u],
        ]
    )


def char_coeffs(fp: FixedPoint, params: Params) -> CharCoeffs:
    """Closed-form trace and determinant at an interior fixed point."""
    if fp.label not in (EMINUS, EPLUS):
        raise PreconditionError("char_coeffs needs an interior fixed point; use classify_boundary")
    u, c, beta, theta = fp.u, params.c, params.beta, params.theta
    if params.h == 1:
        a = (1.0 - u) * (1.0 + 2.0 * c * u) / (1.0 + c * u)
        return CharCoeffs(a + 1.0, a + u * (1.0 - u) * (beta / (1.0 + c * u) ** 2 - theta))
    w = 1.0 + c * u * u
    a = 2.0 * c * u * u * (1.0 - u) / w
    return CharCoeffs(1.0 + a, a + u * (1.0 - u) * (2.0 * beta * u / (w * w) - theta))


def classify_boundary(fp: FixedPoint, params: Params, tol: float = HYPERBOLIC_TOL) -> StabilityReport:
    """Type of E0 or E1 from the closed-form threshold table (same for h = 1, 2)."""
    r, theta = params.r, params.theta
    if fp.label == E0:
        lam = (2.0, 1.0 - r)
        if abs(r - 2.0) <= tol:
            cls = NONHYPERBOLIC
        else:
            cls = SADDLE if r < 2.0 else REPELLING
    elif fp.label == E1:
        k = params.beta / (1.0 + params.c)
        lam = (0.0, 1.0 - r - theta + k)
        s = r + theta
        if abs(s - k) <= tol or abs(s - 2.0 - k) <= tol:
            cls = NONHYPERBOLIC
        else:
            cls = ATTRACTIVE if k < s < 2.0 + k else SADDLE
    else:
        raise PreconditionError(f"classify_boundary expects E0 or E1, got {fp.label}")
    coeffs = CharCoeffs(lam[0] + lam[1], lam[0] * lam[1])
    case = classify_roots(coeffs.at(1.0), coeffs.at(-1.0), -coeffs.p, coeffs.q, tol).label
    return StabilityReport(fp.label, coeffs, (complex(lam[0]), complex(lam[1])), cls, case=case)


def classify_interior(fp: FixedPoint, params: Params, tol: float = HYPERBOLIC_TOL) -> StabilityReport:
    """Type of an interior fixed point.

    E- is attractive, repelling or non-hyperbolic as ``q`` is below, above or
    at 1.  For h = 1, E+ is a saddle, repeller or non-hyperbolic as F(-1) is
    positive, negative or zero; for h = 2 and ``theta < 1`` it is always a
    saddle.  Outside those tables the root-location test decides and the
    report carries a note.
    """
    if fp.label not in (EMINUS, EPLUS):
        raise PreconditionError(f"classify_interior expects Eminus or Eplus, got {fp.label}")
    _check_fixed(fp.state, params)
    ub = ubar(params)
    if (fp.label == EMINUS and fp.u > ub + 1e-9) or (fp.label == EPLUS and fp.u < ub - 1e-9):
        raise PreconditionError(f"{fp.label} at u={fp.u} is on the wrong side of ubar={ub}")

    coeffs = char_coeffs(fp, params)
    lam = eigenvalues(coeffs)
    f1, fm1 = coeffs.at(1.0), coeffs.at(-1.0)
    root_case = classify_roots(f1, fm1, -coeffs.p, coeffs.q, tol)
    note = ""
    ns_flag = False

    if fp.label == EMINUS:
        qs = _sign(coeffs.q - 1.0, tol)
        if qs < 0:
            cls = ATTRACTIVE
        elif qs > 0:
            cls = REPELLING
        else:
            cls = NONHYPERBOLIC
            ns_flag = -2.0 < coeffs.p < 2.0
            if not ns_flag:
                note = "table-incomplete: q = 1 with p outside (-2, 2)"
    elif params.h == 1:
        s = _sign(fm1, tol)
        cls = SADDLE if s > 0 else (REPELLING if s < 0 else NONHYPERBOLIC)
    elif params.theta < 1.0:
        cls = SADDLE
    else:
        cls = root_case.fp_class
        note = "theta >= 1: type decided by root location, outside the proved regime"
    return StabilityReport(fp.label, coeffs, lam, cls, ns_flag=ns_flag, case=root_case.label, note=note)


def classify(fp: FixedPoint, params: Params) -> StabilityReport:
    if fp.label in (E0, E1):
        return classify_boundary(fp, params)
    return classify_interior(fp, params)

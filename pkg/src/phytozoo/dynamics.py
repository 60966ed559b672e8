"""Orbits, limit verdicts, basin boundaries and Neimark-Sacker scans."""
from __future__ import annotations

import math
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from phytozoo.errors import DomainError, RegimeError
from phytozoo.fixed_points import E1, EMINUS, all_fixed_points, positive_fixed_points
from phytozoo.model import Params, State, step
from phytozoo.stability import ATTRACTIVE, classify_boundary, classify_interior

CONVERGED = "ConvergedTo"
DIVERGED = "Diverged"
INVARIANT_CURVE = "InvariantCurve"
UNDECIDED = "Undecided"

CONV_TOL = 1e-9
ESCAPE_RADIUS = 1e8
MAX_STEPS = 100_000
STORE_CAP = 100_000
CONV_RUN = 10
NS_Q_TOL = 1e-9
NS_PARAM_TOL = 1e-12
SWEEPABLE = ("beta", "r", "theta", "c")


@dataclass
class TrajectoryResult:
    """Stored iterates (possibly decimated by ``stride``) plus the limit verdict.

    ``index[k]`` is the iteration number of ``iterates[k]``; the final iterate
    is always stored.
    """

    iterates: np.ndarray
    index: np.ndarray
    verdict: str
    steps_used: int
    limit: str | None = None
    stride: int = 1
    note: str = ""

    @property
    def verdict_text(self) -> str:
        return f"{CONVERGED}({self.limit})" if self.verdict == CONVERGED else self.verdict

    @property
    def final(self) -> State:
        return State(float(self.iterates[-1, 0]), float(self.iterates[-1, 1]))


@dataclass(frozen=True)
class SimSettings:
    max_steps: int = MAX_STEPS
    conv_tol: float = CONV_TOL
    escape_radius: float = ESCAPE_RADIUS

    def __post_init__(self) -> None:
        if int(self.max_steps) != self.max_steps or self.max_steps < 1:
            raise DomainError(f"max_steps must be a positive integer (got {self.max_steps!r})")
        if not (self.conv_tol > 0 and math.isfinite(self.conv_tol)):
            raise DomainError(f"conv_tol must be positive (got {self.conv_tol!r})")
        if not self.escape_radius > 0:
            raise DomainError(f"escape_radius must be positive (got {self.escape_radius!r})")


def _winding(tail: np.ndarray, centre: State) -> float:
    angles = np.unwrap(np.arctan2(tail[:, 1] - centre.v, tail[:, 0] - centre.u))
    return abs(angles[-1] - angles[0])


def _looks_like_invariant_curve(tail: np.ndarray, centre: State, conv_tol: float) -> bool:
    # bounded, non-convergent tail that winds around E- at a steady distance
    dist = np.max(np.abs(tail - (centre.u, centre.v)), axis=1)
    diameter = float(np.max(np.ptp(tail, axis=0)))
    if diameter <= 10 * conv_tol or dist.min() <= 10 * conv_tol:
        return False
    half = len(dist) // 2
    ratio = dist[half:].mean() / dist[:half].mean()
    return 0.9 <= ratio <= 1.1 and _winding(tail, centre) >= 2 * math.pi


def simulate(
    s0: State,
    params: Params,
    max_steps: int = MAX_STEPS,
    conv_tol: float = CONV_TOL,
    escape_radius: float = ESCAPE_RADIUS,
) -> TrajectoryResult:
    """Iterate the map from ``s0`` and decide what the orbit does.

    Stops as soon as ``CONV_RUN`` consecutive iterates sit within ``conv_tol``
    (sup norm) of one fixed point, or when an iterate leaves the box of
    half-width ``escape_radius`` or becomes non-finite.  An exact fixed point
    is reported as converged after 0 steps.  If ``max_steps`` is exhausted
    the tail is tested for an invariant closed curve around E-.
    """
    SimSettings(max_steps, conv_tol, escape_radius)
    fps = all_fixed_points(params)
    targets = [(fp.label, fp.u, fp.v) for fp in fps]
    h, beta, r, theta, c = params.h, params.beta, params.r, params.theta, params.c
    R = escape_radius

    stride = max(1, math.ceil(max_steps / STORE_CAP))
    stored: list[tuple[float, float]] = []
    index: list[int] = []
    tail_len = min(max_steps + 1, max(1000, max_steps // 5))
    tail: deque = deque(maxlen=tail_len)

    def finish(verdict: str, n: int, u: float, v: float, limit: str | None = None, note: str = "") -> TrajectoryResult:
        if not index or index[-1] != n:
            stored.append((u, v))
            index.append(n)
        return TrajectoryResult(
            np.array(stored, dtype=float), np.array(index), verdict, n, limit, stride, note
        )

    u, v = float(s0.u), float(s0.v)
    if not (math.isfinite(u) and math.isfinite(v)):
        raise DomainError(f"initial state must be finite (got {s0})")
    u1, v1 = step(u, v, h, beta, r, theta, c)
    for label, fu, fv in targets:
        if u1 == u and v1 == v and max(abs(u - fu), abs(v - fv)) <= conv_tol:
            return finish(CONVERGED, 0, u, v, label)

    run_label, run = None, 0
    for n in range(max_steps + 1):
        if n > 0:
            u, v = step(u, v, h, beta, r, theta, c)
        if n % stride == 0:
            stored.append((u, v))
            index.append(n)
        if not (-R <= u <= R and -R <= v <= R):
            return finish(DIVERGED, n, u, v)
        tail.append((u, v))

        near = None
        for label, fu, fv in targets:
            if abs(u - fu) <= conv_tol and abs(v - fv) <= conv_tol:
                near = label
                break
        if near is not None and near == run_label:
            run += 1
        else:
            run_label, run = near, (1 if near is not None else 0)
        if run >= CONV_RUN:
            return finish(CONVERGED, n, u, v, run_label)

    eminus = next((fp for fp in fps if fp.label == EMINUS), None)
    if eminus is not None and _looks_like_invariant_curve(np.array(tail), eminus.state, conv_tol):
        return finish(INVARIANT_CURVE, max_steps, u, v, note="empirical: bounded tail winding around Eminus")
    return finish(UNDECIDED, max_steps, u, v)


@dataclass(frozen=True)
class Grid:
    """Rectangle ``[u0, u1] x [v0, v1]`` split into ``nu x nv`` cells."""

    u0: float
    u1: float
    nu: int
    v0: float
    v1: float
    nv: int

    def __post_init__(self) -> None:
        if self.nu < 1 or self.nv < 1:
            raise DomainError("grid resolution must be at least 1 in each axis")

    def centres(self) -> list[State]:
        du = (self.u1 - self.u0) / self.nu
        dv = (self.v1 - self.v0) / self.nv
        return [
            State(self.u0 + (i + 0.5) * du, self.v0 + (j + 0.5) * dv)
            for j in range(self.nv)
            for i in range(self.nu)
        ]


def _verdict_of(args) -> str:
    s, params, settings = args
    return simulate(s, params, settings.max_steps, settings.conv_tol, settings.escape_radius).verdict_text


def _run_all(jobs: list, workers: int | None) -> list:
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_verdict_of, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [_verdict_of(job) for job in jobs]


def portrait(
    grid: Grid, params: Params, settings: SimSettings = SimSettings(), workers: int | None = None
) -> list[tuple[State, str]]:
    """Verdict at every cell centre, row-major (v outer, u inner)."""
    cells = grid.centres()
    verdicts = _run_all([(s, params, settings) for s in cells], workers)
    return list(zip(cells, verdicts))


@dataclass
class BasinBoundary:
    """Points ``(u, v*)`` on the curve separating the basins of E- and E1."""

    samples: list[tuple[float, float]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


def admissible_v_max(u: float, params: Params) -> float:
    """Upper edge of the invariant region above ``u`` (M4 for h = 1, N for h = 2)."""
    if params.h == 1:
        return (2.0 - u) * (1.0 + params.c * u)
    return (2.0 - u) * (1.0 + params.c * u * u) / u


def check_bistable(params: Params) -> None:
    interior = positive_fixed_points(params)
    if len(interior) != 2:
        raise RegimeError(f"basin boundary needs two interior fixed points (found {len(interior)})")
    if classify_interior(interior[0], params).fp_class != ATTRACTIVE:
        raise RegimeError("basin boundary needs an attractive Eminus")
    e1 = all_fixed_points(params)[1]
    if classify_boundary(e1, params).fp_class != ATTRACTIVE:
        raise RegimeError("basin boundary needs an attractive E1")


def _boundary_at(u: float, params: Params, v_tol: float, n_scan: int, settings: SimSettings):
    vmax = admissible_v_max(u, params)
    labels = {EMINUS: f"{CONVERGED}({EMINUS})", E1: f"{CONVERGED}({E1})"}
    wanted = set(labels.values())

    def verdict(v: float) -> str:
        return _verdict_of((State(u, v), params, settings))

    vs = [vmax * k / n_scan for k in range(n_scan + 1)]
    scan = [verdict(v) for v in vs]
    found, notes = [], []
    for k in range(n_scan):
        if scan[k] != scan[k + 1] and {scan[k], scan[k + 1]} == wanted:
            lo, hi, vlo = vs[k], vs[k + 1], scan[k]
            while hi - lo > v_tol:
                mid = 0.5 * (lo + hi)
                vm = verdict(mid)
                if vm == vlo:
                    lo = mid
                elif vm in wanted:
                    hi = mid
                else:
                    notes.append(f"u={u:.17g}: bisection met verdict {vm} at v={mid:.17g}")
                    break
            found.append((u, 0.5 * (lo + hi)))
    if not found:
        notes.append(f"u={u:.17g}: no Eminus/E1 bracket found on 0 <= v <= {vmax:.17g}; omitted")
    return found, notes


def _boundary_job(args):
    return _boundary_at(*args)


def basin_boundary(
    u_values,
    params: Params,
    v_tol: float = 1e-6,
    n_scan: int = 40,
    settings: SimSettings = SimSettings(),
    workers: int | None = None,
) -> BasinBoundary:
    """Trace the stable curve of E+ that splits the basins of E- and E1.

    Along each vertical line ``u = const`` the admissible v-range is scanned
    on ``n_scan`` intervals; every interval whose endpoints go to different
    attractors is bisected to width ``v_tol``.  Samples are ordered by input
    u, then by v.
    """
    if not v_tol > 0:
        raise DomainError("v_tol must be positive")
    check_bistable(params)
    jobs = [(float(u), params, v_tol, n_scan, settings) for u in u_values]
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_boundary_job, jobs))
    else:
        results = [_boundary_job(job) for job in jobs]
    out = BasinBoundary()
    for found, notes in results:
        out.samples.extend(found)
        out.notes.extend(notes)
    return out


@dataclass(frozen=True)
class BifurcationPoint:
    param_name: str
    value: float
    u_minus: float
    q_at_crossing: float
    p_at_crossing: float


@dataclass(frozen=True)
class SweepRow:
    value: float
    u_minus: float
    p: float
    q: float
    fp_class: str


def _eminus_row(params: Params, name: str, value: float) -> SweepRow | None:
    p = params.replace(**{name: value})
    interior = positive_fixed_points(p)
    if not interior:
        return None
    rep = classify_interior(interior[0], p)
    return SweepRow(value, interior[0].u, rep.coeffs.p, rep.coeffs.q, rep.fp_class)


def sweep_profile(param_name: str, start: float, stop: float, steps: int, params: Params) -> list[SweepRow]:
    """(u-, p, q, class) of E- on an evenly spaced grid; rows without E- are skipped."""
    if param_name not in SWEEPABLE:
        raise DomainError(f"param must be one of {SWEEPABLE} (got {param_name!r})")
    if not start < stop:
        raise DomainError("sweep range needs from < to")
    if steps < 2:
        raise DomainError("sweep needs at least 2 steps")
    rows = []
    for value in np.linspace(start, stop, steps):
        row = _eminus_row(params, param_name, float(value))
        if row is not None:
            rows.append(row)
    return rows


def ns_sweep(param_name: str, start: float, stop: float, steps: int, params: Params) -> list[BifurcationPoint]:
    """Locate parameter values where E- crosses ``q = 1`` with ``-2 < p < 2``.

    Sign changes of ``q - 1`` between consecutive grid values that both have
    an E- are refined by bisection until ``|q - 1| <= 1e-9`` or the bracket
    is narrower than 1e-12.
    """
    rows = sweep_profile(param_name, start, stop, steps, params)
    if not rows:
        raise DomainError(f"no Eminus anywhere on {param_name} in [{start}, {stop}]")
    points: list[BifurcationPoint] = []

    def emit(row: SweepRow) -> None:
        if -2.0 < row.p < 2.0 and not (points and points[-1].value == row.value):
            points.append(BifurcationPoint(param_name, row.value, row.u_minus, row.q, row.p))

    for a, b in zip(rows, rows[1:]):
        if a.q == 1.0:
            emit(a)
            continue
        if (a.q - 1.0) * (b.q - 1.0) >= 0.0:
            continue
        lo, hi, above = a.value, b.value, a.q > 1.0
        row = a if abs(a.q - 1.0) <= abs(b.q - 1.0) else b
        while abs(row.q - 1.0) > NS_Q_TOL and hi - lo > NS_PARAM_TOL:
            mid = _eminus_row(params, param_name, 0.5 * (lo + hi))
            if mid is None:
                break
            row = mid
            if (mid.q > 1.0) == above:
                lo = mid.value
            else:
                hi = mid.value
        emit(row)
    if rows[-1].q == 1.0:
        emit(rows[-1])
    return points


@dataclass
class LogisticReport:
    discriminant: float
    no_period_two: bool
    starts: list[float]
    converged_by: list[int | None]
    monotone_from_below: bool
    r: float
    v_axis_decays: bool | None


def logistic_edge_checks(
    params: Params | None = None, n_grid: int = 100, max_n: int = 10_000, tol: float = 1e-9
) -> LogisticReport:
    """Dynamics on the invariant axes.

    On ``v = 0`` the map is ``f(u) = u(2 - u)``: period-2 points solve
    ``u^2 - 3u + 3 = 0``, which has negative discriminant, and every start in
    ``(0, 2)`` is iterated until it is within ``tol`` of 1.  On ``u = 0`` the
    map is ``v -> (1 - r) v``, checked for decay when ``r <= 1``.
    """
    disc = 3.0**2 - 4.0 * 3.0
    starts = [2.0 * (k + 0.5) / n_grid for k in range(n_grid)]
    converged_by: list[int | None] = []
    monotone = True
    for u0 in starts:
        u, hit = u0, None
        for n in range(max_n + 1):
            if abs(u - 1.0) <= tol:
                hit = n
                break
            nxt = u * (2.0 - u)
            if 0.0 < u < 1.0 and not nxt >= u:
                monotone = False
            u = nxt
        converged_by.append(hit)

    decays = None
    r = params.r if params is not None else 0.5
    if r <= 1.0:
        decays = True
        for v0 in (0.1, 1.0, 10.0, 1e3):
            v, n = v0, 0
            while abs(v) > tol * v0 and n < 10**7:
                v, n = (1.0 - r) * v, n + 1
            decays = decays and abs(v) <= tol * v0
    return LogisticReport(disc, disc < 0, starts, converged_by, monotone, r, decays)

"""Acceptance criteria, each run at its stated tolerance.

Every test prints one PASS/FAIL line, repeated in the terminal summary.
"""
import math
import time

import numpy as np

from cases import TYPE2_SINGLE, TYPE2_BISTABLE, TYPE3_SINGLE, TYPE3_BISTABLE, SPIRAL_STABLE, SPIRAL_UNSTABLE
from oracles import class_from_eigs, fd_jacobian, min_distance_to_unit, random_params
from phytozoo.dynamics import DIVERGED, INVARIANT_CURVE, basin_boundary, logistic_edge_checks, ns_sweep, simulate
from phytozoo.fixed_points import all_fixed_points, positive_fixed_points
from phytozoo.model import Params, State, apply_map, psi, ubar
from phytozoo.regions import verify_invariance
from phytozoo.stability import ATTRACTIVE, REPELLING, classify


def check(record, name, failures, detail, elapsed=None, budget=None):
    if budget is not None and elapsed > budget:
        failures.append(f"runtime {elapsed:.2f}s > {budget}s")
    ok = not failures
    text = detail if ok else "; ".join(failures)
    if elapsed is not None:
        text += f" [{elapsed:.2f}s]"
    record(name, ok, text)
    assert ok, text


def test_01_fixed_point_golden_values(acceptance_record):
    published = [
        ("type2-single", TYPE2_SINGLE, [(0.876894, 0.150093)], 1e-5),
        ("type2-pair", TYPE2_BISTABLE, [(0.564922, 1.41822), (0.885078, 0.521718)], 1e-5),
        ("type3-single", TYPE3_SINGLE, [(0.623, 1.074)], 1e-3),
        ("type3-pair", TYPE3_BISTABLE, [(0.784712, 1.625865), (0.913894, 0.723753)], 1e-5),
    ]
    failures, slowest = [], 0.0
    for name, params, expected, tol in published:
        t0 = time.perf_counter()
        pts = positive_fixed_points(params)
        slowest = max(slowest, time.perf_counter() - t0)
        if len(pts) != len(expected):
            failures.append(f"{name}: found {len(pts)} points")
            continue
        for fp, (u, v) in zip(pts, expected):
            err = max(abs(fp.u - u), abs(fp.v - v))
            if err > tol:
                failures.append(f"{name} {fp.label}: ({fp.u:.7f}, {fp.v:.7f}) vs ({u}, {v}), err {err:.2e} > {tol}")
    if slowest > 1.0:
        failures.append(f"slowest fixed-point solve {slowest:.2f}s")
    check(acceptance_record, "C1 fixed-point golden values", failures, "all published fixed points matched")


def test_02_stability_golden_values(acceptance_record):
    failures, seen = [], []
    for params, q_pub, cls in ((SPIRAL_STABLE, 0.999, ATTRACTIVE), (SPIRAL_UNSTABLE, 1.003, REPELLING)):
        rep = classify(positive_fixed_points(params)[0], params)
        seen.append(f"c={params.c}: q={rep.coeffs.q:.6f} {rep.fp_class}")
        if abs(rep.coeffs.q - q_pub) > 1e-3 or rep.fp_class != cls:
            failures.append(seen[-1])
    check(acceptance_record, "C2 stability golden values", failures, ", ".join(seen))


def test_03_ns_crossing(acceptance_record):
    t0 = time.perf_counter()
    pts = ns_sweep("c", 11.0, 11.5, 50, SPIRAL_STABLE)
    elapsed = time.perf_counter() - t0
    failures = []
    if len(pts) != 1:
        failures.append(f"{len(pts)} crossings")
    else:
        pt = pts[0]
        if not 11.1 < pt.value < 11.3:
            failures.append(f"c*={pt.value}")
        if abs(pt.q_at_crossing - 1) > 1e-9:
            failures.append(f"|q-1|={abs(pt.q_at_crossing - 1):.2e}")
        if not -2 < pt.p_at_crossing < 2:
            failures.append(f"p={pt.p_at_crossing}")
    detail = f"c*={pts[0].value:.9f}" if pts else ""
    check(acceptance_record, "C3 Neimark-Sacker crossing", failures, detail, elapsed, 5.0)


def test_04_trajectory_verdicts(acceptance_record):
    cases = [
        (TYPE2_SINGLE, (0.04, 0.1), 100_000, "ConvergedTo(Eminus)"),
        (TYPE2_SINGLE, (0.4, 0.8), 100_000, "ConvergedTo(Eminus)"),
        (TYPE3_SINGLE, (0.4, 1.6), 100_000, "ConvergedTo(Eminus)"),
        (TYPE3_SINGLE, (0.4, 4.0), 100_000, "ConvergedTo(Eminus)"),
        (SPIRAL_STABLE, (0.3, 4.0), 100_000, "ConvergedTo(Eminus)"),
        (SPIRAL_UNSTABLE, (0.36, 4.3), 10_000, INVARIANT_CURVE),
        (SPIRAL_UNSTABLE, (0.4, 5.0), 10_000, INVARIANT_CURVE),
    ]
    failures = []
    t0 = time.perf_counter()
    for params, start, steps, want in cases:
        got = simulate(State(*start), params, max_steps=steps, conv_tol=1e-9).verdict_text
        if got != want:
            failures.append(f"c={params.c} start {start}: {got}, expected {want}")
    elapsed = time.perf_counter() - t0
    check(acceptance_record, "C4 trajectory verdicts", failures, f"{len(cases)} starts as expected", elapsed, 10.0)


def test_05_basin_boundary_through_saddle(acceptance_record):
    failures, found = [], []
    t0 = time.perf_counter()
    for name, params, v_pub in (("type2", TYPE2_BISTABLE, 0.521718), ("type3", TYPE3_BISTABLE, 0.723753)):
        u_plus = positive_fixed_points(params)[1].u
        samples = basin_boundary([u_plus], params).samples
        if not samples:
            failures.append(f"{name}: no boundary sample")
            continue
        gap = min(abs(v - v_pub) for _, v in samples)
        found.append(f"{name} gap {gap:.1e}")
        if gap > 0.05:
            failures.append(f"{name}: nearest v* is {gap:.3f} from {v_pub}")
    elapsed = time.perf_counter() - t0
    check(acceptance_record, "C5 basin boundary through saddle", failures, ", ".join(found), elapsed, 30.0)


def test_06_invariance_suite(acceptance_record):
    runs = [
        ("M1", TYPE2_SINGLE),
        ("M2", TYPE2_SINGLE),
        # c >= 1: the top edge v = 2 stays below (2-u)(1+cu)
        ("M3", Params(1, beta=1.2, r=0.5, theta=0.25, c=1.0)),
        # c <= 1/2, as required for the larger set
        ("M3", Params(1, beta=0.5, r=0.5, theta=0.25, c=0.25)),
        ("M4", Params(1, beta=0.5, r=0.5, theta=0.25, c=0.25)),
        ("N", Params(2, beta=1.0, r=0.5, theta=0.25, c=2.0)),
    ]
    failures, counts = [], []
    t0 = time.perf_counter()
    for region, params in runs:
        rep = verify_invariance(region, params, samples=10_000, seed=1)
        if not rep.hypotheses.holds:
            failures.append(f"{region} c={params.c}: hypotheses not met")
        counts.append(f"{region}(c={params.c})={len(rep.violations)}")
        if rep.violations:
            first = rep.violations[0]
            failures.append(
                f"{region} c={params.c}: {len(rep.violations)}/10000 leave, e.g. "
                f"({first.start.u:.4f}, {first.start.v:.4f}) -> ({first.image.u:.4f}, {first.image.v:.4f})"
            )
    over = verify_invariance("M4", Params(1, beta=1.71, r=0.25, theta=0.25, c=20.0), points=[(0.15, 6.0)])
    if len(over.violations) != 1:
        failures.append("(0.15, 6) did not leave M4")
    elapsed = time.perf_counter() - t0
    check(acceptance_record, "C6 invariance suite", failures, "violations " + ", ".join(counts), elapsed, 10.0)


def test_07_oracle_equivalence(acceptance_record):
    rng = np.random.default_rng(2024)
    draws = agree = excluded = 0
    mismatches = []
    while draws < 1000:
        p = random_params(rng)
        pts = positive_fixed_points(p)
        if not pts:
            continue
        draws += 1
        for fp in pts:
            eigs = np.linalg.eigvals(fd_jacobian(fp.state, p, 1e-6))
            if min_distance_to_unit(eigs) < 1e-8:
                excluded += 1
                continue
            if classify(fp, p).fp_class == class_from_eigs(eigs):
                agree += 1
            else:
                mismatches.append((p, fp.label))
    failures = [f"{len(mismatches)} mismatches, first {mismatches[0]}"] if mismatches else []
    check(acceptance_record, "C7 oracle equivalence", failures, f"{agree} points agree over {draws} draws ({excluded} excluded)")


def test_08_residual_suite(acceptance_record):
    rng = np.random.default_rng(99)
    failures = []
    worst_map = worst_psi = 0.0
    for _ in range(5000):
        p = random_params(rng)
        pts = all_fixed_points(p)
        for fp in pts:
            img = apply_map(fp.state, p)
            worst_map = max(worst_map, abs(img.u - fp.u), abs(img.v - fp.v))
        interior = pts[2:]
        for fp in interior:
            worst_psi = max(worst_psi, abs(psi(fp.u, p) - p.beta))
        if len(interior) == 2 and not interior[0].u < ubar(p) < interior[1].u:
            failures.append(f"ordering broken for {p}")
    if worst_map > 1e-10:
        failures.append(f"map residual {worst_map:.2e}")
    if worst_psi > 1e-9:
        failures.append(f"psi residual {worst_psi:.2e}")
    check(acceptance_record, "C8 residual suite", failures, f"max residuals {worst_map:.1e} (map), {worst_psi:.1e} (psi)")


def test_09_logistic_edge(acceptance_record):
    rep = logistic_edge_checks(TYPE2_SINGLE, n_grid=100, max_n=10_000, tol=1e-9)
    failures = []
    if not rep.discriminant < 0:
        failures.append("period-2 discriminant not negative")
    if any(n is None for n in rep.converged_by):
        failures.append("some u-axis start did not reach 1")
    if not rep.v_axis_decays:
        failures.append("v-axis orbit did not decay")
    check(acceptance_record, "C9 logistic edge", failures, f"slowest start needs {max(rep.converged_by)} steps")


def test_10_divergence(acceptance_record):
    failures = []
    for r in (0.1, 0.5, 0.9):
        p = Params(2, beta=1.0, r=r, theta=0.25, c=2.0)
        res = simulate(State(-0.1, 1.0), p)
        f = res.final
        if res.verdict != DIVERGED or not (f.u < 0 and (f.v > 0 or math.isinf(f.v))):
            failures.append(f"r={r}: {res.verdict_text} at ({f.u:.3g}, {f.v:.3g})")
    check(acceptance_record, "C10 divergence", failures, "u -> -inf, v -> +inf")

"""Acceptance suite: every shipped benchmark at its published tolerance.

Each criterion prints one PASS/FAIL line (run pytest with -s to stream
them).  Tolerances are pinned here, not calibrated: error entries compare
against the published tables at the stated relative bands, convergence
orders at +-0.1, stability magnitudes at the stated margins.
"""

import math
import time

import numpy as np
import pytest

from levelsweep import run_ladder
from levelsweep.stability import (
    box_edge_max,
    instability_threshold,
    scan_max_magnitude,
)

RESULTS = []


def report(number, label, failures, elapsed):
    status = "PASS" if not failures else "FAIL"
    line = f"ACCEPTANCE {number} [{status}] {label} ({elapsed:.1f}s)"
    for f in failures:
        line += f"\n    - {f}"
    print(line, flush=True)
    RESULTS.append((number, status))
    assert not failures, f"criterion {number}: {failures}"


def rel_dev(value, reference):
    return abs(value - reference) / abs(reference)


def check_errors(failures, records, targets, tol, tag):
    for rec, ref in zip(records, targets):
        d = rel_dev(rec.error, ref)
        if d > tol:
            failures.append(
                f"{tag} I={rec.I}: error {rec.error:.6g} vs {ref:.6g} "
                f"({d * 100:.1f}% > {tol * 100:.0f}%)"
            )


def test_criterion_1_smooth_1d_third_order():
    t0 = time.perf_counter()
    failures = []
    records = run_ladder("ex1d-smooth", "third", sweeps=6)
    check_errors(failures, records, (0.098340, 0.013159, 0.001573, 0.000188), 0.02, "smooth")
    for rec, ref in zip(records, (2.70, 2.90, 3.06, 3.07)):
        if abs(rec.eoc - ref) > 0.1:
            failures.append(f"EOC at I={rec.I}: {rec.eoc:.3f} vs {ref}")
    elapsed = time.perf_counter() - t0
    if elapsed > 10.0:
        failures.append(f"runtime {elapsed:.1f}s > 10s")
    report(1, "1D smooth advection, third order, Courant ~32", failures, elapsed)


def test_criterion_2_nonsmooth_1d_hr_vs_third():
    t0 = time.perf_counter()
    failures = []
    hr = run_ladder("ex1d-nonsmooth", "hr", sweeps=2, with_anchor=False)
    third = run_ladder("ex1d-nonsmooth", "third", sweeps=2, with_anchor=False)
    check_errors(failures, hr, (0.2466, 0.0699, 0.0213, 0.0070), 0.05, "hr")
    check_errors(failures, third, (0.2900, 0.0874, 0.0281, 0.0096), 0.05, "third")
    for h, t in zip(hr, third):
        if not h.error < t.error:
            failures.append(f"ordering broken at I={h.I}: hr {h.error} !< third {t.error}")
    elapsed = time.perf_counter() - t0
    if elapsed > 30.0:
        failures.append(f"runtime {elapsed:.1f}s > 30s")
    report(2, "1D nonsmooth profile, HR below third order, Courant 5", failures, elapsed)


def test_criterion_3_quartic_rotation():
    t0 = time.perf_counter()
    failures = []
    records = run_ladder("ex2d-quartic", "third", sweeps=8, with_anchor=False)
    check_errors(failures, records, (0.03912, 0.00394, 0.00042), 0.05, "quartic")
    eocs = [
        math.log2(a.error / b.error) for a, b in zip(records, records[1:])
    ]
    for lvl, q in zip((160, 320), eocs):
        if q < 3.0:
            failures.append(f"EOC at I={lvl}: {q:.2f} < 3.0")
    elapsed = time.perf_counter() - t0
    if elapsed > 120.0:
        failures.append(f"runtime {elapsed:.1f}s > 120s")
    report(3, "2D quartic rotation, third order, Courant ~16, 8 sweeps", failures, elapsed)


def test_criterion_4_square_interfaces():
    t0 = time.perf_counter()
    failures = []
    tables = {
        ("ex2d-square-shrink", "third"): (0.019007, 0.007029, 0.002676),
        ("ex2d-square-shrink", "hr"): (0.035226, 0.016237, 0.008180),
        ("ex2d-square-shrink", "second"): (0.058106, 0.026536, 0.011993),
        ("ex2d-square-expand", "third"): (0.019387, 0.008243, 0.003588),
        ("ex2d-square-expand", "hr"): (0.035078, 0.017392, 0.010027),
        ("ex2d-square-expand", "second"): (0.054436, 0.024402, 0.010599),
    }
    results = {}
    for (case, scheme), refs in tables.items():
        recs = run_ladder(case, scheme, sweeps=8, with_anchor=False)
        results[(case, scheme)] = recs
        check_errors(failures, recs, refs, 0.10, f"{case}/{scheme}")
    for case in ("ex2d-square-shrink", "ex2d-square-expand"):
        for k in range(3):
            e3 = results[(case, "third")][k].error
            eh = results[(case, "hr")][k].error
            e2 = results[(case, "second")][k].error
            if not (e3 < eh < e2):
                failures.append(
                    f"{case} level {k}: ordering third<hr<second broken "
                    f"({e3:.4g}, {eh:.4g}, {e2:.4g})"
                )
    elapsed = time.perf_counter() - t0
    report(4, "2D rotating squares, three-scheme comparison, Courant ~13.5", failures, elapsed)


def test_criterion_5_circle_interfaces():
    t0 = time.perf_counter()
    failures = []
    tables = {
        ("ex2d-circle-shrink", "c27"): (0.01023750, 0.00226571, 0.00052603),
        ("ex2d-circle-shrink", "c13.5"): (0.00260837, 0.00056540, 0.00012995),
        ("ex2d-circle-expand", "c27"): (0.01465536, 0.00467344, 0.00146051),
        ("ex2d-circle-expand", "c13.5"): (0.00578463, 0.00177062, 0.00054617),
    }
    for (case, ladder), refs in tables.items():
        recs = run_ladder(case, "third", ladder=ladder, sweeps=8, with_anchor=False)
        check_errors(failures, recs, refs, 0.05, f"{case}/{ladder}")
        eocs = [math.log2(a.error / b.error) for a, b in zip(recs, recs[1:])]
        if "shrink" in case:
            bad = [q for q in eocs if q <= 2.0]
            if bad:
                failures.append(f"{case}/{ladder}: shrink EOC {bad} not > 2.0")
        else:
            bad = [q for q in eocs if not (1.5 <= q <= 1.9)]
            if bad:
                failures.append(f"{case}/{ladder}: expand EOC {bad} outside [1.5, 1.9]")
    elapsed = time.perf_counter() - t0
    report(5, "2D rotating circles, third order, Courant ~27 and ~13.5", failures, elapsed)


def test_criterion_6_exponential_velocity():
    t0 = time.perf_counter()
    failures = []
    tables = {
        ("ex2d-exp-inflow", "c10.9"): (0.0002724, 0.0000435, 0.0000071),
        ("ex2d-exp-inflow", "c109"): (0.002476, 0.0004282, 0.0000648),
        ("ex2d-exp-inflow", "c436"): (0.01849, 0.003556, 0.000614),
        ("ex2d-exp-fixed", "c10.9"): (0.001219, 0.000407, 0.000145),
        ("ex2d-exp-fixed", "c109"): (0.004463, 0.001508, 0.000521),
    }
    for (case, ladder), refs in tables.items():
        recs = run_ladder(case, "third", ladder=ladder, sweeps=8, with_anchor=False)
        check_errors(failures, recs, refs, 0.05, f"{case}/{ladder}")
    elapsed = time.perf_counter() - t0
    report(6, "2D exponential velocity, both boundary variants, Courant up to ~436",
           failures, elapsed)


def test_criterion_7_stability_scans():
    t0 = time.perf_counter()
    failures = []
    rep1 = scan_max_magnitude(
        "third", np.geomspace(1e-2, 100.0, 25), n_theta=256, refine_steps=4
    )
    if rep1.max_abs_g > 1 + 1e-9:
        failures.append(f"1D third max|g| = {rep1.max_abs_g:.3e} > 1 + 1e-9")
    rep2 = scan_max_magnitude(
        "third2d", np.geomspace(1e-2, 50.0, 13), n_theta=192, refine_steps=3
    )
    if rep2.max_abs_g > 1 + 1e-9:
        failures.append(f"2D third max|g| = {rep2.max_abs_g:.3e} > 1 + 1e-9")
    threshold = instability_threshold("second2d", w=0.5, lo=6.0, hi=9.0, tol=4e-3)
    if abs(threshold - 7.396) > 0.01:
        failures.append(f"instability threshold {threshold:.4f} vs 7.396 +- 0.01")
    peak, d_at, _, _ = box_edge_max("second2d", 16.0, w=0.5)
    if abs(peak - 1.0454) > 0.001:
        failures.append(f"peak magnitude at Courant bound 16: {peak:.5f} vs 1.0454 +- 0.001")
    elapsed = time.perf_counter() - t0
    if elapsed > 300.0:
        failures.append(f"runtime {elapsed:.1f}s > 300s")
    report(7, "von Neumann scans: third order stable, second order threshold",
           failures, elapsed)


def test_criterion_8_property_suite():
    t0 = time.perf_counter()
    failures = []
    rng = np.random.default_rng(8)
    from conftest import (
        constant_courant,
        line_grid,
        periodic_dense_solve,
        periodic_embed,
        random_field,
        square_grid,
    )
    from levelsweep import (
        Field,
        GridSpec,
        assemble_high_resolution,
        assemble_second_order,
        assemble_third_order,
        build_grid,
        courant_numbers,
        dense_oracle_solve,
        inflow_mask,
        limiter_pipeline,
        sweep_solve,
    )
    from levelsweep.schemes1d import SchemeParams
    from levelsweep.schemes2d import assemble_third_order_2d
    from levelsweep.stability import amplification_factor, freeze_scheme

    # (a) TVD on 200 random periodic fields
    I = 64
    spec = GridSpec(dim=1, origin=(0.0,), h=1.0, node_counts=(I,), ghost_width=2, tau=1.0)
    grid = build_grid(spec)

    def tv(vals):
        psi = vals - np.roll(vals, 1)
        return np.abs(psi - np.roll(psi, 1)).sum()

    violations = 0
    params = SchemeParams()
    for c in (0.5, 1.0, 5.0, 20.0):
        cf = constant_courant(grid, c)
        for _ in range(50):
            nodal = rng.normal(size=I)
            prev = periodic_embed(grid, nodal)
            pred = periodic_embed(
                grid, periodic_dense_solve(assemble_second_order(grid, cf, "preferred"), prev)
            )
            state = limiter_pipeline(prev, pred, cf)
            # (b) limiter inequalities at every node of every run: bounds on
            # l itself and on l/r against the chained upwind cap
            if np.any(state.l < 0) or np.any(state.l > params.limiter_cap + 1e-14):
                violations += 1
            l_up = np.concatenate([[0.0], state.l[:-1]])
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(state.r_p != 0, state.l / state.r_p, 0.0)
            if np.any(ratio < -1e-14) or np.any(
                ratio > params.limiter_cap / c + l_up + 1e-12
            ):
                violations += 1
            new_nodal = periodic_dense_solve(
                assemble_high_resolution(grid, cf, prev, pred, state), prev
            )
            if tv(new_nodal) > tv(nodal) * (1 + 1e-12) + 1e-12:
                violations += 1
    if violations:
        failures.append(f"TVD/limiter violations in {violations} runs")

    # (c) conservation identity to 1e-12 relative
    gridc = line_grid(I=50)
    Ic, g = 50, gridc.ghost_width
    u = 0.3 + rng.random(gridc.shape_full)
    cf = courant_numbers(gridc, u)
    C = cf.C[gridc.interior]
    w = rng.random(Ic + 1)
    prev = random_field(gridc, rng)
    new = random_field(gridc, rng)
    res = assemble_second_order(gridc, cf, w, prev).residuals(new)
    psi_n = new.values[g : g + Ic + 1] - new.values[g - 1 : g + Ic]
    psi_p = prev.values[g : g + Ic + 1] - prev.values[g - 1 : g + Ic]
    psi_p_dn = prev.values[g + 1 : g + Ic + 2] - prev.values[g : g + Ic + 1]
    psi_n_up = np.concatenate([[new.values[g - 1] - new.values[g - 2]], psi_n[:-1]])
    flux = C * (psi_n + 0.5 * ((1 - w) * (psi_p_dn - psi_n) + w * (psi_p - psi_n_up)))
    conservative = (psi_n - psi_p) + (flux - np.concatenate([[np.nan], flux[:-1]]))
    dev = np.abs((res[1:] - res[:-1]) - conservative[1:]).max()
    if dev > 1e-12 * np.abs(conservative[1:]).max():
        failures.append(f"conservation identity deviation {dev:.2e}")

    # (d) sweep solver vs dense oracle on 50 random small systems
    worst = 0.0
    for trial in range(50):
        if trial % 2 == 0:
            gr = line_grid(I=24, tau=0.1)
            cfr = courant_numbers(gr, 0.8 * np.sin(3.0 * gr.meshgrid()[0] + trial))
            system = assemble_third_order(gr, cfr, unknown_mask=~inflow_mask(gr, cfr))
        else:
            gr = square_grid(I=10, tau=0.08)
            X, Y = gr.meshgrid()
            cfr = courant_numbers(gr, np.sin(X + trial), np.cos(Y - trial))
            system = assemble_third_order_2d(gr, cfr, unknown_mask=~inflow_mask(gr, cfr))
        prevr = random_field(gr, rng)
        system.compute_rhs(prevr)
        dense = dense_oracle_solve(system, prevr.copy())
        f = prevr.copy()
        sweep_solve(system, f, 24)
        worst = max(
            worst,
            np.abs(f.values - dense.values).max() / np.abs(dense.values).max(),
        )
    if worst > 1e-10:
        failures.append(f"sweeps vs dense oracle: worst relative dev {worst:.2e}")

    # (e) 2D schemes with v = 0 match 1D row-wise to round-off
    gr2 = square_grid(I=10, tau=0.3)
    row = rng.normal(size=gr2.shape_full[0])
    prev2 = Field(gr2, np.tile(row[:, None], (1, gr2.shape_full[1])))
    u2 = np.tile((0.4 + np.sin(gr2.meshgrid()[0][:, 0]))[:, None], (1, gr2.shape_full[1]))
    cf2 = courant_numbers(gr2, u2, np.zeros_like(u2))
    sys2 = assemble_third_order_2d(gr2, cf2, prev2)
    spec1 = GridSpec(dim=1, origin=(gr2.spec.origin[0],), h=gr2.h,
                     node_counts=(10,), ghost_width=2, tau=0.3)
    gr1 = build_grid(spec1)
    cf1 = courant_numbers(gr1, u2[:, 0], tau=0.3)
    sys1 = assemble_third_order(gr1, cf1, Field(gr1, row.copy()))
    for i in range(11):
        imp1, _, rhs1 = sys1.relation_at(i)
        imp2, _, rhs2 = sys2.relation_at((i, 3))
        if any(abs(imp2.get((k[0], 0), 0.0) - v) > 1e-13 for k, v in imp1.items()):
            failures.append(f"v=0 degeneration: implicit mismatch at node {i}")
            break
        if abs(rhs1 - rhs2) > 1e-12:
            failures.append(f"v=0 degeneration: rhs mismatch at node {i}")
            break

    # (f) g(0) = 1 for every assembled scheme
    for scheme in ("first", "second", "third", "second2d", "third2d"):
        c, d = rng.uniform(0.1, 25.0, size=2)
        st = freeze_scheme(scheme, float(c), float(d) if scheme.endswith("2d") else None)
        g0 = amplification_factor(st, np.array(0.0), np.array(0.0) if st.dim == 2 else None)
        if abs(g0 - 1.0) > 1e-12:
            failures.append(f"{scheme}: g(0) = {g0}")

    elapsed = time.perf_counter() - t0
    report(8, "property suite: TVD, limiter bounds, conservation, oracle, degeneration",
           failures, elapsed)

"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` (lines appear in the
"acceptance criteria" summary section) or directly with
``python tests/test_acceptance.py``.
"""

import math
import os
import subprocess
import sys
import tempfile
import time

import numpy as np

from qcpower.cluster_errors import equivalent, phase_error_rate, verify_propagation_oracle
from qcpower.ghz_distill import distill_channel, p_delete, povm_lossy, povm_standard
from qcpower.pauli_channel import extract_error_probs, twirl
from qcpower.percolation import LatticeSpec, site_threshold, zero_T_boundary
from qcpower.phase_boundary import boundary_temperature, evaluate_point, sweep
from qcpower.spin_hilbert import embed
from qcpower.thermal_state import thermal_state
from qcpower.unit_models import (
    Model,
    ModelParams,
    analytic_ground_energy,
    analytic_ground_state,
    detect_transition,
    eigensystem,
    parameter_for_deformation,
)

try:
    from conftest import ACCEPTANCE
except ImportError:  # direct execution outside pytest
    ACCEPTANCE = {}

PERCOLATION_TRIALS = 200
PERCOLATION_L = 128


def record(n, ok, text):
    line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {text}"
    ACCEPTANCE[n] = line
    print(line)
    return ok


def check_01():
    eigensystem.cache_clear()
    t0 = time.perf_counter()
    worst = 0.0
    for model in Model:
        for v in np.linspace(-4.0, 4.0, 50):
            p = ModelParams(model, v)
            worst = max(worst, abs(eigensystem(p)[0][0] - analytic_ground_energy(p)))
    dt = time.perf_counter() - t0
    return record(1, worst < 1e-9 and dt < 2.0,
                  f"ground energy closed forms, 2 x 50 points: max |dE0| = {worst:.2e} (< 1e-9), {dt:.2f} s (< 2 s)")


def check_02():
    worst = 1.0
    for d in np.linspace(-1.95, 4.0, 20):
        p = ModelParams.xxz(d)
        overlap = abs(np.vdot(eigensystem(p)[1][:, 0], analytic_ground_state(p)))
        worst = min(worst, overlap)
    return record(2, worst > 1 - 1e-9,
                  f"ground state overlap, 20 points delta > -2: min = 1 - {1 - worst:.1e} (> 1 - 1e-9)")


def check_03():
    # S.(s1+s2+s3) = [F(F+1) - S(S+1) - J(J+1)]/2 with J in {3/2, 1/2, 1/2}, S = 3/2
    levels = []
    for J, mult in ((1.5, 1), (0.5, 2)):
        for F in np.arange(abs(1.5 - J), 1.5 + J + 1):
            levels += [(F * (F + 1) - 3.75 - J * (J + 1)) / 2] * int(mult * (2 * F + 1))
    levels = np.sort(levels)
    oracle_gap = np.unique(np.round(levels, 12))[1] - levels[0]
    w = eigensystem(ModelParams.xxz(0.0))[0]
    gap = np.unique(np.round(w, 9))[1] - w[0]
    ok = abs(gap - 1.0) < 1e-9 and abs(oracle_gap - 1.0) < 1e-12 and np.allclose(w, levels, atol=1e-9)
    return record(3, ok, f"Heisenberg gap = {gap:.12f} (oracle {oracle_gap:.3f}, full level list matches)")


def check_04():
    xxz = detect_transition(Model.XXZ, np.arange(-4.0, 0.0 + 1e-9, 0.01))
    aniso = detect_transition(Model.ANISO, np.arange(-4.0, 4.0 + 1e-9, 0.01))
    ok = len(xxz.kinks) == 1 and not aniso.kinks
    if ok:
        k = xxz.kinks[0]
        ok = abs(k.location + 2.0) <= 0.01 and abs(abs(k.slope_jump) - 2.70) <= 0.05
        text = f"one kink at {k.location:.4f} with slope jump {abs(k.slope_jump):.3f}; aniso kinks: 0"
    else:
        text = f"kinks found: xxz {len(xxz.kinks)}, aniso {len(aniso.kinks)}"
    return record(4, ok, "energy kink detection: " + text)


def check_05():
    rng = np.random.default_rng(20240)
    lo = 1 / math.sqrt(3)
    worst = 0.0
    for a in rng.uniform(lo, 4.0, 100):
        povm = povm_standard(a)
        worst = max(worst, np.linalg.norm(sum(F.conj().T @ F for F in povm.elements.values()) - np.eye(4), 2))
    for a in rng.uniform(1e-3, lo * (1 - 1e-12), 100):
        povm = povm_lossy(a)
        worst = max(worst, np.linalg.norm(sum(F.conj().T @ F for F in povm.elements.values()) - np.eye(4), 2))
    return record(5, worst < 1e-12, f"POVM completeness on 2 x 100 random a: max norm = {worst:.1e} (< 1e-12)")


PUBLISHED = {
    "I": 0.9942, "Z0": 3.45e-3,
    "X1": 3.84e-4, "Z0X1": 3.84e-4, "X2": 3.84e-4, "Z0X2": 3.84e-4, "X3": 3.84e-4, "Z0X3": 3.84e-4,
    "X1X2": 2.38e-9, "Z0X1X2": 2.38e-9, "X2X3": 2.38e-9, "Z0X2X3": 2.38e-9,
    "X1X3": 2.38e-9, "Z0X1X3": 2.38e-9,
}
TINY = ("X0", "Z0X0")


def reference_distribution():
    rho = distill_channel(thermal_state(ModelParams.xxz(0.0), 0.16), 1.0).rho16
    return extract_error_probs(twirl(rho))


def check_06():
    eigensystem.cache_clear()
    t0 = time.perf_counter()
    dist = reference_distribution()
    dt = time.perf_counter() - t0
    bad = []
    for label, printed in PUBLISHED.items():
        # one unit of the last printed digit; the printed values are truncated
        unit = 1e-4 if label == "I" else 10 ** (math.floor(math.log10(printed)) - 2)
        if abs(dist[label] - printed) > unit:
            bad.append(f"{label}={dist[label]:.4g}")
    bad += [f"{k}={dist[k]:.2g}" for k in TINY if not dist[k] < 1e-14]
    ok = not bad and dt < 1.0
    detail = "all 16 classes agree" if not bad else "mismatch " + ", ".join(bad)
    return record(6, ok, f"Pauli class table at delta=0, T=0.16: {detail}; {dt:.2f} s (< 1 s)")


def check_07():
    worst = 0.0
    for a in np.linspace(0.05, 0.57, 20):
        p = ModelParams.aniso(parameter_for_deformation(a, Model.ANISO))
        rho = thermal_state(p, 0.0).rho
        M = embed(povm_lossy(a).elements["z"], 0).matrix
        worst = max(worst, abs(np.real(np.trace(M @ rho @ M.conj().T)) - p_delete(a)))
    keep = 1 - p_delete(math.sqrt(0.211))
    ok = worst < 1e-10 and abs(keep - 0.697) <= 0.002
    return record(7, ok, f"p_delete closed form vs trace, 20 a: max diff {worst:.1e}; 1 - p_delete(a^2=0.211) = {keep:.4f}")


def honeycomb_estimate():
    return site_threshold(LatticeSpec("honeycomb", PERCOLATION_L), trials=PERCOLATION_TRIALS, seed=0)


def check_08():
    exact = zero_T_boundary(Model.XXZ, p_th=0.697)
    mc_est = honeycomb_estimate()
    mc = zero_T_boundary(Model.XXZ, mc_est)
    ok = abs(exact + 1.2882) <= 0.005 and abs(mc + 1.2882) <= 0.005
    return record(8, ok, f"zero-T boundary delta*: {exact:.4f} (p_th 0.697), {mc:.4f} (Monte Carlo p_th {mc_est.p_th:.4f})")


def check_09():
    targets = {"honeycomb": 0.697, "square": 0.5927, "square-octagon": 0.7297}
    t0 = time.perf_counter()
    parts, ok = [], True
    for kind, ref in targets.items():
        est = site_threshold(LatticeSpec(kind, PERCOLATION_L), trials=PERCOLATION_TRIALS, seed=0)
        ok &= abs(est.p_th - ref) <= 0.008
        parts.append(f"{kind} {est.p_th:.4f}+-{est.stderr:.4f}")
    dt = time.perf_counter() - t0
    return record(9, bool(ok), f"site thresholds L={PERCOLATION_L}, {PERCOLATION_TRIALS} trials: "
                  + ", ".join(parts) + f" (ref +-0.008); {dt:.1f} s")


def check_10():
    report = verify_propagation_oracle()
    branches = min(r["branches"] for r in report.rows)
    ok = report.passed and report.summary() == "8/8 rules verified" and equivalent("XC", "ZUZLZDZR")
    return record(10, ok, f"propagation oracle: {report.summary()}, >= {branches} branches per rule, XC == ZUZLZDZR")


def check_11():
    p_z = phase_error_rate(reference_distribution())
    ok = abs(p_z / 1.53e-2 - 1) <= 0.02
    return record(11, ok, f"p_z from computed distribution = {p_z:.4e} (1.53e-2 +- 2%)")


def check_12():
    b3 = boundary_temperature(Model.XXZ, 0.0, "3d")
    b2 = boundary_temperature(Model.XXZ, 0.0, "2d")
    ratio = b3.T_star / b2.T_star
    a = 2.5 <= ratio <= 5
    temps = np.round(np.arange(0.0, 0.4001, 0.02), 12)
    params = np.round(np.arange(-2.0, 2.0001, 0.25), 12)
    diag = sweep(Model.XXZ, params, temps, "3d", workers=os.cpu_count() or 1)
    _, _, mask = diag.universal_mask()
    b = all(not np.any(np.diff(row.astype(int)) > 0) for row in mask)
    low = sweep(Model.XXZ, np.round(np.arange(-4.0, -2.001, 0.1), 12), temps, "3d")
    c = not any(pt.universal_2d or pt.universal_3d for pt in low.grid)
    d = evaluate_point(ModelParams.xxz(0.0), 0.16).universal_3d
    ok = a and b and c and d
    return record(12, ok, f"phase diagram: (a) T*3D/T*2D = {b3.T_star:.4f}/{b2.T_star:.4f} = {ratio:.2f} "
                  f"[{'ok' if a else 'x'}]; (b) monotone [{'ok' if b else 'x'}]; (c) none for delta < -2 "
                  f"[{'ok' if c else 'x'}]; (d) 3D universal at (0, 0.16) [{'ok' if d else 'x'}]")


def _cli_outputs(workdir, tag):
    cmds = {
        "perc.csv": ["percolation", "--lattice", "square", "--size", "48", "--trials", "60", "--seed", "3"],
        "kcurve.csv": ["kcurve", "--loss-range", "0:0.3:0.1", "--size", "32", "--trials", "4", "--seed", "3"],
        "phase3d.csv": ["phase3d", "--model", "xxz", "--delta-range", "-1:1:0.5", "--temp-range", "0:0.2:0.05"],
        "phase2d.json": ["phase2d", "--model", "aniso", "--dz-range", "-1:0:0.5", "--temp-range", "0:0.04:0.02",
                         "--k-size", "32", "--k-trials", "4", "--format", "json"],
    }
    out = {}
    for name, argv in cmds.items():
        path = os.path.join(workdir, f"{tag}_{name}")
        subprocess.run([sys.executable, "-m", "qcpower", *argv, "-o", path], check=True)
        with open(path) as fh:
            lines = [l for l in fh if not l.startswith("# created:") and '"created":' not in l]
        out[name] = "".join(lines)
        boundary = path.replace(".csv", "_boundary.csv")
        if name.endswith(".csv") and os.path.exists(boundary):
            with open(boundary) as fh:
                out[name + ":boundary"] = "".join(l for l in fh if not l.startswith("# created:"))
    return out


def check_13():
    with tempfile.TemporaryDirectory() as tmp:
        first = _cli_outputs(tmp, "a")
        second = _cli_outputs(tmp, "b")
    same = [k for k in first if first[k] == second[k]]
    ok = len(same) == len(first) == len(second)
    return record(13, ok, f"determinism: {len(same)}/{len(first)} output files byte-identical across runs "
                  "(created timestamp excluded)")


def test_ground_energy_closed_forms():
    assert check_01()


def test_ground_state_reproduction():
    assert check_02()


def test_heisenberg_gap():
    assert check_03()


def test_first_order_transition():
    assert check_04()


def test_povm_completeness():
    assert check_05()


def test_pauli_class_table():
    assert check_06()


def test_p_delete():
    assert check_07()


def test_zero_temperature_boundary():
    assert check_08()


def test_percolation_thresholds():
    assert check_09()


def test_propagation_oracle():
    assert check_10()


def test_phase_error_composition():
    assert check_11()


def test_phase_diagram_properties():
    assert check_12()


def test_determinism():
    assert check_13()


if __name__ == "__main__":
    checks = [globals()[f"check_{n:02d}"] for n in range(1, 14)]
    results = [c() for c in checks]
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)

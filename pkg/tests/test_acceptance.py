"""Acceptance suite: quantitative anchors for the noise study, one test per
criterion, printing a [PASS]/[FAIL] line per checked value (run with -s to
see them live).

Optimizer-based criteria run 3 fixed seeds and keep the best FOM (global
search protocol); argmin criteria use a majority vote across seeds. The
noiseless table runs the optimizer defaults; the relaxation tables use a
reduced population/generation budget (calibrated to converge on those
plateaued landscapes) to keep the suite in the minutes range.
"""

import time

import numpy as np

from noisyqaoa import quantum
from noisyqaoa.gates import cnot, h, rx, u1, u3
from noisyqaoa.maxcut import (BUILTIN_GRAPHS, QaoaParams, build_qaoa_circuit,
                              circuit_latency, cost_fidelity_estimate,
                              cost_hamiltonian_latency, expectation_for_angles,
                              fom_objective, max_cut_brute_force)
from noisyqaoa.noise import (DeviceModel, NoiseToggles, amplitude_damping_kraus,
                             apply_noisy_gate, depolarizing_kraus,
                             phase_damping_kraus, simulate_circuit,
                             toggles_for_series)
from noisyqaoa.cli import ExperimentSpec, run_motivation
from noisyqaoa.optimize import DEConfig, differential_evolution, qaoa_bounds

from conftest import random_density
import oracle

DEVICE = DeviceModel()
K33 = BUILTIN_GRAPHS["6n-yutsis"]
K4 = BUILTIN_GRAPHS["4n-yutsis"]
SEEDS = (1, 2, 3)


def report(lines, name, ok, detail):
    lines.append(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    print(lines[-1], flush=True)
    return ok


def finish(label, lines, all_ok):
    summary = "\n".join(lines)
    assert all_ok, f"{label} has failing checks:\n{summary}"


def best_fom_over_seeds(graph, p, device, toggles, config):
    values = []
    for seed in SEEDS:
        cfg = DEConfig(population=config.population,
                       max_generations=config.max_generations, seed=seed)
        res = differential_evolution(fom_objective(graph, p, device, toggles),
                                     qaoa_bounds(p), cfg)
        values.append(res.best_value)
    return min(values), values


def test_criterion_1_expectation_arithmetic():
    lines, ok = [], True
    psi = np.array([0.8, 0.6], dtype=complex)
    sigma_z = np.diag([1.0, -1.0]).astype(complex)
    value = quantum.expectation(psi, sigma_z)
    ok &= report(lines, "criterion 1 (<sigma_z> of 0.8|0>+0.6|1>)",
                 abs(value - 0.28) <= 1e-12, f"value={value!r} target=0.28 +/-1e-12")
    finish("criterion 1", lines, ok)


def test_criterion_2_gate_error_walkthrough():
    lines, ok = [], True
    psi = np.array([0, 1, 0, 1], dtype=complex) / np.sqrt(2)
    ge_only = NoiseToggles(gate_error=True)
    gates = [cnot(0, 1), u1(-1.0, 1), cnot(0, 1)]

    def run():
        rho = quantum.density_from_pure(psi)
        for gate in gates:
            rho = apply_noisy_gate(rho, gate, DEVICE, ge_only)
        return rho

    rho = run()  # warm all caches before timing
    elapsed = min(_timed(run) for _ in range(10))
    diag = np.real(np.diag(rho))
    target = np.array([0.038, 0.462, 0.038, 0.462])
    ok &= report(lines, "criterion 2 (walkthrough diagonal)",
                 np.abs(diag - target).max() <= 5e-4,
                 f"diag={np.round(diag, 6)} target={target} +/-5e-4")
    ok &= report(lines, "criterion 2 (runtime)", elapsed < 1e-3,
                 f"{elapsed * 1e6:.0f} us per walkthrough (< 1 ms)")
    finish("criterion 2", lines, ok)


def _timed(fn):
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


def test_criterion_3_latency_model():
    lines, ok = [], True
    p1 = circuit_latency(build_qaoa_circuit(K4, QaoaParams((1.0,), (1.0,))), DEVICE)
    p2 = circuit_latency(build_qaoa_circuit(K4, QaoaParams((1.0, 1.0), (1.0, 1.0))), DEVICE)
    chet = cost_hamiltonian_latency(K4, DEVICE)
    ok &= report(lines, "criterion 3 (K4 p=1 latency)", p1 == 9360.0, f"{p1} ns == 9360 ns")
    ok &= report(lines, "criterion 3 (K4 p=2 latency)", p2 == 18480.0, f"{p2} ns == 18480 ns")
    ok &= report(lines, "criterion 3 (K4 CHET)", chet == 8640.0, f"{chet} ns == 8640 ns")
    finish("criterion 3", lines, ok)


def test_criterion_4_fidelity_estimates():
    lines, ok = [], True
    for n, target in ((4, 0.721), (6, 0.613), (9, 0.480)):
        value = cost_fidelity_estimate(n, 0.04)
        ok &= report(lines, f"criterion 4 (n={n}, e=0.04)",
                     abs(value - target) <= 5e-4, f"{value:.4f} target={target} +/-5e-4")
    value = cost_fidelity_estimate(1000, 0.001)
    ok &= report(lines, "criterion 4 (n=1000, e=0.001)",
                 abs(value - 0.135) <= 5e-3, f"{value:.4f} target=0.135 +/-5e-3")
    finish("criterion 4", lines, ok)


def test_criterion_5_noiseless_fom_table():
    lines, ok = [], True
    targets = {1: 0.308, 2: 0.144, 3: 0.056, 4: 0.001}
    pure = toggles_for_series("PURE")
    for p, target in targets.items():
        best, values = best_fom_over_seeds(K33, p, DEVICE, pure, DEConfig())
        ok &= report(lines, f"criterion 5 (PURE p={p})",
                     abs(best - target) <= 0.03,
                     f"fom={best:.4f} target={target} +/-0.03 "
                     f"(seeds: {[round(v, 4) for v in values]})")
    finish("criterion 5", lines, ok)


T1_BUDGET = DEConfig(population=60, max_generations=100)


def test_criterion_6_t1_fom_table():
    lines, ok = [], True
    targets = {1: 0.364, 2: 0.333, 3: 0.361, 4: 0.382}
    t1 = toggles_for_series("T1")
    best = {}
    for p, target in targets.items():
        best[p], values = best_fom_over_seeds(K33, p, DEVICE, t1, T1_BUDGET)
        ok &= report(lines, f"criterion 6 (T1 p={p})",
                     abs(best[p] - target) <= 0.04,
                     f"fom={best[p]:.4f} target={target} +/-0.04 "
                     f"(seeds: {[round(v, 4) for v in values]})")
    ok &= report(lines, "criterion 6 (ordering p2 < p1)", best[2] < best[1],
                 f"{best[2]:.4f} < {best[1]:.4f}")
    ok &= report(lines, "criterion 6 (ordering p4 > p2)", best[4] > best[2],
                 f"{best[4]:.4f} > {best[2]:.4f}")
    finish("criterion 6", lines, ok)


def test_criterion_7_optimal_p_under_t1_scaling():
    from noisyqaoa.noise import scaled_device
    lines, ok = [], True
    t1 = toggles_for_series("T1")
    for multiplier, expected_p in ((1.0, 2), (3.0, 3)):
        device = scaled_device(DEVICE, t1=multiplier)
        votes = []
        for seed in SEEDS:
            cfg = DEConfig(population=T1_BUDGET.population,
                           max_generations=T1_BUDGET.max_generations, seed=seed)
            foms = {}
            for p in (1, 2, 3, 4):
                res = differential_evolution(fom_objective(K33, p, device, t1),
                                             qaoa_bounds(p), cfg)
                foms[p] = res.best_value
            votes.append(min(foms, key=foms.get))
        majority = max(set(votes), key=votes.count)
        ok &= report(lines, f"criterion 7 (argmin p at {multiplier:g}xT1)",
                     majority == expected_p,
                     f"votes={votes} majority={majority} expected={expected_p}")
    finish("criterion 7", lines, ok)


def test_criterion_8_landscape_maxima():
    lines, ok = [], True
    gammas = np.linspace(0.0, 2 * np.pi, 50)
    betas = np.linspace(0.0, 2 * np.pi, 50)

    def grid_max(toggles):
        best = -np.inf
        for g in gammas:
            for b in betas:
                best = max(best, expectation_for_angles(K4, (g,), (b,), DEVICE, toggles))
        return best

    noiseless = grid_max(toggles_for_series("PURE"))
    ok &= report(lines, "criterion 8 (noiseless max)", abs(noiseless - 3.7) <= 0.05,
                 f"max={noiseless:.4f} target=3.7 +/-0.05")
    noisy = grid_max(toggles_for_series("COMBINED"))
    ok &= report(lines, "criterion 8 (combined-noise max)", abs(noisy - 3.1) <= 0.1,
                 f"max={noisy:.4f} target=3.1 +/-0.1")
    finish("criterion 8", lines, ok)


def test_criterion_9_motivation_sweep():
    lines, ok = [], True
    spec = ExperimentSpec(kind="motivation", graphs=(), resolution=100)
    _, _, rows = run_motivation(spec)
    thetas = np.array(sorted({r["theta"] for r in rows}))
    nearest = thetas[np.argmin(np.abs(thetas - np.pi))]
    pure = {r["theta"]: r["expectation"] for r in rows if r["series"] == "PURE"}
    noisy_min = min(r["expectation"] for r in rows if r["series"] == "COMBINED")
    argmin = min(pure, key=pure.get)
    ok &= report(lines, "criterion 9 (noiseless argmin)", argmin == nearest,
                 f"argmin theta={argmin:.6f}, grid point nearest pi={nearest:.6f}")
    ok &= report(lines, "criterion 9 (noiseless min)", abs(pure[argmin] + 1.0) <= 1e-9,
                 f"min={pure[argmin]:.12f} == -1")
    ok &= report(lines, "criterion 9 (noisy min > -1)", noisy_min > -1.0,
                 f"min={noisy_min:.6f} > -1")
    finish("criterion 9", lines, ok)


def test_criterion_10_property_suite(rng):
    lines, ok = [], True

    # Kraus completeness at 1e-12
    worst = 0.0
    for p in (0.0, 0.04, 0.08, 0.5, 1.0):
        for n in (1, 2):
            ops = depolarizing_kraus(p, n)
            worst = max(worst, np.abs(sum(e.conj().T @ e for e in ops) - np.eye(2 ** n)).max())
    for t in (0.0, 60.0, 720.0, 45000.0):
        for ops in (amplitude_damping_kraus(t, 45000.0), phase_damping_kraus(t, 20000.0)):
            worst = max(worst, np.abs(sum(e.conj().T @ e for e in ops) - np.eye(2)).max())
    ok &= report(lines, "criterion 10 (Kraus completeness)", worst <= 1e-12,
                 f"max deviation {worst:.2e} <= 1e-12")

    # trace/Hermiticity across 1e3 random noisy gate applications
    rho = random_density(rng, 3)
    all_on = toggles_for_series("COMBINED")
    worst_tr, worst_herm = 0.0, 0.0
    for _ in range(1000):
        r = int(rng.integers(0, 4))
        if r == 3:
            pair = rng.choice(3, size=2, replace=False)
            gate = cnot(int(pair[0]), int(pair[1]))
        elif r == 2:
            gate = u1(float(rng.uniform(0, 2 * np.pi)), int(rng.integers(0, 3)))
        elif r == 1:
            gate = rx(float(rng.uniform(0, np.pi)), int(rng.integers(0, 3)))
        else:
            gate = h(int(rng.integers(0, 3)))
        rho = apply_noisy_gate(rho, gate, DEVICE, all_on)
        worst_tr = max(worst_tr, abs(np.trace(rho) - 1.0))
        worst_herm = max(worst_herm, np.abs(rho - rho.conj().T).max())
    ok &= report(lines, "criterion 10 (trace preservation)", worst_tr <= 1e-9,
                 f"max |tr-1| {worst_tr:.2e} <= 1e-9 over 1000 noisy gates")
    ok &= report(lines, "criterion 10 (Hermiticity)", worst_herm <= 1e-9,
                 f"max deviation {worst_herm:.2e} <= 1e-9")

    # noiseless simulator vs statevector oracle on random <=4-qubit circuits
    worst = 0.0
    off = toggles_for_series("PURE")
    for _ in range(6):
        n = int(rng.integers(2, 5))
        gate_list = []
        for _ in range(int(rng.integers(10, 31))):
            c = rng.integers(0, 4)
            angle = float(rng.uniform(0, 2 * np.pi))
            if c == 0:
                pair = rng.choice(n, size=2, replace=False)
                gate_list.append(cnot(int(pair[0]), int(pair[1])))
            elif c == 1:
                gate_list.append(h(int(rng.integers(0, n))))
            elif c == 2:
                gate_list.append(u1(angle, int(rng.integers(0, n))))
            else:
                gate_list.append(u3(angle, -angle, angle / 3, int(rng.integers(0, n))))
        rho = simulate_circuit(gate_list, DEVICE, off, n_qubits=n)
        psi = oracle.run_statevector(gate_list, n)
        worst = max(worst, np.abs(rho - np.outer(psi, psi.conj())).max())
    ok &= report(lines, "criterion 10 (statevector oracle)", worst <= 1e-9,
                 f"max deviation {worst:.2e} <= 1e-9")

    # noiseless cost layer preserves basis probabilities
    plus = quantum.density_from_pure(quantum.plus_state(4))
    gates = []
    for (u, v, _) in K4.edges:
        gates.extend([cnot(u, v), u1(-1.3, v), cnot(u, v)])
    out = simulate_circuit(gates, DEVICE, off, initial=plus)
    dev = np.abs(np.real(np.diag(out)) - 1 / 16).max()
    ok &= report(lines, "criterion 10 (cost layer diagonal)", dev <= 1e-12,
                 f"max diagonal change {dev:.2e} <= 1e-12")

    # brute-force MaxCut oracle values
    expected = {"2n-edge": 1.0, "4n-yutsis": 4.0, "6n-yutsis": 9.0,
                "6n-prism": 7.0, "4n-irregular": 3.0}
    got = {name: max_cut_brute_force(BUILTIN_GRAPHS[name])[0] for name in expected}
    ok &= report(lines, "criterion 10 (MaxCut oracle)", got == expected, f"{got}")

    # DE determinism: bit-identical reruns
    objective = fom_objective(BUILTIN_GRAPHS["2n-edge"], 1, DEVICE, off)
    cfg = DEConfig(population=20, max_generations=30, seed=12345)
    a = differential_evolution(objective, qaoa_bounds(1), cfg)
    b = differential_evolution(objective, qaoa_bounds(1), cfg)
    identical = (a.best_value == b.best_value
                 and (a.best_params == b.best_params).all()
                 and (a.history == b.history).all()
                 and a.evaluations == b.evaluations)
    ok &= report(lines, "criterion 10 (DE determinism)", identical,
                 f"best={a.best_value:.6f}, rerun identical={identical}")
    finish("criterion 10", lines, ok)

"""Acceptance criteria, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary ends
with one PASS/FAIL line per criterion.
"""
import itertools
import json
import math
import sys
import time

import numpy as np
import pytest

from fockherald.circuits import (
    DEFAULT_LAMBDA,
    SourceSpec,
    assemble_input,
    build_fig2,
    build_fig3,
    chi_prep_damping,
    chi_prep_herald_interference,
    closed_forms,
    psi_tez_reduce,
    scan_epsilon,
    solve_cancellation,
)
from fockherald.cli import EXIT_OK, main
from fockherald.fock import CutoffPolicy, StateVector, enumerate_basis, inner_product, photon_number_support
from fockherald.herald import HeraldPattern, epsilon_ratio, herald_after
from fockherald.interferometer import (
    Circuit,
    ModeUnitary,
    apply,
    compose,
    embed,
    pairing_unitary,
    permanent,
)
from fockherald.oracle import dense_evolve, naive_permanent
from fockherald.sources import smsv, tmss
from fockherald.specs import unitary_to_json
from helpers import FIXTURE_WEAK, fixture_unitary

TOL = 1e-10
GRID_A = (0.0, 0.25, 0.5, 0.75, 1.0)
GRID_B = (0.5, 0.625, 0.75, 0.875, 1.0)
GRID_LAM = (0.3, math.sqrt(0.5), 0.8)

# golden values frozen from this implementation
B_STAR = 0.9725270913307598
P_SUCC_STAR = 0.17170567918275045
CHI_GOLDEN = {
    0.6: (0.052083333333333356, 0.06164080307668093),
    0.75: (0.041666666666666685, 0.05927707211709894),
    0.9: (0.034722222222222245, 0.05787037037037037),
}


def detail(request, text):
    request.node.user_properties.append(("detail", text))


def max_dev(result, table):
    keys = set(table) | set(result.amplitude_table)
    return max(abs(result.amplitude_table.get(k, 0) - table.get(k, 0)) for k in keys)


@pytest.fixture(scope="module")
def fig3_grid():
    start = time.perf_counter()
    rows = []
    for a, b, lam in itertools.product(GRID_A, GRID_B, GRID_LAM):
        res = build_fig3(a, b, lam, validate=False).run()
        rows.append((a, b, lam, res, closed_forms(a, b, lam)))
    return rows, time.perf_counter() - start


@pytest.mark.criterion(1)
def test_c1_closed_form_table(request, fig3_grid):
    rows, elapsed = fig3_grid
    printed = [max_dev(res, cf.amplitude_table()) for *_, res, cf in rows]
    normalized = [max_dev(res, cf.amplitude_table(normalized=True)) for *_, res, cf in rows]
    bad = sum(d > TOL for d in printed)
    detail(request, f"{bad}/{len(rows)} grid points off the tabulated forms by > {TOL:g} "
                    f"(worst {max(printed):.2e}); normalized table worst {max(normalized):.2e}; {elapsed:.2f} s")
    assert elapsed < 10
    assert bad == 0


@pytest.mark.criterion(2)
def test_c2_success_probability(request, fig3_grid):
    rows, _ = fig3_grid
    devs = [abs(res.success_probability - cf.p_succ) for *_, res, cf in rows]
    on_curve = [d for (a, b, lam, res, cf), d in zip(rows, devs) if abs(cf.beta_minus) < 1e-15]
    bad = sum(d > TOL for d in devs)
    detail(request, f"{bad}/{len(rows)} grid points off by > {TOL:g} (worst {max(devs):.2e}); "
                    f"{len(on_curve)} cancellation points worst {max(on_curve):.2e}")
    assert bad == 0


@pytest.mark.criterion(3)
def test_c3_epsilon_match(request):
    b, cf = scan_epsilon(0.01, math.sqrt(0.5))
    res = build_fig3(solve_cancellation(b), b, math.sqrt(0.5)).run()
    eps_sim = epsilon_ratio(res, (1, 1, 1, 1))
    detail(request, f"b* = {b:.12f}, epsilon = {cf.epsilon:.9f} (simulated {eps_sim:.9f}), "
                    f"P_succ = {res.success_probability:.9f}")
    assert abs(cf.epsilon - 0.01) <= 1e-6
    assert abs(eps_sim - 0.01) <= 1e-6
    assert b == pytest.approx(B_STAR, abs=1e-9)
    assert res.success_probability == pytest.approx(P_SUCC_STAR, rel=1e-9)
    assert res.success_probability > 0.01


@pytest.mark.criterion(4)
def test_c4_fig2_support(request):
    rng = np.random.default_rng(4)
    patterns = [(2, 0), (1, 1), (0, 2)]
    violations = 0
    fired = 0
    for _ in range(100):
        u = ModeUnitary.random(2, rng)
        lam = rng.uniform(0, 0.8)
        pattern = patterns[rng.integers(3)]
        res = build_fig2(u, lam, pattern, validate=False).run()
        if res.succeeded:
            fired += 1
            violations += not photon_number_support(res.conditional_state) <= {0, 4}
    detail(request, f"{violations} violations in 100 instances ({fired} with nonzero herald probability)")
    assert violations == 0


@pytest.mark.criterion(5)
def test_c5_idler_only(request):
    rng = np.random.default_rng(5)
    cut = CutoffPolicy(6)
    violations = 0
    for k in (1, 2, 3):
        modes = 2 * k
        sources = [SourceSpec("tmss", (i, k + i), {"lambda": rng.uniform(0.2, 0.8)}) for i in range(k)]
        state = assemble_input(modes, sources, cut)
        for _ in range(50):
            u = embed(ModeUnitary.random(k, rng), tuple(range(k, modes)), modes)
            total = int(rng.integers(0, 4))
            counts = tuple(np.bincount(rng.integers(0, k, size=total), minlength=k)) if total else (0,) * k
            res = herald_after(u, state, HeraldPattern(tuple(range(k, modes)), counts))
            if res.succeeded and len(photon_number_support(res.conditional_state)) != 1:
                violations += 1
    detail(request, f"{violations} violations over 150 idler-only unitaries")
    assert violations == 0


@pytest.mark.criterion(6)
def test_c6_psi_tez(request):
    worst_other = 0.0
    failures = []
    for b in (0.55, 0.65, 0.75, 0.85, 0.95):
        res = build_fig3(solve_cancellation(b), b, DEFAULT_LAMBDA).run()
        red = psi_tez_reduce(res)
        # independent route: recombine without any thresholding
        u = compose(Circuit(4).then("beamsplitter", (1, 0), a=0.5))
        full = apply(u, StateVector(4, res.conditional_state.terms, CutoffPolicy(8, 0.0)))
        big = sorted(full.terms.items(), key=lambda kv: -abs(kv[1]))
        worst_other = max([worst_other] + [abs(v) for _, v in big[2:]])
        keys = {k for k, _ in big[:2]}
        if len(red.state) != 2 or set(red.state.terms) != keys or keys != {(0, 0, 0, 0), (2, 0, 1, 1)}:
            failures.append(b)
        norm = sum(abs(v) ** 2 for _, v in big[:2])
        if abs(norm - 1) > TOL or abs(red.c - abs(full.amplitude((0, 0, 0, 0))) ** 2) > TOL:
            failures.append(b)
    detail(request, f"two-term form at {5 - len(set(failures))}/5 points; largest other amplitude {worst_other:.1e}")
    assert not failures
    assert worst_other < TOL


@pytest.mark.criterion(7)
def test_c7_chi_preparation(request):
    lines = []
    ok = True
    for b, (g_damp, g_inter) in CHI_GOLDEN.items():
        _, p_damp = chi_prep_damping(b, DEFAULT_LAMBDA)
        _, p_inter = chi_prep_herald_interference(b, DEFAULT_LAMBDA)
        lines.append(f"b={b}: {p_inter:.6f} > {p_damp:.6f}")
        ok &= p_inter > p_damp
        ok &= abs(p_damp - g_damp) <= 1e-12 and abs(p_inter - g_inter) <= 1e-12
    detail(request, "; ".join(lines))
    assert ok


def random_circuit(rng, modes):
    c = Circuit(modes)
    for _ in range(int(rng.integers(1, 6))):
        kind = rng.choice(["beamsplitter", "phase", "general"])
        if kind == "phase":
            c = c.then("phase", (int(rng.integers(modes)),), phi=float(rng.uniform(0, 2 * np.pi)))
        elif modes == 1:
            continue
        elif kind == "beamsplitter":
            pair = tuple(int(x) for x in rng.choice(modes, 2, replace=False))
            c = c.then("beamsplitter", pair, a=float(rng.uniform()))
        else:
            k = int(rng.integers(2, modes + 1))
            targets = tuple(int(x) for x in rng.choice(modes, k, replace=False))
            c = c.then("general", targets, matrix=ModeUnitary.random(k, rng))
    return c


@pytest.mark.criterion(8)
def test_c8_oracle_equivalence(request):
    rng = np.random.default_rng(8)
    worst_state = 0.0
    for _ in range(100):
        modes = int(rng.integers(1, 6))
        max_n = int(rng.integers(1, 6))
        u = compose(random_circuit(rng, modes))
        basis = enumerate_basis(modes, max_n)
        idx = rng.choice(len(basis), size=min(4, len(basis)), replace=False)
        amps = rng.normal(size=len(idx)) + 1j * rng.normal(size=len(idx))
        s = StateVector(modes, {basis[i]: a / np.linalg.norm(amps) for i, a in zip(idx, amps)}, CutoffPolicy(max_n, 0.0))
        fast = apply(u, s)
        dense = dense_evolve(u, max_n).apply(s.terms)
        keys = set(fast.terms) | set(dense)
        worst_state = max(worst_state, max(abs(fast.amplitude(k) - dense.get(k, 0)) for k in keys))
    worst_perm = 0.0
    for _ in range(60):
        n = int(rng.integers(1, 8))
        m = np.sqrt(rng.uniform(size=(n, n))) * np.exp(2j * np.pi * rng.uniform(size=(n, n)))
        worst_perm = max(worst_perm, abs(permanent(m) - naive_permanent(m)))
    detail(request, f"fast vs dense worst {worst_state:.1e}; Ryser vs naive worst {worst_perm:.1e}")
    assert worst_state <= TOL
    assert worst_perm <= TOL


@pytest.mark.criterion(9)
def test_c9_smsv_tmss(request):
    cut = CutoffPolicy(12)
    lines = []
    ok = True
    for r in (0.3403, 0.7849, 0.9350):
        pair = StateVector(2, {(i[0], j[0]): x * y for i, x in smsv(r, cut).terms.items()
                               for j, y in smsv(r, cut).terms.items()}, cut).truncated(12)
        out = apply(pairing_unitary(), pair)
        target = tmss(r, cut)
        overlap = inner_product(target, out).real
        deficit = target.deficit
        lines.append(f"r={r}: overlap {overlap:.12f} vs bound {1 - deficit:.12f}")
        ok &= overlap >= 1 - deficit - 1e-12
    detail(request, "; ".join(lines))
    assert ok


@pytest.mark.criterion(10)
def test_c10_verify_fixture(request, tmp_path, capsys):
    path = tmp_path / "fixture_unitary.json"
    path.write_text(json.dumps(unitary_to_json(fixture_unitary())))
    code = main(["verify", "--unitary", str(path), "--squeezing", "0.5,0.5,0.5,0.5", "--herald", "1:1,3:1",
                 "--ancillae", "2", "--cutoff", "6", "--zero-threshold", "1e-22"])
    rep = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK
    # hand-derived branch: one pair photon per signal, bunched by the balanced splitter,
    # then mode 0 leaks into ancilla 4 with amplitude w ~ 1e-6
    lam = math.tanh(0.5)
    s1sq = (1 - lam**2) * lam**2
    a = 1 - FIXTURE_WEAK
    t, w = math.sqrt(a), math.sqrt(1 - a)
    expected = {(2, 0, 0, 0): s1sq * t**2 / math.sqrt(2), (0, 2, 0, 0): s1sq / math.sqrt(2),
                (1, 0, 1, 0): s1sq * t * w, (0, 0, 2, 0): s1sq * w**2 / math.sqrt(2)}
    amps = {tuple(e["occupations"]): e["abs"] for e in rep["result"]["amplitudes"]}
    rel = max(abs(amps[k] - v) / v for k, v in expected.items())
    verdicts = {tuple(e["occupations"]): e["verdict"] for e in rep["gray_zone"]}
    real = {k for k, v in verdicts.items() if v == "real"}
    noise = [k for k, v in verdicts.items() if v == "noise"]
    others = [v for k, v in amps.items() if k not in expected]
    detail(request, f"known amplitudes to {rel:.1e} relative; real = {sorted(real)}; "
                    f"{len(noise)} noise; largest spurious double value {max(others):.1e}")
    assert rel < 1e-9
    assert real == {(1, 0, 1, 0), (0, 0, 2, 0)}
    assert set(noise) == set(verdicts) - real
    assert all(k in verdicts for k in amps if k not in expected and amps[k] <= 1e-4)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))

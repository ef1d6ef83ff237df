"""Acceptance criteria, one test each, printing a PASS/FAIL line per criterion."""
import time

import numpy as np
import pytest

from compactferm import antisym, cli
from compactferm.experiments import antisym_histograms, phi0
from compactferm.spectral import find_peaks, fourier_spectrum
from compactferm import verify

B_TARGETS = (0.54, 0.84, 1.37, 3.17, 3.71)


@pytest.fixture
def report(capsys):
    def emit(number, title, passed, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}")
        assert passed, f"criterion {number} ({title}) failed: {detail}"
    return emit


def test_01_antisymmetrization_probabilities(report):
    t0 = time.perf_counter()
    err = verify.antisym_marginal_error(antisym.antisymmetrize(phi0()))
    sampled = antisym_histograms(5000, seed=20240)["uncomputed"]["sampled"]
    want = {"00-00": 0.5, "00-01": 0.25, "00-10": 0.25}
    z = max(abs(sampled.probabilities.get(k, 0.0) - p) / np.sqrt(p * (1 - p) / 5000) for k, p in want.items())
    elapsed = time.perf_counter() - t0
    ok = err <= 1e-10 and z <= 3 and set(sampled.counts) <= set(want) and elapsed < 1
    report(1, "antisymmetrization probabilities", ok,
           f"exact error {err:.1e}, worst sampled deviation {z:.2f} sigma, {elapsed:.2f} s")


def test_02_aux_disentangled(report):
    r = verify.check_aux_disentangled()
    report(2, "aux disentanglement", r.passed, f"1 - F = {r.measured:.1e}")


def test_03_operator_algebra(report):
    t0 = time.perf_counter()
    r = verify.check_anticommutators("A")
    elapsed = time.perf_counter() - t0
    report(3, "operator algebra", r.passed and elapsed < 10, f"max deviation {r.measured:.1e}, {elapsed:.2f} s")


def test_04_generator_equivalence(report):
    r = verify.check_generator_equivalence()
    report(4, "generator equivalence", r.passed, f"max deviation {r.measured:.1e}")


def test_05_trotter_order(report, setup_a):
    ns = (1, 2, 4, 8, 16)
    errs = verify.trotter_errors(setup_a, 0.067, ns)
    slope = float(np.polyfit(np.log(ns), np.log(errs), 1)[0])
    report(5, "Trotter order", -2.2 <= slope <= -1.8, f"log-log slope {slope:.3f} (infidelity at t = 0.067)")


def test_06_spectrum_a(report, setup_a):
    t0 = time.perf_counter()
    spec = fourier_spectrum(setup_a.oracle_series(0.067, 400))
    peaks = find_peaks(spec, 0.05)
    sampled = fourier_spectrum(setup_a.trotter_series(0.067, 400, shots=1000, seed=20241))
    f, a = sampled.positive()
    top = float(f[np.argmax(a)])
    elapsed = time.perf_counter() - t0
    ok = (len(peaks) == 1 and abs(peaks[0].frequency - 1.79) <= 0.04
          and abs(top - peaks[0].frequency) < spec.spacing / 2 and elapsed < 60)
    report(6, "spectrum row a1", ok,
           f"oracle peaks {[round(p.frequency, 3) for p in peaks]}, sampled maximum {top:.3f} eV, {elapsed:.1f} s")


def test_07_spectrum_b(report, setup_b):
    t0 = time.perf_counter()
    peaks = [p.frequency for p in find_peaks(fourier_spectrum(setup_b.oracle_series(0.067, 250)), 0.04)]
    miss = [t for t in B_TARGETS if not any(abs(f - t) <= 0.06 for f in peaks)]
    long = [p.frequency for p in find_peaks(fourier_spectrum(setup_b.oracle_series(0.067, 1000)), 0.02)]
    extra = [f for f in long if abs(f - 2.4) <= 0.06]
    elapsed = time.perf_counter() - t0
    ok = not miss and bool(extra) and elapsed < 600
    report(7, "spectrum rows b1-b5", ok,
           f"250 pts {[round(f, 3) for f in peaks]}, missing {miss}; 1000 pts near 2.4: "
           f"{[round(f, 3) for f in extra]}; {elapsed:.1f} s")


def test_08_forbidden_shell(report, setup_b):
    mask = setup_b.shell_mask(2)
    worst = 0.0
    for n, dt in ((250, 0.067), (151, 0.03)):
        traj = setup_b.propagator.trajectory(setup_b.initial_subspace_vector(), dt * np.arange(n))
        worst = max(worst, float(np.sum(np.abs(traj[..., mask]) ** 2, axis=(1, 2)).max()))
    report(8, "forbidden shell", worst < 1e-8, f"max shell probability {worst:.3e} (required < 1e-8)")


def test_09_conservation(report):
    r = verify.check_conservation("B")
    report(9, "conservation", r.passed, f"worst commutator / drift {r.measured:.1e}")


def test_10_determinism(report, tmp_path):
    def bodies(out):
        runs = [["antisym-demo", "--shots", "5000"],
                ["evolve", "-d", "A", "--shots", "1000"],
                ["spectrum", "-d", "A", "--shots", "1000"]]
        for argv in runs:
            assert cli.main(argv + ["--seed", "77", "-o", str(out)]) == 0
        return {p.name: [l for l in p.read_bytes().splitlines(True) if not l.startswith(b"#")]
                for p in sorted(out.glob("*.csv"))}

    a, b = bodies(tmp_path / "a"), bodies(tmp_path / "b")
    report(10, "determinism", a == b and len(a) == 6, f"{len(a)} files compared byte for byte")

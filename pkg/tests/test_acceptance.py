"""End-to-end acceptance checks.

Each test exercises one guaranteed property or desk-scale statistical
reproduction at its stated tolerance and prints a PASS line on success
(run with ``pytest -s`` to see them).  Several tests carry wall-clock
budgets; they are generous on purpose so slow CI boxes do not flake.
"""

import math
import time

import numpy as np
import pytest

from eigensample import (
    SparseSymStore,
    Spectrum,
    SymMatrix,
    align_estimates,
    entrywise_sparsify,
    estimate_entrywise_pipeline,
    estimate_nnz,
    estimate_norm,
    estimate_psd,
    estimate_singular,
    estimate_uniform,
    linf_spectrum_error,
    median_boost,
    spectral_norm,
    sym_eigvals,
    weyl_gap,
    zero_out_by_sparsity,
)
from eigensample.harness import (
    ExperimentConfig,
    build_matrix,
    derive_seed,
    run_experiment,
    slope_fit,
)
from eigensample.matrices import block_matrix, identity_matrix


def _report(line: str) -> None:
    print(f"PASS: {line}")


def _unit_gram(n: int, rng) -> SymMatrix:
    """PSD matrix with unit diagonal and entries in [-1, 1]."""
    g = rng.standard_normal((n, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return SymMatrix(g @ g.T)


def test_oracle_equivalence_at_full_sampling():
    """Every estimator with s = n and zeroing off reproduces the spectrum."""
    rng = np.random.default_rng(12345)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 65))
        seed = int(rng.integers(0, 2**62))
        s = float(n)

        dense = SymMatrix(rng.uniform(-1.0, 1.0, (n, n)))
        store = SparseSymStore.from_dense(dense)
        exact = sym_eigvals(dense).values
        abs_exact = np.sort(np.abs(exact))[::-1]

        for got in (
            estimate_uniform(dense, s, seed).estimates.values,
            estimate_nnz(store, s, seed, zeroing="off").estimates.values,
            estimate_entrywise_pipeline(dense, s, 1.0, seed).estimates.values,
        ):
            worst = max(worst, float(np.max(np.abs(got - exact))))
        sv = estimate_singular(dense, s, seed).values
        worst = max(worst, float(np.max(np.abs(sv - abs_exact))))

        # equal row norms force all inclusion probabilities to one
        signs = SymMatrix(np.where(rng.random((n, n)) < 0.5, 1.0, -1.0))
        sign_store = SparseSymStore.from_dense(signs)
        assert np.all(sign_store.inclusion_probs(s, "by_sqnorm") == 1.0)
        got = estimate_norm(sign_store, s, seed, zeroing="off").estimates.values
        worst = max(worst, float(np.max(np.abs(got - sym_eigvals(signs).values))))

        psd = _unit_gram(n, rng)
        got = estimate_psd(psd, s, seed).estimates.values
        worst = max(worst, float(np.max(np.abs(got - sym_eigvals(psd).values))))
    elapsed = time.perf_counter() - start

    assert worst <= 2e-8, f"worst deviation {worst:.3e} exceeds 2e-8"
    assert elapsed < 30.0, f"took {elapsed:.1f}s, budget 30s"
    _report(
        f"oracle equivalence: 200 matrices, worst deviation {worst:.2e} <= 2e-8,"
        f" {elapsed:.1f}s < 30s"
    )


def test_alignment_matches_slot_simulator():
    """Slot placement agrees with an explicit brute-force walker, exactly."""

    def simulate(vals, n, scale):
        out = [0.0] * n
        top = 0
        for v in vals:
            if v >= 0:
                out[top] = scale * v
                top += 1
        bottom = n - 1
        for v in reversed(vals):
            if v < 0:
                out[bottom] = scale * v
                bottom -= 1
        return out

    rng = np.random.default_rng(2718)
    pool = np.array([-3.0, -1.5, -0.5, 0.0, 0.0, 0.25, 1.0, 2.0])
    cases = 100_000
    for _ in range(cases):
        n = int(rng.integers(1, 13))
        m = int(rng.integers(0, n + 1))
        vals = np.sort(rng.choice(pool, m))[::-1]
        scale = float(rng.uniform(0.25, 5.0))
        got = align_estimates(Spectrum(vals), n, scale).values
        expected = simulate(vals, n, scale)
        if not np.array_equal(got, expected):
            pytest.fail(f"mismatch for vals={vals} n={n} scale={scale}: {got} != {expected}")
    _report(f"alignment: {cases} random cases match the brute-force simulator exactly")


def test_weyl_inequality_suite():
    """Eigenvalue shifts never exceed the spectral norm of the perturbation."""
    rng = np.random.default_rng(97)
    for _ in range(100):
        n = int(rng.integers(2, 80))
        a = SymMatrix(rng.uniform(-1.0, 1.0, (n, n)))
        e = SymMatrix(float(rng.uniform(0.01, 2.0)) * rng.uniform(-1.0, 1.0, (n, n)))
        gap = weyl_gap(a, a + e)
        bound = spectral_norm(e) + 1e-8
        assert gap <= bound, f"gap {gap} exceeds {bound}"
    _report("Weyl suite: 100 (A, E) pairs satisfy max_i |shift| <= ||E||_2 + 1e-8")


def _sparse_with_light_rows(rng):
    """Sparse symmetric matrix: a dense core plus pendant pairs and lone
    diagonal entries that the count-based rule will delete."""
    n = int(rng.integers(60, 201))
    core = int(rng.integers(6, 16))
    entries = {}
    for i in range(core):
        for j in range(i, core):
            if rng.random() < 0.7:
                entries[(i, j)] = float(rng.choice([-1, 1]) * rng.uniform(0.2, 1.0))
    tail = list(range(core, n))
    rng.shuffle(tail)
    for k in range(0, min(20, len(tail) - 1), 2):
        entries[(min(tail[k], tail[k + 1]), max(tail[k], tail[k + 1]))] = float(
            rng.choice([-1, 1]) * rng.uniform(0.2, 1.0)
        )
    for k in range(min(20, len(tail) - 1), min(26, len(tail))):
        entries[(tail[k], tail[k])] = float(rng.uniform(0.2, 1.0))
    return SparseSymStore.build(n, [(i, j, v) for (i, j), v in entries.items()])


def test_zeroing_rule_perturbation_bound():
    """Deleting light rows moves every eigenvalue by at most eps*sqrt(nnz)."""
    rng = np.random.default_rng(4242)
    eps, c2 = 0.5, 64.0
    checked = 0
    for _ in range(50):
        store = _sparse_with_light_rows(rng)
        nnz = store.total_nnz
        assert nnz >= 2 / eps**2
        before = sym_eigvals(store.to_dense())
        after = sym_eigvals(zero_out_by_sparsity(store, eps, c2))
        shift = linf_spectrum_error(before, after)
        bound = eps * math.sqrt(nnz)
        assert shift <= bound, f"shift {shift} exceeds {bound} (nnz={nnz})"
        checked += 1
    assert checked == 50
    _report("zeroing perturbation: 50/50 sparse matrices within eps*sqrt(nnz)")


def test_entrywise_sparsification_norm_bound():
    """Spectral distance of the sparsified matrix stays below eps*n."""
    n, eps, delta, c = 400, 0.5, 0.2, 8.0
    p = c * math.log(n / delta) / (n * eps**2)
    assert 0 < p < 1
    dense = SymMatrix(
        np.random.default_rng(derive_seed(17, "ew-matrix")).uniform(-1.0, 1.0, (n, n))
    )
    start = time.perf_counter()
    passes = 0
    errs = []
    for trial in range(20):
        rng = np.random.default_rng(derive_seed(17, "ew", trial))
        sparse = entrywise_sparsify(dense, p, rng)
        err = spectral_norm(dense - sparse)
        errs.append(err)
        if err <= eps * n:
            passes += 1
    elapsed = time.perf_counter() - start
    assert passes >= 18, f"only {passes}/20 trials within eps*n"
    assert elapsed < 60.0, f"took {elapsed:.1f}s, budget 60s"
    _report(
        f"entrywise sparsification: {passes}/20 trials with ||A - C||_2 <= {eps * n:.0f}"
        f" (max seen {max(errs):.1f}), {elapsed:.1f}s < 60s"
    )


def test_block_matrix_error_scaling():
    """Top-eigenvalue error decays like a power law near fraction^(-1/2)."""
    cfg = ExperimentConfig(
        matrix_spec="block:n=2000,k=1000",
        samplers=["uniform"],
        sample_fractions=[0.01, 0.02, 0.05, 0.1, 0.2, 0.3],
        trials=50,
        target_indices=[1, 2, 4, 1000, 2000],
        seed=7,
    )
    start = time.perf_counter()
    rows = run_experiment(cfg)
    elapsed = time.perf_counter() - start

    slope = slope_fit(rows, "uniform", 1)
    assert -0.8 <= slope <= -0.3, f"slope {slope} outside [-0.8, -0.3]"
    non_top = max(
        r.scaled_err for r in rows if r.sampler == "uniform" and r.target_index != 1
    )
    assert non_top <= 1e-6, f"non-top scaled error {non_top} exceeds 1e-6"
    assert elapsed < 300.0, f"took {elapsed:.1f}s, budget 300s"
    _report(
        f"block-matrix scaling: slope {slope:.3f} in [-0.8, -0.3], non-top scaled"
        f" error {non_top:.2e} <= 1e-6, {elapsed:.1f}s < 300s"
    )


def test_identity_failure_and_fix():
    """Uniform sampling inflates identity eigenvalues to n/s; the weighted
    sampler's zeroing rule collapses them to zero with bounded error."""
    n, s = 1000, 50.0
    dense = identity_matrix(n)
    top = estimate_uniform(dense, s, seed=42).estimates[0]
    assert top == 20.0, f"expected exactly 20.0, got {top}"

    store = SparseSymStore.from_dense(dense)
    report = estimate_nnz(store, s, seed=42, zeroing="practical")
    assert np.all(report.estimates.values == 0.0)
    max_err = float(np.max(np.abs(report.estimates.values - 1.0)))
    bound = 0.2 * math.sqrt(n)
    assert max_err == 1.0
    assert max_err <= bound
    _report(
        f"identity: uniform top estimate is exactly 20.0; weighted sampler returns"
        f" zeros with max error 1.0 <= {bound:.2f}"
    )


def test_sparsity_weighting_beats_uniform_on_power_law():
    """On a heavy-tailed graph the weighted sampler has lower median error."""
    cfg = ExperimentConfig(
        matrix_spec="power_law:n=2000,exponent=2.5",
        samplers=["uniform", "nnz_practical"],
        sample_fractions=[0.05],
        trials=50,
        target_indices=[1],
        seed=0,
    )
    rows = run_experiment(cfg)
    med = {
        name: float(np.median([r.scaled_err for r in rows if r.sampler == name]))
        for name in ("uniform", "nnz_practical")
    }
    assert med["nnz_practical"] <= med["uniform"], (
        f"weighted median {med['nnz_practical']} worse than uniform {med['uniform']}"
    )
    _report(
        f"power-law advantage: weighted median scaled error {med['nnz_practical']:.4f}"
        f" <= uniform {med['uniform']:.4f}"
    )


def test_psd_l2_error_bound():
    """The nonnegative estimator meets the l2 eigenvalue bound on PSD input."""
    n, eps, s = 500, 0.2, 200.0
    dense = _unit_gram(n, np.random.default_rng(derive_seed(31, "psd-matrix")))
    exact = sym_eigvals(dense).values
    passes = 0
    errs = []
    for trial in range(20):
        report = estimate_psd(dense, s, seed=derive_seed(31, "psd", trial))
        err = float(np.linalg.norm(report.estimates.values - exact))
        errs.append(err)
        if err <= eps * n:
            passes += 1
    assert passes >= 15, f"only {passes}/20 trials within eps*n"
    _report(
        f"PSD l2 bound: {passes}/20 trials with l2 error <= {eps * n:.0f}"
        f" (max seen {max(errs):.1f})"
    )


def test_singular_value_estimate():
    """Row/column sampling recovers the top singular value of the block matrix."""
    dense = block_matrix(200, 100)
    errs = [
        abs(float(estimate_singular(dense, 60.0, derive_seed(8, "sv", t)).values[0]) - 100.0)
        for t in range(50)
    ]
    median = float(np.median(errs))
    assert median <= 30.0, f"median error {median} exceeds 30"
    _report(f"singular values: median |top estimate - 100| = {median:.2f} <= 30")


def test_median_boosting_lowers_failure_rate():
    """Coordinate-wise medians of 11 runs fail strictly less often than one run."""
    dense = block_matrix(2000, 1000)
    s = 0.02 * 2000
    exact = sym_eigvals(dense).values
    threshold = 0.15 * 2000

    def failed(values) -> bool:
        return bool(np.max(np.abs(values - exact)) > threshold)

    single_failures = sum(
        failed(estimate_uniform(dense, s, seed=derive_seed(3, "single", m)).estimates.values)
        for m in range(200)
    )
    boost_failures = sum(
        failed(
            median_boost(
                lambda t, m=m: estimate_uniform(dense, s, seed=derive_seed(3, "boost", m, t)),
                11,
            ).values
        )
        for m in range(200)
    )
    assert boost_failures < single_failures, (
        f"boosted {boost_failures}/200 not below single {single_failures}/200"
    )
    _report(
        f"median boosting: 11-run median fails {boost_failures}/200 vs single"
        f" {single_failures}/200 meta-trials"
    )


def test_erdos_renyi_top_eigenvalue():
    """Estimators recover the giant eigenvalue of a dense random graph."""
    n, p, fraction = 1000, 0.1, 0.1
    dense, store, _ = build_matrix(f"erdos_renyi:n={n},p={p}", seed=2024)
    exact = sym_eigvals(dense).values
    expected = n * p
    assert abs(exact[0] - expected) <= 3 * math.sqrt(expected), (
        f"top eigenvalue {exact[0]:.2f} outside {expected} +- {3 * math.sqrt(expected):.2f}"
    )

    bound = 0.15 * math.sqrt(store.total_nnz)
    s = fraction * n
    medians = {}
    for name in ("uniform", "nnz_practical", "nnz_simple"):
        errs = []
        for trial in range(50):
            seed = derive_seed(2024, name, trial)
            if name == "uniform":
                report = estimate_uniform(dense, s, seed)
            elif name == "nnz_practical":
                report = estimate_nnz(store, s, seed, zeroing="practical")
            else:
                report = estimate_nnz(store, s, seed, zeroing="off")
            errs.append(abs(float(report.estimates[0]) - exact[0]))
        medians[name] = float(np.median(errs))
        assert medians[name] <= bound, f"{name} median {medians[name]:.2f} exceeds {bound:.2f}"
    summary = ", ".join(f"{k} {v:.1f}" for k, v in medians.items())
    _report(f"random graph: median top-eigenvalue errors ({summary}) all <= {bound:.1f}")

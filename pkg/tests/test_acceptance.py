"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v`` — the per-criterion lines
print outside pytest's capture, so they are visible either way.
"""

import json
import math

import numpy as np
import pytest
import scipy.stats

from dothash.bounds import (
    BoundsQuery,
    clt_tail,
    empirical_exceedance,
    sample_intersection_estimates,
    variance,
)
from dothash.cli import main as cli_main
from dothash.dedup import DedupConfig, DedupMetric, make_planted_corpus, run_dedup_benchmark
from dothash.encoding import Codebook, MinwiseFamily
from dothash.exact import SortedSet, exact_intersection, sparse_basis_intersection
from dothash.linkpred import (
    Estimator,
    Metric,
    hits_at_k,
    preferential_attachment_graph,
    sketch_neighborhoods,
    split_edges,
)
from dothash.sketches import (
    dothash_build,
    dothash_intersection,
    minhash_build,
    minhash_jaccard,
    simhash_build,
    simhash_similarity,
)

MC_TRIALS = 10_000


@pytest.fixture()
def report(capsys):
    def _report(number: int, name: str, ok: bool, detail: str) -> bool:
        with capsys.disabled():
            print(f"[criterion {number:2d}] {name}: {'PASS' if ok else 'FAIL'} ({detail})")
        return ok

    return _report


def test_criterion_1_unbiasedness(unit_mc_estimates, report):
    """Mean estimate within 3 standard errors of |A∩B| at every overlap."""
    details = []
    ok = True
    for overlap, estimates in sorted(unit_mc_estimates.items()):
        se = estimates.std(ddof=1) / math.sqrt(len(estimates))
        err = abs(estimates.mean() - overlap)
        ok &= err <= 3 * se
        details.append(f"i={overlap}: |mean-i|={err:.3f} vs 3se={3 * se:.3f}")
    assert report(1, "unbiasedness", ok, "; ".join(details))


def test_criterion_2_variance(unit_mc_estimates, report):
    """Empirical variance within 10% of (1/d)(|A||B| + i^2 - 2i)."""
    details = []
    ok = True
    for overlap, estimates in sorted(unit_mc_estimates.items()):
        expected = variance(BoundsQuery(size_a=200, size_b=200, size_int=overlap, dims=1024))
        observed = estimates.var(ddof=1)
        rel = abs(observed / expected - 1.0)
        ok &= rel <= 0.10
        details.append(f"i={overlap}: var={observed:.2f} vs {expected:.2f} ({rel:.1%})")
    assert report(2, "variance", ok, "; ".join(details))


def test_criterion_3_error_curves(report):
    """Empirical exceedance tracks the CLT curve within ±0.05 everywhere."""
    epsilons = np.linspace(0.02, 0.4, 20)
    worst = 0.0
    for dims in (256, 512, 1024):
        estimates = sample_intersection_estimates(200, 200, 100, dims, MC_TRIALS,
                                                  seed0=3_000_000 + dims)
        observed = empirical_exceedance(estimates, 100, epsilons)
        predicted = [
            clt_tail(BoundsQuery(size_a=200, size_b=200, size_int=100, dims=dims,
                                 epsilon=float(eps)))
            for eps in epsilons
        ]
        worst = max(worst, float(np.max(np.abs(observed - np.array(predicted)))))
    ok = worst <= 0.05
    assert report(3, "error-curve reproduction", ok,
                  f"max |empirical - clt| = {worst:.4f} over 3 dims x 20 eps, 10^4 seeds each")


def test_criterion_4_oracle_equivalence(report):
    """sparse_basis_intersection == exact_intersection on all 2^20 subset pairs."""
    sets = [SortedSet(tuple(i for i in range(10) if mask >> i & 1)) for mask in range(1024)]
    mismatches = 0
    for mask_a in range(1024):
        set_a = sets[mask_a]
        for mask_b in range(1024):
            set_b = sets[mask_b]
            expected = (mask_a & mask_b).bit_count()
            if (exact_intersection(set_a, set_b) != expected
                    or sparse_basis_intersection(set_a, set_b) != expected):
                mismatches += 1
    ok = mismatches == 0
    assert report(4, "sparse-basis oracle equivalence", ok,
                  f"{mismatches} mismatches over 2^20 subset pairs of a 10-element universe")


def test_criterion_5_minhash_distribution(minhash_half_jaccard_counts, report):
    """J=0.5, k=128: unbiased mean and binomial-consistent match counts."""
    counts = minhash_half_jaccard_counts
    estimates = counts / 128
    tolerance = 3 * math.sqrt(0.25 / 128 / len(estimates))
    mean_err = abs(estimates.mean() - 0.5)
    mean_ok = mean_err <= tolerance

    # chi-squared goodness of fit of the per-trial match counts against
    # Binomial(128, 0.5), pooling tail bins to keep expected counts >= 5
    pmf = scipy.stats.binom.pmf(np.arange(129), 128, 0.5)
    expected = len(counts) * pmf
    lo = int(np.argmax(np.cumsum(expected) >= 5.0))
    hi = 128 - int(np.argmax(np.cumsum(expected[::-1]) >= 5.0))
    observed_bins = [np.count_nonzero(counts <= lo)]
    expected_bins = [expected[: lo + 1].sum()]
    for value in range(lo + 1, hi):
        observed_bins.append(np.count_nonzero(counts == value))
        expected_bins.append(expected[value])
    observed_bins.append(np.count_nonzero(counts >= hi))
    expected_bins.append(expected[hi:].sum())
    _, p_value = scipy.stats.chisquare(observed_bins, expected_bins)
    chi_ok = p_value > 0.001

    ok = mean_ok and chi_ok
    assert report(5, "minhash estimator distribution", ok,
                  f"|mean-0.5|={mean_err:.5f} vs {tolerance:.5f}; chi2 p={p_value:.4f}")


def test_criterion_6_adamic_adar_convergence(report):
    """DotHash AA tracks exact AA in rank and in Hits@50 on a 500-node graph."""
    graph = preferential_attachment_graph(500, 12, seed=60)

    rng = np.random.default_rng(61)
    pairs, seen = [], set()
    while len(pairs) < 2000:
        u, v = (int(x) for x in rng.integers(0, 500, size=2))
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if key in seen or graph.has_edge(*key):
            continue
        seen.add(key)
        pairs.append(key)
    pairs = np.array(pairs)

    exact_scorer = sketch_neighborhoods(graph, Metric.ADAMIC_ADAR, Estimator.EXACT)
    exact_scores = exact_scorer.score_pairs(pairs)
    dh_scorer = sketch_neighborhoods(graph, Metric.ADAMIC_ADAR, Estimator.DOTHASH, 1 << 14, seed=62)
    rho = scipy.stats.spearmanr(exact_scores, dh_scorer.score_pairs(pairs)).statistic
    rank_ok = rho >= 0.95

    split = split_edges(graph, test_fraction=0.05, neg_per_pos=2, seed=63)
    exact_split = sketch_neighborhoods(split.train_graph, Metric.ADAMIC_ADAR, Estimator.EXACT)
    hits_exact = hits_at_k(exact_split.score_pairs(split.positives),
                           exact_split.score_pairs(split.negatives), 50)
    dh_split = sketch_neighborhoods(split.train_graph, Metric.ADAMIC_ADAR, Estimator.DOTHASH,
                                    1 << 16, seed=64)
    hits_dh = hits_at_k(dh_split.score_pairs(split.positives),
                        dh_split.score_pairs(split.negatives), 50)
    hits_ok = abs(hits_dh - hits_exact) <= 0.02

    ok = rank_ok and hits_ok
    assert report(6, "weighted-sketch convergence", ok,
                  f"spearman={rho:.4f} (>=0.95) at d=2^14; "
                  f"hits@50 {hits_dh:.4f} vs exact {hits_exact:.4f} at d=2^16")


def test_criterion_7_hits_harness(report):
    """hits_at_k matches the sort-and-count reference on 1000 instances."""

    def brute_force(pos, neg, k):
        threshold = sorted(neg, reverse=True)[k - 1]
        return sum(1 for p in pos if p > threshold) / len(pos)

    rng = np.random.default_rng(70)
    mismatches = 0
    for trial in range(1000):
        n_pos = int(rng.integers(1, 40))
        n_neg = int(rng.integers(1, 60))
        if trial % 2 == 0:
            # coarse grid scores force ties, including pos == threshold cases
            pos = rng.integers(0, 6, size=n_pos).astype(float).tolist()
            neg = rng.integers(0, 6, size=n_neg).astype(float).tolist()
        else:
            pos = rng.normal(size=n_pos).tolist()
            neg = rng.normal(size=n_neg).tolist()
        k = int(rng.integers(1, n_neg + 1))
        if hits_at_k(pos, neg, k) != brute_force(pos, neg, k):
            mismatches += 1
    ok = mismatches == 0
    assert report(7, "hits@k harness", ok, f"{mismatches} mismatches over 1000 random instances")


def test_criterion_8_dedup_pipeline(report):
    """IDF-weighted DotHash beats 0.90 and the unit-weight run on the planted corpus."""
    docs, pairs = make_planted_corpus(n_docs=200, n_dup_pairs=50, edit_rate=0.10, seed=80)
    idf = run_dedup_benchmark(docs, pairs, DedupConfig(
        estimator=Estimator.DOTHASH, metric=DedupMetric.IDF,
        dims_or_k=8192, negatives=1000, seed=81))
    unit = run_dedup_benchmark(docs, pairs, DedupConfig(
        estimator=Estimator.DOTHASH, metric=DedupMetric.JACCARD,
        dims_or_k=8192, negatives=1000, seed=81))
    ok = idf.hits >= 0.90 and idf.hits >= unit.hits
    assert report(8, "dedup pipeline", ok,
                  f"idf hits@25={idf.hits:.3f} (>=0.90), unit-weight hits@25={unit.hits:.3f}")


def test_criterion_9_cli_determinism(tmp_path, capsys, report):
    """Every subcommand run twice with the same flags yields identical bytes."""
    elements = tmp_path / "elements.txt"
    elements.write_text("".join(f"element-{i}\n" for i in range(60)))

    graph = preferential_attachment_graph(60, 3, seed=90)
    edge_file = tmp_path / "graph.txt"
    edge_file.write_text("".join(f"{u} {v}\n" for u, v in graph.edges().tolist()))

    docs, dup_pairs = make_planted_corpus(n_docs=40, n_dup_pairs=10, words_per_doc=60, seed=91)
    corpus = tmp_path / "corpus.jsonl"
    corpus.write_text("".join(json.dumps({"id": d.doc_id, "text": d.text}) + "\n" for d in docs))
    labels = tmp_path / "labels.csv"
    labels.write_text("id_a,id_b\n" + "".join(f"{a},{b}\n" for a, b in dup_pairs))

    results = {}

    def run_twice(name, args, out_name=None):
        outputs = []
        for attempt in (1, 2):
            if out_name is None:
                assert cli_main(args) == 0
                outputs.append(capsys.readouterr().out)
            else:
                out = tmp_path / f"{attempt}-{out_name}"
                assert cli_main(args + ["--out", str(out)]) == 0
                capsys.readouterr()
                outputs.append(out.read_bytes())
        results[name] = outputs[0] == outputs[1]

    run_twice("sketch", ["sketch", "--estimator", "dothash", "--dims", "512", "--seed", "2",
                         "--input", str(elements)], "sketch.bin")
    sketch_file = tmp_path / "1-sketch.bin"
    run_twice("compare", ["compare", str(sketch_file), str(sketch_file)])
    run_twice("bounds", ["bounds", "--size-a", "60", "--size-b", "60", "--size-int", "30",
                         "--dims", "128", "--trials", "300", "--seed", "3"], "bounds.csv")
    run_twice("linkpred", ["linkpred", "--edges", str(edge_file), "--estimator", "dothash",
                           "--metric", "adamic_adar", "--dims", "256", "--k-at", "10",
                           "--repeats", "2", "--seed", "4"], "linkpred.csv")
    run_twice("dedup", ["dedup", "--corpus", str(corpus), "--labels", str(labels),
                        "--estimator", "dothash", "--metric", "idf", "--dims", "512",
                        "--k-at", "10", "--negatives", "100", "--seed", "5"], "dedup.csv")

    ok = all(results.values())
    detail = ", ".join(f"{name}={'ok' if good else 'DIFFERS'}" for name, good in results.items())
    assert report(9, "cli determinism", ok, detail)


def test_criterion_10_comparison_throughput(report):
    """Relative comparison speed at the k=128 / d=500 / d=10000 configuration.

    Report-only: the thresholds are printed and recorded but deliberately
    not asserted, since absolute timings depend on the host machine.
    """
    rng = np.random.default_rng(100)
    n_sets, set_size, n_pairs = 200, 500, 100_000
    pools = [rng.integers(0, 1 << 62, size=set_size).astype(np.uint64) for _ in range(n_sets)]
    pair_idx = rng.integers(0, n_sets, size=(n_pairs, 2))

    import time

    dh_sketches = [dothash_build(Codebook(seed=1, dims=10_000), pool) for pool in pools]
    mh_sketches = [minhash_build(MinwiseFamily(seed=1, k=128), pool) for pool in pools]
    sh_sketches = [simhash_build(Codebook(seed=1, dims=500), pool) for pool in pools]

    def time_pairs(sketches, compare):
        start = time.perf_counter()
        for i, j in pair_idx:
            compare(sketches[i], sketches[j])
        return time.perf_counter() - start

    t_dh = time_pairs(dh_sketches, dothash_intersection)
    t_mh = time_pairs(mh_sketches, minhash_jaccard)
    t_sh = time_pairs(sh_sketches, simhash_similarity)

    vs_minhash = t_dh / t_mh
    vs_simhash = t_dh / t_sh
    ok = vs_minhash <= 10.0 and 0.1 <= vs_simhash <= 10.0
    report(10, "comparison throughput (report-only)", ok,
           f"dothash {n_pairs / t_dh:,.0f} cmp/s; x{vs_minhash:.2f} vs minhash (limit 10x), "
           f"x{vs_simhash:.2f} vs simhash (same order)")

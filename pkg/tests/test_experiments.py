import math

import numpy as np
import pytest
from scipy import stats

from cqbde.errors import ConfigError
from cqbde.experiments import (
    ExperimentReport,
    chaos_histograms,
    config_from_mapping,
    export_diagnostics,
    load_config,
    run_experiment,
    two_sample_t_test,
)
from cqbde.data import generate_synthetic_dataset


def pooled_t_oracle(a, b):
    # textbook formula written out with plain python sums
    na, nb = len(a), len(b)
    ma, mb = sum(a) / na, sum(b) / nb
    ssa = sum((v - ma) ** 2 for v in a)
    ssb = sum((v - mb) ** 2 for v in b)
    sp2 = (ssa + ssb) / (na + nb - 2)
    return (ma - mb) / math.sqrt(sp2 * (1 / na + 1 / nb))


class TestTTest:
    def test_df(self):
        rng = np.random.default_rng(0)
        assert two_sample_t_test(rng.random(20), rng.random(20)).df == 38

    def test_large_separation(self):
        a = np.full(20, 0.95) + np.tile([0.001, -0.001], 10)
        b = np.full(20, 0.85) + np.tile([0.001, -0.001], 10)
        r = two_sample_t_test(a, b)
        # both sample variances are 20e-6 / 19; pooled se = sqrt(var * (1/20 + 1/20))
        want = 0.1 / math.sqrt(20e-6 / 19 * 0.1)
        assert r.t_statistic == pytest.approx(want, rel=1e-9)
        assert r.t_statistic == pytest.approx(308.22, abs=0.01) and r.p_value < 1e-30

    def test_matches_oracle_and_scipy(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            a, b = rng.normal(0.9, 0.05, 20), rng.normal(0.88, 0.05, 20)
            r = two_sample_t_test(a, b)
            assert r.t_statistic == pytest.approx(pooled_t_oracle(list(a), list(b)), abs=1e-9)
            ref = stats.ttest_ind(a, b)
            assert r.p_value == pytest.approx(ref.pvalue, abs=1e-9)

    def test_constant_samples(self):
        assert two_sample_t_test([1, 1], [1, 1])[:2] == (0.0, 1.0)
        r = two_sample_t_test([2, 2], [1, 1])
        assert r.t_statistic == math.inf and r.p_value == 0.0

    def test_too_small(self):
        with pytest.raises(ValueError):
            two_sample_t_test([1], [1, 2])


def tiny_config(**kw):
    mapping = dict(variant=["QBDE-II", "BDE"], classifier=["LLR"], runs=2, pop_size=8, local_pop=4,
                   generations=2, migrations=1, islands=2, theta=0.3,
                   synth_samples=80, synth_features=10, synth_informative=2)
    mapping.update(kw)
    return config_from_mapping(mapping)


class TestExperiment:
    def test_config_mapping(self):
        c = tiny_config()
        assert [v.value for v in c.variants] == ["QBDE-II", "BDE"]
        assert c.synthetic == dict(n_samples=80, n_features=10, n_informative=2)

    def test_bad_settings(self):
        with pytest.raises(ConfigError):
            tiny_config(select_by="median")
        with pytest.raises(ConfigError):
            tiny_config(pop_sz=3)
        with pytest.raises(ConfigError):
            tiny_config(variant="QBDE-III")

    def test_load_toml(self, tmp_path):
        p = tmp_path / "c.toml"
        p.write_text('variant = "CTQIEA"\nruns = 3\npop_size = 10\nlocal_pop = 5\ndataset = "d.csv"\n')
        c = load_config(p)
        assert c.runs == 3 and c.algorithm.pop_size == 10 and c.dataset == str(tmp_path / "d.csv")

    def test_run_and_round_trip(self):
        c = tiny_config()
        data = generate_synthetic_dataset(**c.synthetic)
        rep = run_experiment(c, data)
        assert [cell.label for cell in rep.cells] == ["QBDE-II+LLR", "BDE+LLR"]
        for cell in rep.cells:
            assert len(cell.runs) == 2
            assert all(0 <= r.test_auc <= 1 and r.cardinality == len(r.features) for r in cell.runs)
        back = ExperimentReport.from_json(rep.to_json())
        assert back.to_json() == rep.to_json()
        assert "QBDE-II" in rep.to_text()

    def test_jobs_do_not_change_output(self):
        c = tiny_config()
        data = generate_synthetic_dataset(**c.synthetic)
        assert run_experiment(c, data, jobs=1).to_json() == run_experiment(c, data, jobs=2).to_json()

    def test_export(self, tmp_path):
        c = tiny_config(runs=1)
        rep = run_experiment(c, generate_synthetic_dataset(**c.synthetic))
        paths = export_diagnostics(tmp_path, report=rep, histogram=chaos_histograms(samples=1000, bins=10))
        names = sorted(p.rsplit("/", 1)[-1] for p in paths)
        assert names == ["convergence.csv", "histogram.csv", "migrations.jsonl", "populations.csv", "summary.csv"]
        rows = (tmp_path / "histogram.csv").read_text().splitlines()
        assert len(rows) == 11


def test_histogram_counts_sum():
    edges, chaotic, uniform = chaos_histograms(samples=5000, bins=20)
    assert chaotic.sum() == uniform.sum() == 5000 and edges.size == 21

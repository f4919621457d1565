import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from permlocal.bijections import has_separating_line, window_set
from permlocal.experiments_cli import (
    ExperimentRecord,
    ExperimentSpec,
    run_convergence,
    run_limit_window_law,
    run_rooted_marginal,
    run_separating_line,
    run_shift_invariance,
    run_variance_decay,
    run_window_set_uniformity,
)
from permlocal.experiments_cli.cli import cli_main
from permlocal.experiments_cli.harness import (
    cell_members,
    dumps,
    loads,
    separating_line_count,
    to_tsv,
    window_set_counts,
)
from permlocal.perm_core import Permutation
from permlocal.samplers import RandomStream, uniform_av321

records = st.builds(
    ExperimentRecord,
    schema_version=st.just(1),
    statistic=st.sampled_from(["c-occ", "rooted"]),
    model=st.sampled_from(["av231", "av321"]),
    n=st.integers(1, 10_000),
    samples=st.integers(1, 10_000),
    seed=st.integers(0, 2**63 - 1),
    pattern=st.text(min_size=1, max_size=12),
    empirical_mean=st.floats(0, 1),
    empirical_variance=st.floats(0, 1),
    theoretical=st.none() | st.just("1/4"),
    theoretical_float=st.none() | st.floats(0, 1),
    abs_error=st.none() | st.floats(0, 1),
    std_error=st.floats(0, 1),
    wall_time_ms=st.integers(0, 10**6),
)


class TestSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            ExperimentSpec("av123", 10, 1)
        with pytest.raises(ValueError):
            ExperimentSpec("av231", 10, 0)
        with pytest.raises(ValueError):
            ExperimentSpec("av231", 10, 1, seed=-1)

    def test_dict_roundtrip(self):
        spec = ExperimentSpec("av321", 50, 3, 4, 7, 1, 2, ("2143", "1,2"))
        assert spec.patterns == ("2143", "12")
        assert ExperimentSpec.from_dict(json.loads(json.dumps(spec.to_dict()))) == spec

    @given(st.lists(records, max_size=4))
    def test_json_roundtrip(self, recs):
        spec, back = loads(dumps({"experiment": "x"}, recs))
        assert back == recs and spec == {"experiment": "x"}


class TestConvergence:
    def test_trivial_case(self):
        (rec,) = run_convergence(ExperimentSpec("av231", 1, 1, pattern_size=1))
        assert rec.empirical_mean == 1 and rec.theoretical == "1" and rec.abs_error == 0
        assert rec.empirical_variance == 0

    def test_deterministic_and_worker_independent(self):
        spec = ExperimentSpec("av321", 200, 120, seed=3)
        a = run_convergence(spec)
        b = run_convergence(ExperimentSpec("av321", 200, 120, seed=3, workers=2))
        strip = lambda rs: [r.to_dict() | {"wall_time_ms": 0} for r in rs]
        assert strip(a) == strip(b)

    def test_theoretical_column(self):
        recs = run_convergence(ExperimentSpec("av321", 30, 2, patterns=("123", "312", "2143")))
        theo = {r.pattern: r.theoretical for r in recs}
        assert theo == {"123": "1/2", "312": "1/8", "2143": "0"}
        for r in recs:
            assert r.std_error == pytest.approx((r.empirical_variance / r.samples) ** 0.5)

    def test_rooted_equals_density_per_sample(self):
        for model in ("av231", "av321"):
            for h in (1, 2):
                spec = ExperimentSpec(model, 120, 6, seed=4, radius=h, pattern_size=2 * h + 1)
                rooted = run_rooted_marginal(spec)
                dens = run_convergence(spec)
                assert [(r.empirical_mean, r.empirical_variance) for r in rooted] == [
                    (d.empirical_mean, d.empirical_variance) for d in dens
                ]

    def test_rooted_avoided_pattern(self):
        (rec,) = run_rooted_marginal(ExperimentSpec("av321", 60, 5, radius=1, patterns=("321",)))
        assert rec.empirical_mean == 0 and rec.pattern == "3,2,1@2"

    def test_rooted_needs_room(self):
        with pytest.raises(ValueError):
            run_rooted_marginal(ExperimentSpec("av231", 2, 1, radius=1))

    def test_variance_decay(self):
        table = run_variance_decay("av231", "1", [1], 3, 0)
        assert table.records[0].empirical_variance == 0
        table = run_variance_decay("av321", "21", [16, 64, 256], 40, 1)
        assert [r.n for r in table.records] == [16, 64, 256]
        assert table.summary["final_variance"] == table.records[-1].empirical_variance
        with pytest.raises(ValueError):
            run_variance_decay("av321", "21", [64, 16], 4, 1)


class TestLimitExperiments:
    def test_window_law(self):
        recs = run_limit_window_law("limit321", 1, 4000, 2)
        assert {r.pattern for r in recs} == {"1,2,3@2", "1,3,2@2", "2,1,3@2", "2,3,1@2", "3,1,2@2"}
        assert sum(r.empirical_mean for r in recs) == pytest.approx(1)

    def test_shift_singleton(self):
        table = run_shift_invariance("limit231", "1", range(-3, 4), 6, 200, 0)
        assert all(r.empirical_mean == 1 for r in table.records) and table.summary["spread"] == 0

    def test_shift_radius_check(self):
        with pytest.raises(ValueError):
            run_shift_invariance("limit321", "12", [-3, 3], 4, 10, 0)
        with pytest.raises(ValueError):
            run_shift_invariance("limit999", "12", [0], 4, 10, 0)


class TestWindowStatistics:
    @given(st.integers(0, 10_000), st.integers(1, 3))
    def test_vectorised_counts_match_scalar(self, seed, k):
        sigma = uniform_av321(3 * k + 9, RandomStream(seed))
        n = len(sigma)
        assert separating_line_count(sigma, k) == sum(has_separating_line(sigma, i, k) for i in range(1, n + 1))
        assert separating_line_count(sigma, k) == sum(oracles.separating_line(sigma, i, k) for i in range(1, n + 1))
        counts = window_set_counts(sigma, k)
        expected = {}
        for i in range(k + 1, n - k + 1):
            a = window_set(sigma, i, k)
            expected[a] = expected.get(a, 0) + 1
        assert {cell_members(c, k): int(m) for c, m in enumerate(counts) if m} == expected

    def test_identity(self):
        s = Permutation.identity(20)
        assert separating_line_count(s, 1) == 20
        counts = window_set_counts(s, 1)
        assert counts[0] == 0 and counts[7] == 18

    def test_small_runs(self):
        rec = run_separating_line(5, 2, 10, 0)
        assert 0 <= rec.empirical_mean <= 1
        table = run_window_set_uniformity(200, 1, 10, 0)
        assert len(table.records) == 8
        assert sum(r.empirical_mean for r in table.records) == pytest.approx(1)
        assert table.summary["discarded_fraction"] == pytest.approx(2 / 200)
        with pytest.raises(ValueError):
            run_window_set_uniformity(2, 1, 1, 0)


class TestCli:
    def run(self, capsys, *argv):
        code = cli_main(list(argv))
        out = capsys.readouterr()
        return code, out.out, out.err

    def test_examples(self, capsys):
        assert self.run(capsys, "limit", "--model", "av231", "--pattern", "132985476")[:2] == (0, "1/2048\n")
        assert self.run(capsys, "dist", "--a", "1@1", "--b", "2,1@1")[:2] == (0, "1\n")
        assert self.run(capsys, "cocc", "--pattern", "21", "--sigma", "321")[:2] == (0, "2 2/3\n")
        code, out, _ = self.run(capsys, "symbolic", "--pattern", "4,1,3,2,6,5,7,10,8,9,11,12,16,13,15,14")
        assert code == 0 and out.splitlines()[0] == "p^15*(1-p)^7"
        code, out, _ = self.run(capsys, "enumerate", "--model", "av231", "--n", "5", "--count-only")
        assert out == "42\n"

    def test_input_errors_exit_one(self, capsys):
        assert self.run(capsys, "limit", "--model", "av231", "--pattern", "122")[0] == 1
        assert self.run(capsys, "nonsense")[0] == 1
        assert self.run(capsys, "dist", "--a", "12@5", "--b", "1@1")[0] == 1
        assert self.run(capsys, "experiment", "shift", "--model", "av231", "--samples", "1")[0] == 1

    def test_sampling_prints_seed_when_absent(self, capsys):
        code, out, err = self.run(capsys, "sample", "--model", "av321", "--n", "6")
        assert code == 0 and err.startswith("seed=")
        seed = int(err.strip().split("=")[1])
        again = self.run(capsys, "sample", "--model", "av321", "--n", "6", "--seed", str(seed))[1]
        assert again == out

    def test_sample_models(self, capsys):
        for model in ("av231", "btree", "dyck", "limit231", "limit321", "boltzmann231", "gw", "tstar"):
            code, out, _ = self.run(capsys, "sample", "--model", model, "--n", "5", "--seed", "1", "--count", "2")
            assert code == 0 and len(out.splitlines()) == 2

    def test_experiment_output_reproducible(self, capsys, tmp_path):
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        for p in paths:
            code = cli_main(["experiment", "convergence", "--model", "av231", "--n", "64", "--samples", "20",
                             "--seed", "5", "--out", str(p)])
            assert code == 0
        docs = [json.loads(p.read_text()) for p in paths]
        for d in docs:
            for r in d["records"]:
                r["wall_time_ms"] = 0
        assert docs[0] == docs[1]
        assert docs[0]["spec"]["seed"] == 5 and docs[0]["library_version"]

    def test_experiment_assert_exit_two(self, capsys):
        code, _, err = self.run(capsys, "experiment", "convergence", "--model", "av231", "--n", "8", "--samples", "3",
                                "--seed", "1", "--assert")
        assert code == 2 and "FAIL" in err

    def test_tsv(self, capsys):
        code, out, _ = self.run(capsys, "experiment", "separating", "--n", "50", "--samples", "2", "--seed", "1",
                                "--format", "tsv")
        assert code == 0 and out.splitlines()[0].startswith("schema_version\tstatistic")
        recs = run_convergence(ExperimentSpec("av231", 10, 1, pattern_size=2))
        assert len(to_tsv(recs).splitlines()) == 3

    def test_other_experiments(self, capsys):
        for argv in (
            ["experiment", "rooted", "--model", "av321", "--n", "40", "--samples", "2"],
            ["experiment", "variance", "--model", "av321", "--n-grid", "16", "32", "--samples", "4", "--pattern", "21"],
            ["experiment", "window-law", "--model", "limit231", "--samples", "50"],
            ["experiment", "shift", "--model", "limit321", "--samples", "50"],
            ["experiment", "window-set", "--n", "40", "--samples", "2"],
        ):
            assert self.run(capsys, *argv, "--seed", "2")[0] == 0

    def test_verify(self, capsys):
        code, out, _ = self.run(capsys, "verify", "--suite", "bijections", "--max-n", "8")
        assert code == 0 and out == "bijections: ok\n"
        code, out, _ = self.run(capsys, "verify", "--suite", "all", "--max-n", "5")
        assert code == 0 and "FAIL" not in out


def test_exact_record_fields():
    (rec,) = run_convergence(ExperimentSpec("av321", 12, 2, seed=9, patterns=("12",)))
    assert rec.theoretical == str(Fraction(3, 4))
    assert rec.abs_error == pytest.approx(abs(rec.empirical_mean - 0.75))

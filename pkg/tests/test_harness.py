import math

import pytest

from longcycle.harness import (
    CSV_COLUMNS,
    ConfigError,
    EmptyInput,
    HostSpec,
    TrialConfig,
    TrialRecord,
    compare_with_oracle,
    nearest_rank,
    records_from_csv,
    records_to_csv,
    run_trials,
    summarize,
    validate_against_oracle,
)
from longcycle.graph import gen_complete


def strip_elapsed(csv_text):
    return [line.rsplit(",", 1)[0] for line in csv_text.splitlines()]


def test_golden_k10_record():
    # p = 1: the tree is the path 0..9 (9 tests); vertex 0 has untested partners
    # 7, 8, 9 at distance >= long_cut = 7 and the farthest closes a 10-cycle.
    # t_full = 9 but untested degrees are 8 (ends) and 7, so nothing is full;
    # only the leaf is poor; trunc counts <= d_cut = 6 <= t_light = 7, so none heavy;
    # only the root has height >= k = 9.
    (r,) = run_trials(TrialConfig(HostSpec("complete", n=10), p=1.0, eps=0.05, trials=1))
    assert (r.trial, r.n, r.k, r.p) == (0, 10, 9, 1.0)
    assert (r.tested_edges, r.tested_bound, r.lemma3_ok) == (9, 20.0, True)
    assert (r.frac_full, r.poor_count, r.heavy_count) == (0.0, 1, 0)
    assert r.frac_height_ge_Ck == pytest.approx(0.1)
    assert (r.path_found, r.path_bad_count) == (False, None)
    assert (r.branch, r.cycle_length, r.success, r.failure_reason) == ("LongCondition", 10, True, "")


def test_p_zero_record():
    host = HostSpec("hypercube", dim=5)
    (r,) = run_trials(TrialConfig(host, p=0.0, trials=1))
    assert not r.success and r.failure_reason == "NoFullVertices"
    assert r.tested_edges == 5 * 16
    assert math.isinf(r.tested_bound) and r.lemma3_ok


def test_csv_format_and_determinism():
    cfg = TrialConfig(HostSpec("regular", n=40, d=3), c=2.0, trials=6, base_seed=3)
    a, b = records_to_csv(run_trials(cfg)), records_to_csv(run_trials(cfg))
    assert a.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert "\r" not in a and a.endswith("\n")
    assert strip_elapsed(a) == strip_elapsed(b)
    assert [r.trial for r in records_from_csv(a)] == list(range(6))


def test_random_hosts_change_per_trial_unless_fixed():
    base = dict(p=0.5, trials=5, base_seed=1)
    per = run_trials(TrialConfig(HostSpec("regular", n=60, d=3), **base))
    fixed = run_trials(TrialConfig(HostSpec("regular", n=60, d=3, fixed=True), **base))
    assert len({r.tested_edges for r in per}) > 1
    assert len(fixed) == 5


def test_parallel_matches_serial():
    cfg = TrialConfig(HostSpec("complete", n=80), c=6.0, trials=10, base_seed=9)
    serial = records_to_csv(run_trials(cfg))
    parallel = records_to_csv(run_trials(TrialConfig(**{**cfg.__dict__, "workers": 3})))
    assert strip_elapsed(serial) == strip_elapsed(parallel)


def test_real_formatting():
    (r,) = run_trials(TrialConfig(HostSpec("complete", n=30), p=1 / 3, trials=1))
    row = records_to_csv([r]).splitlines()[1].split(",")
    assert row[CSV_COLUMNS.index("p")] == "0.333333"
    assert row[CSV_COLUMNS.index("tested_bound")] == "180"


@pytest.mark.parametrize("kwargs, field", [
    (dict(host=HostSpec("complete", n=10), p=0.5, eps=0.2), "eps"),
    (dict(host=HostSpec("complete", n=10), p=0.5, trials=0), "trials"),
    (dict(host=HostSpec("complete", n=10)), "p"),
    (dict(host=HostSpec("complete", n=10), p=0.5, c=2.0), "p"),
    (dict(host=HostSpec("complete", n=10), c=20.0), "c"),
    (dict(host=HostSpec("complete"), p=0.5), "n"),
    (dict(host=HostSpec("torus", n=4), p=0.5), "host"),
    (dict(host=HostSpec("circulant", n=12, offsets=(6,)), p=0.5), "eps"),
])
def test_config_errors(kwargs, field):
    with pytest.raises(ConfigError) as info:
        run_trials(TrialConfig(**kwargs))
    assert info.value.field == field


def rec(length, success=True, tested=1, bound=2.0, frac=1.0, n=10, k=9, p=0.5):
    return TrialRecord(0, n, k, p, tested, bound, tested <= bound, frac, 0, 0, 1.0, False, None,
                       "LongCondition", length, success, "", 1.0)


def test_summarize_single():
    (g,) = summarize([rec(12)]).groups
    assert g.trials == 1 and g.mean_cycle_length == 12
    assert set(g.cycle_length_quantiles.values()) == {12}
    assert (g.success_rate, g.lemma3_pass_rate, g.mean_frac_full) == (1.0, 1.0, 1.0)


def test_summarize_nearest_rank_median():
    (g,) = summarize([rec(20), rec(10)]).groups
    assert g.cycle_length_quantiles[0.5] == 10
    assert g.mean_cycle_length == 15


def test_summarize_lemma3_rate_and_groups():
    s = summarize([rec(5, tested=1), rec(5, tested=3), rec(5, tested=2), rec(7, p=0.25)])
    by_p = {g.p: g for g in s.groups}
    assert by_p[0.5].lemma3_pass_rate == pytest.approx(2 / 3)
    assert by_p[0.25].trials == 1


def test_summarize_empty():
    with pytest.raises(EmptyInput):
        summarize([])


def test_nearest_rank():
    assert nearest_rank([3, 1, 2], 0.0) == 1
    assert nearest_rank([3, 1, 2], 1.0) == 3
    assert nearest_rank(list(range(1, 11)), 0.9) == 9


def test_summary_recomputable_from_csv():
    records = run_trials(TrialConfig(HostSpec("complete", n=50), c=8.0, trials=8))
    again = records_from_csv(records_to_csv(records))
    a, b = summarize(records).groups[0], summarize(again).groups[0]
    assert a.cycle_length_quantiles == b.cycle_length_quantiles
    assert (a.success_rate, a.lemma3_pass_rate, a.trials) == (b.success_rate, b.lemma3_pass_rate, b.trials)
    assert a.mean_frac_full == pytest.approx(b.mean_frac_full, rel=1e-5)


def test_validate_k8_p_one():
    report = validate_against_oracle(TrialConfig(HostSpec("complete", n=8), p=1.0, trials=10))
    assert report.passed and len(report.rows) == 10
    assert all(r.builder_length == r.oracle_length == 8 for r in report.rows)


def test_validate_p_zero_vacuous():
    report = validate_against_oracle(TrialConfig(HostSpec("complete", n=8), p=0.0, trials=3))
    assert report.passed and report.cycles_checked == 0


def test_validate_k6_many_seeds():
    report = validate_against_oracle(TrialConfig(HostSpec("complete", n=6), p=0.8, trials=50, base_seed=4))
    assert report.passed
    assert all(r.valid for r in report.rows)


def test_validate_guard():
    from longcycle.brute import GraphTooLarge

    with pytest.raises(GraphTooLarge):
        validate_against_oracle(TrialConfig(HostSpec("complete", n=20), p=1.0))
    with pytest.raises(GraphTooLarge):
        compare_with_oracle(gen_complete(17), 1.0, 0.05, 0)

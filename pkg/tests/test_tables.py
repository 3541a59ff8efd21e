import math

import numpy as np
import pytest

from hbsge.harness import RunConfig, Status, TraceRow, initial_point, run
from hbsge.optimizers import Method, OptimizerConfig
from hbsge.problems import Beale, Rosenbrock
from hbsge.tables import (
    SUMMARY_HEADER, SummaryRow, _median_low, fmt_full, fmt_short, median_summary, parse_runs_csv,
    parse_summary_csv, parse_trace_csv, runs_to_csv, slugify, summary_to_csv, summary_to_markdown,
    trace_to_csv,
)


def small_runs():
    out = []
    for seed in (1, 2, 3):
        for method in (Method.NAG, Method.HBSGE):
            r = run(Rosenbrock(), OptimizerConfig(method, 0.005), RunConfig(max_iters=200, seed=seed),
                    initial_point("rosenbrock"))
            out.append(r)
    return out


def test_formatting():
    assert fmt_full(None) == "" and fmt_short(None) == ""
    assert fmt_full(7) == "7"
    assert fmt_full(0.1) == "0.10000000000000001"
    assert fmt_short(math.inf) == "inf"
    assert fmt_full(math.nan) == "nan"


def test_trace_round_trip_is_exact():
    r = run(Beale(), OptimizerConfig(Method.HBSGE, 0.01), RunConfig(max_iters=50), initial_point("beale"))
    text = trace_to_csv(r.trace)
    assert text.splitlines()[0] == "t,f,grad_norm,dist_to_opt,alpha_t"
    assert parse_trace_csv(text) == r.trace
    assert trace_to_csv(parse_trace_csv(text)) == text


def test_trace_with_nonfinite_values():
    rows = [TraceRow(0, 1.0, 2.0, None, 1.2), TraceRow(1, math.inf, math.inf, None, None)]
    back = parse_trace_csv(trace_to_csv(rows))
    assert back[1].f == math.inf and back[0].dist_to_opt is None and back[1].alpha_t is None


def test_runs_round_trip():
    results = small_runs()
    text = runs_to_csv(results)
    back = parse_runs_csv(text)
    assert runs_to_csv(back) == text
    assert [b.status for b in back] == [r.status for r in results]
    assert any(b.status is Status.DIVERGED for b in back)


class TestMedian:
    def test_odd(self):
        assert _median_low([3, 1, 2]) == 2

    def test_even_takes_lower(self):
        assert _median_low([4, 1, 3, 2]) == 2

    def test_missing_counts_as_worst(self):
        assert _median_low([None, None, 5]) is None
        assert _median_low([None, 4, 5]) == 5

    def test_nan_sorts_last(self):
        assert _median_low([math.nan, 1.0, 2.0]) == 2.0


def test_median_summary_groups_by_cell():
    rows = median_summary(small_runs())
    assert len(rows) == 2
    assert {r.optimizer for r in rows} == {"NAG(beta=0.9)", "HB-SGE(beta=0.9)"}


def test_summary_round_trip():
    rows = median_summary(small_runs())
    text = summary_to_csv(rows)
    assert text.splitlines()[0] == ",".join(SUMMARY_HEADER)
    back = parse_summary_csv(text)
    assert summary_to_csv(back) == text
    for a, b in zip(rows, back):
        assert a.iters_to_primary == b.iters_to_primary and a.total_iters == b.total_iters
        if np.isfinite(a.final_f):
            assert b.final_f == pytest.approx(a.final_f, rel=1e-5)


def test_summary_header_is_checked():
    with pytest.raises(ValueError):
        parse_summary_csv("a,b\n")


def test_markdown_lists_divergences():
    results = small_runs()
    md = summary_to_markdown(median_summary(results), results)
    assert md.startswith("| Problem | Optimizer |")
    assert "Divergences:" in md
    assert "NAG(beta=0.9) on rosenbrock diverged in 3/3 runs" in md


def test_markdown_dash_for_missing():
    row = SummaryRow("P", "O", 1.0, 2.0, None, None, 10, None)
    assert "| P | O | 1 | 2 | - | - | 10 | - |" in summary_to_markdown([row])


def test_slugify():
    assert slugify("HB-SGE(beta=0.9)") == "hb-sge-beta-0.9"
    assert slugify("HB-SGE-Safe(beta=0.95)") == "hb-sge-safe-beta-0.95"

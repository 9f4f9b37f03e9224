import math
import statistics

import mpmath as mp
import pytest
from hypothesis import assume, given, settings, strategies as st

from simulatar.errors import (
    ConfigError,
    DegenerateVarianceError,
    DomainError,
    InsufficientDataError,
)
from simulatar.stats import (
    CellColor,
    Dimension,
    Method,
    RatingRecord,
    Variant,
    betainc_reg,
    build_grid,
    load_ratings_csv,
    t_cdf,
    tost_paired,
)

mp.mp.dps = 40


def mp_t_cdf(t: float, df: float) -> float:
    """High-precision Student t CDF oracle."""
    t, df = mp.mpf(t), mp.mpf(df)
    x = df / (df + t * t)
    tail = mp.betainc(df / 2, mp.mpf("0.5"), 0, x, regularized=True) / 2
    return float(1 - tail if t > 0 else tail)


def make_diffs(n: int, mean: float, sd: float) -> list[float]:
    """n values with the exact requested sample mean and standard deviation."""
    assert n % 2 == 0
    delta = sd * math.sqrt((n - 1) / n)
    return [mean + delta] * (n // 2) + [mean - delta] * (n // 2)


class TestTCdf:
    def test_cauchy_exact(self):
        assert t_cdf(0.0, 1) == 0.5
        assert abs(t_cdf(1.0, 1) - 0.75) <= 1e-9
        assert abs(t_cdf(-1.0, 1) - 0.25) <= 1e-9

    @pytest.mark.parametrize("t", [-8.0, -2.5, -0.3, 0.1, 1.0, 3.7, 7.62, 15.0])
    @pytest.mark.parametrize("df", [1, 2, 5, 11, 30, 120])
    def test_matches_high_precision_oracle(self, t, df):
        assert abs(t_cdf(t, df) - mp_t_cdf(t, df)) <= 1e-9

    @given(
        st.floats(min_value=-30, max_value=30),
        st.integers(min_value=1, max_value=200),
    )
    @settings(max_examples=200, deadline=None)
    def test_oracle_agreement_property(self, t, df):
        assert abs(t_cdf(t, df) - mp_t_cdf(t, df)) <= 1e-9

    def test_betainc_bounds(self):
        assert betainc_reg(2.0, 3.0, 0.0) == 0.0
        assert betainc_reg(2.0, 3.0, 1.0) == 1.0
        with pytest.raises(DomainError):
            betainc_reg(-1.0, 1.0, 0.5)
        with pytest.raises(DomainError):
            betainc_reg(1.0, 1.0, 1.5)

    def test_df_must_be_positive(self):
        with pytest.raises(DomainError):
            t_cdf(1.0, 0)


class TestTostPaired:
    def test_reference_fixture(self):
        diffs = make_diffs(12, 0.1, 0.5)
        res = tost_paired(diffs, bound=1.0, alpha=0.05)
        assert res.n == 12
        assert res.mean_diff == pytest.approx(0.1, abs=1e-12)
        assert res.sd_diff == pytest.approx(0.5, abs=1e-12)
        assert res.t_lower == pytest.approx(7.621, abs=1e-3)
        assert res.t_upper == pytest.approx(-6.235, abs=1e-3)
        assert res.equivalent is True
        # p values against the high-precision oracle
        se = 0.5 / math.sqrt(12)
        assert abs(res.p_lower - (1 - mp_t_cdf((0.1 + 1) / se, 11))) <= 1e-6
        assert abs(res.p_upper - mp_t_cdf((0.1 - 1) / se, 11)) <= 1e-6

    def test_mean_at_bound_not_equivalent(self):
        diffs = make_diffs(12, 1.0, 0.5)
        res = tost_paired(diffs, bound=1.0, alpha=0.05)
        assert res.t_upper == pytest.approx(0.0, abs=1e-12)
        assert res.p_upper == pytest.approx(0.5, abs=1e-9)
        assert res.equivalent is False

    def test_identical_diffs_degenerate(self):
        with pytest.raises(DegenerateVarianceError):
            tost_paired([0.5] * 12)

    def test_insufficient_data(self):
        with pytest.raises(InsufficientDataError):
            tost_paired([0.1])

    def test_invalid_bound_and_alpha(self):
        with pytest.raises(DomainError):
            tost_paired([0.1, 0.2], bound=0)
        with pytest.raises(DomainError):
            tost_paired([0.1, 0.2], alpha=1.0)

    @given(
        st.lists(st.floats(min_value=-3, max_value=3), min_size=3, max_size=24),
        st.floats(min_value=0.1, max_value=3.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_negation_symmetry(self, diffs, bound):
        assume(statistics.stdev(diffs) > 1e-6)
        res = tost_paired(diffs, bound=bound)
        neg = tost_paired([-d for d in diffs], bound=bound)
        assert neg.t_lower == pytest.approx(-res.t_upper, rel=1e-9)
        assert neg.t_upper == pytest.approx(-res.t_lower, rel=1e-9)
        assert neg.p_lower == pytest.approx(res.p_upper, abs=1e-12)
        assert neg.p_upper == pytest.approx(res.p_lower, abs=1e-12)
        assert neg.equivalent == res.equivalent

    @given(
        st.lists(st.floats(min_value=-2, max_value=2), min_size=3, max_size=24),
        st.floats(min_value=0.2, max_value=1.5),
        st.floats(min_value=0.1, max_value=2.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_widening_bound_keeps_equivalence(self, diffs, bound, widen):
        assume(statistics.stdev(diffs) > 1e-6)
        narrow = tost_paired(diffs, bound=bound)
        wide = tost_paired(diffs, bound=bound + widen)
        if narrow.equivalent:
            assert wide.equivalent


# --- grid construction --------------------------------------------------------

NOISY = [0, 0, 0, 0, 0, 1, -1, 0, 0, 0, 1, -1]  # mean 0, sd ~0.6
SHIFTED = [2, 2, 2, 2, 2, 3, 1, 2, 2, 2, 3, 1]  # mean 2, sd ~0.6


def records_for(context: str, variant: Variant, diffs: list[int], dimension=Dimension.COMFORT):
    """Paired records per participant: headset rating 4, simulator 4 + diff."""
    recs = []
    for i, diff in enumerate(diffs):
        participant = f"p{i:02d}"
        recs.append(
            RatingRecord(
                participant=participant,
                context=context,
                variant=variant,
                method=Method.HMD,
                dimension=dimension,
                rating=4,
            )
        )
        recs.append(
            RatingRecord(
                participant=participant,
                context=context,
                variant=variant,
                method=Method.SIMULATAR,
                dimension=dimension,
                rating=4 + diff,
            )
        )
    return recs


class TestBuildGrid:
    def test_green_yellow_red(self):
        records = (
            records_for("green-ctx", Variant.A, NOISY)
            + records_for("green-ctx", Variant.B, NOISY)
            + records_for("yellow-ctx", Variant.A, NOISY)
            + records_for("yellow-ctx", Variant.B, SHIFTED)
            + records_for("red-ctx", Variant.A, SHIFTED)
            + records_for("red-ctx", Variant.B, SHIFTED)
        )
        grid = build_grid(records, bound=1.0, alpha=0.05)
        assert grid.cells[("green-ctx", "comfort")] is CellColor.GREEN
        assert grid.cells[("yellow-ctx", "comfort")] is CellColor.YELLOW
        assert grid.cells[("red-ctx", "comfort")] is CellColor.RED

    def test_grid_consistent_with_tost(self):
        records = records_for("ctx", Variant.A, NOISY) + records_for("ctx", Variant.B, SHIFTED)
        grid = build_grid(records)
        res_a = grid.results[("ctx", "comfort", "A")]
        res_b = grid.results[("ctx", "comfort", "B")]
        assert res_a.equivalent is tost_paired([float(d) for d in NOISY]).equivalent
        assert res_b.equivalent is tost_paired([float(d) for d in SHIFTED]).equivalent

    def test_degenerate_cell_reported_indeterminate(self):
        records = records_for("ctx", Variant.A, [0] * 12) + records_for("ctx", Variant.B, NOISY)
        grid = build_grid(records)
        assert ("ctx", "comfort", "A", "degenerate variance") in grid.indeterminate
        assert ("ctx", "comfort") not in grid.cells

    def test_unpaired_records_counted(self):
        records = records_for("ctx", Variant.A, NOISY)
        records.append(
            RatingRecord(
                participant="extra",
                context="ctx",
                variant=Variant.A,
                method=Method.HMD,
                dimension=Dimension.COMFORT,
                rating=5,
            )
        )
        grid = build_grid(records)
        assert grid.unpaired_count == 1
        assert grid.results[("ctx", "comfort", "A")].n == 12

    def test_rating_range_enforced(self):
        with pytest.raises(ConfigError):
            RatingRecord(
                participant="p",
                context="c",
                variant=Variant.A,
                method=Method.HMD,
                dimension=Dimension.COMFORT,
                rating=8,
            )


class TestRatingsCsv:
    def test_round_trip(self, tmp_path):
        csv_path = tmp_path / "ratings.csv"
        lines = ["participant,context,variant,method,dimension,rating"]
        for i, diff in enumerate(NOISY):
            lines.append(f"p{i:02d},office,A,hmd,comfort,4")
            lines.append(f"p{i:02d},office,A,simulatar,comfort,{4 + diff}")
        csv_path.write_text("\n".join(lines) + "\n")
        records = load_ratings_csv(csv_path)
        assert len(records) == 24
        grid = build_grid(records)
        assert grid.cells[("office", "comfort")] is CellColor.GREEN

    def test_bad_header_rejected(self, tmp_path):
        csv_path = tmp_path / "ratings.csv"
        csv_path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ConfigError, match="header"):
            load_ratings_csv(csv_path)

    def test_bad_enum_reports_line(self, tmp_path):
        csv_path = tmp_path / "ratings.csv"
        csv_path.write_text(
            "participant,context,variant,method,dimension,rating\np1,office,A,hmd,comfort,9\n"
        )
        with pytest.raises(ConfigError, match="line 2"):
            load_ratings_csv(csv_path)

import matplotlib.pyplot as plt
import pytest

from plots.render import (
    COMPARISON_PANELS,
    KINDS,
    PlotDataError,
    build_figure,
    render,
)


@pytest.fixture(autouse=True)
def close_figures():
    yield
    plt.close("all")


class TestShippedSamples:
    """All four figure kinds must render from the committed sample CSVs."""

    def test_every_kind_renders(self, samples, tmp_path):
        inputs = {
            "training_curves": [samples / "training_log_masac.csv",
                                samples / "training_log_madqn.csv"],
            "utilization": [samples / "utilization.csv"],
            "comparison_bars": [samples / "comparison.csv"],
            "dc_status": [samples / "events.csv"],
        }
        assert sorted(inputs) == sorted(KINDS)
        for kind, paths in inputs.items():
            out = tmp_path / f"{kind}.png"
            notes = render(kind, paths, out)
            assert out.exists() and out.stat().st_size > 0, kind
            assert notes == [], kind

    def test_comparison_has_exactly_four_named_panels(self, comparison_csv):
        fig, _ = build_figure("comparison_bars", [comparison_csv])
        titles = [ax.get_title() for ax in fig.axes]
        assert titles == [
            "Cumulative reward (USD)",
            "GPU hours",
            "Cost efficiency (USD per GPU hour)",
            "Carbon efficiency (gCO2 per GPU hour)",
        ]
        assert [t for _, t in COMPARISON_PANELS] == titles


class TestComparisonBars:
    def test_missing_learned_scenarios_noted_not_fatal(self, partial_comparison_csv):
        fig, notes = build_figure("comparison_bars", [partial_comparison_csv])
        assert len(notes) == 2
        assert any("masac" in n for n in notes)
        assert any("madqn" in n for n in notes)
        labels = [t.get_text() for t in fig.axes[0].get_xticklabels()]
        assert labels == ["local", "price_greedy", "carbon_greedy"]

    def test_union_of_summary_files(self, comparison_csv, partial_comparison_csv):
        # duplicated scenarios collapse to the first occurrence
        fig, notes = build_figure(
            "comparison_bars", [partial_comparison_csv, comparison_csv])
        assert notes == []
        labels = [t.get_text() for t in fig.axes[0].get_xticklabels()]
        assert labels == ["local", "price_greedy", "carbon_greedy",
                          "madqn", "masac"]

    def test_missing_column_names_column_and_file(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("scenario,utility_usd\nlocal,1.0\n")
        with pytest.raises(PlotDataError) as err:
            build_figure("comparison_bars", [bad])
        assert "gpu_hours" in str(err.value)
        assert "bad.csv" in str(err.value)


class TestInputValidation:
    def test_empty_file_is_explicit_error(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        with pytest.raises(PlotDataError, match="empty"):
            build_figure("utilization", [empty])

    def test_header_only_file_rejected(self, tmp_path):
        headed = tmp_path / "only_header.csv"
        headed.write_text("t,dc,used_gpus,r_max,utilization\n")
        with pytest.raises(PlotDataError, match="no data rows"):
            build_figure("utilization", [headed])

    def test_missing_file(self, tmp_path):
        with pytest.raises(PlotDataError, match="no such file"):
            build_figure("dc_status", [tmp_path / "ghost.csv"])

    def test_unknown_kind(self, comparison_csv):
        with pytest.raises(PlotDataError, match="unknown figure kind"):
            build_figure("pie", [comparison_csv])

    def test_single_input_kinds_reject_multiple(self, samples):
        with pytest.raises(PlotDataError, match="exactly one"):
            build_figure(
                "utilization",
                [samples / "utilization.csv", samples / "utilization.csv"],
            )


class TestFigureStructure:
    def test_training_curves_two_panels_one_line_per_log(self, samples):
        fig, _ = build_figure(
            "training_curves",
            [samples / "training_log_masac.csv",
             samples / "training_log_madqn.csv"],
        )
        assert len(fig.axes) == 2
        for ax in fig.axes:
            assert len(ax.get_lines()) == 2

    def test_utilization_one_panel_per_dc(self, samples):
        fig, _ = build_figure("utilization", [samples / "utilization.csv"])
        assert len(fig.axes) == 2  # the sample scenario has two regions

    def test_rendering_is_deterministic_and_idempotent(self, samples, tmp_path):
        out = tmp_path / "bars.png"
        render("comparison_bars", [samples / "comparison.csv"], out)
        first = out.read_bytes()
        render("comparison_bars", [samples / "comparison.csv"], out)
        assert out.read_bytes() == first

    def test_inputs_not_mutated(self, samples, tmp_path):
        before = (samples / "comparison.csv").read_bytes()
        render("comparison_bars", [samples / "comparison.csv"], tmp_path / "x.png")
        assert (samples / "comparison.csv").read_bytes() == before

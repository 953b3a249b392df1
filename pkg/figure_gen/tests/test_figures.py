import json

import pytest

from figure_gen import (
    METRICS,
    FigureSpec,
    SchemaError,
    cli,
    list_series,
    load_summary,
    render,
    render_all,
)

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"

UCB = "mnl-experiment-ucb"
EE = "mnl-bandit-ee"
EXP3 = "exp3eg"
SERIES = [(UCB, "0.0"), (UCB, "0.25"), (UCB, "0.5"), (UCB, "1.0"), (EE, ""), (EXP3, "")]


def write_summary(path, series=SERIES, ts=range(1, 61), sd_scale=0.1):
    """Fabricate a schema-exact benchmark summary.

    Policies with an empty alpha and no attraction estimator (the adversarial
    baseline) carry empty mse_v fields, mirroring the harness convention.
    """
    lines = [
        "policy,alpha,t,mean_cum_regret,sd_cum_regret,mean_mse_v,sd_mse_v,mean_mse_r,sd_mse_r"
    ]
    for policy, alpha in series:
        slowdown = 1.0 if policy == EXP3 else 0.6
        for t in ts:
            regret = repr(2.0 * t**slowdown)
            sd_regret = repr(sd_scale * t**0.5)
            if policy == EXP3:
                mse_v = sd_v = ""
            else:
                mse_v = repr(0.5 / t)
                sd_v = repr(sd_scale / t)
            mse_r = repr(0.2 / t)
            sd_r = repr(sd_scale / t)
            lines.append(
                f"{policy},{alpha},{t},{regret},{sd_regret},{mse_v},{sd_v},{mse_r},{sd_r}"
            )
    path.write_text("\n".join(lines) + "\n")


@pytest.fixture()
def results_dir(tmp_path):
    run_dir = tmp_path / "results"
    run_dir.mkdir()
    write_summary(run_dir / "summary.csv")
    return run_dir


def test_renders_benchmark_summary(results_dir, tmp_path):
    """Acceptance: all three figures render without error, one series per
    (policy, alpha), and the series lacking attraction-error values is left
    off that figure with a note."""
    out_dir = tmp_path / "figures"
    reports = render_all(results_dir, out_dir)

    assert sorted(reports) == sorted(METRICS)
    for metric, report in reports.items():
        data = (out_dir / f"{metric}.png").read_bytes()
        assert data.startswith(PNG_MAGIC) and len(data) > 1000

    assert reports["cum_regret"].series == tuple(SERIES)
    assert reports["mse_r"].series == tuple(SERIES)
    assert reports["cum_regret"].omitted == ()

    mse_v = reports["mse_v"]
    assert mse_v.series == tuple(s for s in SERIES if s[0] != EXP3)
    assert mse_v.omitted == ((EXP3, ""),)
    assert EXP3 in mse_v.note

    manifest = json.loads((out_dir / "figures_manifest.json").read_text())
    assert set(manifest["tool_versions"]) == {"figure-gen", "matplotlib", "pandas", "numpy"}
    assert manifest["figures"]["mse_v"]["omitted"] == [[EXP3, ""]]
    print(
        "[acceptance] figure rendering: 3 figures, "
        f"{len(reports['cum_regret'].series)} series each, "
        f"mse_v omits {mse_v.omitted} with note"
    )


def test_rendering_is_deterministic(results_dir, tmp_path):
    first = render_all(results_dir, tmp_path / "a")
    second = render_all(results_dir, tmp_path / "b")
    for metric in METRICS:
        a = (tmp_path / "a" / f"{metric}.png").read_bytes()
        b = (tmp_path / "b" / f"{metric}.png").read_bytes()
        assert a == b
    assert first.keys() == second.keys()


def test_single_trial_zero_band(tmp_path):
    run_dir = tmp_path / "run"
    run_dir.mkdir()
    write_summary(run_dir / "summary.csv", sd_scale=0.0)
    report = render(
        FigureSpec(
            input_path=str(run_dir / "summary.csv"),
            metric="cum_regret",
            output_path=str(tmp_path / "fig.png"),
        )
    )
    assert report.series == tuple(SERIES)
    assert (tmp_path / "fig.png").read_bytes().startswith(PNG_MAGIC)


def test_series_filter(results_dir, tmp_path):
    spec = FigureSpec(
        input_path=str(results_dir / "summary.csv"),
        metric="cum_regret",
        output_path=str(tmp_path / "filtered.png"),
        series_filter=(EXP3, f"{UCB}:0.5"),
    )
    report = render(spec)
    assert report.series == ((UCB, "0.5"), (EXP3, ""))


def test_empty_filter_keeps_every_series(results_dir, tmp_path):
    spec = FigureSpec(
        input_path=str(results_dir / "summary.csv"),
        metric="mse_r",
        output_path=str(tmp_path / "all.png"),
        series_filter=(),
    )
    assert render(spec).series == tuple(SERIES)


def test_filter_with_no_values_is_an_error(results_dir, tmp_path):
    spec = FigureSpec(
        input_path=str(results_dir / "summary.csv"),
        metric="mse_v",
        output_path=str(tmp_path / "none.png"),
        series_filter=(EXP3,),
    )
    with pytest.raises(SchemaError, match="no series"):
        render(spec)


def test_schema_error_lists_found_columns(tmp_path):
    bad = tmp_path / "summary.csv"
    bad.write_text("policy,alpha,t,mean_cum_regret\nucb,0.0,1,2.0\n")
    with pytest.raises(SchemaError, match="missing columns.*found.*mean_cum_regret"):
        load_summary(bad)


def test_missing_file_is_a_schema_error(tmp_path):
    with pytest.raises(SchemaError, match="not found"):
        load_summary(tmp_path / "absent.csv")


def test_metric_name_validation(results_dir, tmp_path):
    with pytest.raises(ValueError, match="metric must be one of"):
        FigureSpec(
            input_path=str(results_dir / "summary.csv"),
            metric="regret",
            output_path=str(tmp_path / "x.png"),
        )


def test_loader_preserves_alpha_text_and_nan_metrics(results_dir):
    frame = load_summary(results_dir / "summary.csv")
    assert set(frame["alpha"]) == {"0.0", "0.25", "0.5", "1.0", ""}
    exp3_rows = frame[frame["policy"] == EXP3]
    assert exp3_rows["mean_mse_v"].isna().all()
    assert not exp3_rows["mean_mse_r"].isna().any()
    assert list_series(frame) == SERIES


def test_cli_renders_all_then_single_metric(results_dir, tmp_path, capsys):
    out_dir = tmp_path / "figs"
    assert cli.main(["--in", str(results_dir), "--out", str(out_dir)]) == 0
    for metric in METRICS:
        assert (out_dir / f"{metric}.png").exists()
    assert (out_dir / "figures_manifest.json").exists()
    captured = capsys.readouterr().out
    assert "omitted" in captured  # the mse_v note is surfaced

    single = tmp_path / "single"
    assert cli.main(["--in", str(results_dir), "--out", str(single), "--metric", "mse_v"]) == 0
    assert (single / "mse_v.png").exists()
    assert not (single / "cum_regret.png").exists()


def test_cli_series_filter_and_errors(results_dir, tmp_path, capsys):
    out_dir = tmp_path / "figs"
    code = cli.main(
        ["--in", str(results_dir), "--out", str(out_dir), "--metric", "cum_regret", "--series", EE]
    )
    assert code == 0
    manifest = json.loads((out_dir / "figures_manifest.json").read_text())
    assert manifest["figures"]["cum_regret"]["series"] == [[EE, ""]]
    capsys.readouterr()

    empty = tmp_path / "empty"
    empty.mkdir()
    assert cli.main(["--in", str(empty), "--out", str(tmp_path / "x")]) == 2
    assert "not found" in capsys.readouterr().err

import csv
import subprocess
import sys

import pytest

from tenzo_plots import FigureSpec, MissingColumnsError, render, verify_rank_bounds

COLUMNS = [
    "experiment", "n", "eps", "M", "gamma", "seed", "s1_observed", "s1_bound",
    "storage_observed", "storage_bound", "residual", "time_ms",
]


def write_csv(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=COLUMNS)
        w.writeheader()
        for r in rows:
            w.writerow({c: r.get(c, "") for c in COLUMNS})
    return path


@pytest.fixture
def hilbert_csv(tmp_path):
    rows = [
        {"experiment": "hilbert", "n": 16, "eps": 10.0**-e, "s1_observed": e,
         "s1_bound": e + 2, "storage_observed": 100 * e, "storage_bound": 160 * e}
        for e in range(2, 9)
    ]
    return write_csv(tmp_path / "hilbert.csv", rows)


@pytest.fixture
def bench_csv(tmp_path):
    rows = []
    for solver, scale in (("bench-direct", 3.0), ("bench-eigen", 2.0), ("bench-fadi", 1.1)):
        for n in (4, 8, 16, 32):
            rows.append({"experiment": solver, "n": n, "eps": 1e-8,
                         "time_ms": 0.01 * n**scale})
    return write_csv(tmp_path / "bench.csv", rows)


def test_all_rank_figures_render(hilbert_csv, tmp_path):
    for fig in ("fig4l", "fig4r", "fig5l", "fig5r"):
        out = tmp_path / f"{fig}.png"
        series = render(FigureSpec((str(hilbert_csv),), fig, str(out)))
        assert out.exists() and out.stat().st_size > 0
        assert any(k.startswith("obs@") for k in series)
        assert any(k.startswith("bound@") for k in series)


def test_fig3l_ratio_series(tmp_path):
    rows = [
        {"experiment": "fourier-ratio", "n": 24, "eps": 1e-10, "M": m,
         "s1_observed": int(2.2 * m)}
        for m in (2, 4, 8)
    ]
    path = write_csv(tmp_path / "f.csv", rows)
    series = render(FigureSpec((str(path),), "fig3l", str(tmp_path / "f.png")))
    ms, ratios = series["ratio"]
    assert ms == (2.0, 4.0, 8.0)
    assert ratios[0] == pytest.approx(4 / 4)


def test_fig3r_groups_by_gamma(tmp_path):
    rows = []
    for gamma in (10, 100):
        for e in (2, 4, 6):
            rows.append({"experiment": "gauss-bumps", "n": 20, "eps": 10.0**-e,
                         "gamma": gamma, "s1_observed": e + gamma // 10,
                         "s1_bound": 3 * e + gamma // 10})
    path = write_csv(tmp_path / "g.csv", rows)
    series = render(FigureSpec((str(path),), "fig3r", str(tmp_path / "g.png")))
    assert "obs@10" in series and "bound@100" in series


def test_fig6e_bench_curves(bench_csv, tmp_path):
    series = render(FigureSpec((str(bench_csv),), "fig6", str(tmp_path / "b.png")))
    assert set(series) == {"direct", "eigen", "fadi"}
    ns, secs = series["fadi"]
    assert list(ns) == sorted(ns)
    assert all(s > 0 for s in secs)


def test_rendering_is_pure(hilbert_csv, tmp_path):
    s1 = render(FigureSpec((str(hilbert_csv),), "fig4r", str(tmp_path / "a.png")))
    s2 = render(FigureSpec((str(hilbert_csv),), "fig4r", str(tmp_path / "b.png")))
    assert s1 == s2


def test_empty_csv_renders_empty_axes(tmp_path):
    path = write_csv(tmp_path / "empty.csv", [])
    out = tmp_path / "empty.png"
    series = render(FigureSpec((str(path),), "fig4r", str(out)))
    assert series == {}
    assert out.exists() and out.stat().st_size > 0


def test_missing_columns_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["experiment", "value"])
        w.writerow(["x", "1"])
    with pytest.raises(MissingColumnsError):
        render(FigureSpec((str(path),), "fig4r", str(tmp_path / "x.png")))


def test_unknown_figure_id():
    with pytest.raises(ValueError):
        FigureSpec(("x.csv",), "fig9", "out.png")


def test_verify_rank_bounds(hilbert_csv, tmp_path):
    assert verify_rank_bounds(hilbert_csv) == 7
    bad = write_csv(
        tmp_path / "bad.csv",
        [{"experiment": "hilbert", "n": 4, "eps": 1e-2, "s1_observed": 9,
          "s1_bound": 3}],
    )
    with pytest.raises(AssertionError):
        verify_rank_bounds(bad)


def test_cli_missing_columns_exit(tmp_path):
    path = tmp_path / "bad.csv"
    with open(path, "w") as fh:
        fh.write("only,two\n1,2\n")
    proc = subprocess.run(
        [sys.executable, "-m", "tenzo_plots", "--csv", str(path),
         "--fig", "fig6", "--out", str(tmp_path / "o.png")],
        capture_output=True, text=True,
    )
    assert proc.returncode != 0


def test_cli_renders(bench_csv, tmp_path):
    out = tmp_path / "fig6.png"
    proc = subprocess.run(
        [sys.executable, "-m", "tenzo_plots", "--csv", str(bench_csv),
         "--fig", "fig6", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert out.exists()

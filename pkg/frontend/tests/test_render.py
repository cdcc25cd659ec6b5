"""Figure construction: the plotted data must equal the CSV data."""
import numpy as np
import pytest
from numpy.testing import assert_array_equal

import matplotlib.pyplot as plt

from plotkit.data import read_box, read_profile
from plotkit.render import (
    build_box_figure,
    build_profile_figure,
    render_box,
    render_profile,
)
from plotkit.stats import box_stats

PROFILE = """\
solver,alpha,rho
FLE,1.0,0.6666666666666666
FLE,2.0,0.6666666666666666
FLE,4.0,1.0
FLE-S-nn_relu,1.0,0.6666666666666666
FLE-S-nn_relu,2.0,1.0
FLE-S-nn_relu,4.0,1.0
"""

SINGLE = """\
solver,alpha,rho
FLE,1.0,1.0
"""


@pytest.fixture(autouse=True)
def close_figures():
    yield
    plt.close("all")


def profile_csv(tmp_path, text=PROFILE):
    path = tmp_path / "profile.csv"
    path.write_text(text)
    return path


def box_csv(tmp_path, seed=90):
    rng = np.random.default_rng(seed)
    lines = ["basis_label,metric,value"]
    for metric in ("value", "gradient", "hessian"):
        for label in range(1, 13):
            for v in rng.uniform(0.05, 0.95, 5):
                lines.append(f"{label},{metric},{float(v)!r}")
    path = tmp_path / "box.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


def test_profile_lines_match_csv_values(tmp_path):
    path = profile_csv(tmp_path)
    curves = read_profile(path)
    fig = build_profile_figure(curves)
    ax = fig.axes[0]
    assert ax.get_xscale() == "log"
    lines = {ln.get_label(): ln for ln in ax.get_lines()}
    assert list(lines) == list(curves)
    for solver, (alphas, rhos) in curves.items():
        assert_array_equal(lines[solver].get_xdata(), alphas)
        assert_array_equal(lines[solver].get_ydata(), rhos)
    legend = [t.get_text() for t in ax.get_legend().get_texts()]
    assert legend == list(curves)


def test_single_solver_is_flat_at_one(tmp_path):
    fig = build_profile_figure(read_profile(profile_csv(tmp_path, SINGLE)))
    (line,) = fig.axes[0].get_lines()
    assert_array_equal(line.get_ydata(), [1.0])


def test_box_panels_and_order(tmp_path):
    groups = read_box(box_csv(tmp_path))
    fig = build_box_figure(groups)
    assert len(fig.axes) == 3
    for ax, metric in zip(fig.axes, ("value", "gradient", "hessian")):
        assert ax.get_title() == metric
        labels = [t.get_text() for t in ax.get_xticklabels()]
        assert labels == [str(i) for i in range(1, 13)]
        assert ax.get_ylim() == (0.0, 1.0)


def test_large_values_are_clipped_by_the_axis(tmp_path):
    path = tmp_path / "box.csv"
    rows = [f"1,hessian,{v}" for v in (1.3, 1.4, 1.5, 1.6, 1.7)]
    path.write_text("basis_label,metric,value\n" + "\n".join(rows) + "\n")
    fig = build_box_figure(read_box(path))
    ax = fig.axes[0]
    assert box_stats([1.3, 1.4, 1.5, 1.6, 1.7])["med"] == 1.5  # above the axis
    assert ax.get_ylim() == (0.0, 1.0)


def test_constant_column_draws_degenerate_box(tmp_path):
    path = tmp_path / "box.csv"
    path.write_text("basis_label,metric,value\n"
                    + "\n".join("1,value,0.4" for _ in range(5)) + "\n")
    fig = build_box_figure(read_box(path))
    assert len(fig.axes) == 1


def test_render_writes_png_files(tmp_path):
    out = render_profile(profile_csv(tmp_path), tmp_path / "profile.png")
    assert (tmp_path / "profile.png").read_bytes()[:4] == b"\x89PNG"
    assert str(out).endswith("profile.png")
    render_box(box_csv(tmp_path), tmp_path / "box.png")
    assert (tmp_path / "box.png").read_bytes()[:4] == b"\x89PNG"

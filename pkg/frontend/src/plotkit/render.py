"""Figure builders and file renderers."""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .data import read_box, read_profile
from .stats import box_stats


def build_profile_figure(curves):
    """Right-continuous step plot of {solver: (alphas, rhos)} on a log x."""
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for solver, (alphas, rhos) in curves.items():
        ax.step(alphas, rhos, where="post", label=solver)
    ax.set_xscale("log")
    ax.set_xlabel("performance ratio")
    ax.set_ylabel("fraction of problems")
    ax.set_ylim(0.0, 1.05)
    ax.legend()
    fig.tight_layout()
    return fig


def build_box_figure(groups):
    """One panel of labelled boxes per metric; y clipped to [0, 1]."""
    metrics = list(groups)
    fig, axes = plt.subplots(1, len(metrics),
                             figsize=(0.45 * max(len(g) for g in groups.values())
                                      * len(metrics) + 1.5, 4.0),
                             squeeze=False)
    for ax, metric in zip(axes[0], metrics):
        stats = []
        for label, values in groups[metric].items():
            stats.append({"label": label, **box_stats(values)})
        ax.bxp(stats, showfliers=True)
        ax.set_ylim(0.0, 1.0)
        ax.set_title(metric)
    fig.tight_layout()
    return fig


def render_profile(csv_path, image_path):
    """Render a profile CSV to an image file; returns the image path."""
    fig = build_profile_figure(read_profile(csv_path))
    fig.savefig(image_path)
    plt.close(fig)
    return image_path


def render_box(csv_path, image_path):
    """Render a box CSV to an image file; returns the image path."""
    fig = build_box_figure(read_box(csv_path))
    fig.savefig(image_path)
    plt.close(fig)
    return image_path

"""Report figures rendered with matplotlib (Agg backend, file output only)."""

import matplotlib

matplotlib.use("Agg")

import matplotlib as mpl  # noqa: E402
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402

from .imageio import LABEL_PALETTE, OVERLAY_COLORS, overlay_colors  # noqa: E402

__all__ = ["REPORT_RC", "segmentation_figure", "figure_path_for"]

REPORT_RC = {
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.linewidth": 0.8,
    "image.interpolation": "nearest",
}


def figure_path_for(report_path):
    """Figure written next to a report: same stem, ``.png`` suffix."""
    from pathlib import Path

    p = Path(report_path)
    return p.with_suffix(".png") if p.suffix.lower() != ".png" else p.with_name(p.stem + "_figure.png")


def _display(image):
    img = np.asarray(image, dtype=float)
    if img.shape[2] == 1:
        return img[:, :, 0], "gray"
    if img.shape[2] >= 3:
        return np.clip(img[:, :, :3] / 255.0, 0.0, 1.0), None
    return img[:, :, 0], "gray"


def segmentation_figure(image, decomposition, labels, path, title=None):
    """Four panels: input, surface overlay, cluster labels, surface sizes."""
    with mpl.rc_context(REPORT_RC):
        fig, axes = plt.subplots(1, 4, figsize=(13, 3.6))
        shown, cmap = _display(image)
        axes[0].imshow(shown, cmap=cmap, vmin=0 if cmap else None, vmax=255 if cmap else None)
        axes[0].set_title("input")

        slot, idx = overlay_colors(decomposition)
        table = np.array(OVERLAY_COLORS, dtype=float) / 255.0
        axes[1].imshow(table[slot[idx]])
        axes[1].set_title(f"{len(decomposition.surfaces)} surfaces")

        if labels is not None:
            k = int(labels.max()) + 1
            cm = ListedColormap(np.array(LABEL_PALETTE[:max(k, 1)], dtype=float) / 255.0)
            axes[2].imshow(labels, cmap=cm, vmin=-0.5, vmax=k - 0.5)
            axes[2].set_title(f"{k} clusters")
        else:
            axes[2].set_axis_off()
        for ax in axes[:3]:
            ax.set_xticks([])
            ax.set_yticks([])

        sizes = np.array([s.size for s in decomposition.surfaces])
        edges = np.logspace(0, np.log10(max(sizes.max(), 2) * 1.5), 21)
        axes[3].hist(sizes, bins=edges, color="0.35")
        axes[3].set_xscale("log")
        axes[3].set_xlabel("pixels per surface")
        axes[3].set_ylabel("surfaces")
        p = decomposition.params
        axes[3].set_title(f"eps={p.epsilon:g}, npar={p.npar:g}")
        if title:
            fig.suptitle(title)
        fig.tight_layout()
        fig.savefig(path, format="png", metadata={"Software": None})
        plt.close(fig)

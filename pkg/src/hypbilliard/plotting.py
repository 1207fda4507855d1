"""Static figures written to files (Agg backend, no display needed)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from hypbilliard.interchange import arc_polyline  # noqa: E402


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def trajectory_figure(pt, path, samples=64):
    """xy and xz projections of the arcs in the ball, with the ideal vertices."""
    fig, axes = plt.subplots(1, 2, figsize=(9, 4.5))
    s = np.linspace(0.0, 2.0 * np.pi, 200)
    verts = np.array([v.point.u for v in pt.poly.vertices])
    cmap = plt.get_cmap("viridis")
    idx = [n for n in pt.indices if pt.arcs[n].entry is not None]
    for ax, (i, j), name in zip(axes, ((0, 1), (0, 2)), ("xy", "xz")):
        ax.plot(np.cos(s), np.sin(s), color="0.6", lw=0.8)
        ax.scatter(verts[:, i], verts[:, j], marker="x", color="k", zorder=3)
        for m, n in enumerate(idx):
            p = arc_polyline(pt.arcs[n], samples)
            ax.plot(p[:, i], p[:, j], color=cmap(m / max(1, len(idx) - 1)), lw=1.0)
        ax.set_aspect("equal")
        ax.set_xlim(-1.05, 1.05)
        ax.set_ylim(-1.05, 1.05)
        ax.set_title(f"{name} projection")
    _save(fig, path)


def chain_figure(chain, report, path):
    """Boundary-circle radii and base distances against unfolding step."""
    fig, (a1, a2) = plt.subplots(1, 2, figsize=(9, 4))
    for steps, radii, dist, style in (
        (chain.forward, report.radii, report.distances, "o-"),
        (chain.backward, report.backward_radii, report.backward_distances, "s--"),
    ):
        j = [abs(s.index) for s in steps]
        label = "forward" if steps is chain.forward else "backward"
        a1.semilogy(j, radii, style, ms=3, label=label)
        a2.plot(j, dist, style, ms=3, label=label)
    a1.set_xlabel("step")
    a1.set_ylabel("boundary circle radius")
    a2.set_xlabel("step")
    a2.set_ylabel("distance to base point")
    a1.legend()
    _save(fig, path)

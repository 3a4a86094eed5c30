"""Rendering of the loss-comparison report as a figure file."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def render_loss_csv(csv_text: str, out_path: str) -> None:
    """Plot log10(eta_hybrid / eta_temporal) versus N, one curve per M."""
    curves: dict[int, tuple[list[int], list[float]]] = {}
    for line in csv_text.splitlines():
        if not line or line.startswith("#") or line.startswith("N,"):
            continue
        n_s, m_s, exact, _approx, _et, _eh = line.split(",")
        xs, ys = curves.setdefault(int(m_s), ([], []))
        xs.append(int(n_s))
        ys.append(float(exact))
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for m in sorted(curves):
        xs, ys = curves[m]
        ax.plot(xs, ys, label=f"M = {m}", linewidth=1.2)
    ax.axhline(0.0, color="0.6", linewidth=0.8, linestyle="--")
    ax.set_xlabel("modes N")
    ax.set_ylabel(r"$\log_{10}(\eta_{\mathrm{hybrid}} / \eta_{\mathrm{temporal}})$")
    ax.legend(fontsize=8, ncol=2)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)

"""Figure rendering for risk and allocation reports.

Renders the VaR curve (risk level on the vertical axis against the impact
quantile) and the grouped allocation bars (scenario VaR next to the
nominal-model impact per protection subset) to image files, using the
non-interactive Agg backend so the CLI works headless.
"""

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

__all__ = ["render_var_curve", "render_allocation_bars"]


def _finite_ceiling(values):
    finite = [v for v in values if math.isfinite(v)]
    return max(finite) * 1.05 if finite else 1.0


def render_var_curve(curve, gammas, path, dpi=120):
    """Step plot of (VaR, beta) pairs with the sample distribution as a rug.

    Unbounded quantile values are clipped to the plot edge and marked.
    """
    betas = [b for b, _ in curve]
    vals = [v for _, v in curve]
    ceiling = _finite_ceiling(vals + list(gammas))

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    clipped = [min(v, ceiling) for v in vals]
    ax.step(clipped, betas, where="post", color="tab:blue", lw=1.8,
            label="empirical VaR")
    inf_pts = [(c, b) for c, b, v in zip(clipped, betas, vals)
               if math.isinf(v)]
    if inf_pts:
        ax.plot(*zip(*inf_pts), "r>", ms=6, label="unbounded")
    finite_g = [g for g in gammas if math.isfinite(g)]
    if finite_g:
        ax.plot(finite_g, np.zeros(len(finite_g)), "|", color="0.5",
                ms=10, alpha=0.6, label="samples")
    ax.set_xlabel(r"impact level $\gamma$")
    ax.set_ylabel(r"risk level $\beta$")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
    return path


def render_allocation_bars(rows, path, dpi=120):
    """Grouped bars per protection subset: scenario VaR vs nominal impact.

    `rows` is a list of (label, var_value, nominal_value_or_None).
    """
    labels = [r[0] for r in rows]
    var_vals = [r[1] for r in rows]
    nom_vals = [r[2] for r in rows]
    have_nominal = any(v is not None for v in nom_vals)
    ceiling = _finite_ceiling(
        var_vals + [v for v in nom_vals if v is not None]
    )

    x = np.arange(len(labels))
    width = 0.38 if have_nominal else 0.6
    fig, ax = plt.subplots(figsize=(max(6.0, 1.1 * len(labels)), 4.0))

    def bars(offset, values, color, name):
        heights = [min(v, ceiling) if v is not None else 0.0 for v in values]
        b = ax.bar(x + offset, heights, width, color=color, label=name)
        for rect, v in zip(b, values):
            if v is not None and math.isinf(v):
                ax.annotate("inf", (rect.get_x() + rect.get_width() / 2,
                                    rect.get_height()),
                            ha="center", va="bottom", fontsize=8, color="red")

    bars(-width / 2 if have_nominal else 0.0, var_vals, "tab:blue",
         "scenario VaR")
    if have_nominal:
        bars(width / 2, nom_vals, "tab:red", "nominal impact")
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("residual risk")
    ax.set_xlabel("protected subset")
    ax.grid(True, axis="y", alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
    return path

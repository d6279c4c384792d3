"""Figure rendering for sweep results (headless matplotlib)."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .runner import ResultRow

_X_LABEL = {
    "lambda_b_per_km2": "station density (1/km$^2$)",
    "lambda_u_per_km2": "user density (1/km$^2$)",
    "lambda_d_per_km2": "D2D density (1/km$^2$)",
    "gamma_dbm": "sensing threshold (dBm)",
    "rho_d_dbm": "D2D receiver sensitivity (dBm)",
    "rho_b_dbm": "station receiver sensitivity (dBm)",
    "tau_db": "SINR threshold (dB)",
    "d_o_m": "D2D link distance (m)",
    "n_channels": "number of channels",
}


def render_rows(
    rows: list[ResultRow],
    metrics: tuple[str, ...],
    out_png: str | Path,
    title: str = "",
    log_x: bool = False,
) -> Path:
    """Plot the named metric columns vs the sweep value.

    Analytic rows become lines, Monte Carlo rows become markers with
    error bars (the row-level confidence half-width).
    """
    if not rows:
        raise ValueError("no rows to plot")
    fig, ax = plt.subplots(figsize=(7.0, 4.6))
    scenarios = sorted({(r.policy, r.cd_side, r.source) for r in rows})
    for metric in metrics:
        for policy, side, source in scenarios:
            pts = [
                r
                for r in rows
                if (r.policy, r.cd_side, r.source) == (policy, side, source)
                and r.metrics.get(metric) is not None
            ]
            if not pts:
                continue
            xs = [r.value for r in pts]
            ys = [r.metrics[metric] for r in pts]
            label = f"{side}-{policy}" + (f" {metric}" if len(metrics) > 1 else "")
            if source == "analytic":
                ax.plot(xs, ys, label=label)
            else:
                errs = [r.ci_halfwidth or 0.0 for r in pts]
                ax.errorbar(
                    xs, ys, yerr=errs, fmt="+", color="black", capsize=2,
                    label=f"{label} (mc)", linestyle="none",
                )
    if log_x:
        ax.set_xscale("log")
    ax.set_xlabel(_X_LABEL.get(rows[0].sweep_var, rows[0].sweep_var))
    ax.set_ylabel(" / ".join(metrics))
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    out_png = Path(out_png)
    out_png.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(out_png, dpi=150)
    plt.close(fig)
    return out_png

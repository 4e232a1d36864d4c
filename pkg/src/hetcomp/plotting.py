"""Figures written next to the CSV outputs: SNR-CQI map, CoMP state traces, throughput CDFs."""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from . import link  # noqa: E402

RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.2,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "figure.dpi": 100,
    "savefig.bbox": "tight",
}
# keep PNGs identical between reruns
PNG_METADATA = {"Software": None}


def figsize(scale=1.0, ratio=0.62):
    width = 3.5 * scale
    return (width, width * ratio)


def save(fig, path):
    fig.savefig(path, metadata=PNG_METADATA)
    plt.close(fig)


def snr_cqi(path, lo=-10.0, hi=25.0):
    snr = np.linspace(lo, hi, 2001)
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=figsize())
        ax.step(snr, link.snr_to_cqi(snr), where="post", color="k")
        ax.set_xlabel("SNR [dB]")
        ax.set_ylabel("CQI")
        ax.set_yticks(range(0, 16, 3))
        save(fig, path)


def comp_state(path, traces):
    """One step panel per mode, state 1 = CoMP enabled."""
    with plt.rc_context(RC):
        fig, axes = plt.subplots(1, len(traces), figsize=figsize(1.8, 0.35), sharey=True, squeeze=False)
        for ax, (mode, trace) in zip(axes[0], traces.items()):
            t = [r.tti for r in trace]
            ax.step(t, [r.state for r in trace], where="post")
            ax.set_title(mode)
            ax.set_xlabel("TTI")
            ax.set_ylim(-0.1, 1.1)
            ax.set_yticks([0, 1])
        axes[0][0].set_ylabel("CoMP state")
        save(fig, path)


def throughput_cdf(path, per_ue_by_mode):
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=figsize())
        for mode, rows in per_ue_by_mode.items():
            v = np.sort([r.throughput_mbps for r in rows])
            ax.step(v, np.arange(1, len(v) + 1) / len(v), where="post", label=mode)
        ax.axhline(0.05, color="0.5", lw=0.8, ls=":")
        ax.set_xlabel("UE throughput [Mbps]")
        ax.set_ylabel("CDF")
        ax.legend(loc="lower right")
        save(fig, path)


def render_all(out_dir, env, results):
    fig_dir = os.path.join(out_dir, "figures")
    os.makedirs(fig_dir, exist_ok=True)
    snr_cqi(os.path.join(fig_dir, "snr_cqi.png"))
    comp_state(os.path.join(fig_dir, "comp_state.png"), {m: r.trace for m, r in results.items()})
    throughput_cdf(os.path.join(fig_dir, "throughput_cdf.png"), {m: r.per_ue for m, r in results.items()})

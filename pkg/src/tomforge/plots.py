"""Report figures rendered to files next to the delimited outputs."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def save_accuracy_by_order(report, path: str) -> None:
    orders = sorted(report.per_order)
    values = [report.per_order[k] for k in orders]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.bar([str(k) for k in orders], values, color="#4878cf")
    ax.set_xlabel("belief order")
    ax.set_ylabel("accuracy")
    ax.set_ylim(0, 1.0)
    ax.set_title(f"accuracy by order (n={report.n})")
    for x, v in enumerate(values):
        ax.text(x, v + 0.02, f"{v:.2f}", ha="center", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_response_lengths(records, path: str) -> None:
    tokens = [r.response_tokens for r in records]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.hist(tokens, bins=min(30, max(5, len(set(tokens)))), color="#6acc65", edgecolor="white")
    mean = sum(tokens) / len(tokens)
    ax.axvline(mean, color="#d65f5f", linestyle="--", label=f"mean {mean:.1f}")
    ax.set_xlabel("response tokens")
    ax.set_ylabel("count")
    ax.set_title("response length")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_answer_distribution(bias_report, path: str, top: int = 20) -> None:
    items = sorted(bias_report.fractions.items(), key=lambda kv: (-kv[1], kv[0]))[:top]
    labels = [k for k, _ in items]
    values = [v for _, v in items]
    fig, ax = plt.subplots(figsize=(6, max(2.5, 0.3 * len(items))))
    ax.barh(labels[::-1], values[::-1], color="#ee854a")
    ax.set_xlabel("fraction of answers")
    ax.set_title(f"answer distribution (n={bias_report.n})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def figure_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path

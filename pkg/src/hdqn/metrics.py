"""Per-episode metric columns and CSV emission.

All columns are trailing-window statistics computed after training from
raw per-episode tallies, so logging costs nothing during the run and two
identical runs serialize to identical bytes. Floats are written with
repr(), the shortest round-trip form.
"""
from __future__ import annotations

import numpy as np

CHAIN_STATES = ("s3", "s4", "s5", "s6")  # reported visit columns, ids 2..5

CHAIN_HEADER = ("seed", "episode", "reward_ma") + tuple(
    f"visits_{name}" for name in CHAIN_STATES
)
KEYDOOR_HEADER = ("seed", "episode", "reward_ma", "goal", "pick_frac", "success_rate")


def trailing_sum(values, window: int) -> np.ndarray:
    """Sliding-window sum; the window expands until `window` entries exist."""
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("trailing_sum expects a 1-D sequence")
    n = arr.shape[0]
    c = np.concatenate(([0.0], np.cumsum(arr)))
    lo = np.maximum(0, np.arange(1, n + 1) - window)
    return c[1:] - c[lo]


def trailing_mean(values, window: int) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    sums = trailing_sum(arr, window)
    n = arr.shape[0]
    counts = np.minimum(np.arange(1, n + 1), window)
    return sums / counts


def windowed_ratio(numerators, denominators, window: int) -> np.ndarray:
    """Windowed sum(num)/sum(den), 0.0 wherever the denominator sum is 0."""
    num = trailing_sum(numerators, window)
    den = trailing_sum(denominators, window)
    out = np.zeros_like(num)
    nz = den > 0
    out[nz] = num[nz] / den[nz]
    return out


def chain_columns(rewards, visit_counts, reward_window: int, visit_window: int) -> dict:
    """Column arrays for one chain seed.

    visit_counts: (episodes, n_states) per-episode entry tallies.
    """
    visits = np.asarray(visit_counts, dtype=np.float64)
    cols = {"reward_ma": trailing_mean(rewards, reward_window)}
    for offset, name in enumerate(CHAIN_STATES):
        cols[f"visits_{name}"] = trailing_mean(visits[:, offset + 2], visit_window)
    return cols


def keydoor_columns(rewards, pick_counts, success_counts, window: int) -> dict:
    """Column arrays for one key-door seed, keyed per goal id.

    pick_counts/success_counts: (episodes, n_goals) per-episode tallies.
    """
    picks = np.asarray(pick_counts, dtype=np.float64)
    succ = np.asarray(success_counts, dtype=np.float64)
    total_picks = picks.sum(axis=1)
    cols = {"reward_ma": trailing_mean(rewards, window)}
    for g in range(picks.shape[1]):
        cols[f"pick_frac_{g}"] = windowed_ratio(picks[:, g], total_picks, window)
        cols[f"success_rate_{g}"] = windowed_ratio(succ[:, g], picks[:, g], window)
    return cols


def format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_cell(cell) for cell in row) + "\n")


def chain_rows(seed: int, cols: dict):
    n = len(cols["reward_ma"])
    names = ["reward_ma"] + [f"visits_{s}" for s in CHAIN_STATES]
    for i in range(n):
        yield [seed, i + 1] + [cols[name][i] for name in names]


def keydoor_rows(seed: int, cols: dict, goal_names) -> "iter":
    n = len(cols["reward_ma"])
    for i in range(n):
        for g, goal in enumerate(goal_names):
            yield [
                seed,
                i + 1,
                cols["reward_ma"][i],
                goal,
                cols[f"pick_frac_{g}"][i],
                cols[f"success_rate_{g}"][i],
            ]


def aggregate(per_seed_cols: list) -> dict:
    """Cross-seed mean and standard error per episode index.

    Seeds may have different episode counts (step-budgeted phases); each
    index aggregates the seeds that reached it. SEM uses ddof=1 and is
    0.0 where only one seed contributes.
    """
    names = list(per_seed_cols[0])
    lengths = [len(cols[names[0]]) for cols in per_seed_cols]
    n_max = max(lengths)
    out = {}
    for name in names:
        stacked = [np.asarray(cols[name]) for cols in per_seed_cols]
        if min(lengths) == n_max:
            block = np.stack(stacked)
            mean = block.mean(axis=0)
            if len(stacked) > 1:
                sem = block.std(axis=0, ddof=1) / np.sqrt(len(stacked))
            else:
                sem = np.zeros(n_max)
        else:
            mean = np.empty(n_max)
            sem = np.zeros(n_max)
            for i in range(n_max):
                here = np.array([arr[i] for arr in stacked if len(arr) > i])
                mean[i] = here.mean()
                if len(here) > 1:
                    sem[i] = here.std(ddof=1) / np.sqrt(len(here))
        out[f"{name}_mean"] = mean
        out[f"{name}_sem"] = sem
    return out


def aggregate_header(base_header) -> tuple:
    metric_names = [h for h in base_header if h not in ("seed", "episode", "goal")]
    cols = ["episode"]
    if "goal" in base_header:
        cols.append("goal")
    for name in metric_names:
        cols.append(f"{name}_mean")
        cols.append(f"{name}_sem")
    return tuple(cols)


def chain_aggregate_rows(agg: dict):
    names = ["reward_ma"] + [f"visits_{s}" for s in CHAIN_STATES]
    n = len(agg["reward_ma_mean"])
    for i in range(n):
        row = [i + 1]
        for name in names:
            row.append(agg[f"{name}_mean"][i])
            row.append(agg[f"{name}_sem"][i])
        yield row


def keydoor_aggregate_rows(agg: dict, goal_names):
    n = len(agg["reward_ma_mean"])
    for i in range(n):
        for g, goal in enumerate(goal_names):
            yield [
                i + 1,
                goal,
                agg["reward_ma_mean"][i],
                agg["reward_ma_sem"][i],
                agg[f"pick_frac_{g}_mean"][i],
                agg[f"pick_frac_{g}_sem"][i],
                agg[f"success_rate_{g}_mean"][i],
                agg[f"success_rate_{g}_sem"][i],
            ]

"""CSV, summary and plot-script writers.

Floats are written with 9 significant digits.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

FLOAT_FMT = "{:.9g}"


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return FLOAT_FMT.format(float(v))
    return str(v)


def trajectory_header(traj) -> list:
    n, k = traj.states.shape[1], traj.outputs.shape[1]
    return (["t"] + [f"x_{i + 1}" for i in range(n)] + [f"u_{i + 1}" for i in range(k)]
            + [f"y_{i + 1}" for i in range(k)] + [f"r_{i + 1}" for i in range(k)])


def trajectory_to_csv(traj) -> str:
    table = np.column_stack([traj.times, traj.states, traj.controls, traj.outputs, traj.references])
    lines = [",".join(trajectory_header(traj))]
    lines += [",".join(FLOAT_FMT.format(v) for v in row) for row in table]
    return "\n".join(lines) + "\n"


def spacing_to_csv(times, spacings) -> str:
    m = spacings.shape[1]
    lines = [",".join(["t"] + [f"s_{i + 1}{i + 2}" for i in range(m)])]
    for t, row in zip(times, spacings):
        lines.append(",".join([FLOAT_FMT.format(t)] + [FLOAT_FMT.format(v) for v in row]))
    return "\n".join(lines) + "\n"


def summary_text(record: dict) -> str:
    """Flat ``key = value`` record, one per line."""
    return "".join(f"{k} = {_fmt(v)}\n" for k, v in record.items())


def read_csv(path):
    """Read a file written by this module back as ``(header, array)``."""
    text = Path(path).read_text().splitlines()
    header = text[0].split(",")
    data = np.array([[float(v) for v in line.split(",")] for line in text[1:]])
    return header, data.reshape(len(text) - 1, len(header))


_PLOT_TEMPLATE = '''"""Plot {title}. Generated by nrflow; needs matplotlib."""
import csv
import matplotlib.pyplot as plt


def load(name):
    with open(name) as fh:
        rows = list(csv.reader(fh))
    cols = list(zip(*rows[1:]))
    return {{h: [float(v) for v in c] for h, c in zip(rows[0], cols)}}


fig, ax = plt.subplots()
for label, name, column in {series!r}:
    data = load(name)
    ax.plot(data["t"], data[column], label=label)
{extra}ax.set_xlabel("t")
ax.set_title({title!r})
ax.legend()
fig.savefig({png!r}, dpi=120)
'''


def plot_script(title: str, series, png: str, reference=None) -> str:
    """Script plotting ``(label, csv_file, column)`` series against ``t``."""
    extra = ""
    if reference is not None:
        extra = (f'ref = load({reference!r})\n'
                 'ax.plot(ref["t"], ref["r_1"], "k-.", label="r(t)")\n')
    return _PLOT_TEMPLATE.format(title=title, series=list(series), png=png, extra=extra)


def write_text(directory, name, text) -> Path:
    path = Path(directory) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path

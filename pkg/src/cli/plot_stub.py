"""Plot-script stubs written next to the CSV artifacts of a run"""

import os
from collections.abc import Sequence

from beartype import beartype

__all__ = ["write_plot_stub"]

TEMPLATE = '''"""Plots for the `{command}` run in this directory.

Needs pandas and matplotlib; run it from the directory that holds the CSVs.
"""

import matplotlib.pyplot as plt
import pandas as pd

FILES = {files!r}

for name in FILES:
    frame = pd.read_csv(name)
    x, *columns = frame.columns
    figure, axis = plt.subplots()
    for column in columns:
        axis.plot(frame[x], frame[column], ".", markersize=2, label=column)
    axis.set_xlabel(x)
    axis.set_title(name)
    axis.legend()
    figure.savefig(name.replace(".csv", ".png"), dpi=150)
'''


@beartype
def write_plot_stub(out: str, command: str, csv_files: Sequence[str]) -> str:
    """Write `plot_<command>.py` into `out`

    Args:
        out (:obj:`str`): output directory of the run
        command (:obj:`str`): name of the command
        csv_files (:obj:`list` of :obj:`str`): CSV file names relative to `out`

    Returns:
        :obj:`str`: name of the script relative to `out`
    """
    filename = f"plot_{command.replace('-', '_')}.py"
    with open(os.path.join(out, filename), "w") as file:
        file.write(TEMPLATE.format(command=command, files=sorted(csv_files)))
    return filename

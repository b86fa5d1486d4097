"""Explicit constructions of vectors in the selfadjoint subspace of
one-speed Boltzmann (neutron transport) operators, together with the
transforms, oracles and scans that check them."""

import pathlib
import subprocess

__all__ = [
    "__version__",
]

SRC_DIR = pathlib.Path(__file__).parent

with open(SRC_DIR / "VERSION", "r") as file:
    __version__ = file.read().strip()

if __version__ == "0.0.0.dev0":
    # dev install: describe the checkout instead, if git is around
    try:
        process = subprocess.run(
            ["git", "describe", "--tags", "--dirty", "--long"],
            capture_output=True,
            universal_newlines=True,
            cwd=SRC_DIR.parent,
        )
        if process.returncode == 0:
            __version__ = process.stdout.strip()
    except Exception:
        pass

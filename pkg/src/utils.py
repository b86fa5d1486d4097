import concurrent.futures
import hashlib
import json
from collections.abc import Callable, Iterable
from typing import Any, Optional, Union

import numpy as np
from beartype import beartype
from tabulate import tabulate

__all__ = [
    "map_blocks",
    "canonical_json",
    "config_hash",
    "jsonable",
]


def _thread_count() -> int:
    from .config import get_value

    return max(1, int(get_value().threads))


def map_blocks(
    func: Callable,
    blocks: Iterable,
    threads: Optional[int] = None,
) -> list:
    """Apply `func` to every block and return the results in block order.

    With more than one thread (configuration `threads`, or the
    `SELFADJOINT_THREADS` environment variable) the blocks are evaluated by a
    thread pool; results are still collected in input order, so reductions
    over them do not depend on the schedule.
    """
    blocks = list(blocks)
    threads = _thread_count() if threads is None else threads
    if threads <= 1 or len(blocks) <= 1:
        return [func(block) for block in blocks]
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(func, blocks))


def jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays and complex numbers to JSON types;
    complex numbers become `[re, im]` pairs"""
    if isinstance(value, dict):
        return {str(key): jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


@beartype
def canonical_json(data: Union[list, dict]) -> str:
    """JSON with sorted keys and no whitespace"""
    return json.dumps(jsonable(data), sort_keys=True, separators=(",", ":"))


@beartype
def config_hash(data: dict) -> str:
    """sha256 of the canonical JSON of a configuration"""
    return hashlib.sha256(canonical_json(data).encode()).hexdigest()


@beartype
def _show_json(data: Union[list, dict]) -> None:
    """utility for pretty printing JSON, used in the CLI"""

    print(json.dumps(jsonable(data), indent=2))


@beartype
def _print_dict(
    data: dict,
    *,
    json: bool = True,
    transpose: bool = True,
) -> None:
    """helper function to pretty print a dict as a table,
    used in the CLI"""

    if json:
        _show_json(data)
    else:
        if transpose:
            data = jsonable(data).items()
            headers = ["Name", "Value"]
        else:
            headers = "keys"
        print(
            tabulate(
                data,
                headers=headers,
                tablefmt="rounded_outline",
            )
        )


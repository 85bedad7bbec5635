"""Asymmetric lock toolkit.

Exhaustive state-space checking of the lock algorithms, a placement-aware
discrete-event cost simulator, and deterministic walk-through traces, all
backed by the C++ core.

    >>> import alock
    >>> alock.check(algo="alock", np=2, budget=1)["all_hold"]
    True
    >>> print(alock.trace("fig2"))          # doctest: +ELLIPSIS
    # frame 1
    ...
"""

from ._alock import (
    RdmaPtr,
    bench,
    check,
    default_config,
    scenarios,
    sweep,
    trace,
)

__all__ = [
    "RdmaPtr",
    "bench",
    "check",
    "default_config",
    "scenarios",
    "sweep",
    "trace",
]

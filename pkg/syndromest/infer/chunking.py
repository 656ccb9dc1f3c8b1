# Chunking and multiprocessing for batched inference
"""Split syndrome datasets into fixed-size chunks and set up worker pools.

Chunk sizes never depend on the number of workers, so per-chunk results
and their accumulation are identical however the chunks are scheduled.
"""

import math
import multiprocessing as mp

import numpy as np

from syndromest.settings import config


def set_mp_start_method(val=None):
    """Set the multiprocessing start method.

    If the start method has already been applied, will skip.

    Args:
        val (str): Start method to set; defaults to None to use the default
            for the platform. If the given method is not available for the
            platform, the default method will be used instead.

    Returns:
        str: The applied start method.

    """
    avail_start_methods = mp.get_all_start_methods()
    if val is None or val not in avail_start_methods:
        val = avail_start_methods[0]
    try:
        mp.set_start_method(val)
        print("set multiprocessing start method to", val)
    except RuntimeError:
        print("multiprocessing start method already set to {}, will skip"
              .format(mp.get_start_method(False)))
    return val


def get_mp_pool(processes=None):
    """Get a multiprocessing ``Pool`` object, configured based on ``config``
    settings.

    Args:
        processes (int): Number of processes; defaults to None to use
            :func:`config.get_cpus`.

    Returns:
        :obj:`multiprocessing.Pool`: Pool object.

    """
    if processes is None:
        processes = config.get_cpus()
    print("Setting up multiprocessing pool with {} processes (None uses all "
          "available)".format(processes))
    return mp.Pool(processes=processes)


def use_pool(n_tasks):
    """Check whether tasks should be spread across a pool.

    Returns:
        bool: True if more than one task and more than one worker process.

    """
    cpus = config.get_cpus()
    if cpus is None:
        cpus = mp.cpu_count()
    return n_tasks > 1 and cpus > 1


def chunk_bounds(size, chunk_size=None):
    """Start and stop indices of fixed-size chunks.

    Args:
        size (int): Total number of rows.
        chunk_size (int): Rows per chunk; defaults to None to use
            :attr:`config.chunk_size`.

    Returns:
        List[Tuple[int, int]]: ``(start, stop)`` pairs covering ``size``.

    """
    if chunk_size is None:
        chunk_size = config.chunk_size
    chunk_size = max(1, int(chunk_size))
    return [(start, min(start + chunk_size, size))
            for start in range(0, size, chunk_size)]


def fsum_rows(rows):
    """Exactly rounded sums over the first axis.

    Args:
        rows (:obj:`np.ndarray`): Array of shape ``(R, ...)``.

    Returns:
        :obj:`np.ndarray`: Array of shape ``rows.shape[1:]`` where each entry
        is the :func:`math.fsum` of its column, which makes the result
        independent of row order.

    """
    rows = np.asarray(rows, dtype=float)
    flat = rows.reshape(len(rows), -1)
    out = np.array([math.fsum(col) for col in flat.T])
    return out.reshape(rows.shape[1:])


class FsumAccumulator:
    """Accumulate chunk contributions with exactly rounded totals.

    Partial rows are kept as they arrive and summed once with
    :func:`math.fsum`, so the total does not depend on chunking.
    """

    def __init__(self, shape=()):
        self.shape = tuple(shape)
        self._parts = []

    def add(self, rows):
        """Add rows of shape ``(R,) + shape``."""
        rows = np.asarray(rows, dtype=float).reshape((-1,) + self.shape)
        self._parts.append(rows)

    def total(self):
        if not self._parts:
            return np.zeros(self.shape)
        return fsum_rows(np.concatenate(self._parts, axis=0))

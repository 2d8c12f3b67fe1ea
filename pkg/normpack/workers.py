# -*- coding: utf-8 -*-

"""
normpack.workers
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

This module farms independent work items out to a thread pool and returns
their results in submission order, so that the number of workers never
changes what a caller computes.
"""

import logging

from concurrent.futures import ThreadPoolExecutor
from multiprocessing import cpu_count

logger = logging.getLogger(__name__)

def default_worker_count():
    return cpu_count()

def ordered_map(function, items, workers=1):
    """Applies `function` to every item of `items` and returns the results
    as a list in the order of `items`.

    With `workers` <= 1 the items are processed in the calling thread.
    """

    items = list(items)

    if workers is None:
        workers = default_worker_count()

    if workers <= 1 or len(items) <= 1:
        return [ function(item) for item in items ]

    logger.debug("distributing {} work items over {} workers".format(
        len(items), workers))

    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [ executor.submit(function, item) for item in items ]

        return [ future.result() for future in futures ]

def chunk_ranges(total, chunk_size):
    """Splits range(total) into consecutive (start, stop) pairs."""

    return [ (start, min(start + chunk_size, total))
        for start in range(0, total, chunk_size) ]

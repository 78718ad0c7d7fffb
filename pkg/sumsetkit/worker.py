import logging
import sys
import threading
import traceback
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from typing import Callable, Iterable, TypeVar

from sumsetkit.settings import Settings

LOGGER = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

_local = threading.local()


class Signal:
    """A minimal callback list with ``connect``/``emit``."""

    def __init__(self):
        self._slots: list[Callable] = []

    def connect(self, slot: Callable):
        self._slots.append(slot)

    def emit(self, *args):
        for slot in list(self._slots):
            slot(*args)


class WorkerSignals:
    """
    Callbacks fired by a ``Worker`` while it runs one subproblem.

    finished
        fired last, always, with no arguments

    error
        ``(exception type, exception, formatted traceback)`` when ``fn`` raised

    result
        the value ``fn`` returned

    progress
        handed to ``fn`` as ``progress_callback``; payload is up to ``fn``
    """

    def __init__(self):
        self.finished = Signal()
        self.error = Signal()
        self.result = Signal()
        self.progress = Signal()


class Worker:
    """
    One independent subproblem, such as a layer or a cover segment.

    Its outcome is reported through ``signals`` rather than returned or raised,
    so ``run`` may execute on any pool thread.

    :param fn: callable to execute; receives ``args``, ``kwargs`` and a
               ``progress_callback`` keyword
    :type fn: function
    """

    def __init__(self, fn, *args, **kwargs):
        self.fn = fn
        self.args = args
        self.kwargs = kwargs
        self.signals = WorkerSignals()

        self.kwargs["progress_callback"] = self.signals.progress

    def run(self):
        previous = getattr(_local, "inside", False)
        _local.inside = True
        try:
            result = self.fn(*self.args, **self.kwargs)
        except Exception:
            LOGGER.debug("worker failed:\n%s", traceback.format_exc())
            exctype, value = sys.exc_info()[:2]
            self.signals.error.emit((exctype, value, traceback.format_exc()))
        else:
            self.signals.result.emit(result)
        finally:
            _local.inside = previous
            self.signals.finished.emit()


def inside_worker() -> bool:
    return getattr(_local, "inside", False)


@contextmanager
def thread_budget(threads: int | None = None):
    """Share one worker count among all ``run_all`` calls made in the block.

    Nested budgets reuse the outermost one. Without ``threads`` the count is
    read from ``Settings`` the first time a pool is actually needed.
    """
    if getattr(_local, "budget", False):
        yield
        return
    _local.budget, _local.threads = True, threads
    try:
        yield
    finally:
        _local.budget, _local.threads = False, None


def _resolve_threads() -> int:
    threads = getattr(_local, "threads", None)
    if threads is None:
        threads = Settings().thread_count()
        if getattr(_local, "budget", False):
            _local.threads = threads
    return threads


def run_all(
    fn: Callable[[T], R], items: Iterable[T], threads: int | None = None
) -> list[R]:
    """Apply ``fn`` to every item, possibly concurrently, keeping input order.

    The first error raised by any item is re-raised once all items finished.
    Calls made from inside a worker run serially so pools never nest.
    """
    items = list(items)
    serial = len(items) <= 1 or inside_worker()
    if threads is None and not serial:
        threads = _resolve_threads()

    results: list = [None] * len(items)
    errors: list[tuple[int, tuple]] = []
    workers = []
    for index, item in enumerate(items):

        def task(item=item, progress_callback=None):
            return fn(item)

        worker = Worker(task)
        worker.signals.result.connect(
            lambda value, index=index: results.__setitem__(index, value)
        )
        worker.signals.error.connect(
            lambda info, index=index: errors.append((index, info))
        )
        workers.append(worker)

    if serial or threads <= 1:
        for worker in workers:
            worker.run()
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for future in [pool.submit(worker.run) for worker in workers]:
                future.result()

    if errors:
        _, (_, value, _) = min(errors, key=lambda entry: entry[0])
        raise value
    return results

"""Optional solver statistics, one "stat value [data]" line per event.
Timings, residuals and iteration counts are written as they happen;
counters are summed and written as "stat total" lines when the trace is
closed. Everything here is a no-op until init_trace is called."""

import collections
import datetime
import os
import time

from contextlib import contextmanager

_instatrace = None


def init_trace(filename):
    global _instatrace
    if _instatrace is not None:
        _instatrace.close()

    _instatrace = Instatrace(filename)


def close_trace():
    global _instatrace
    if _instatrace is not None:
        _instatrace.close()
    _instatrace = None


class Instatrace:
    def __init__(self, filename):
        # rotate logs if present
        if os.path.exists(filename):
            now = datetime.datetime.now()
            stamp = now.strftime("%Y-%m-%d.%H%M%S")
            os.rename(filename, "%s.%s" % (filename, stamp))

        self._fd = open(filename, "w")
        self._counts = collections.Counter()

    def trace(self, stat, value, data=None):
        extra = ""
        if data is not None:
            extra = " " + repr(data)

        self._fd.write("%s %.6g%s\n" % (stat, value, extra))

    def count(self, stat, n=1):
        self._counts[stat] += n

    def close(self):
        for stat in sorted(self._counts):
            self._fd.write("%s total %d\n" % (stat, self._counts[stat]))
        self._fd.close()


def trace(stat, value, user_data=None):
    if _instatrace is not None:
        _instatrace.trace(stat, value, user_data)


def count(stat, n=1):
    if _instatrace is not None:
        _instatrace.count(stat, n)


@contextmanager
def _timed(stat, scale):
    if _instatrace is None:
        yield
        return

    start = time.perf_counter()
    yield
    _instatrace.trace(stat, (time.perf_counter() - start) * scale)


def trace_us(stat):
    return _timed(stat, 1e6)


def trace_ms(stat):
    return _timed(stat, 1e3)

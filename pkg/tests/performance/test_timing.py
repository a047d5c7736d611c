"""
Timing of the expensive paths: LRIP enumeration, brute force and the
certify/verify pipeline on the demo-sized least-squares instance.
"""
import statistics
import time

import numpy as np
import pytest

from pybrex.harness.experiments import certify_instance, instance_from_config, verify_instance
from pybrex.landscape.lrip import lrip_delta
from pybrex.relaxation.fidelity import LeastSquaresFidelity
from pybrex.relaxation.problem import Problem
from pybrex.solvers.bruteforce import support_table
from pybrex.solvers.proxgrad import prox_gradient


def timed(fn, repeats=3):
    durations = []
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn()
        durations.append(time.perf_counter() - start)
    return result, statistics.median(durations)


@pytest.mark.performance
@pytest.mark.slow
class TestTiming:

    def test_lrip_enumeration(self, rng):
        A = rng.standard_normal((12, 16)) / np.sqrt(12)
        delta, elapsed = timed(lambda: lrip_delta(A, 4))
        print(f"lrip_delta over C(16, 4) supports: {elapsed:.3f}s")
        assert delta <= 1.0
        assert elapsed < 10.0

    def test_support_table(self, rng):
        A = rng.standard_normal((14, 14)) / np.sqrt(14)
        p = Problem.calibrated(A, LeastSquaresFidelity(rng.standard_normal(14)), 0.1)
        table, elapsed = timed(lambda: support_table(p), repeats=1)
        print(f"support table with {len(table.rows)} rows: {elapsed:.3f}s")
        assert len(table.rows) == 2 ** 14
        assert elapsed < 60.0

    def test_threaded_support_table_agrees(self, rng):
        A = rng.standard_normal((10, 12)) / np.sqrt(10)
        p = Problem.calibrated(A, LeastSquaresFidelity(rng.standard_normal(10)), 0.1)
        serial, t_serial = timed(lambda: support_table(p, workers=1), repeats=1)
        threaded, t_threaded = timed(lambda: support_table(p, workers=4), repeats=1)
        print(f"support table serial {t_serial:.3f}s, 4 workers {t_threaded:.3f}s")
        assert [r.support for r in serial.rows] == [r.support for r in threaded.rows]

    def test_solver_iterations(self, rng):
        A = rng.standard_normal((40, 60)) / np.sqrt(40)
        p = Problem.calibrated(A, LeastSquaresFidelity(rng.standard_normal(40)), 0.05)
        result, elapsed = timed(lambda: prox_gradient(p, max_iter=20000))
        print(f"prox-gradient: {result.iterations} iterations in {elapsed:.3f}s")
        assert elapsed < 30.0

    def test_certify_and_verify(self, config_manager):
        instance = instance_from_config(config_manager)
        certification, t_certify = timed(lambda: certify_instance(config_manager, instance))
        (rows, _), t_verify = timed(
            lambda: verify_instance(config_manager, instance, certification=certification), repeats=1)
        print(f"certify {t_certify:.3f}s, verify {t_verify:.3f}s for {len(rows)} rows")
        assert t_certify + t_verify < 60.0

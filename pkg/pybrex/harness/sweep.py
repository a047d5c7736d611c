"""
Seeded sweeps over (noise, amplitude, lambda0) grids.

Trials run as coroutines around worker threads, bounded by a semaphore.
Each trial owns a seed spawned from the root seed, and results are merged
by trial index, so the output does not depend on the thread count.
"""
import asyncio
import csv
import itertools
import logging
import os
import time
from dataclasses import dataclass, field, replace
from typing import Optional

from pybrex.exceptions import ConfigError, TheoryViolation
from pybrex.harness.experiments import certify_instance, verify_instance, write_reproducer
from pybrex.harness.instance import InstanceSpecBuilder, gen_instance, trial_seeds
from pybrex.harness.reports import SKIPPED, RunReport, write_report_csv
from pybrex.harness.result_store import ResultStore

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrialJob:
    trial: int
    seed: int
    sigma: float
    amplitude: float


@dataclass
class TrialOutcome:
    job: TrialJob
    rows: list = field(default_factory=list)
    status: str = SKIPPED
    instance: Optional[object] = None


def parse_lambda_grid(text):
    """'interior:n' (n points inside the certified interval) or a comma-separated list of values."""
    text = (text or "interior:5").strip()
    if text.startswith("interior:"):
        try:
            return ("interior", int(text.split(":", 1)[1]))
        except ValueError as e:
            raise ConfigError(f"[sweep] lambda0_grid = {text!r}: expected interior:<count>") from e
    try:
        return ("values", [float(v) for v in text.split(",") if v.strip()])
    except ValueError as e:
        raise ConfigError(f"[sweep] lambda0_grid = {text!r} is not a list of numbers") from e


def build_jobs(cm, seed):
    base = InstanceSpecBuilder.from_config(cm, seed=seed)
    sigmas = cm.get_list('sweep', 'sigma_grid', [base.sigma])
    amplitudes = cm.get_list('sweep', 'amplitude_grid', [base.a_min])
    trials = cm.get_int('sweep', 'trials', 1)
    grid = list(itertools.product(sigmas, amplitudes, range(trials)))
    seeds = trial_seeds(seed, len(grid))
    jobs = [TrialJob(k, s, sigma, amp) for k, ((sigma, amp, _), s) in enumerate(zip(grid, seeds))]
    return base, jobs


def run_trial(cm, base, job, lambda_grid, workers=1):
    width = base.a_max - base.a_min
    spec = replace(base, sigma=job.sigma, a_min=job.amplitude, a_max=job.amplitude + width, seed=job.seed).validate()
    instance = gen_instance(spec)
    certification = certify_instance(cm, instance, job.seed)
    mode, value = lambda_grid
    if mode == "interior":
        interval = certification.interval
        lambdas = interval.interior_points(value) if interval.nonempty and interval.upper < float("inf") else []
    else:
        lambdas = value
    rows, status = verify_instance(cm, instance, job.trial, lambdas=lambdas, workers=workers,
                                   certification=certification)
    return TrialOutcome(job=job, rows=rows, status=status, instance=instance)


async def run_sweep(cm, seed, threads=1, store=None, run_id=None):
    base, jobs = build_jobs(cm, seed)
    lambda_grid = parse_lambda_grid(cm.get('sweep', 'lambda0_grid'))
    semaphore = asyncio.Semaphore(max(int(threads), 1))
    logger.info(f"sweep: {len(jobs)} trials on {threads} threads")

    async def one(job):
        async with semaphore:
            return await asyncio.to_thread(run_trial, cm, base, job, lambda_grid)

    outcomes = await asyncio.gather(*(one(job) for job in jobs))
    if store is not None:
        for outcome in outcomes:
            for row in outcome.rows:
                await store.store_trial(run_id, row)
    return list(outcomes)


def write_trials_csv(path, outcomes):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trial", "seed", "sigma", "amplitude", "status", "checked", "passed"])
        for o in outcomes:
            passed = sum(1 for r in o.rows if r.oracle_match)
            writer.writerow([o.job.trial, o.job.seed, o.job.sigma, o.job.amplitude, o.status, len(o.rows), passed])


async def _sweep_with_store(cm, seed, threads, store_path):
    if not store_path:
        return await run_sweep(cm, seed, threads)
    store = ResultStore(store_path)
    await store.initialize()
    try:
        run_id = await store.start_run("sweep", cm.config_path, seed)
        return await run_sweep(cm, seed, threads, store, run_id)
    finally:
        await store.close()


def cmd_sweep(cm, seed=None, out=".", threads=1):
    start = time.perf_counter()
    seed = seed if seed is not None else cm.get_int('instance', 'seed', 0)
    outcomes = asyncio.run(_sweep_with_store(cm, seed, threads, cm.resolve_path('output', 'store')))
    rows = [row for o in outcomes for row in o.rows]
    skipped = sum(1 for o in outcomes if o.status == SKIPPED)
    os.makedirs(out, exist_ok=True)
    write_report_csv(os.path.join(out, "report.csv"), rows)
    write_trials_csv(os.path.join(out, "trials.csv"), outcomes)
    report = RunReport(command="sweep", seed=seed, rows=rows, timings={"total": time.perf_counter() - start})
    logger.info(f"sweep done: {len(outcomes)} trials, {skipped} skipped, {len(report.violations)} violations")
    if report.violations:
        bad = report.violations[0]
        culprit = next(o for o in outcomes if o.job.trial == bad.trial)
        write_reproducer(cm, culprit.instance, bad.lambda0, out)
        raise TheoryViolation(f"trial {bad.trial}: certified lambda0={bad.lambda0} but brute force selected {bad.bf_support}",
                              bad.lambda0, culprit.instance.sigma_star, bad.bf_support)
    return report

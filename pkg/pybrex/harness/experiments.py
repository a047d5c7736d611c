"""
Experiment orchestration: gen, certify, solve and verify on one instance.

Every command reads a ConfigManager, builds (or loads) an instance, and
returns a RunReport; files are written under the output directory.
"""
import asyncio
import logging
import math
import os
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from pybrex.exceptions import CertificateUnavailable, ConfigError, GuardViolation, TheoryViolation
from pybrex.harness.instance import Instance, InstanceSpecBuilder, gen_instance, make_rng, save_instance
from pybrex.harness.matrix_io import read_matrix, read_vector
from pybrex.harness.reports import (
    PASSED, SKIPPED, RunReport, TrialRow, write_certificate_ini, write_report_csv, write_solution_csv,
)
from pybrex.harness.result_store import ResultStore
from pybrex.landscape.brsc import (
    QuadraticReference, SparsePairSampler, brsc_empirical, brsc_kl_constructive, brsc_ls, fidelity_symmetric,
)
from pybrex.landscape.conditions import DEFAULT_FALSIFICATION_SAMPLES, global_minimizer_check
from pybrex.landscape.intervals import LambdaInterval, interval_kl, interval_l2, interval_ls, prior_work_interval
from pybrex.landscape.lrip import lrip_delta
from pybrex.landscape.regions import derive_box_bound
from pybrex.relaxation.fidelity import DEFAULT_SAFETY, fidelity_from_kind
from pybrex.relaxation.generators import NONNEG, REALS, BurgReference
from pybrex.relaxation.problem import Problem
from pybrex.solvers.bruteforce import MAX_N, select_best, support_table
from pybrex.solvers.proxgrad import multistart, prox_gradient
from pybrex.solvers.restricted import oracle_solve

logger = logging.getLogger(__name__)

PLACEHOLDER_LAMBDA0 = 1.0
MATCH_TOL = 1e-8


@dataclass
class Certification:
    problem: Problem
    certificate: object
    interval: LambdaInterval
    summary: dict = field(default_factory=dict)
    empirical: Optional[object] = None


def instance_from_config(cm, seed=None):
    """A file-based instance when [problem] y is set, otherwise a generated one."""
    if cm.has('problem', 'y'):
        A = read_matrix(cm.resolve_path('problem', 'matrix'))
        y = read_vector(cm.resolve_path('problem', 'y'))
        kind = cm.get_choice('problem', 'fidelity', ('ls', 'kl'), fallback='ls')
        b = None
        if kind == 'kl':
            b_value = cm.require('problem', 'b')
            try:
                b = np.full(A.shape[0], float(b_value))
            except ValueError:
                b = read_vector(cm.resolve_path('problem', 'b'))
        x_star = y_clean = None
        if cm.has('truth', 'x_star'):
            x_star = read_vector(cm.resolve_path('truth', 'x_star'))
            y_clean = A @ x_star + (b if b is not None else 0.0)
        return Instance(A=A, x_star=x_star, y=y, y_clean=y_clean, seed=seed or 0, b=b)
    spec = InstanceSpecBuilder.from_config(cm, seed=seed)
    return gen_instance(spec)


def build_problem(cm, instance, lambda0=None):
    kind = instance.fidelity_kind
    fidelity = fidelity_from_kind(kind, instance.y, instance.b)
    psi = cm.get_choice('relaxation', 'psi', ('l2', 'kl'), fallback='kl' if kind == 'kl' else 'l2')
    default_set = NONNEG if kind == 'kl' else REALS
    constraint_set = cm.get_choice('problem', 'constraint_set', (REALS, NONNEG), fallback=default_set)
    lambda0 = lambda0 if lambda0 is not None else cm.get_float('relaxation', 'lambda0', PLACEHOLDER_LAMBDA0)
    return Problem.calibrated(
        instance.A, fidelity, lambda0, psi=psi, constraint_set=constraint_set,
        safety=cm.get_float('relaxation', 'safety', DEFAULT_SAFETY),
        gamma=cm.get_float('relaxation', 'gamma'), xi=cm.get_float('relaxation', 'xi'),
    )


def solver_options(cm):
    return {"tol": cm.get_float('solver', 'tol', 1e-8), "max_iter": cm.get_int('solver', 'max_iter', 10_000)}


def _empty(reason):
    logger.warning(f"empty interval: {reason}")
    return LambdaInterval(math.inf, 0.0, {"reason": reason})


def _sparsity_level(cm, instance):
    K = cm.get_int('certify', 'K', max(2 * len(instance.sigma_star), 1))
    if K < 2 * len(instance.sigma_star):
        raise ConfigError(f"[certify] K={K} must be at least 2 k* = {2 * len(instance.sigma_star)}")
    return K


def _certify_ls(cm, instance, p, K, summary):
    gamma = p.calibration.get("gamma", p.generators[0].gamma)
    delta = lrip_delta(instance.A, K)
    cert = brsc_ls(instance.A, K, nu=1.0, gamma=gamma, delta=delta)
    sigma = instance.sigma_star
    off = [i for i in range(p.N) if i not in sigma]
    max_off = float(p.column_norms[off].max()) if off else 0.0
    summary.update(delta=delta, gamma=gamma, max_off_column_norm=max_off)
    if cert.C_K <= 0:
        return cert, _empty("BRSC constant is zero")
    interval = interval_l2(instance.x_star, summary["F_star"], instance.A, sigma, cert.C_K, K, gamma, p.lipschitz.L_tilde)
    if gamma == 1.0 and max_off < 1.0 and delta < 1.0:
        noise_form = interval_ls(instance.x_star, instance.eps_norm, delta, K, len(sigma), max_off)
        prior = prior_work_interval(instance.eps_norm, max(delta, 0.0), instance.min_amplitude)
        summary.update(ls_lower=noise_form.lower, ls_upper=noise_form.upper,
                       prior_lower=prior.lower, prior_upper=prior.upper)
    return cert, interval


def _certify_kl(cm, instance, p, K, summary):
    if p.calibration.get("psi") != "kl":
        raise CertificateUnavailable("KL certificates need the smoothed KL generator ([relaxation] psi = kl)")
    xi, c, gamma = p.calibration["xi"], p.calibration["c"], p.calibration["gamma"]
    Q = cm.get_float('certify', 'Q')
    if Q is None:
        Q = derive_box_bound(p)
    eta = xi / c
    cert = brsc_kl_constructive(instance.A, instance.y, instance.b, eta, K, Q, xi=xi, gamma=gamma)
    summary.update(Q=Q, xi=xi, delta=cert.details["delta"], C_tilde=cert.generator_constant)
    if cert.generator_constant <= 0:
        return cert, _empty("BRSC constant is zero")
    interval = interval_kl(instance.A, instance.b, instance.x_star, instance.sigma_star, instance.eps_inf,
                           xi, c, gamma, cert.generator_constant, K, p.lipschitz.L_tilde)
    return cert, interval


def _empirical_check(cm, instance, p, cert, summary, seed):
    n = cm.get_int('certify', 'empirical_samples', 0)
    if n <= 0:
        return None
    rng = make_rng(seed)
    if p.fidelity.kind == 'kl':
        hi = summary["Q"]
        reference = BurgReference(p.calibration["xi"] / p.calibration["c"])
    else:
        hi = 2.0 * float(np.max(np.abs(instance.x_star))) + 1.0
        reference = QuadraticReference(1.0)
    sampler = SparsePairSampler(p.N, cert.K, rng, hi, constraint_set=p.constraint_set)
    empirical = brsc_empirical(fidelity_symmetric(p), reference.symmetric_divergence, sampler, n)
    # the LS constant is stated against D_Psi = gamma * ||.||^2 / 2; compare on the l2 scale
    certified = cert.C_K * (summary.get("gamma", 1.0) if p.fidelity.kind == 'ls' else 1.0)
    summary["empirical_C_K"] = empirical.C_K
    if certified > empirical.C_K * (1.0 + 1e-9):
        logger.warning(f"certified constant {certified:.6g} exceeds the sampled upper bound {empirical.C_K:.6g}")
    return empirical


def certify_instance(cm, instance, seed=0):
    instance.require_truth()
    p = build_problem(cm, instance)
    K = _sparsity_level(cm, instance)
    summary = {"K": K, "k_star": len(instance.sigma_star), "F_star": p.F(instance.x_star),
               "eps_norm": instance.eps_norm, "eps_inf": instance.eps_inf, "min_amplitude": instance.min_amplitude}
    try:
        if p.fidelity.kind == 'ls':
            cert, interval = _certify_ls(cm, instance, p, K, summary)
        else:
            cert, interval = _certify_kl(cm, instance, p, K, summary)
    except CertificateUnavailable as e:
        logger.warning(f"certificate unavailable: {e}")
        summary["reason"] = str(e)
        return Certification(p, None, _empty(str(e)), summary)
    summary.update(C_K=cert.C_K, C_generator=cert.generator_constant, provenance=cert.provenance)
    empirical = _empirical_check(cm, instance, p, cert, summary, seed)
    logger.info(f"certified interval {interval} with C_K={cert.C_K:.6g} ({cert.provenance})")
    return Certification(p, cert, interval, summary, empirical)


def _lambda_values(cm, interval):
    explicit = cm.get_list('verify', 'lambda0_list')
    if explicit:
        return explicit
    if not interval.nonempty or not math.isfinite(interval.upper):
        return []
    return interval.interior_points(cm.get_int('verify', 'lambda0_count', 5))


def verify_instance(cm, instance, trial=0, lambdas=None, workers=1, certification=None):
    """
    Brute-force check of the certificate's promise on one instance.

    Returns (rows, status); status is SKIPPED when there is nothing to test.
    """
    if instance.A.shape[1] > MAX_N:
        raise GuardViolation(f"brute force needs N <= {MAX_N}, got N={instance.A.shape[1]}")
    certification = certification or certify_instance(cm, instance, instance.seed)
    interval = certification.interval
    lambdas = _lambda_values(cm, interval) if lambdas is None else list(lambdas)
    if not lambdas:
        logger.warning(f"trial {trial}: no lambda0 to verify (interval {interval}), skipped")
        return [], SKIPPED
    p = certification.problem
    table = support_table(p, cm.get_int('verify', 'k_max', p.N), workers)
    oracle = oracle_solve(p, instance.sigma_star, instance.x_star)
    opts = solver_options(cm)
    rows = []
    for lam in lambdas:
        bf = select_best(table, lam)
        match = (bf.unique and bf.best_support == oracle.support
                 and np.allclose(bf.x_best, oracle.x_or, rtol=0.0, atol=MATCH_TOL * max(1.0, np.abs(oracle.x_or).max(initial=0.0))))
        q = p.with_lambda0(lam)
        result = prox_gradient(q, None, **opts)
        critical = q.is_critical(result.x, opts["tol"]).is_critical
        if result.support != bf.best_support:
            logger.info(f"trial {trial}, lambda0={lam:.6g}: solver from 0 reached {result.support}, "
                        f"brute force {bf.best_support}")
        certified = interval.contains(lam)
        rows.append(TrialRow(trial=trial, seed=instance.seed, lambda0=float(lam), certified=certified,
                             interval_lo=float(interval.lower), interval_hi=float(interval.upper),
                             bf_support=bf.best_support, bf_objective=bf.J0_value, oracle_match=bool(match),
                             solver_objective=result.objective, solver_critical=bool(critical)))
        if certified and not match:
            logger.error(f"trial {trial}, lambda0={lam:.6g}: certified but brute force found {bf.optima}")
    return rows, PASSED


def isolation_probe(cm, p, x_or, K, seed):
    """Multi-start solves; critical points within K coordinates of x_or other than x_or contradict isolation."""
    starts = cm.get_int('solver', 'starts', 1)
    if starts <= 1:
        return 0
    close = 0
    for res in multistart(p, starts, make_rng(seed), **solver_options(cm)):
        differ = np.abs(res.x - x_or) > 1e-6 * max(1.0, np.abs(x_or).max(initial=0.0))
        if res.converged and np.any(differ) and np.count_nonzero(differ) <= K:
            close += 1
    if close:
        logger.warning(f"{close} critical points found within {K} coordinates of the oracle solution")
    return close


def write_reproducer(cm, instance, lambda0, out):
    directory = os.path.join(out, "reproducer")
    save_instance(instance, directory)
    repro = os.path.join(out, "reproducer.ini")
    cm.set('relaxation', 'lambda0', repr(float(lambda0)))
    cm.set('instance', 'seed', instance.seed)
    cm.save_config(repro)
    logger.error(f"reproducer written to {repro} and {directory}")
    return repro


async def record_rows(store_path, command, cm, seed, rows):
    """Mirror trial rows into the result store under a new run."""
    store = ResultStore(store_path)
    await store.initialize()
    try:
        run_id = await store.start_run(command, cm.config_path, seed)
        for row in rows:
            await store.store_trial(run_id, row)
        return run_id
    finally:
        await store.close()


def cmd_gen(cm, seed=None, out="."):
    start = time.perf_counter()
    instance = instance_from_config(cm, seed)
    save_instance(instance, out)
    return RunReport(command="gen", seed=instance.seed, timings={"total": time.perf_counter() - start})


def cmd_certify(cm, seed=None, out="."):
    start = time.perf_counter()
    instance = instance_from_config(cm, seed)
    cert = certify_instance(cm, instance, instance.seed)
    report = RunReport(command="certify", seed=instance.seed, certificate=cert.summary, interval=cert.interval)
    lam = cm.get_float('relaxation', 'lambda0')
    if lam is not None and cert.certificate is not None:
        check = global_minimizer_check(cert.problem, instance.x_star, instance.sigma_star, cert.certificate, lam,
                                       cm.get_int('certify', 'falsification_samples', DEFAULT_FALSIFICATION_SAMPLES), instance.seed)
        report.conditions.append(check)
        report.lambda0_values.append(lam)
        x_or = check.oracle.x_or if check.oracle is not None else None
        if x_or is not None:
            isolation_probe(cm, cert.problem.with_lambda0(lam), x_or, cert.certificate.K, instance.seed)
    os.makedirs(out, exist_ok=True)
    write_certificate_ini(os.path.join(out, "certificate.ini"), report)
    report.timings["total"] = time.perf_counter() - start
    return report


def cmd_solve(cm, seed=None, out="."):
    start = time.perf_counter()
    instance = instance_from_config(cm, seed)
    lam = float(cm.require('relaxation', 'lambda0'))
    p = build_problem(cm, instance, lam)
    opts = solver_options(cm)
    starts = cm.get_int('solver', 'starts', 1)
    if starts > 1:
        results = multistart(p, starts, make_rng(instance.seed), **opts)
        best = min(results, key=lambda r: r.objective)
    else:
        results = [prox_gradient(p, None, **opts)]
        best = results[0]
    logger.info(f"solve: JPsi={best.objective:.12g}, support={best.support}, converged={best.converged}")
    os.makedirs(out, exist_ok=True)
    write_solution_csv(os.path.join(out, "solution.csv"), best)
    return RunReport(command="solve", seed=instance.seed, lambda0_values=[lam], solver_results=results,
                     timings={"total": time.perf_counter() - start})


def cmd_verify(cm, seed=None, out=".", threads=1):
    start = time.perf_counter()
    instance = instance_from_config(cm, seed)
    cert = certify_instance(cm, instance, instance.seed)
    rows, status = verify_instance(cm, instance, 0, workers=threads, certification=cert)
    report = RunReport(command="verify", seed=instance.seed, certificate=cert.summary, interval=cert.interval,
                       lambda0_values=[r.lambda0 for r in rows], rows=rows, status=status)
    os.makedirs(out, exist_ok=True)
    write_report_csv(os.path.join(out, "report.csv"), rows)
    store_path = cm.resolve_path('output', 'store')
    if store_path and rows:
        asyncio.run(record_rows(store_path, "verify", cm, instance.seed, rows))
    report.timings["total"] = time.perf_counter() - start
    if report.violations:
        bad = report.violations[0]
        write_reproducer(cm, instance, bad.lambda0, out)
        raise TheoryViolation(f"certified lambda0={bad.lambda0} but brute force selected {bad.bf_support}",
                              bad.lambda0, instance.sigma_star, bad.bf_support)
    return report

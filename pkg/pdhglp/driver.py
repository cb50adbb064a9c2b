"""Solve loops of raPDHG and r2HPDHG with periodic checks, polishing, warm start and batching."""
import logging
import time
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from pdhglp.conf import app_settings
from pdhglp.exceptions import BatchShapeError, DimensionError
from pdhglp.linalg import estimate_spectral_norm
from pdhglp.options import Algorithm, SolverOptions
from pdhglp.pdhg import (Iterate, IterateAverage, StepState, adaptive_pdhg_step, fixed_point_residual,
                         halpern_reflect_update, pdhg_step, project_box, project_dual_cone,
                         update_average, update_primal_weight)
from pdhglp.problem import build_saddle_form
from pdhglp.results import InfeasibilityCertificate, KktResiduals, SolveResult, Status
from pdhglp.scaling import precondition, scale_data, scale_solution, unscale_solution
from pdhglp.utils import run_result_handlers

logger = logging.getLogger(app_settings.LOGGER_NAME)

SUFFICIENT_DECAY = 0.2
NECESSARY_DECAY = 0.8
ARTIFICIAL_RESTART = 0.36
INITIAL_STEP_FACTOR = 0.99

PROGRESS_FORMAT = ("iter=%d pobj=%.10g dobj=%.10g pres=%.3e dres=%.3e gap=%.3e "
                   "omega=%.3e eta=%.3e restarts=%d")

# Constraint data shared by every solve over the same K: the scaled matrix, its scaling and
# its spectral norm estimate.
PreparedConstraints = namedtuple("PreparedConstraints", ["K", "scaling", "spectral_norm"])
PolishOutcome = namedtuple("PolishOutcome", ["x", "y", "iterations", "incomplete"])


def compute_kkt_residuals(problem, z, saddle=None):
    """KKT residuals of ``z = (x, y)`` on the original data of `problem`.

    The reduced cost ``c - K^T y`` is split into positive and negative parts; the parts that
    finite lower (positive part) or upper (negative part) bounds can absorb enter the dual
    objective, the rest the dual residual.

    @param saddle: The saddle form of `problem`, when already built.
    @returntype: KktResiduals
    """
    saddle = saddle or build_saddle_form(problem)
    x, y = z
    m1 = saddle.num_inequalities
    slack = saddle.K.matvec(x) - saddle.q
    slack[:m1] = np.minimum(slack[:m1], 0.0)

    reduced = reduced_costs(saddle, y)
    positive, negative = np.maximum(reduced, 0.0), np.maximum(-reduced, 0.0)
    finite_lower, finite_upper = np.isfinite(saddle.l), np.isfinite(saddle.u)
    violation = np.where(finite_lower, 0.0, positive) + np.where(finite_upper, 0.0, negative)
    dual_objective = (float(saddle.q @ y)
                      + float(saddle.l[finite_lower] @ positive[finite_lower])
                      - float(saddle.u[finite_upper] @ negative[finite_upper]))
    return KktResiduals(
        primal_residual=float(np.linalg.norm(slack)),
        dual_residual=float(np.linalg.norm(violation)),
        primal_objective=float(saddle.c @ x) + problem.objective_offset,
        dual_objective=dual_objective + problem.objective_offset,
    )


def reduced_costs(saddle, y):
    return saddle.c - saddle.K.rmatvec(y)


def check_termination(kkt, norms, options):
    """Whether `kkt` meets the relative termination criteria.

    @param norms: ``(|c|_2, |q|_2)`` of the original data.
    """
    c_norm, q_norm = norms
    eps_abs, eps_rel = options.eps_abs, options.eps_rel
    return (kkt.abs_gap <= eps_abs + eps_rel * (abs(kkt.primal_objective) + abs(kkt.dual_objective))
            and kkt.primal_residual <= eps_abs + eps_rel * q_norm
            and kkt.dual_residual <= eps_abs + eps_rel * c_norm)


def should_restart(algorithm, current_metric, metric_at_restart_start, metric_at_last_check,
                   steps_since_restart, total_steps):
    """Adaptive restart rule shared by both algorithms.

    The metric is the KKT norm of the running average for raPDHG and the fixed-point residual
    for r2HPDHG; the thresholds are the same.
    """
    if current_metric <= SUFFICIENT_DECAY * metric_at_restart_start:
        return True
    if current_metric <= NECESSARY_DECAY * metric_at_restart_start and current_metric > metric_at_last_check:
        return True
    return steps_since_restart >= ARTIFICIAL_RESTART * total_steps


def _unit(vector):
    norm = np.linalg.norm(vector)
    if norm == 0:
        return None
    return vector / norm


def _dual_ray_certificate(saddle, dy, tolerance):
    m1 = saddle.num_inequalities
    if m1 and dy[:m1].min() < -tolerance:
        return None
    ray = project_dual_cone(dy, m1)
    reduced = -saddle.K.rmatvec(ray)
    positive, negative = np.maximum(reduced, 0.0), np.maximum(-reduced, 0.0)
    finite_lower, finite_upper = np.isfinite(saddle.l), np.isfinite(saddle.u)
    unabsorbed = np.where(finite_lower, 0.0, positive) + np.where(finite_upper, 0.0, negative)
    violation = float(unabsorbed.max(initial=0.0))
    if violation > tolerance:
        return None
    objective = (float(saddle.q @ ray)
                 + float(saddle.l[finite_lower] @ positive[finite_lower])
                 - float(saddle.u[finite_upper] @ negative[finite_upper]))
    if objective <= tolerance:
        return None
    return InfeasibilityCertificate(Status.PRIMAL_INFEASIBLE, ray, objective, violation)


def _primal_ray_certificate(saddle, dx, tolerance):
    objective = float(saddle.c @ dx)
    if objective >= -tolerance:
        return None
    m1 = saddle.num_inequalities
    activity = saddle.K.matvec(dx)
    violations = [
        np.abs(activity[m1:]).max(initial=0.0),
        np.maximum(-activity[:m1], 0.0).max(initial=0.0),
        # A ray may only move towards infinite bounds.
        np.maximum(dx[np.isfinite(saddle.u)], 0.0).max(initial=0.0),
        np.maximum(-dx[np.isfinite(saddle.l)], 0.0).max(initial=0.0),
    ]
    violation = float(max(violations))
    if violation > tolerance:
        return None
    return InfeasibilityCertificate(Status.DUAL_INFEASIBLE, dx, objective, violation)


def detect_infeasibility(problem, z_current, z_anchor, steps_since_restart, options, saddle=None):
    """Look for an infeasibility certificate in the average direction of movement.

    The direction ``(z_current - z_anchor) / steps_since_restart`` is split into a dual and a
    primal ray, each normalized to unit length and tested against the Farkas conditions with
    the infeasibility tolerances of `options`. Points are in original space.

    @return: An `InfeasibilityCertificate` or ``None``.
    """
    saddle = saddle or build_saddle_form(problem)
    dx = (z_current.x - z_anchor.x) / steps_since_restart
    dy = (z_current.y - z_anchor.y) / steps_since_restart
    unit_y = _unit(dy)
    if unit_y is not None:
        certificate = _dual_ray_certificate(saddle, unit_y, options.eps_primal_infeasible)
        if certificate is not None:
            return certificate
    unit_x = _unit(dx)
    if unit_x is not None:
        return _primal_ray_certificate(saddle, unit_x, options.eps_dual_infeasible)
    return None


def prepare_constraints(saddle):
    """Precondition the matrix of `saddle` and estimate the norm of the scaled matrix."""
    scaled, scaling = precondition(saddle)
    estimate = estimate_spectral_norm(scaled.K, tol=app_settings.POWER_ITERATION_TOLERANCE,
                                      max_iter=app_settings.POWER_ITERATION_LIMIT)
    return PreparedConstraints(scaled.K, scaling, estimate)


def _warm_start_vector(value, length, what):
    if value is None:
        return np.zeros(length)
    value = np.asarray(value, dtype=float).ravel()
    if value.shape != (length,):
        raise DimensionError("warm start {} has length {}, expected {}".format(what, value.shape[0], length))
    return value


class _Candidate:
    """A primal-dual pair mapped to original space together with its residuals."""

    def __init__(self, x, y, kkt):
        self.x = x
        self.y = y
        self.kkt = kkt


class _PdhgRun:
    """State of one solve over a preconditioned problem.

    @ivar stop: Predicate on original-space `KktResiduals` ending the run as optimal.
    """

    def __init__(self, problem, saddle, prepared, options, stop, detect_infeasible=True):
        self.problem = problem
        self.original = saddle
        self.prepared = prepared
        self.options = options
        self.stop = stop
        self.detect_infeasible = detect_infeasible
        self.dtype = options.precision.dtype
        self.scaling = prepared.scaling
        self.scaled = scale_data(saddle, prepared.K, prepared.scaling).astype(self.dtype)

    def _to_original(self, z):
        x, y = unscale_solution(z.x.astype(np.float64), z.y.astype(np.float64), self.scaling)
        return Iterate(project_box(x, self.original.l, self.original.u),
                       project_dual_cone(y, self.original.num_inequalities))

    def _evaluate(self, z):
        x, y = self._to_original(z)
        return _Candidate(x, y, compute_kkt_residuals(self.problem, Iterate(x, y), self.original))

    def _initial_iterate(self, warm):
        n, m = self.original.n, self.original.m
        if warm is None:
            x, y = np.zeros(n), np.zeros(m)
        else:
            x = _warm_start_vector(warm[0], n, "primal")
            y = _warm_start_vector(warm[1], m, "dual")
        x = project_box(x, self.original.l, self.original.u)
        y = project_dual_cone(y, self.original.num_inequalities)
        x, y = scale_solution(x, y, self.scaling)
        scaled = self.scaled
        # Clip again in scaled space to absorb rounding.
        return Iterate(project_box(x.astype(self.dtype), scaled.l, scaled.u),
                       project_dual_cone(y.astype(self.dtype), scaled.num_inequalities))

    def _initial_state(self):
        estimate = self.prepared.spectral_norm
        eta = 1.0 if estimate.zero_matrix or estimate.value == 0 else INITIAL_STEP_FACTOR / estimate.value
        c_norm = float(np.linalg.norm(self.scaled.c))
        q_norm = float(np.linalg.norm(self.scaled.q))
        omega = c_norm / q_norm if c_norm > 0 and q_norm > 0 else 1.0
        return StepState(eta=eta, omega=omega)

    def _log_progress(self, total_steps, candidate, state, restarts):
        kkt = candidate.kkt
        getattr(logger, app_settings.LOG_LEVEL)(
            PROGRESS_FORMAT, total_steps, kkt.primal_objective, kkt.dual_objective, kkt.primal_residual,
            kkt.dual_residual, kkt.abs_gap, state.omega, state.eta, restarts)

    def _anchor_residual(self, z, state):
        return fixed_point_residual(z, pdhg_step(z, self.scaled, state.tau, state.sigma), state.omega)

    def _infeasibility(self, current, reference, steps):
        if not self.detect_infeasible or steps < 1:
            return None
        return detect_infeasibility(self.problem, self._to_original(current), self._to_original(reference),
                                    steps, self.options, self.original)

    def run(self, warm=None):
        """Iterate until the stop predicate holds, a certificate is found or the limit is hit.

        @return: ``(status, Candidate, certificate, iterations, restarts)``
        """
        options = self.options
        debug = options.debug
        halpern = options.algorithm is Algorithm.R2HPDHG
        sf = self.scaled
        state = self._initial_state()

        z = self._initial_iterate(warm)
        anchor = z
        candidate = self._evaluate(z)
        if self.stop(candidate.kkt):
            return Status.OPTIMAL, candidate, None, 0, 0
        best = candidate

        if halpern:
            start_metric = self._anchor_residual(z, state)
        else:
            start_metric = candidate.kkt.norm
        last_check_metric = start_metric

        average = IterateAverage.empty(sf.n, sf.m, self.dtype)
        last_check_point = z
        epoch_steps = total_steps = restarts = checks = 0
        while total_steps < options.iteration_limit:
            previous = z
            step, step_eta = adaptive_pdhg_step(z, sf, state, debug)
            if halpern:
                z = halpern_reflect_update(previous, step, anchor, epoch_steps)
                current = step
            else:
                z = step
                update_average(average, z, step_eta)
                current = z
            epoch_steps += 1
            total_steps += 1
            if total_steps % options.check_frequency and total_steps < options.iteration_limit:
                continue

            checks += 1
            restart_point = current if halpern else average.iterate
            candidates = [self._evaluate(restart_point)]
            if not halpern:
                candidates.append(self._evaluate(z))
            for evaluated in candidates:
                if self.stop(evaluated.kkt):
                    return Status.OPTIMAL, evaluated, None, total_steps, restarts
            candidate = candidates[0]
            for evaluated in candidates:
                if evaluated.kkt.norm < best.kkt.norm:
                    best = evaluated

            if options.verbose and checks % options.display_frequency == 0:
                self._log_progress(total_steps, candidate, state, restarts)

            certificate = (self._infeasibility(current, anchor, epoch_steps)
                           or self._infeasibility(current, last_check_point, total_steps % options.check_frequency
                                                  or options.check_frequency))
            if certificate is not None:
                return certificate.status, self._evaluate(current), certificate, total_steps, restarts
            last_check_point = current

            if halpern:
                metric = fixed_point_residual(previous, step, state.omega)
            else:
                metric = candidate.kkt.norm
            if should_restart(options.algorithm, metric, start_metric, last_check_metric, epoch_steps, total_steps):
                new_anchor = Iterate(restart_point.x.copy(), restart_point.y.copy())
                delta_x = float(np.linalg.norm(new_anchor.x - anchor.x))
                delta_y = float(np.linalg.norm(new_anchor.y - anchor.y))
                omega = update_primal_weight(state.omega, delta_x, delta_y, app_settings.PRIMAL_WEIGHT_SMOOTHING)
                if debug:
                    logger.debug("Restart %d after %d steps at metric %.3e (epoch start %.3e); omega %.6g -> %.6g",
                                 restarts + 1, epoch_steps, metric, start_metric, state.omega, omega)
                state.omega = omega
                z = anchor = last_check_point = new_anchor
                average = IterateAverage.empty(sf.n, sf.m, self.dtype)
                epoch_steps = 0
                restarts += 1
                # Halpern epochs are measured from the residual at their new anchor
                start_metric = last_check_metric = self._anchor_residual(z, state) if halpern else metric
            else:
                last_check_metric = metric
        return Status.ITERATION_LIMIT, best, None, total_steps, restarts


def _termination(problem, saddle, options):
    norms = (float(np.linalg.norm(saddle.c)), float(np.linalg.norm(saddle.q)))
    return lambda kkt: check_termination(kkt, norms, options)


def _solve_prepared(problem, saddle, prepared, options, warm):
    started = time.perf_counter()
    if warm is not None and not options.warm_start:
        logger.warning("Ignoring the warm start of %s because the warm_start option is off", problem.name or "problem")
        warm = None
    run = _PdhgRun(problem, saddle, prepared, options, _termination(problem, saddle, options))
    status, candidate, certificate, iterations, restarts = run.run(warm)

    x, y, kkt = candidate.x, candidate.y, candidate.kkt
    polish_iterations, polish_incomplete, objective_before_polish = 0, False, None
    if options.feasibility_polishing and not status.is_infeasible:
        outcome = _polish(problem, saddle, prepared, Iterate(x, y), options)
        objective_before_polish = kkt.primal_objective
        x, y, polish_iterations, polish_incomplete = outcome
        kkt = compute_kkt_residuals(problem, Iterate(x, y), saddle)
        logger.debug("Feasibility polishing changed the objective from %.10g to %.10g",
                     objective_before_polish, kkt.primal_objective)

    result = SolveResult(
        status=status,
        primal_solution=x,
        dual_solution=y,
        reduced_costs=reduced_costs(saddle, y),
        objective=kkt.primal_objective,
        dual_objective=kkt.dual_objective,
        kkt=kkt,
        iterations=iterations,
        restarts=restarts,
        polish_iterations=polish_iterations,
        solve_time_sec=time.perf_counter() - started,
        certificate=certificate,
        polish_incomplete=polish_incomplete,
        objective_before_polish=objective_before_polish,
    )
    if options.verbose:
        getattr(logger, app_settings.LOG_LEVEL)(
            "Finished with status %s after %d iterations and %d restarts: objective %.10g",
            status.value, iterations, restarts, result.objective)
    run_result_handlers(problem, result)
    return result


def solve(problem, options=None, warm_start=None):
    """Solve `problem` with the algorithm selected in `options`.

    @param warm_start: Optional ``(x0, y0)``; either half may be ``None`` (zeros). Used only
        when ``options.warm_start`` is set. Both halves are projected onto the bounds and the
        dual cone before use.
    @raise ValidationError: If `problem` is invalid.
    @returntype: SolveResult
    """
    options = options or SolverOptions()
    saddle = build_saddle_form(problem)
    return _solve_prepared(problem, saddle, prepare_constraints(saddle), options, warm_start)


def _polish(problem, saddle, prepared, z, options):
    tolerance = options.eps_feas_polish

    primal_problem = problem.without_objective()
    primal_saddle = build_saddle_form(primal_problem)
    primal_run = _PdhgRun(primal_problem, primal_saddle, prepared, options,
                          lambda kkt: kkt.primal_residual <= tolerance, detect_infeasible=False)
    primal_status, primal, _, primal_iterations, _ = primal_run.run((z.x, None))

    dual_problem = problem.without_rhs()
    dual_saddle = build_saddle_form(dual_problem)
    dual_run = _PdhgRun(dual_problem, dual_saddle, prepared, options,
                        lambda kkt: kkt.dual_residual <= tolerance, detect_infeasible=False)
    dual_status, dual, _, dual_iterations, _ = dual_run.run((None, z.y))

    incomplete = primal_status is not Status.OPTIMAL or dual_status is not Status.OPTIMAL
    if incomplete:
        logger.warning("Feasibility polishing of %s stopped at the iteration limit", problem.name or "problem")
    return PolishOutcome(primal.x, dual.y, primal_iterations + dual_iterations, incomplete)


def feasibility_polish(problem, z, options=None):
    """Drive the primal and dual residuals of `z` below ``options.eps_feas_polish``.

    The primal half is polished on `problem` without its objective, warm-started at ``(x, 0)``;
    the dual half on `problem` without right-hand sides, warm-started at ``(0, y)``.

    @returntype: PolishOutcome
    """
    z = Iterate(*z)
    options = options or SolverOptions()
    saddle = build_saddle_form(problem)
    return _polish(problem, saddle, prepare_constraints(saddle), z, options)


def _same_constraints(first, other):
    return first.storage is other.storage and first.A == other.A and first.G == other.G


def batch_solve(problems, options=None, warm_starts=None):
    """Solve problems of identical shape, concurrently; results equal sequential `solve` calls.

    Preconditioning is computed once for members whose constraint matrices equal the first
    member's.

    @raise BatchShapeError: If a member's ``(n, m1, m2)`` differs from the first member's.
    """
    problems = list(problems)
    options = options or SolverOptions()
    if not problems:
        return []
    if warm_starts is None:
        warm_starts = [None] * len(problems)
    elif len(warm_starts) != len(problems):
        raise BatchShapeError(len(warm_starts), "expected {} warm starts".format(len(problems)))
    shape = problems[0].shape
    for index, problem in enumerate(problems):
        if problem.shape != shape:
            raise BatchShapeError(index, "shape (n, m1, m2) = {} differs from {}".format(problem.shape, shape))

    saddles = [build_saddle_form(problem) for problem in problems]
    shared = prepare_constraints(saddles[0])
    prepared = [shared if _same_constraints(problems[0], problem) else None for problem in problems]

    def solve_member(index):
        member = prepared[index] or prepare_constraints(saddles[index])
        return _solve_prepared(problems[index], saddles[index], member, options, warm_starts[index])

    with ThreadPoolExecutor(max_workers=app_settings.BATCH_WORKERS) as executor:
        return list(executor.map(solve_member, range(len(problems))))

# -*- coding: utf-8 -*-

# Copyright 2026 The fusedbregman authors
#
# Permission is hereby granted, free of charge, to any person obtaining a copy of this software and associated
# documentation files (the "Software"), to deal in the Software without restriction, including without limitation the
# rights to use, copy, modify, merge, publish, distribute, sublicense, and/or sell copies of the Software,
# and to permit persons to whom the Software is furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all copies or substantial portions of
# the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO
# THE WARRANTIES OF MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION OF CONTRACT,
# TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.

"""This module is the command line front end. It generates data, solves problems, cross-validates the penalty
weights and runs benchmark sweeps.

Records are written as JSON lines, matrices and tables as CSV. The exit code is 0 if every run converged, 2 if a run
stopped at the iteration cap and 1 on usage or data errors.
"""

import argparse
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from itertools import product
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import colorama
import numpy as np
import pandas as pd
from colorama import Fore, Style

from fusedbregman import __version__
from fusedbregman.data import Dataset, default_beta, gen_equicorrelated, gen_flsa_signal, gen_regression, \
    gen_two_class, kfold, load_csv, standardize, write_csv
from fusedbregman.enums import BetaSolver, ProblemKind
from fusedbregman.problem import FusedProblem, Solution, SolverConfig
from fusedbregman.run_solver import solve
from fusedbregman.verify import kkt_residual_flsvm, kkt_residual_fused

_logger = logging.getLogger('fusedbregman.cli')

SCHEMA_VERSION = '1.0'
"""Version of the `RunRecord` layout. Bumped on every field change."""

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2

DEFAULT_SIGMA = {ProblemKind.REGRESSION: 1.0, ProblemKind.FLSA: 0.5, ProblemKind.SVM: 0.0}


def _finite_or_none(value: Optional[float]) -> Optional[float]:
    return None if value is None or not math.isfinite(value) else float(value)


@dataclass
class RunRecord:
    """One solver run as emitted by the command line tools. Non-finite numbers are emitted as `null`."""
    schema_version: str
    command: str
    kind: str
    n: int
    p: int
    rho: Optional[float]
    lam1: float
    lam2: float
    mu1: float
    mu2: float
    iterations: int
    wall_time: float
    objective: Optional[float]
    rel_e: Optional[float]
    kkt_residual: Optional[float]
    gap_beta: Optional[float]
    gap_diff: Optional[float]
    nonzeros: int
    intercept: float
    converged: bool
    fold: Optional[int] = None
    test_error: Optional[float] = None

    @classmethod
    def from_solution(cls, command: str, problem: FusedProblem, solution: Solution, wall_time: float,
                      rho: Optional[float] = None, **extra) -> 'RunRecord':
        return cls(SCHEMA_VERSION, command, problem.kind.value, problem.n, problem.p, rho, problem.lam1,
                   problem.lam2, solution.mu1, solution.mu2, solution.iterations, wall_time,
                   _finite_or_none(solution.objective), _finite_or_none(solution.rel_e),
                   _finite_or_none(solution.kkt_residual), _finite_or_none(solution.constraint_gap[0]),
                   _finite_or_none(solution.constraint_gap[1]), solution.nonzeros, solution.intercept,
                   solution.converged, **extra)

    def to_json(self) -> str:
        return json.dumps(asdict(self), allow_nan=False)


def _seed_default() -> int:
    return int(os.environ.get('FB_SEED', '0'))


def _mu_flag(value: str) -> Optional[float]:
    if value == 'auto':
        return None
    mu = float(value)
    if not mu > 0:
        raise argparse.ArgumentTypeError('mu must be positive or "auto"')
    return mu


def _true_beta(p: int) -> np.ndarray:
    """The simulation coefficients, truncated for fewer than 125 predictors."""
    return default_beta(max(p, 125))[:p]


def build_problem(kind: ProblemKind, X: Optional[np.ndarray], y: np.ndarray, lam1: float, lam2: float) \
        -> FusedProblem:
    if kind is ProblemKind.REGRESSION:
        return FusedProblem.regression(X, y, lam1, lam2)
    if kind is ProblemKind.SVM:
        return FusedProblem.svm(X, y, lam1, lam2)
    return FusedProblem.flsa(y, lam1, lam2)


def solver_config(args: argparse.Namespace) -> SolverConfig:
    return SolverConfig(mu1=args.mu, mu2=args.mu, mu3=args.mu3, rel_tol=args.tol, gap_tol=args.gap_tol,
                        max_iter=args.max_iter, beta_solver=BetaSolver(args.beta_solver))


def timed_solve(problem: FusedProblem, config: SolverConfig, kkt: bool = True) -> Tuple[Solution, float]:
    """Solves a problem and fills in the KKT residual. Only the solver itself is timed."""
    start = time.perf_counter()
    solution = solve(problem, config)
    wall_time = time.perf_counter() - start
    if kkt and np.all(np.isfinite(solution.coef)):
        if problem.kind is ProblemKind.SVM:
            report = kkt_residual_flsvm(problem, solution.coef, solution.intercept)
        else:
            report = kkt_residual_fused(problem, solution.coef)
        solution.kkt_residual = report.residual_inf
    return solution, wall_time


def _status(converged: bool, message: str) -> None:
    colour = Fore.GREEN if converged else Fore.YELLOW
    print(colour + ('converged' if converged else 'not converged') + Style.RESET_ALL + ' ' + message, file=sys.stderr)


def _write_json_lines(path: str, records: Iterable[RunRecord]) -> None:
    with open(path, 'w', encoding='utf-8') as file:
        for record in records:
            file.write(record.to_json() + '\n')


def _load_matrix(path: str, has_header: bool) -> np.ndarray:
    ds = load_csv(path, has_header)
    return ds.X if ds.X is not None else ds.y[:, np.newaxis]


def _load_inputs(args: argparse.Namespace) -> Tuple[Optional[np.ndarray], np.ndarray]:
    kind = ProblemKind(args.kind)
    if kind is ProblemKind.FLSA:
        if args.signal is None:
            raise ValueError('--signal is required for flsa')
        ds = load_csv(args.signal, args.header)
        if ds.X is not None:
            raise ValueError(f'{args.signal} must hold a single column')
        return None, ds.y
    if args.x is None or args.y is None:
        raise ValueError(f'--x and --y are required for {kind.value}')
    X = _load_matrix(args.x, args.header)
    y = load_csv(args.y, args.header)
    if y.X is not None:
        raise ValueError(f'{args.y} must hold a single column')
    return X, y.y


def cmd_generate(args: argparse.Namespace) -> int:
    kind = ProblemKind(args.kind)
    sigma = args.sigma if args.sigma is not None else DEFAULT_SIGMA[kind]
    metadata: Dict[str, Any] = {'schema_version': SCHEMA_VERSION, 'kind': kind.value, 'seed': args.seed,
                                'sigma': sigma, 'version': __version__}
    outputs: List[Tuple[str, np.ndarray]] = []
    if kind is ProblemKind.FLSA:
        signal = gen_flsa_signal(args.p, sigma, args.seed)
        outputs += [('signal.csv', signal), ('beta_true.csv', np.resize(default_beta(500), args.p))]
        metadata.update(p=args.p)
    elif kind is ProblemKind.REGRESSION:
        X = gen_equicorrelated(args.n, args.p, args.rho, args.seed).X
        beta = _true_beta(args.p)
        outputs += [('X.csv', X), ('y.csv', gen_regression(X, beta, sigma, args.seed + 1)), ('beta_true.csv', beta)]
        metadata.update(n=args.n, p=args.p, rho=args.rho)
    else:
        ds = gen_two_class(args.n, args.p, args.separation, args.seed)
        outputs += [('X.csv', ds.X), ('y.csv', ds.y)]
        metadata.update(n=args.n, p=args.p, separation=args.separation)

    os.makedirs(args.out, exist_ok=True)
    for name, values in outputs:
        write_csv(os.path.join(args.out, name), values)
    with open(os.path.join(args.out, 'metadata.json'), 'w', encoding='utf-8') as file:
        json.dump(metadata, file, indent=2)
    print(Fore.GREEN + 'generated' + Style.RESET_ALL + f' {kind.value} data in {args.out}', file=sys.stderr)
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    kind = ProblemKind(args.kind)
    if len(args.lam1) != 1 or len(args.lam2) != 1:
        raise ValueError('solve takes exactly one --lam1 and one --lam2')
    X, y = _load_inputs(args)
    if args.standardize and X is not None:
        ds = standardize(Dataset(X, y), include_y=kind is ProblemKind.REGRESSION)
        X, y = ds.X, ds.y
    problem = build_problem(kind, X, y, args.lam1[0], args.lam2[0])
    solution, wall_time = timed_solve(problem, solver_config(args), kkt=not args.skip_kkt)
    record = RunRecord.from_solution(' '.join(args.argv), problem, solution, wall_time)

    os.makedirs(args.out, exist_ok=True)
    write_csv(os.path.join(args.out, 'coef.csv'), solution.coef)
    _write_json_lines(os.path.join(args.out, 'record.jsonl'), [record])
    print(record.to_json())
    _status(solution.converged, f'{solution.iterations} iterations, objective {solution.objective:.10g}')
    return EXIT_OK if solution.converged else EXIT_NOT_CONVERGED


def _is_labels(y: np.ndarray) -> bool:
    return bool(np.all(np.abs(y) == 1.0))


def _cv_task(task: Tuple) -> Dict[str, Any]:
    """Fits one grid point on one fold. Module level so that it can be sent to worker processes.

    On labels in `{-1, +1}` the misclassifications of the sign of the score are counted for every kind.
    """
    kind, X, y, train, test, lam1, lam2, config, do_standardize, fold, command = task
    X_train, y_train, X_test, y_test = X[train], y[train], X[test], y[test]
    labels = y_test
    y_mean, y_scale = 0.0, 1.0
    if do_standardize:
        ds = standardize(Dataset(X_train, y_train), include_y=kind is ProblemKind.REGRESSION)
        X_train, y_train = ds.X, ds.y
        X_test, y_test_std = ds.transform.apply(X_test, y_test)
        if kind is ProblemKind.REGRESSION:
            y_test = y_test_std
            y_mean, y_scale = ds.transform.y_mean, ds.transform.y_scale
    problem = build_problem(kind, X_train, y_train, lam1, lam2)
    solution, wall_time = timed_solve(problem, config)
    scores = X_test @ solution.coef + solution.intercept
    misclassified = None
    if _is_labels(y):
        decisions = np.where(scores * y_scale + y_mean >= 0.0, 1.0, -1.0)
        misclassified = int(np.count_nonzero(decisions != labels))
    if kind is ProblemKind.SVM:
        test_error = float(misclassified)
    else:
        test_error = float(np.mean((scores - y_test) ** 2))
    record = RunRecord.from_solution(command, problem, solution, wall_time, fold=fold, test_error=test_error)
    return {'record': record, 'lam1': lam1, 'lam2': lam2, 'fold': fold, 'test_size': int(test.shape[0]),
            'misclassified': misclassified}


def _run_tasks(worker: Callable, tasks: Sequence, jobs: int) -> List:
    if jobs <= 1:
        return [worker(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(worker, tasks))


def cmd_cv(args: argparse.Namespace) -> int:
    kind = ProblemKind(args.kind)
    if kind is ProblemKind.FLSA:
        raise ValueError('cross-validation needs a design matrix, flsa is not supported')
    X, y = _load_inputs(args)
    plan = kfold(y.shape[0], args.folds, args.seed)
    config = solver_config(args)
    command = ' '.join(args.argv)
    tasks = []
    for lam1, lam2 in product(args.lam1, args.lam2):
        for fold in range(plan.k):
            train, test = plan.split(fold)
            tasks.append((kind, X, y, train, test, lam1, lam2, config, args.standardize, fold, command))
    results = _run_tasks(_cv_task, tasks, args.jobs)

    summary = []
    for lam1, lam2 in product(args.lam1, args.lam2):
        cell = [result for result in results if result['lam1'] == lam1 and result['lam2'] == lam2]
        errors = [result['record'].test_error for result in cell]
        row = {'lam1': lam1, 'lam2': lam2, 'folds': len(cell), 'mean_error': float(np.mean(errors)),
               'converged_runs': sum(result['record'].converged for result in cell)}
        if _is_labels(y):
            misclassified = sum(result['misclassified'] for result in cell)
            row['errors'] = f'{misclassified}/{y.shape[0]}'
        summary.append(row)
        _logger.info('lam1 %g, lam2 %g: mean test error %.6g', lam1, lam2, row['mean_error'])

    os.makedirs(args.out, exist_ok=True)
    records = sorted((result['record'] for result in results), key=lambda r: (r.lam1, r.lam2, r.fold))
    _write_json_lines(os.path.join(args.out, 'cv_folds.jsonl'), records)
    pd.DataFrame(summary).to_csv(os.path.join(args.out, 'cv_summary.csv'), index=False, float_format='%.17g')
    converged = all(record.converged for record in records)
    _status(converged, f'{len(records)} fits over {len(summary)} grid points')
    return EXIT_OK if converged else EXIT_NOT_CONVERGED


def _bench_task(task: Tuple) -> Dict[str, Any]:
    """Generates one instance and times one solve. Module level so that it can be sent to worker processes."""
    kind, n, p, rho, sigma, separation, seed, lam1, lam2, config = task
    if kind is ProblemKind.FLSA:
        X, y = None, gen_flsa_signal(p, sigma, seed)
    elif kind is ProblemKind.REGRESSION:
        X = gen_equicorrelated(n, p, rho, seed).X
        y = gen_regression(X, _true_beta(p), sigma, seed + 1)
    else:
        ds = gen_two_class(n, p, separation, seed)
        X, y = ds.X, ds.y
    problem = build_problem(kind, X, y, lam1, lam2)
    solution, wall_time = timed_solve(problem, config, kkt=False)
    return {'n': problem.n, 'p': p, 'rho': rho, 'time': wall_time, 'iterations': solution.iterations,
            'converged': solution.converged}


def loglog_slope(sizes: Sequence[float], times: Sequence[float]) -> float:
    """Fits `log(time) = slope * log(size) + c` by least squares and returns the slope."""
    return float(np.polyfit(np.log(sizes), np.log(times), 1)[0])


def cmd_bench(args: argparse.Namespace) -> int:
    kind = ProblemKind(args.kind)
    sigma = args.sigma if args.sigma is not None else DEFAULT_SIGMA[kind]
    config = solver_config(args)
    ns = [None] if kind is ProblemKind.FLSA else args.n
    rhos = args.rho if kind is ProblemKind.REGRESSION else [0.0]
    tasks = [(kind, n, p, rho, sigma, args.separation, args.seed + repeat, lam1, lam2, config)
             for n, p, rho in product(ns, args.p, rhos)
             for repeat in range(args.repeats)
             for lam1, lam2 in product(args.lam1, args.lam2)]
    results = pd.DataFrame(_run_tasks(_bench_task, tasks, args.jobs))

    table = results.groupby(['n', 'p', 'rho'], sort=True).agg(
        mean_time=('time', 'mean'), mean_iters=('iterations', 'mean'), runs=('time', 'size'),
        converged_runs=('converged', 'sum')).reset_index()
    table.insert(0, 'method', f'sb_{kind.value}')
    scaling = table[['n', 'rho', 'p', 'mean_time', 'mean_iters']].sort_values(['n', 'rho', 'p'])
    for (n, rho), series in scaling.groupby(['n', 'rho']):
        if series['p'].nunique() >= 2:
            _logger.info('n %d, rho %g: log-log slope of time in p %.3f', n, rho,
                         loglog_slope(series['p'].to_numpy(), series['mean_time'].to_numpy()))

    os.makedirs(args.out, exist_ok=True)
    table.to_csv(os.path.join(args.out, 'bench.csv'), index=False, float_format='%.17g')
    scaling.to_csv(os.path.join(args.out, 'scaling.csv'), index=False, float_format='%.17g')
    converged = bool(results['converged'].all())
    _status(converged, f'{len(results)} timed runs in {len(table)} cells')
    return EXIT_OK if converged else EXIT_NOT_CONVERGED


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--lam1', type=float, action='append', required=True, help='sparsity penalty weight')
    parser.add_argument('--lam2', type=float, action='append', required=True, help='fusion penalty weight')
    parser.add_argument('--mu', type=_mu_flag, default=None,
                        help='augmentation weight mu1 = mu2, or "auto" for the pretrial (default)')
    parser.add_argument('--mu3', type=float, default=1.0, help='augmentation weight of the hinge constraint')
    parser.add_argument('--tol', type=float, default=1e-5, help='relative objective change that stops a run')
    parser.add_argument('--gap-tol', type=float, default=1e-4, help='relative bound on the residuals of a stopped run')
    parser.add_argument('--max-iter', type=int, default=50000)
    parser.add_argument('--beta-solver', choices=[solver.value for solver in BetaSolver], default='pcg')


def _add_input_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--x', help='CSV file of the design matrix')
    parser.add_argument('--y', help='CSV file of the responses or labels')
    parser.add_argument('--signal', help='CSV file of a single column signal (flsa)')
    parser.add_argument('--header', action='store_true', help='input files start with a header line')
    parser.add_argument('--standardize', action='store_true', help='standardize the columns before solving')


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--kind', choices=[kind.value for kind in ProblemKind], required=True)
    common.add_argument('--seed', type=int, default=_seed_default(), help='defaults to $FB_SEED or 0')
    common.add_argument('--out', default='.', help='output directory')
    common.add_argument('--jobs', type=int, default=1, help='worker processes for cv and bench')
    common.add_argument('-v', '--verbose', action='count', default=0)

    parser = argparse.ArgumentParser(prog='fusedbregman', description='Split Bregman solvers for the fused Lasso')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    commands = parser.add_subparsers(dest='command', required=True)

    generate = commands.add_parser('generate', parents=[common], help='generate synthetic data')
    generate.add_argument('--n', type=int, default=100)
    generate.add_argument('--p', type=int, default=500)
    generate.add_argument('--rho', type=float, default=0.0)
    generate.add_argument('--sigma', type=float, help='noise variance')
    generate.add_argument('--separation', type=float, default=2.0, help='class mean distance (svm)')
    generate.set_defaults(handler=cmd_generate)

    solve_parser = commands.add_parser('solve', parents=[common], help='solve one problem')
    _add_input_flags(solve_parser)
    _add_solver_flags(solve_parser)
    solve_parser.add_argument('--skip-kkt', action='store_true', help='do not certify the solution')
    solve_parser.set_defaults(handler=cmd_solve)

    cv = commands.add_parser('cv', parents=[common], help='cross-validate a grid of penalty weights')
    _add_input_flags(cv)
    _add_solver_flags(cv)
    cv.add_argument('--folds', type=int, default=10)
    cv.set_defaults(handler=cmd_cv)

    bench = commands.add_parser('bench', parents=[common], help='time the solver on synthetic data')
    _add_solver_flags(bench)
    bench.add_argument('--n', type=int, action='append', help='observations (repeatable)')
    bench.add_argument('--p', type=int, action='append', required=True, help='predictors (repeatable)')
    bench.add_argument('--rho', type=float, action='append', help='predictor correlation (repeatable)')
    bench.add_argument('--sigma', type=float, help='noise variance')
    bench.add_argument('--separation', type=float, default=2.0, help='class mean distance (svm)')
    bench.add_argument('--repeats', type=int, default=1)
    bench.set_defaults(handler=cmd_bench)
    return parser


def _configure_logging(verbosity: int) -> None:
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(verbosity, 2)]
    logging.basicConfig(level=level, format='%(asctime)s %(name)s %(levelname)s: %(message)s')


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Runs the command line interface and returns the exit code."""
    colorama.init(autoreset=True)
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as ex:
        return EXIT_OK if ex.code == 0 else EXIT_ERROR
    args.argv = ['fusedbregman'] + argv
    _configure_logging(args.verbose)
    if args.command == 'bench':
        args.n = args.n or [100]
        args.rho = args.rho or [0.0]
    try:
        return args.handler(args)
    except (ValueError, ArithmeticError, OSError) as ex:
        print(Fore.RED + 'error' + Style.RESET_ALL + f' {ex}', file=sys.stderr)
        _logger.debug('command failed', exc_info=True)
        return EXIT_ERROR


if __name__ == '__main__':  # pragma: no cover
    sys.exit(main())

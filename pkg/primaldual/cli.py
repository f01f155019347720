"""
Primal-Dual Toolkit - Command Line
==================================

Batch front end over the solver, set-cover, MRF and LP-certificate modules.

Subcommands:
- solve     PROBLEM  --method fb|fb_rescaled|fb_symmetric|fb2|fbf|projection|admm|all
- setcover  INSTANCE
- mrf       MODEL    --method dd|graphcut|bruteforce
- lp-cert   LP --x FILE --y FILE

Every run prints one JSON document on stdout. Exit codes: 0 success,
2 iteration cap reached, 64 malformed input, 65 semantic failure.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError

from .config import DD_DEFAULTS, DEFAULT_KKT_TOL, DEFAULT_MAX_ITERS, DEFAULT_SEED, LOG_FORMAT, LOG_LEVEL
from .discrete.lp_duality import approximation_certificate, check_slackness
from .discrete.setcover import solve_setcover
from .errors import ParseError, PrimalDualError
from .mrf.decomposition import decompose
from .mrf.dual_decomposition import DDSchedule, solve_dual_decomposition
from .mrf.graphcut import graphcut_solve
from .mrf.model import brute_force_opt, energy
from .prox.extended import to_float
from .solvers import METHODS, SolverConfig, applicable_methods, solve
from .solvers.diagnostics import primal_dual_objectives
from .utils.parsers import (
    format_labeling,
    read_lp,
    read_mrf,
    read_problem,
    read_setcover,
    read_vector,
    write_vector,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_MAX_ITERS = 2
EXIT_PARSE = 64
EXIT_SEMANTIC = 65


class RunSpec(BaseModel):
    """One CLI invocation; unknown keys are rejected."""

    model_config = ConfigDict(extra='forbid')

    command: Literal['solve', 'setcover', 'mrf', 'lp-cert']
    input: str
    method: Optional[str] = None
    max_iters: Optional[int] = None
    tol: Optional[float] = None
    tau: Optional[float] = None
    sigma: Optional[float] = None
    gamma: Optional[float] = None
    gamma0: Optional[float] = None
    schedule: Literal['diminishing', 'summable'] = DD_DEFAULTS['schedule']
    decomposition: Optional[str] = None
    trace: Optional[str] = None
    output: Optional[str] = None
    seed: int = DEFAULT_SEED
    x: Optional[str] = None
    y: Optional[str] = None
    nu_primal: float = 1.0
    nu_dual: float = 1.0


# ============================================
# RESPONSE FORMATTING
# ============================================

def format_error_response(message: str, code: int) -> Dict:
    return {'success': False, 'error': message, 'exit_code': code}


def format_success_response(data: Dict, code: int = EXIT_OK) -> Dict:
    return {'success': True, 'data': data, 'exit_code': code}


def _emit(payload: Dict) -> None:
    sys.stdout.write(json.dumps(json_safe(payload), sort_keys=True, allow_nan=False) + '\n')


def json_safe(value):
    """Strict-JSON copy of a payload; non-finite numbers become "inf", "-inf" or "nan"."""
    if isinstance(value, dict):
        return {str(k): json_safe(v) for k, v in value.items()}
    if isinstance(value, np.ndarray):
        return json_safe(value.tolist())
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    if value is None or isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    number = to_float(value)
    if np.isfinite(number):
        return number
    if np.isnan(number):
        return 'nan'
    return 'inf' if number > 0 else '-inf'


def _output_dir(spec: RunSpec) -> Optional[Path]:
    if spec.output is None:
        return None
    path = Path(spec.output)
    path.mkdir(parents=True, exist_ok=True)
    return path


# ============================================
# SUBCOMMANDS
# ============================================

def cmd_solve(spec: RunSpec):
    problem = read_problem(spec.input)
    overrides = {
        'max_iters': spec.max_iters or DEFAULT_MAX_ITERS,
        'kkt_tol': spec.tol or DEFAULT_KKT_TOL,
        'seed': spec.seed,
        'tau': spec.tau,
        'sigma': spec.sigma,
        'gamma': spec.gamma,
    }
    method = spec.method or 'fb'
    if method == 'all':
        methods = applicable_methods(problem, SolverConfig(**overrides))
        logger.info(f"Applicable methods: {', '.join(methods)}")
    elif method in METHODS:
        methods = [method]
    else:
        raise PrimalDualError(f"unknown method {method!r}; expected one of {METHODS + ('all',)}")

    out_dir = _output_dir(spec)
    results, code = [], EXIT_OK
    for name in methods:
        result = solve(problem, SolverConfig(method=name, **overrides))
        report = primal_dual_objectives(problem, result.x, result.v)
        if spec.trace:
            trace_path = Path(spec.trace)
            if len(methods) > 1:
                trace_path = trace_path.with_name(f"{trace_path.stem}_{name}{trace_path.suffix or '.csv'}")
            result.trace.to_csv(trace_path)
        if out_dir is not None:
            write_vector(out_dir / f"{name}_x.txt", result.x)
            write_vector(out_dir / f"{name}_v.txt", result.v)
        if result.status == 'max_iters':
            code = EXIT_MAX_ITERS
        results.append({
            'method': name,
            'status': result.status,
            'iterations': result.iterations,
            'norm_bound': result.guard.norm_bound,
            'primal': report.primal,
            'dual': report.dual,
            'gap': report.gap,
            'r_primal': result.r_primal,
            'r_dual': result.r_dual,
            'x': result.x,
        })
    return {'results': results}, code


def cmd_setcover(spec: RunSpec):
    result = solve_setcover(read_setcover(spec.input))
    out_dir = _output_dir(spec)
    if out_dir is not None:
        write_vector(out_dir / 'cover.txt', result.x)
        write_vector(out_dir / 'dual.txt', result.y)
    return {
        'cover': result.cover,
        'cost': result.cost,
        'dual_value': result.dual_value,
        'f_max': result.f_max,
        'ratio': result.ratio,
        'certificate_passed': result.certificate.passed and result.approximation.passed,
    }, EXIT_OK


def cmd_mrf(spec: RunSpec):
    model = read_mrf(spec.input)
    method = spec.method or 'dd'
    data = {'method': method}
    code = EXIT_OK
    if method == 'graphcut':
        labeling, value = graphcut_solve(model)
    elif method == 'bruteforce':
        labeling, value = brute_force_opt(model)
    elif method == 'dd':
        strategy = spec.decomposition or ('rows_cols' if model.grid else 'spanning_trees(2)')
        schedule = DDSchedule(kind=spec.schedule, gamma0=spec.gamma0)
        result = solve_dual_decomposition(model, decompose(model, strategy), schedule,
                                          max_iters=spec.max_iters or DD_DEFAULTS['max_iters'])
        if spec.trace:
            result.to_csv(spec.trace)
        labeling, value = result.labeling, result.best_primal
        data.update({'decomposition': strategy, 'best_dual': result.best_dual,
                     'agreement': result.agreement, 'iterations': result.iterations})
        data['bounds_met'] = result.bounds_met
        code = EXIT_OK if result.converged else EXIT_MAX_ITERS
    else:
        raise PrimalDualError(f"unknown MRF method {method!r}; expected dd, graphcut or bruteforce")

    out_dir = _output_dir(spec)
    if out_dir is not None:
        (out_dir / 'labeling.txt').write_text(format_labeling(labeling))
    data.update({'labeling': labeling, 'energy': energy(model, labeling), 'value': value})
    return data, code


def cmd_lp_cert(spec: RunSpec):
    if spec.x is None or spec.y is None:
        raise ParseError("lp-cert needs --x and --y vector files")
    lp = read_lp(spec.input)
    x, y = read_vector(spec.x), read_vector(spec.y)
    certificate = check_slackness(lp, x, y, spec.nu_primal, spec.nu_dual)
    approximation = approximation_certificate(lp, x, y, certificate.nu)
    data = {
        'slackness_passed': certificate.passed,
        'violations': [v._asdict() for v in certificate.violations],
        'approximation_passed': approximation.passed,
        'primal_value': approximation.primal_value,
        'dual_value': approximation.dual_value,
        'nu': certificate.nu,
    }
    return data, EXIT_OK if certificate.passed and approximation.passed else EXIT_SEMANTIC


COMMANDS = {
    'solve': cmd_solve,
    'setcover': cmd_setcover,
    'mrf': cmd_mrf,
    'lp-cert': cmd_lp_cert,
}


# ============================================
# ENTRY POINT
# ============================================

class CliParser(argparse.ArgumentParser):
    """Usage errors raise ParseError so they exit 64 with a JSON response."""

    def error(self, message: str):
        raise ParseError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = CliParser(prog='primaldual', description=__doc__.split('\n\n')[1])
    parser.add_argument('--spec', help='JSON file with RunSpec fields (command-line flags win)')
    parser.add_argument('--verbose', action='store_true', help='log at DEBUG level')
    sub = parser.add_subparsers(dest='command', required=True)

    solve_p = sub.add_parser('solve', help='run primal-dual solvers on a problem file')
    solve_p.add_argument('input')
    solve_p.add_argument('--method', help=f"one of {', '.join(METHODS)} or 'all'")
    solve_p.add_argument('--tau', type=float)
    solve_p.add_argument('--sigma', type=float)
    solve_p.add_argument('--gamma', type=float)

    cover_p = sub.add_parser('setcover', help='primal-dual set cover')
    cover_p.add_argument('input')

    mrf_p = sub.add_parser('mrf', help='MRF energy minimization')
    mrf_p.add_argument('input')
    mrf_p.add_argument('--method', help='dd, graphcut or bruteforce')
    mrf_p.add_argument('--decomposition', help="single, per_edge, rows_cols or spanning_trees(k)")
    mrf_p.add_argument('--gamma0', type=float)
    mrf_p.add_argument('--schedule', choices=['diminishing', 'summable'])

    lp_p = sub.add_parser('lp-cert', help='complementary-slackness certificate for an (x, y) pair')
    lp_p.add_argument('input')
    lp_p.add_argument('--x', required=True)
    lp_p.add_argument('--y', required=True)
    lp_p.add_argument('--nu-primal', type=float)
    lp_p.add_argument('--nu-dual', type=float)

    for p in (solve_p, mrf_p):
        p.add_argument('--max-iters', type=int)
        p.add_argument('--trace', help='CSV trace path')
    for p in (solve_p, cover_p, mrf_p, lp_p):
        p.add_argument('--seed', type=int)
        p.add_argument('--output', help='directory for solution files')
    for p in (solve_p,):
        p.add_argument('--tol', type=float)
    return parser


def build_run_spec(args: argparse.Namespace) -> RunSpec:
    fields = {}
    if args.spec:
        try:
            fields.update(json.loads(Path(args.spec).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read run spec {args.spec}: {exc}") from exc
    fields.update({k: v for k, v in vars(args).items()
                   if v is not None and k not in ('spec', 'verbose')})
    return RunSpec(**fields)


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(level=getattr(logging, LOG_LEVEL), format=LOG_FORMAT)
    try:
        args = build_parser().parse_args(argv)
        if args.verbose:
            logging.getLogger().setLevel(logging.DEBUG)
        spec = build_run_spec(args)
        data, code = COMMANDS[spec.command](spec)
    except (ParseError, ValidationError) as exc:
        logger.error(f"Malformed input: {exc}")
        _emit(format_error_response(str(exc), EXIT_PARSE))
        return EXIT_PARSE
    except PrimalDualError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        _emit(format_error_response(str(exc), EXIT_SEMANTIC))
        return EXIT_SEMANTIC
    _emit(format_success_response(data, code))
    return code


if __name__ == '__main__':
    sys.exit(main())

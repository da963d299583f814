"""
Experiment runner
Executes one configured experiment and maps the outcome to an exit code
"""
import json
import math
import sys
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, TextIO

import pandas as pd

from config import CLI_CONFIG, TOLERANCES, max_threads
from graph_core import (
    HypothesisViolation,
    VertexFunction,
    dirichlet_ground_state,
    identity_report,
    parse_identity,
    random_sparse_graph,
    random_tree,
    read_edge_list,
)
from lattice_zd import leray_z2_check, zd_inequality_check
from lp_hardy import lp_trials
from sharpness import (
    ConvergenceFailure,
    FactorizationBreakdown,
    PolynomialBump,
    SmoothBump,
    continuum_convergence,
    counterexample_sweep,
    eig_sweep,
    fit_lhs_constant,
    sharp_constant,
    sweep_violations,
)
from weights import WeightModel
from cli.config import RunConfig, UsageError
from cli.parser import parse_args
from cli.reports import build_report, format_csv, format_json, serialize, write_text

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2


@dataclass
class Outcome:
    """Primary table (for CSV), JSON results and the violating instances"""
    results: Dict[str, Any]
    table: Optional[pd.DataFrame] = None
    violations: List[Dict[str, Any]] = field(default_factory=list)


# ============================================================================
# EXPERIMENTS
# ============================================================================

def _run_weights(config: RunConfig) -> Outcome:
    p = config.params
    params = {}
    if p.get('alpha') is not None:
        params['alpha'] = p['alpha']
    if p.get('p') is not None:
        params['p'] = p['p']
    model = WeightModel(p['family'], params, eval_mode=p.get('mode', 'auto'))
    table = pd.DataFrame([model.row(n) for n in p['n']],
                         columns=['n', 'family', 'direct', 'series', 'bound', 'margin'])
    tol = TOLERANCES['nonnegativity']
    violations = []
    for row in table.itertuples(index=False):
        if not (math.isfinite(row.margin) and math.isfinite(row.bound)):
            kind = 'non_finite'
        elif row.margin < -tol * abs(row.bound):
            kind = 'below_bound'
        else:
            continue
        violations.append({'n': int(row.n), 'kind': kind, 'direct': float(row.direct),
                           'series': float(row.series), 'margin': float(row.margin), 'bound': float(row.bound)})
    return Outcome({'model': model, 'rows': table}, table, violations)


def _identity_instance(config: RunConfig, i: int, graph, kind: str, m: int):
    seed = config.seed + i
    rng = random.Random(seed)
    radius = CLI_CONFIG['identity_support_radius']
    if kind in ('first_order', 'second_order'):
        G = graph or random_sparse_graph(CLI_CONFIG['identity_graph_size'], seed=seed)
        V = VertexFunction({x: rng.uniform(0.0, 2.0) for x in G.vertices})
        f = VertexFunction({x: rng.uniform(0.2, 3.0) for x in G.vertices})
        center = G.vertices[rng.randrange(len(G))]
        support = sorted(G.ball([center], radius), key=repr)
        u = VertexFunction({x: rng.uniform(-1.0, 1.0) for x in support})
        return G, V, f, u
    G = graph or random_tree(CLI_CONFIG['identity_tree_size'], seed=seed, window=CLI_CONFIG['identity_tree_window'])
    center = G.vertices[len(G) // 2]
    depth = m + 1 if kind == 'odd_order' else m
    f, _lam = dirichlet_ground_state(G, G.ball([center], radius + 2 * depth + 1))
    u = VertexFunction({x: rng.uniform(-1.0, 1.0) for x in sorted(G.ball([center], radius), key=repr)})
    return G, VertexFunction.constant(G, 1.0), f, u


def _run_identity(config: RunConfig) -> Outcome:
    p = config.params
    kind, m = parse_identity(p['which'], p.get('m'))
    graph = read_edge_list(p['graph']) if p.get('graph') else None
    rows, violations = [], []
    for i in range(p['trials']):
        G, V, f, u = _identity_instance(config, i, graph, kind, m)
        try:
            report = identity_report(G, V, f, u, kind, m)
        except HypothesisViolation as e:
            violations.append({'trial': i, 'seed': config.seed + i, 'kind': 'hypothesis', **e.to_dict()})
            continue
        rows.append({'trial': i, 'seed': config.seed + i, 'which': kind, 'm': m,
                     'lhs': float(report.lhs), 'rhs': float(report.rhs),
                     'residual': float(report.residual), 'bound': float(report.bound)})
        if not report.holds:
            violations.append({'trial': i, 'seed': config.seed + i, 'kind': 'residual', **report.to_dict()})
    table = pd.DataFrame(rows, columns=['trial', 'seed', 'which', 'm', 'lhs', 'rhs', 'residual', 'bound'])
    return Outcome({'which': kind, 'm': m, 'rows': table}, table, violations)


def _run_sharpness(config: RunConfig) -> Outcome:
    p = config.params
    table = eig_sweep(p['ell'], p['n_list'], tol=p.get('tol'), seed=config.seed)
    return Outcome({'ell': p['ell'], 'sharp_constant': sharp_constant(p['ell']), 'rows': table},
                   table, sweep_violations(table, p['ell']))


def _run_counterexample(config: RunConfig) -> Outcome:
    table = counterexample_sweep(config.params['m_list'])
    violations = []
    ratios = table['ratio'].tolist()
    for k in range(1, len(ratios)):
        if not ratios[k] > ratios[k - 1]:
            violations.append({'M': int(table['M'].iloc[k]), 'kind': 'ratio_not_increasing',
                               'ratio': ratios[k], 'previous': ratios[k - 1]})
    return Outcome({'rows': table, 'lhs_constant': fit_lhs_constant(table)}, table, violations)


def _run_continuum(config: RunConfig) -> Outcome:
    p = config.params
    ell = p['ell']
    phi = SmoothBump() if p['profile'] == 'bump' else PolynomialBump(order=p['order'])
    convergence = continuum_convergence(phi, p['m_list'], ell)
    table = convergence.table
    constant = sharp_constant(ell)
    tol = TOLERANCES['nonnegativity']
    violations = [
        {'M': int(row.M), 'kind': 'ratio_below_constant', 'discrete_ratio': float(row.discrete_ratio),
         'constant': constant}
        for row in table.itertuples(index=False)
        if row.discrete_ratio < constant * (1.0 - tol)
    ]
    return Outcome({'profile': phi.name, 'ell': ell, 'convergence': convergence}, table, violations)


def _run_zd(config: RunConfig) -> Outcome:
    p = config.params
    if p.get('leray'):
        report = leray_z2_check(p['radius'], p['trials'], config.seed)
        tol = TOLERANCES['nonnegativity']
        violations = [
            {'trial': i, 'seed': config.seed + i, 'margin': m}
            for i, (m, s) in enumerate(zip(report.margins, report.scales))
            if m < -tol * s
        ]
        if not violations and not report.holds:
            violations.append({'kind': 'leading_order', 'table': report.leading_table})
        return Outcome(report.to_dict(), None, violations)
    report = zd_inequality_check(p['alpha'], p['d'], p['radius'], p['trials'], config.seed)
    return Outcome(report.to_dict(), None, report.violations())


def _run_lp(config: RunConfig) -> Outcome:
    p = config.params
    report = lp_trials(p['p'], p['trials'], config.seed)
    return Outcome(report.to_dict(), None, report.violations())


EXPERIMENTS: Dict[str, Callable[[RunConfig], Outcome]] = {
    'weights': _run_weights,
    'identity': _run_identity,
    'sharpness': _run_sharpness,
    'counterexample': _run_counterexample,
    'continuum': _run_continuum,
    'zd': _run_zd,
    'lp': _run_lp,
}


# ============================================================================
# OUTPUT
# ============================================================================

def _emit(config: RunConfig, outcome: Outcome, stdout: TextIO) -> None:
    report = build_report(config.to_dict(), outcome.results, outcome.violations)
    if config.output_format == 'csv':
        text = format_csv(outcome.table)
    else:
        text = format_json(report)
    if config.output is None:
        write_text(text, stdout)
        if config.output_format == 'csv':
            logger.info(f"Report metadata: {json.dumps(report['metadata'])}")
        return
    path = Path(config.output)
    path.write_text(text)
    if config.output_format == 'csv':
        sidecar = path.with_name(path.name + '.meta.json')
        sidecar.write_text(format_json({k: report[k] for k in ('config', 'violations', 'metadata')}))
    logger.info(f"Report written to {path}")


def run(config: RunConfig, stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    """
    Execute exactly one experiment

    Returns:
        0 when every checked invariant held, 1 on a mathematical violation
        (instances written to stderr as JSON), 2 on a usage error
    """
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        config.validate()
        logger.info(f"Running {config.command} with seed {config.seed} ({max_threads()} threads)")
        outcome = EXPERIMENTS[config.command](config)
    except (UsageError, FileNotFoundError) as e:
        logger.error(f"Usage error: {e}")
        return EXIT_USAGE
    except (ConvergenceFailure, FactorizationBreakdown, HypothesisViolation) as e:
        logger.error(f"{config.command} failed: {e}")
        write_text(format_json({'violations': [serialize({'kind': type(e).__name__, 'message': str(e)})]}), stderr)
        return EXIT_VIOLATION
    except ValueError as e:
        logger.error(f"Invalid parameters for {config.command}: {e}")
        return EXIT_USAGE

    _emit(config, outcome, stdout)
    if outcome.violations:
        logger.error(f"{config.command}: {len(outcome.violations)} violation(s)")
        write_text(format_json({'violations': serialize(outcome.violations)}), stderr)
        return EXIT_VIOLATION
    logger.info(f"{config.command} finished: all checks held")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        config = parse_args(argv)
    except UsageError as e:
        logger.error(f"Usage error: {e}")
        sys.stderr.write(f"hardy-lab: error: {e}\n")
        return EXIT_USAGE
    return run(config)

"""
Argument parsing: one subcommand per experiment
"""
import argparse
import logging
from typing import List, Optional, Sequence

from config import CLI_CONFIG, COUNTEREXAMPLE_CONFIG, LP_CONFIG, VERSION, WEIGHT_FAMILIES
from graph_core.identities import IDENTITY_KINDS
from cli.config import OUTPUT_FORMATS, PROFILES, RunConfig, UsageError, parse_int_list, parse_int_range

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting"""

    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> List[int]:
    try:
        return parse_int_list(text)
    except UsageError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _int_range(text: str) -> List[int]:
    try:
        return parse_int_range(text)
    except UsageError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _common_options() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument('--seed', type=int, default=0, help='Base seed; trial i uses seed + i')
    common.add_argument('--format', dest='output_format', choices=OUTPUT_FORMATS, default=None,
                        help='Output format (default depends on the subcommand)')
    common.add_argument('--output', default=None, help='Write the report here instead of stdout')
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='hardy-lab', description='Discrete Hardy-Rellich inequalities: checks and samples')
    parser.add_argument('--version', action='version', version=f'%(prog)s {VERSION}')
    common = _common_options()
    sub = parser.add_subparsers(dest='command', parser_class=_Parser)

    p = sub.add_parser('weights', parents=[common], help='Tabulate a weight family')
    p.add_argument('--family', required=True, choices=WEIGHT_FAMILIES)
    p.add_argument('--n', type=_int_range, default=CLI_CONFIG['weights_range'], help='Index range, e.g. 1..20')
    p.add_argument('--alpha', type=float, default=None)
    p.add_argument('--p', type=float, default=None)
    p.add_argument('--mode', choices=('auto', 'direct', 'series'), default='auto')

    p = sub.add_parser('identity', parents=[common], help='Check a weighted Hardy-Rellich equality on graphs')
    p.add_argument('--which', required=True, help=f"One of {', '.join(IDENTITY_KINDS)}, e.g. iterated(2)")
    p.add_argument('--m', type=int, default=None)
    p.add_argument('--graph', default=None, help="Edge list file with 'x y b' lines")
    p.add_argument('--trials', type=int, default=CLI_CONFIG['identity_trials'])

    p = sub.add_parser('sharpness', parents=[common], help='Smallest generalized eigenvalue sweep')
    p.add_argument('--ell', type=int, required=True)
    p.add_argument('--n-list', dest='n_list', type=_int_list,
                   default=list(CLI_CONFIG['sharpness_n_list']))
    p.add_argument('--tol', type=float, default=None)

    p = sub.add_parser('counterexample', parents=[common], help='Second order counterexample sweep')
    p.add_argument('--m-list', dest='m_list', type=_int_list, default=list(COUNTEREXAMPLE_CONFIG['M_list']))

    p = sub.add_parser('continuum', parents=[common], help='Continuum limit of sampled profiles')
    p.add_argument('--ell', type=int, default=2)
    p.add_argument('--profile', choices=PROFILES, default='bump')
    p.add_argument('--order', type=int, default=None, help='Vanishing order of the polynomial profile')
    p.add_argument('--m-list', dest='m_list', type=_int_list, default=list(CLI_CONFIG['continuum_m_list']))

    zd = CLI_CONFIG['zd_defaults']
    p = sub.add_parser('zd', parents=[common], help='Weighted Hardy inequality on a box of Z^d')
    p.add_argument('--d', type=int, default=zd['d'])
    p.add_argument('--alpha', type=float, default=zd['alpha'])
    p.add_argument('--radius', type=int, default=zd['radius'])
    p.add_argument('--trials', type=int, default=zd['trials'])
    p.add_argument('--leray', action='store_true', help='Check the Leray weight on Z^2 instead')

    p = sub.add_parser('lp', parents=[common], help='l^p Hardy inequality and Landau inequality')
    p.add_argument('--p', type=float, default=LP_CONFIG['default_p'])
    p.add_argument('--trials', type=int, default=LP_CONFIG['default_trials'])
    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """
    Parse and validate a command line

    Raises:
        UsageError: unknown flags, malformed values or a failed schema check
    """
    args = build_parser().parse_args(argv)
    if args.command is None:
        raise UsageError(f"A subcommand is required: one of {', '.join(sorted(CLI_CONFIG['default_format']))}")
    params = {
        k: v for k, v in vars(args).items()
        if k not in ('command', 'seed', 'output_format', 'output')
    }
    if args.command == 'continuum' and params.get('order') is None:
        params['order'] = max(params['ell'], 3)
    config = RunConfig(
        command=args.command,
        params=params,
        seed=args.seed,
        output_format=args.output_format,
        output=args.output,
    )
    return config.validate()

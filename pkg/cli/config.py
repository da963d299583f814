"""
Run configuration for the command line
Typed parameters per subcommand, validated before any computation
"""
import math
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from config import CLI_CONFIG, CONTINUUM_CONFIG, LATTICE_CONFIG, WEIGHT_FAMILIES
from graph_core import parse_identity

logger = logging.getLogger(__name__)

SUBCOMMANDS = ('weights', 'identity', 'sharpness', 'counterexample', 'continuum', 'zd', 'lp')
OUTPUT_FORMATS = ('csv', 'json')
PROFILES = ('bump', 'polynomial')
TABLE_COMMANDS = ('weights', 'identity', 'sharpness', 'counterexample', 'continuum')

_RANGE = re.compile(r'^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$')


class UsageError(ValueError):
    """Command line parameters are missing, malformed or contradictory"""


# ============================================================================
# VALUE PARSERS
# ============================================================================

def parse_int_range(text: str) -> List[int]:
    """'1..20' -> [1, ..., 20]; a single integer is a one-element range"""
    text = str(text).strip()
    match = _RANGE.match(text)
    if match:
        lo, hi = int(match.group(1)), int(match.group(2))
    else:
        try:
            lo = hi = int(text)
        except ValueError:
            raise UsageError(f"Expected an integer range like 1..20, got {text!r}") from None
    if hi < lo:
        raise UsageError(f"Empty range {text!r}")
    return list(range(lo, hi + 1))


def parse_int_list(text: str) -> List[int]:
    """'100,1000,10000' -> [100, 1000, 10000]"""
    items = [s.strip() for s in str(text).split(',') if s.strip()]
    if not items:
        raise UsageError(f"Expected a comma separated list of integers, got {text!r}")
    try:
        return [int(s) for s in items]
    except ValueError:
        raise UsageError(f"Expected a comma separated list of integers, got {text!r}") from None


def _strictly_increasing(name: str, values: List[int]) -> None:
    if any(b <= a for a, b in zip(values, values[1:])):
        raise UsageError(f"{name} must be strictly increasing, got {values}")


# ============================================================================
# RUN CONFIG
# ============================================================================

@dataclass
class RunConfig:
    """One experiment: subcommand, typed parameters, seed and output target"""
    command: str
    params: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    output_format: Optional[str] = None
    output: Optional[str] = None

    def __post_init__(self):
        if self.output_format is None and self.command in CLI_CONFIG['default_format']:
            self.output_format = CLI_CONFIG['default_format'][self.command]

    def validate(self) -> 'RunConfig':
        """
        Check the parameters against the subcommand's schema

        Raises:
            UsageError: first problem found
        """
        if self.command not in SUBCOMMANDS:
            raise UsageError(f"Unknown subcommand: {self.command}")
        if self.output_format not in OUTPUT_FORMATS:
            raise UsageError(f"Unknown output format: {self.output_format}")
        if self.output_format == 'csv' and self.command not in TABLE_COMMANDS:
            raise UsageError(f"Subcommand {self.command} emits JSON only")
        if not (0 <= self.seed <= CLI_CONFIG['max_seed']):
            raise UsageError(f"Seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.output is not None and not str(self.output).strip():
            raise UsageError("Output path is empty")
        getattr(self, f"_validate_{self.command}")(self.params)
        return self

    # ------------------------------------------------------------------
    # Per-subcommand schemas
    # ------------------------------------------------------------------

    @staticmethod
    def _validate_weights(p: Dict[str, Any]) -> None:
        family = p.get('family')
        if family not in WEIGHT_FAMILIES:
            raise UsageError(f"Unknown weight family: {family}")
        n = p.get('n') or []
        if not n or n[0] < 1:
            raise UsageError(f"Weight indices must start at n >= 1, got {n[:1]}")
        alpha = p.get('alpha')
        if family in ('shifted_hardy', 'direct_hardy') and alpha is None:
            raise UsageError(f"Family {family} needs --alpha")
        if family == 'shifted_hardy' and alpha >= 0:
            raise UsageError(f"shifted_hardy needs alpha < 0, got {alpha}")
        if family == 'direct_hardy' and alpha < 0:
            raise UsageError(f"direct_hardy needs alpha >= 0, got {alpha}")
        if family not in ('shifted_hardy', 'direct_hardy') and alpha is not None:
            raise UsageError(f"Family {family} takes no --alpha")
        power = p.get('p')
        if family == 'landau_constant' and (power is None or not power > 1):
            raise UsageError(f"landau_constant needs --p > 1, got {power}")
        if family != 'landau_constant' and power is not None:
            raise UsageError(f"Family {family} takes no --p")

    @staticmethod
    def _validate_identity(p: Dict[str, Any]) -> None:
        try:
            parse_identity(p.get('which', ''), p.get('m'))
        except ValueError as e:
            raise UsageError(str(e)) from None
        if p.get('trials', 1) < 1:
            raise UsageError(f"Number of trials must be >= 1, got {p.get('trials')}")
        graph = p.get('graph')
        if graph is not None and not Path(graph).is_file():
            raise UsageError(f"Graph file not found: {graph}")

    @staticmethod
    def _validate_sharpness(p: Dict[str, Any]) -> None:
        ell = p.get('ell')
        if ell is None or ell < 1:
            raise UsageError(f"Order must be >= 1, got {ell}")
        n_list = p.get('n_list') or []
        if not n_list:
            raise UsageError("Sharpness sweep needs at least one truncation size")
        _strictly_increasing('--n-list', n_list)
        if n_list[0] < ell + 1:
            raise UsageError(f"Truncation sizes must be >= ell + 1 = {ell + 1}, got {n_list[0]}")
        tol = p.get('tol')
        if tol is not None and not (tol > 0 and math.isfinite(tol)):
            raise UsageError(f"Tolerance must be positive, got {tol}")

    @staticmethod
    def _validate_counterexample(p: Dict[str, Any]) -> None:
        m_list = p.get('m_list') or []
        if not m_list:
            raise UsageError("Counterexample sweep needs at least one M")
        _strictly_increasing('--m-list', m_list)
        if m_list[0] < 2:
            raise UsageError(f"Counterexample needs M >= 2, got {m_list[0]}")

    @staticmethod
    def _validate_continuum(p: Dict[str, Any]) -> None:
        ell = p.get('ell')
        if ell is None or ell < 1:
            raise UsageError(f"Order must be >= 1, got {ell}")
        if p.get('profile') not in PROFILES:
            raise UsageError(f"Unknown profile: {p.get('profile')}")
        if p.get('profile') == 'polynomial' and p.get('order', ell) < ell:
            raise UsageError(f"Polynomial profile of order {p.get('order')} cannot test order {ell}")
        m_list = p.get('m_list') or []
        if not m_list:
            raise UsageError("Continuum run needs at least one M")
        _strictly_increasing('--m-list', m_list)
        if m_list[0] < CONTINUUM_CONFIG['min_M']:
            raise UsageError(f"Continuum sampling needs M >= {CONTINUUM_CONFIG['min_M']}, got {m_list[0]}")

    @staticmethod
    def _validate_zd(p: Dict[str, Any]) -> None:
        d, alpha, radius = p.get('d'), p.get('alpha'), p.get('radius')
        if d is None or d < 2:
            raise UsageError(f"Lattice dimension must be >= 2, got {d}")
        if p.get('leray'):
            if d != 2:
                raise UsageError(f"The Leray check lives on Z^2, got d={d}")
        elif alpha is None or not alpha > 2 - d:
            raise UsageError(f"Weight exponent must satisfy alpha > 2 - d = {2 - d}, got {alpha}")
        if radius is None or radius < LATTICE_CONFIG['min_check_radius']:
            raise UsageError(f"Box radius must be >= {LATTICE_CONFIG['min_check_radius']}, got {radius}")
        if p.get('trials', 0) < 0:
            raise UsageError(f"Number of trials must be nonnegative, got {p.get('trials')}")

    @staticmethod
    def _validate_lp(p: Dict[str, Any]) -> None:
        power = p.get('p')
        if power is None or not (power > 1 and math.isfinite(power)):
            raise UsageError(f"Exponent p must be > 1, got {power}")
        if p.get('trials', 0) < 0:
            raise UsageError(f"Number of trials must be nonnegative, got {p.get('trials')}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'command': self.command,
            'params': dict(self.params),
            'seed': self.seed,
            'format': self.output_format,
            'output': self.output,
        }

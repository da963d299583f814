"""Command line front end: one experiment per invocation"""
from .config import RunConfig, UsageError, parse_int_list, parse_int_range
from .parser import build_parser, parse_args
from .reports import build_report, format_csv, format_json, serialize
from .runner import EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, main, run

__all__ = [
    'RunConfig',
    'UsageError',
    'parse_int_list',
    'parse_int_range',
    'build_parser',
    'parse_args',
    'build_report',
    'format_csv',
    'format_json',
    'serialize',
    'EXIT_OK',
    'EXIT_USAGE',
    'EXIT_VIOLATION',
    'main',
    'run',
]

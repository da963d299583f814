"""
Discrete Hardy-Rellich laboratory
Command line entry point: python app.py <subcommand> [options]
"""
import sys
import logging

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

from config import LOG_FORMAT, LOG_LEVEL
from cli import main

# ============================================================================
# LOGGING SETUP
# ============================================================================

logging.basicConfig(
    level=LOG_LEVEL.upper(),
    format=LOG_FORMAT,
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)


if __name__ == '__main__':
    sys.exit(main(sys.argv[1:]))

"""Laboratory settings: tolerances, solver limits and CLI defaults"""
from .settings import *

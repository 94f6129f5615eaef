# utils/__init__.py
from .timing import Stopwatch, format_duration, format_cost, parse_seconds
from .log import get_logger, setup_logging
from .config import config, Config

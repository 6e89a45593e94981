"""
=============================================================================
LOGGING CONFIGURATION
=============================================================================

PURPOSE:
    One place that wires the console and the dated log file for a CLI run.
    Every subcommand leaves its log in logs/ next to the report it wrote.

HOW TO USE:
    Instead of setting up logging in each script, import this:

        from config.logging_config import setup_logging
        logger = setup_logging('kvn_forms')

    This creates log files in the logs/ directory:
        - logs/kvn_forms_2024-01-15.log

    Logs rotate daily, keeping the last 7 days. Library modules only call
    logging.getLogger(__name__); the handlers installed here sit on the
    root logger so their records land in the same file.
"""

import logging
import os
from datetime import datetime
from logging.handlers import TimedRotatingFileHandler

from config.settings import OUTPUT_CONFIG


def setup_logging(script_name, log_level=logging.INFO, log_dir=None):
    """
    Install the console and file handlers on the root logger for one run.

    PARAMETERS:
        script_name (str): Name of the run (used in log filename)
        log_level: Logging level name or number (default: INFO)
        log_dir (str): Directory for log files; defaults to
                       OUTPUT_CONFIG['log_dir'] under the project root.
                       Pass '' to log to the console only.

    RETURNS:
        logging.Logger: the run logger (named after the run)

    LOG FILES:
        <log_dir>/<script_name>_YYYY-MM-DD.log, rotated at midnight,
        seven backups kept.
    """
    if isinstance(log_level, str):
        log_level = getattr(logging, log_level.upper(), logging.INFO)

    root = logging.getLogger()
    root.setLevel(log_level)

    # repeated runs in one process (tests) must not stack handlers
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    # console
    console_handler = logging.StreamHandler()
    console_handler.setLevel(log_level)
    console_handler.setFormatter(formatter)
    root.addHandler(console_handler)

    # dated file, skipped when log_dir is empty
    if log_dir is None:
        project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
        log_dir = os.path.join(project_root, OUTPUT_CONFIG['log_dir'])
    log_filename = None
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
        today = datetime.now().strftime('%Y-%m-%d')
        log_filename = os.path.join(log_dir, f'{script_name}_{today}.log')
        file_handler = TimedRotatingFileHandler(
            log_filename,
            when='midnight',
            interval=1,
            backupCount=7,
            encoding='utf-8'
        )
        file_handler.setLevel(log_level)
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)

    logger = logging.getLogger(script_name)
    logger.debug(f"Logging initialized for {script_name}")
    if log_filename:
        logger.debug(f"Log file: {log_filename}")
    return logger


# =============================================================================
# RUN FRAMING
# =============================================================================

def log_run_start(logger, subcommand, config=None):
    """
    Banner for the start of a subcommand; the resolved configuration
    goes to DEBUG one key per line.
    """
    logger.info("=" * 60)
    logger.info(f"RUN STARTED - {subcommand.upper()}")
    logger.info("=" * 60)
    for key, value in sorted((config or {}).items()):
        logger.debug(f"  {key}: {value}")


def log_run_end(logger, stats):
    """
    Banner for the end of a subcommand followed by its summary, e.g.
    {"checks": 41, "failures": 0, "passed": True}.
    """
    logger.info("=" * 60)
    logger.info("RUN COMPLETED")
    logger.info("=" * 60)
    for key, value in stats.items():
        logger.info(f"  {key}: {value}")


def log_error(logger, error, context=""):
    """Log a KvnError (or any exception) prefixed by what the run was doing."""
    if context:
        logger.error(f"{context}: {error}")
    else:
        logger.error(str(error))

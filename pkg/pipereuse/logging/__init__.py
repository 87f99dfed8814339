# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import functools
import logging
import os
import sys
from typing import Any, Optional, Union

from pipereuse.errors import ConfigurationError

from .helpers import MetricLogger, SmoothedValue

# glog-like prefix: [IWEF]yyyymmdd hh:mm:ss pid logger file:line]
_LOG_FORMAT = "%(levelname).1s%(asctime)s %(process)s %(name)s %(filename)s:%(lineno)s] %(message)s"
_DATE_FORMAT = "%Y%m%d %H:%M:%S"


def _log_file(output: str) -> str:
    if os.path.splitext(output)[-1] in (".txt", ".log"):
        return output
    return os.path.join(output, "logs", "log.txt")


# cached so that repeated setup calls (one per command in a test session) do not stack handlers
@functools.lru_cache()
def _configure_logger(name: Optional[str] = None, *, level: int = logging.INFO, output: Optional[str] = None):
    logger = logging.getLogger(name)
    logger.setLevel(level)
    logger.propagate = False
    formatter = logging.Formatter(fmt=_LOG_FORMAT, datefmt=_DATE_FORMAT)

    # stdout carries reports (merge-report prints JSON), progress goes to stderr
    handlers = [logging.StreamHandler(stream=sys.stderr)]
    if output:
        filename = _log_file(output)
        os.makedirs(os.path.dirname(filename) or ".", exist_ok=True)
        handlers.append(logging.FileHandler(filename, mode="a"))
    for handler in handlers:
        handler.setLevel(logging.DEBUG)
        handler.setFormatter(formatter)
        logger.addHandler(handler)
    return logger


def setup_logging(
    output: Optional[str] = None,
    *,
    name: Optional[str] = "pipereuse",
    level: Union[int, str] = logging.INFO,
    capture_warnings: bool = True,
    use_wandb: bool = False,
    run_name: Optional[str] = None,
    config: Optional[Any] = None,
) -> None:
    """
    Setup logging.

    Args:
        output: A log file name (".txt" or ".log") or a directory, in which case
            logs go to `output/logs/log.txt`. None keeps logs on stderr only.
        name: The name of the logger to configure, "pipereuse" by default.
        level: A logging level or its name, e.g. "DEBUG".
        capture_warnings: Route `warnings.warn` through logging.
        use_wandb: Start a wandb run that sweep summaries are logged to.
        run_name: Name of the wandb run.
        config: Plain dict stored as the wandb run config.
    """
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            raise ConfigurationError(f"Unknown logging level {level!r}")
    logging.captureWarnings(capture_warnings)
    _configure_logger(name, level=level, output=output)

    if use_wandb:
        import wandb

        wandb.init(name=run_name, project="pipereuse", config=config, dir=output)

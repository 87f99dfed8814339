# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import logging
import os
import subprocess
from typing import Dict

logger = logging.getLogger("pipereuse")


def _git(*command: str) -> str:
    cwd = os.path.dirname(os.path.abspath(__file__))
    return subprocess.check_output(["git", *command], cwd=cwd, stderr=subprocess.DEVNULL).decode("ascii").strip()


def git_info() -> Dict[str, str]:
    """Commit, working tree status and branch of the checkout, "N/A" outside of git."""
    info = {"sha": "N/A", "status": "N/A", "branch": "N/A"}
    try:
        info["sha"] = _git("rev-parse", "HEAD")
        info["status"] = "has uncommitted changes" if _git("diff-index", "HEAD") else "clean"
        info["branch"] = _git("rev-parse", "--abbrev-ref", "HEAD")
    except (OSError, subprocess.CalledProcessError):
        logger.debug("not a git checkout, run metadata without commit")
    return info


def get_sha() -> str:
    return ", ".join(f"{key}: {value}" for key, value in git_info().items())

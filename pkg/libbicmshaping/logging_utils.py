# -*- coding: utf-8 -*-
# Copyright 2020 Google Inc.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Logging helpers for libbicmshaping.

Log records go to stderr so that curve data written to stdout by the CLI
stays machine readable.
"""

import logging
import sys
from typing import Dict, Optional, Set

RESET_SEQ = '\u001b[0m'
BOLD = '\u001b[1m'
BG_RED = '\u001b[41m'
RED = '\u001b[38;5;9m'
YELLOW = '\u001b[38;5;11m'
BLUE = '\u001b[38;5;12m'
WHITE = '\u001b[38;5;15m'

# [2020-10-18 18:06:05,187] [libbicmshaping.shaping] INFO     Optimized cm
LOG_FORMAT = ('[%(asctime)s] [{0:s}%(name)-28s{1:s}] %(levelname)-8s'
              ' %(message)s')

LEVEL_COLOR_MAP = {
    'WARNING': YELLOW,
    'INFO': WHITE,
    'DEBUG': BLUE,
    'CRITICAL': BOLD + BG_RED + WHITE,
    'ERROR': RED
}  # type: Dict[str, str]

_CONFIGURED_ROOTS = set()  # type: Set[str]


class Formatter(logging.Formatter):
  """Formatter adding per-level colors on ANSI terminals."""

  def __init__(self, colorize: Optional[bool] = None, **kwargs: str) -> None:
    """Initializes the Formatter object.

    Args:
      colorize (bool): Optional. If True, output will be colorized. Defaults
          to colorizing only when stderr is a terminal.
    """
    if colorize is None:
      colorize = sys.stderr.isatty()
    self.colorize = colorize
    if self.colorize:
      kwargs['fmt'] = LOG_FORMAT.format(BOLD, RESET_SEQ)
    else:
      kwargs['fmt'] = LOG_FORMAT.format('', '')
    super(Formatter, self).__init__(**kwargs)

  def format(self, record: logging.LogRecord) -> str:
    """Hooks the native format method and colorizes messages if needed.

    Args:
      record (logging.LogRecord): Native log record.

    Returns:
      str: The formatted message string.
    """
    if self.colorize:
      loglevel_color = LEVEL_COLOR_MAP.get(record.levelname)
      if loglevel_color:
        record.msg = loglevel_color + record.getMessage() + RESET_SEQ
        record.args = None
    return super(Formatter, self).format(record)


def SetUpLogger(name: str, level: int = logging.INFO) -> None:
  """Setup a logger.

  The handler is attached to the top-level package logger of name (e.g.
  "libbicmshaping" for "libbicmshaping.rates"); module loggers propagate to
  it, so records are never printed twice.

  Args:
    name (str): The name for the logger.
    level (int): Optional. The logging level for the top-level logger.
  """
  root_name = name.split('.')[0]
  if root_name in _CONFIGURED_ROOTS:
    return
  root = logging.getLogger(root_name)
  console_handler = logging.StreamHandler(sys.stderr)
  console_handler.setFormatter(Formatter())
  root.addHandler(console_handler)
  root.setLevel(level)
  _CONFIGURED_ROOTS.add(root_name)


def SetLevel(level: int) -> None:
  """Change the level of every configured logger at once.

  Args:
    level (int): The logging level, e.g. logging.DEBUG.
  """
  for root_name in _CONFIGURED_ROOTS:
    logging.getLogger(root_name).setLevel(level)


def GetLogger(name: str) -> logging.Logger:
  """Return a logger.

  This is a wrapper around logging.getLogger that is intended to be used by
  the other modules so that they don't have to import the logging module +
  this module.

  Args:
    name (str); The name for the logger.

  Returns:
    logging.Logger: The logger.
  """
  return logging.getLogger(name)

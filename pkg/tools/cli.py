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
"""CLI tools for libbicmshaping."""

import argparse
import logging
import sys

from typing import Tuple, List, Optional, Any, Dict
from libbicmshaping import logging_utils
from tools import config as sweep_config
from tools import rates_cli

logging_utils.SetUpLogger(__name__)
logger = logging_utils.GetLogger(__name__)

EXIT_IO_ERROR = 1
EXIT_USAGE_ERROR = 2

COMMAND_TO_FUNC = {
    'capacity': rates_cli.Capacity,
    'exponent': rates_cli.Exponent,
    'wideband': rates_cli.Wideband,
    'optimize': rates_cli.Optimize
}

# Options shared by every subcommand. Defaults are None so that values from
# --config can fill in; see tools.config.DEFAULTS.
COMMON_ARGS = [
    ('--m', 'Number of label bits of the square QAM (even). Default 4.',
     None),
    ('--snr-db', 'snr grid in dB, "start:stop:step" or a comma separated '
                 'list. Default 0:20:1.', None),
    ('--schemes', 'Comma separated curves among cm, mlc, bicm, '
                  'bicm-uniform, gaussian.', None),
    ('--shaping', 'Input shaping: uniform, optimized, or the path of a JSON '
                  'file with a "bit_marginals" list. Default optimized.',
     None),
    ('--quadrature-order', 'Quadrature order; rates use order // 4 (at least '
                           '8) Gauss-Legendre nodes per noise panel. '
                           'Default 64.',
     None),
    ('--format', 'Output format, csv or json. Default csv.', None),
    ('--out', 'Output file. Default stdout.', None),
    ('--config', 'Flat key=value file with option defaults.', None),
    ('--seed', 'Seed of the shaping optimizer restarts. Default 1008.', None),
    ('--workers', 'Worker processes for the sweep. Default 1.', None),
    ('--verbose', 'Log at DEBUG level.', False)
]  # type: List[Tuple[str, str, Optional[Any]]]


def AddParser(
    # pylint: disable=protected-access
    command_parser: argparse._SubParsersAction,
    # pylint: enable=protected-access
    func: str,
    func_helper: str,
    args: Optional[List[Tuple[str, str, Optional[Any]]]] = None) -> None:
  """Create a new parser object for a subcommand.

  Args:
    command_parser (_SubParsersAction): The subparser object from
        argparse.ArgumentParser.
    func (str): The name of the subcommand to add parsing options for.
    func_helper (str): A helper text describing what the subcommand does.
    args (List[Tuple]): Optional. A list of arguments to add
        to the parser. Each argument is a tuple containing the action (str) to
        add to the parser, a helper text (str), and a default value (Any or
        None).

  Raises:
    NotImplementedError: If the requested subcommand is not implemented.
  """
  if func not in COMMAND_TO_FUNC:
    raise NotImplementedError(
        'Requested subcommand {0:s} is not implemented'.format(func))
  func_parser = command_parser.add_parser(func, help=func_helper)
  if args:
    for argument, helper_text, default_value in args:
      kwargs = {'help': helper_text}  # type: Dict[str, Any]
      if isinstance(default_value, bool):
        kwargs['action'] = 'store_true'
      else:
        kwargs['default'] = default_value
      func_parser.add_argument(argument, **kwargs)  # type: ignore
  func_parser.set_defaults(func=COMMAND_TO_FUNC[func])


def BuildParser() -> argparse.ArgumentParser:
  """Build the argument parser of the bicmshaping CLI."""
  parser = argparse.ArgumentParser(
      description='Achievable rates, error exponents and shaping of BICM, '
                  'MLC and CM over the AWGN channel.')
  subparsers = parser.add_subparsers()

  AddParser(subparsers, 'capacity',
            'Sweep CM, MLC and BICM rates (shaped and uniform) over snr.',
            args=COMMON_ARGS)
  AddParser(subparsers, 'exponent',
            'Sweep random-coding exponents over a rate grid.',
            args=COMMON_ARGS + [
                ('--rates', 'Rate grid in bits, "start:stop:step" or a comma '
                            'separated list. Default 0:m:0.05.', None)
            ])
  AddParser(subparsers, 'wideband',
            'Fit the low-snr coefficients c1, c2 and report Eb/N0 limits.',
            args=COMMON_ARGS)
  AddParser(subparsers, 'optimize',
            'Dump the optimal shaping at the first snr as JSON.',
            args=COMMON_ARGS)
  return parser


def Main(argv: Optional[List[str]] = None) -> None:
  """Main function for libbicmshaping CLI.

  Exits with 0 on success, 1 on I/O errors, 2 on usage or configuration
  errors and 3 when a numerical flag was raised.

  Args:
    argv (List[str]): Optional. Command-line arguments, sys.argv[1:] by
        default.
  """
  argv = sys.argv[1:] if argv is None else argv
  parser = BuildParser()
  if not argv:
    parser.print_help()
    sys.exit(EXIT_USAGE_ERROR)

  parsed_args = parser.parse_args(argv)
  if not hasattr(parsed_args, 'func'):
    parser.print_help()
    sys.exit(EXIT_USAGE_ERROR)
  if parsed_args.verbose:
    logging_utils.SetLevel(logging.DEBUG)

  try:
    status = parsed_args.func(parsed_args)
  except sweep_config.ConfigError as error:
    logger.error('Invalid configuration: {0!s}'.format(error))
    sys.exit(EXIT_USAGE_ERROR)
  except OSError as error:
    logger.error('I/O error: {0!s}'.format(error))
    sys.exit(EXIT_IO_ERROR)
  sys.exit(status)


if __name__ == '__main__':
  Main()

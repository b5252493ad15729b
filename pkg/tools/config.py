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
"""Sweep configuration for the CLI.

Values come from three layers, in decreasing priority: flags given on the
command line, the flat key=value file passed with --config, and DEFAULTS.
"""

import dataclasses
import json
import math
from typing import Any, Dict, List, Optional, TYPE_CHECKING

import numpy as np

from libbicmshaping import shaping
from libbicmshaping.internal import channel as awgn
from libbicmshaping.internal import common
from libbicmshaping.internal import constellation as qam

if TYPE_CHECKING:
  import argparse

SHAPING_UNIFORM = 'uniform'
SHAPING_OPTIMIZED = 'optimized'
FORMAT_CSV = 'csv'
FORMAT_JSON = 'json'
DEFAULT_SEED = shaping.RESTART_SEED

# Option names as they appear on argparse.Namespace.
DEFAULTS = {
    'm': '4',
    'snr_db': '0:20:1',
    'rates': None,
    'schemes': 'cm,mlc,bicm,bicm-uniform',
    'shaping': SHAPING_OPTIMIZED,
    'quadrature_order': str(common.DEFAULT_QUADRATURE_ORDER),
    'format': FORMAT_CSV,
    'out': None,
    'seed': str(DEFAULT_SEED),
    'workers': '1',
}  # type: Dict[str, Optional[str]]

DEFAULT_RATE_STEP_BITS = 0.05


class ConfigError(ValueError):
  """Invalid command-line or configuration file input."""


def ParseRange(text: str) -> List[float]:
  """Parse 'start:stop:step' (stop included) or a comma separated list.

  Args:
    text (str): The specification.

  Returns:
    List[float]: The values.

  Raises:
    ConfigError: If the text is malformed, the step is not positive or the
        list is empty.
  """
  text = text.strip()
  try:
    if ':' in text:
      parts = [float(part) for part in text.split(':')]
      if len(parts) != 3:
        raise ConfigError(
            'Ranges are start:stop:step, got {0:s}'.format(text))
      start, stop, step = parts
      if not step > 0:
        raise ConfigError('Range step must be positive, got {0:g}'.format(
            step))
      count = int(math.floor((stop - start) / step + 1e-9)) + 1
      values = [start + index * step for index in range(max(count, 0))]
    else:
      values = [float(part) for part in text.split(',') if part.strip()]
  except ValueError as error:
    if isinstance(error, ConfigError):
      raise
    raise ConfigError('Cannot parse {0:s}: {1!s}'.format(text, error))
  if not values:
    raise ConfigError('Empty value list: {0:s}'.format(text))
  return values


def ReadConfigFile(path: str) -> Dict[str, str]:
  """Read a flat key=value file.

  Blank lines and lines starting with '#' are ignored. Keys are long flag
  names; dashes and underscores are interchangeable.

  Args:
    path (str): Path to the file.

  Returns:
    Dict[str, str]: Values keyed by option name.

  Raises:
    ConfigError: On malformed lines or unknown keys.
    OSError: If the file cannot be read.
  """
  values = {}  # type: Dict[str, str]
  with open(path, 'r') as config_file:
    for number, line in enumerate(config_file, start=1):
      line = line.strip()
      if not line or line.startswith('#'):
        continue
      if '=' not in line:
        raise ConfigError('{0:s}:{1:d}: expected key=value, got {2:s}'.format(
            path, number, line))
      key, value = (part.strip() for part in line.split('=', 1))
      key = key.lstrip('-').replace('-', '_')
      if key not in DEFAULTS:
        raise ConfigError('{0:s}:{1:d}: unknown key {2:s}'.format(
            path, number, key))
      values[key] = value
  return values


def LoadMarginals(path: str, m: int) -> qam.BitMarginals:
  """Load bit marginals from a JSON file with a 'bit_marginals' list.

  The optimize subcommand writes files in this format.

  Raises:
    ConfigError: If the file does not hold m valid probabilities.
    OSError: If the file cannot be read.
  """
  with open(path, 'r') as shaping_file:
    try:
      content = json.load(shaping_file)
    except ValueError as error:
      raise ConfigError('{0:s}: not valid JSON: {1!s}'.format(path, error))
  if isinstance(content, list) and content:
    content = content[0]
  if not isinstance(content, dict) or 'bit_marginals' not in content:
    raise ConfigError('{0:s}: expected a "bit_marginals" list'.format(path))
  try:
    marginals = qam.BitMarginals(content['bit_marginals'])
  except (TypeError, ValueError) as error:
    raise ConfigError('{0:s}: {1!s}'.format(path, error))
  if marginals.m != m:
    raise ConfigError('{0:s}: {1:d} bit marginals for m = {2:d}'.format(
        path, marginals.m, m))
  return marginals


@dataclasses.dataclass
class SweepConfig:
  """Validated settings of one CLI run.

  Attributes:
    m (int): Number of label bits.
    snr_db (List[float]): snr grid in dB.
    schemes (List[str]): Requested curves.
    shaping (str): 'uniform', 'optimized' or a marginals file path.
    quadrature_order (int): Gauss-Hermite order.
    output_format (str): 'csv' or 'json'.
    output_path (str): Output file, None for stdout.
    rates_bits (List[float]): Rate grid of the exponent sweep, in bits.
    seed (int): Seed of the shaping optimizer restarts.
    workers (int): Worker processes.
  """
  m: int = 4
  snr_db: List[float] = dataclasses.field(default_factory=lambda: [0.0])
  schemes: List[str] = dataclasses.field(
      default_factory=lambda: list(common.CURVE_SCHEMES))
  shaping: str = SHAPING_OPTIMIZED
  quadrature_order: int = common.DEFAULT_QUADRATURE_ORDER
  output_format: str = FORMAT_CSV
  output_path: Optional[str] = None
  rates_bits: List[float] = dataclasses.field(default_factory=list)
  seed: int = DEFAULT_SEED
  workers: int = 1

  def Validate(self) -> None:
    """Check every field.

    Raises:
      ConfigError: Naming the first invalid field.
    """
    if self.m < 2 or self.m % 2:
      raise ConfigError('m must be even and >= 2, got {0:d}'.format(self.m))
    if not self.snr_db:
      raise ConfigError('snr-db: empty snr list')
    if not self.schemes:
      raise ConfigError('schemes: empty scheme list')
    unknown = [
        scheme for scheme in self.schemes
        if scheme not in common.CURVE_SCHEMES
    ]
    if unknown:
      raise ConfigError('schemes: unknown {0!s}, expected some of {1!s}'.format(
          unknown, list(common.CURVE_SCHEMES)))
    if not (awgn.MIN_QUADRATURE_ORDER <= self.quadrature_order <=
            awgn.MAX_QUADRATURE_ORDER):
      raise ConfigError('quadrature-order must lie in [{0:d}, {1:d}], got '
                        '{2:d}'.format(awgn.MIN_QUADRATURE_ORDER,
                                       awgn.MAX_QUADRATURE_ORDER,
                                       self.quadrature_order))
    if self.output_format not in (FORMAT_CSV, FORMAT_JSON):
      raise ConfigError('format must be csv or json, got {0:s}'.format(
          self.output_format))
    if self.workers < 1:
      raise ConfigError('workers must be >= 1, got {0:d}'.format(
          self.workers))
    if any(rate < 0 for rate in self.rates_bits):
      raise ConfigError('rates must be nonnegative')

  @property
  def rule(self) -> awgn.QuadratureRule:
    """The quadrature rule of the configured order."""
    return awgn.GaussHermite(self.quadrature_order)

  def Marginals(self) -> Optional[qam.BitMarginals]:
    """Explicit marginals when shaping names a file, None otherwise."""
    if self.shaping in (SHAPING_UNIFORM, SHAPING_OPTIMIZED):
      return None
    return LoadMarginals(self.shaping, self.m)

  @classmethod
  def FromArguments(cls, args: 'argparse.Namespace') -> 'SweepConfig':
    """Merge flags, the optional config file and DEFAULTS.

    Args:
      args (argparse.Namespace): Parsed arguments; options not given on the
          command line are None.

    Returns:
      SweepConfig: The validated configuration.

    Raises:
      ConfigError: If a value is malformed or invalid.
      OSError: If the config file cannot be read.
    """
    from_file = {}  # type: Dict[str, str]
    if getattr(args, 'config', None):
      from_file = ReadConfigFile(args.config)
    merged = {}  # type: Dict[str, Any]
    for key, default in DEFAULTS.items():
      value = getattr(args, key, None)
      if value is None:
        value = from_file.get(key, default)
      merged[key] = value

    try:
      m = int(merged['m'])
      quadrature_order = int(merged['quadrature_order'])
      seed = int(merged['seed'])
      workers = int(merged['workers'])
    except (TypeError, ValueError) as error:
      raise ConfigError('Invalid integer option: {0!s}'.format(error))
    if merged['rates'] is None:
      rates_bits = list(
          np.round(np.arange(0.0, m + 1e-9, DEFAULT_RATE_STEP_BITS), 10))
    else:
      rates_bits = ParseRange(merged['rates'])
    config = cls(
        m=m,
        snr_db=ParseRange(merged['snr_db']),
        schemes=[
            scheme.strip() for scheme in merged['schemes'].split(',')
            if scheme.strip()
        ],
        shaping=merged['shaping'],
        quadrature_order=quadrature_order,
        output_format=merged['format'],
        output_path=merged['out'],
        rates_bits=[float(rate) for rate in rates_bits],
        seed=seed,
        workers=workers)
    config.Validate()
    return config

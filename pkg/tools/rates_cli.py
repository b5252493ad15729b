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
"""CLI subcommands: capacity and exponent sweeps, wideband fits, shaping.

Every subcommand returns the process exit status: 0 on success, 3 when a
numerical flag was raised (the output is still written).
"""

import csv
import dataclasses
import itertools
import json
import multiprocessing
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple
from typing import TYPE_CHECKING

from libbicmshaping import exponents
from libbicmshaping import logging_utils
from libbicmshaping import rates
from libbicmshaping import shaping
from libbicmshaping import wideband
from libbicmshaping.internal import channel as awgn
from libbicmshaping.internal import common
from libbicmshaping.internal import constellation as qam
from tools import config as sweep_config

logging_utils.SetUpLogger(__name__)
logger = logging_utils.GetLogger(__name__)

if TYPE_CHECKING:
  import argparse

EXIT_OK = 0
EXIT_NUMERICAL_FLAG = 3

CAPACITY_COLUMNS = ('snr_db', 'scheme', 'shaping', 'rate_nats', 'rate_bits',
                    'ebn0_db', 'parameters')
EXPONENT_COLUMNS = ('snr_db', 'scheme', 'shaping', 'rate_bits', 'exponent',
                    'rho_star', 's_star', 'parameters')
WIDEBAND_COLUMNS = ('scheme', 'shaping', 'c1', 'c2', 'ebn0_lim_db',
                    'residual', 'stable')

# Capacity rows may only decrease along this chain.
ORDERING_CHAIN = (common.BICM, common.MLC, common.CM, common.GAUSSIAN)
ORDERING_TOLERANCE = 1e-7

Row = Dict[str, Any]


def ParallelMap(function: Callable[[Any], Any], tasks: Sequence[Any],
                workers: int) -> List[Any]:
  """Map over tasks, in a process pool when workers > 1.

  Results are returned in task order.
  """
  if workers <= 1 or len(tasks) <= 1:
    return [function(task) for task in tasks]
  with multiprocessing.Pool(min(workers, len(tasks))) as pool:
    return pool.map(function, tasks)


def WriteRows(rows: List[Row], columns: Sequence[str],
              config: sweep_config.SweepConfig) -> None:
  """Write rows as CSV or JSON to the configured output.

  Raises:
    OSError: If the output cannot be written.
  """
  stream = (open(config.output_path, 'w', newline='')
            if config.output_path else sys.stdout)
  try:
    if config.output_format == sweep_config.FORMAT_JSON:
      json.dump(rows, stream, indent=2)
      stream.write('\n')
    else:
      writer = csv.DictWriter(stream, fieldnames=list(columns))
      writer.writeheader()
      for row in rows:
        writer.writerow({
            key: (';'.join(repr(value) for value in row[key]) if isinstance(
                row[key], list) else row[key]) for key in columns
        })
  finally:
    if stream is not sys.stdout:
      stream.close()


def _Normalized(m: int, marginals: qam.BitMarginals
               ) -> Tuple[qam.Constellation, qam.SymbolDistribution]:
  """BuildQAM(m) normalized under the product of the marginals."""
  base = qam.BuildQAM(m)
  distribution = qam.ProductDistribution(base, marginals)
  return qam.Normalize(base, distribution), distribution


def _FixedRate(scheme: str, m: int, marginals: qam.BitMarginals,
               channel: awgn.ChannelSpec, rule: awgn.QuadratureRule) -> float:
  """Rate of a scheme under fixed bit marginals."""
  constellation, distribution = _Normalized(m, marginals)
  if scheme in (common.BICM, common.BICM_UNIFORM):
    return rates.BicmRate(constellation, marginals, channel, rule)
  return rates.MutualInformation(constellation, distribution, channel, rule)


def _CapacityRow(point: rates.RatePoint, snr_db: float, mode: str) -> Row:
  """Output row of one rate point."""
  return {
      'snr_db': snr_db,
      'scheme': point.scheme,
      'shaping': mode,
      'rate_nats': point.rate_nats,
      'rate_bits': point.rate_bits,
      'ebn0_db': common.EbN0Decibels(snr_db, point.rate_bits),
      'parameters': list(point.shaping)
  }


def CapacityPoint(
    task: Tuple[sweep_config.SweepConfig, float]) -> Tuple[List[Row], bool]:
  """All capacity rows of one snr.

  Args:
    task (Tuple[SweepConfig, float]): The configuration and the snr in dB.

  Returns:
    Tuple[List[Row], bool]: The rows (Gaussian reference last) and whether a
        numerical flag was raised.
  """
  config, snr_db = task
  channel = awgn.ChannelSpec.FromDecibels(snr_db)
  rule = config.rule
  explicit = config.Marginals()
  uniform = qam.BitMarginals.Uniform(config.m)
  flagged = False
  points = {}  # type: Dict[str, rates.RatePoint]
  rows = []  # type: List[Row]
  schemes = [scheme for scheme in config.schemes
             if scheme != common.GAUSSIAN] + [common.GAUSSIAN]
  for scheme in schemes:
    parameters = []  # type: List[float]
    mode = config.shaping
    if scheme == common.GAUSSIAN:
      mode = 'gaussian'
      value = rates.GaussianCapacity(channel)
    elif scheme == common.BICM_UNIFORM:
      mode = sweep_config.SHAPING_UNIFORM
      value = _FixedRate(scheme, config.m, uniform, channel, rule)
    elif config.shaping == sweep_config.SHAPING_OPTIMIZED:
      result = shaping.Optimize(scheme, config.m, channel, rule,
                                seed=config.seed)
      value = result.rate_nats
      parameters = result.theta.tolist()
      flagged = flagged or not result.converged
    else:
      marginals = explicit or uniform
      value = _FixedRate(scheme, config.m, marginals, channel, rule)
      parameters = marginals.p0.tolist()
    points[scheme] = rates.RatePoint(
        snr=channel.snr, rate_nats=value, scheme=scheme,
        shaping=tuple(parameters))
    rows.append(_CapacityRow(points[scheme], snr_db, mode))

  chain = [scheme for scheme in ORDERING_CHAIN if scheme in points]
  for lower, upper in zip(chain, chain[1:]):
    if points[lower].rate_nats > points[upper].rate_nats + ORDERING_TOLERANCE:
      logger.warning('Ordering violated at {0:g} dB: {1:s} {2:.9f} > {3:s} '
                     '{4:.9f}'.format(snr_db, lower, points[lower].rate_nats,
                                      upper, points[upper].rate_nats))
      flagged = True
  return rows, flagged


def Capacity(args: 'argparse.Namespace') -> int:
  """Sweep the achievable rates over the snr grid.

  Args:
    args (argparse.Namespace): Arguments from ArgumentParser.

  Returns:
    int: The exit status.
  """
  config = sweep_config.SweepConfig.FromArguments(args)
  logger.info('Capacity sweep: m = {0:d}, {1:d} snr points, schemes {2:s}'
              .format(config.m, len(config.snr_db), ','.join(config.schemes)))
  results = ParallelMap(CapacityPoint,
                        [(config, snr_db) for snr_db in config.snr_db],
                        config.workers)
  rows = list(itertools.chain.from_iterable(rows for rows, _ in results))
  WriteRows(rows, CAPACITY_COLUMNS, config)
  if any(flagged for _, flagged in results):
    return EXIT_NUMERICAL_FLAG
  return EXIT_OK


@dataclasses.dataclass(frozen=True)
class _ExponentInput:
  """Input of the exponent curves of one scheme.

  Attributes:
    constellation (Constellation): Normalized constellation.
    distribution (SymbolDistribution): Symbol distribution.
    marginals (BitMarginals): Bit marginals, None for a CM optimum.
    parameters (Tuple[float, ...]): Free shaping parameters or marginals.
  """
  constellation: qam.Constellation
  distribution: qam.SymbolDistribution
  marginals: Optional[qam.BitMarginals]
  parameters: Tuple[float, ...]


def _FixedInput(m: int, marginals: qam.BitMarginals) -> _ExponentInput:
  constellation, distribution = _Normalized(m, marginals)
  return _ExponentInput(constellation, distribution, marginals,
                        tuple(marginals.p0.tolist()))


def _ExponentShapings(
    config: sweep_config.SweepConfig, channel: awgn.ChannelSpec
) -> Tuple[List[Tuple[str, Dict[str, _ExponentInput]]], bool]:
  """Input shapings of the exponent sweep.

  Uniform and file shapings feed every curve the same product-form input.
  The optimized shaping feeds each curve the capacity-optimal input of its
  own scheme: the CM optimum to the CM curve, the BICM optimum to the BICM
  and parallel-channel curves and the MLC optimum to the multistage curve.

  Returns:
    Tuple[List, bool]: (mode, inputs keyed by common.CM, common.BICM and
        common.MLC) pairs, and whether an optimizer failed to converge.
  """
  uniform = _FixedInput(config.m, qam.BitMarginals.Uniform(config.m))
  shapings = [(sweep_config.SHAPING_UNIFORM,
               {scheme: uniform for scheme in common.SHAPED_SCHEMES})]
  flagged = False
  if config.shaping == sweep_config.SHAPING_OPTIMIZED:
    inputs = {}  # type: Dict[str, _ExponentInput]
    for scheme in common.SHAPED_SCHEMES:
      result = shaping.Optimize(scheme, config.m, channel, config.rule,
                                seed=config.seed)
      flagged = flagged or not result.converged
      inputs[scheme] = _ExponentInput(result.constellation,
                                      result.distribution, result.marginals,
                                      tuple(result.theta.tolist()))
    shapings.append((sweep_config.SHAPING_OPTIMIZED, inputs))
  elif config.shaping != sweep_config.SHAPING_UNIFORM:
    explicit = _FixedInput(config.m, config.Marginals())
    shapings.append(
        ('file', {scheme: explicit for scheme in common.SHAPED_SCHEMES}))
  return shapings, flagged


def _ExponentRow(point: exponents.ExponentPoint, snr_db: float, mode: str,
                 rate_bits: float, parameters: Tuple[float, ...]) -> Row:
  """Output row of one exponent point."""
  return {
      'snr_db': snr_db,
      'scheme': point.scheme,
      'shaping': mode,
      'rate_bits': rate_bits,
      'exponent': point.exponent,
      'rho_star': point.rho,
      's_star': point.s if point.s is not None else '',
      'parameters': list(parameters)
  }


def ExponentSweepPoint(
    task: Tuple[sweep_config.SweepConfig, float]) -> Tuple[List[Row], bool]:
  """All exponent rows of one snr."""
  config, snr_db = task
  channel = awgn.ChannelSpec.FromDecibels(snr_db)
  rule = config.rule
  rows = []  # type: List[Row]
  shapings, flagged = _ExponentShapings(config, channel)
  for mode, inputs in shapings:
    cm, bicm, mlc = (inputs[common.CM], inputs[common.BICM],
                     inputs[common.MLC])
    profiles = [
        (exponents.CmProfile(cm.constellation, cm.distribution, channel,
                             rule), cm),
        (exponents.BicmProfile(bicm.constellation, bicm.marginals, channel,
                               rule), bicm),
        (exponents.ParallelChannelProfile(bicm.constellation, bicm.marginals,
                                          channel, rule), bicm),
        (exponents.MlcMsdProfile(mlc.constellation, mlc.marginals, channel,
                                 rule), mlc),
    ]  # type: List[Tuple[Any, _ExponentInput]]
    for rate_bits in config.rates_bits:
      rate = common.BitsToNats(rate_bits)
      points = {}  # type: Dict[str, exponents.ExponentPoint]
      for profile, source in profiles:
        if isinstance(profile, exponents.MlcMsdProfile):
          point = profile.Exponent(rate)
        else:
          point = exponents.RandomCodingExponent(profile, rate)
        points[point.scheme] = point
        flagged = flagged or point.flagged
        rows.append(
            _ExponentRow(point, snr_db, mode, rate_bits, source.parameters))
      # CM dominates BICM only on a shared input.
      cm_value = points[common.CM].exponent
      bicm_value = points[common.BICM].exponent
      if cm is bicm and bicm_value > cm_value + ORDERING_TOLERANCE:
        logger.warning('BICM exponent {0:.9f} above CM {1:.9f} at {2:g} '
                       'bits'.format(bicm_value, cm_value, rate_bits))
        flagged = True
  return rows, flagged


def Exponent(args: 'argparse.Namespace') -> int:
  """Sweep the random-coding exponents over the rate grid.

  Args:
    args (argparse.Namespace): Arguments from ArgumentParser.

  Returns:
    int: The exit status.
  """
  config = sweep_config.SweepConfig.FromArguments(args)
  logger.info('Exponent sweep: m = {0:d}, {1:d} rates per snr'.format(
      config.m, len(config.rates_bits)))
  results = ParallelMap(ExponentSweepPoint,
                        [(config, snr_db) for snr_db in config.snr_db],
                        config.workers)
  rows = list(itertools.chain.from_iterable(rows for rows, _ in results))
  WriteRows(rows, EXPONENT_COLUMNS, config)
  if any(flagged for _, flagged in results):
    return EXIT_NUMERICAL_FLAG
  return EXIT_OK


def WidebandCases(
    m: int, rule: Optional[awgn.QuadratureRule] = None
) -> List[Tuple[str, str, wideband.RateFunction]]:
  """(scheme, shaping label, rate function) of every wideband report row."""
  cases = [(common.GAUSSIAN, 'gaussian', wideband.GaussianRateFunction()),
           (common.BICM, sweep_config.SHAPING_UNIFORM,
            wideband.BitRateFunction(m, qam.BitMarginals.Uniform(m),
                                     common.BICM, rule))]
  k = m // 2
  for bits in itertools.product((0, 1), repeat=k - 1):
    label = 'qpsk-limit' if not any(bits) else 'fixed-bits={0:s}'.format(
        ''.join(str(bit) for bit in bits))
    marginals = wideband.FixedBitMarginals(m, bits)
    cases.append((common.BICM, label,
                  wideband.BitRateFunction(m, marginals, common.BICM, rule)))
    cases.append((common.CM, label,
                  wideband.BitRateFunction(m, marginals, common.CM, rule)))
  return cases


def WidebandRow(task: Tuple[str, str, wideband.RateFunction]) -> Row:
  """Fit one wideband case."""
  scheme, label, rate_fn = task
  fit = wideband.FitC1C2(rate_fn)
  return {
      'scheme': scheme,
      'shaping': label,
      'c1': fit.c1,
      'c2': fit.c2,
      'ebn0_lim_db': fit.ebn0_lim_db,
      'residual': fit.residual,
      'stable': fit.stable
  }


def Wideband(args: 'argparse.Namespace') -> int:
  """Report the low-snr coefficients of the reference shapings.

  Unstable fits are flagged in the output only.

  Args:
    args (argparse.Namespace): Arguments from ArgumentParser.

  Returns:
    int: The exit status.
  """
  config = sweep_config.SweepConfig.FromArguments(args)
  rows = [WidebandRow(case) for case in WidebandCases(config.m, config.rule)]
  WriteRows(rows, WIDEBAND_COLUMNS, config)
  return EXIT_OK


def Optimize(args: 'argparse.Namespace') -> int:
  """Dump the shaping results at the first snr of the grid as JSON.

  Args:
    args (argparse.Namespace): Arguments from ArgumentParser.

  Returns:
    int: The exit status.
  """
  config = sweep_config.SweepConfig.FromArguments(args)
  channel = awgn.ChannelSpec.FromDecibels(config.snr_db[0])
  results = [
      shaping.Optimize(scheme, config.m, channel, config.rule,
                       seed=config.seed)
      for scheme in config.schemes if scheme in common.SHAPED_SCHEMES
  ]
  if not results:
    raise sweep_config.ConfigError(
        'optimize needs at least one of {0!s}'.format(
            list(common.SHAPED_SCHEMES)))
  report = [result.AsDict() for result in results]
  stream = open(config.output_path, 'w') if config.output_path else sys.stdout
  try:
    json.dump(report, stream, indent=2)
    stream.write('\n')
  finally:
    if stream is not sys.stdout:
      stream.close()
  if not all(result.converged for result in results):
    return EXIT_NUMERICAL_FLAG
  return EXIT_OK

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
"""Gallager functions and random-coding error exponents.

A profile wraps the quadrature tables of one (constellation, shaping,
channel) triple and evaluates E0(rho) (maximized over s for the BICM
decoder) with memoization, so that sweeping the rate only costs the
one-dimensional searches.
"""

import dataclasses
import math
from typing import Dict, List, Optional, Sequence, Tuple, Union

from libbicmshaping import logging_utils
from libbicmshaping import rates
from libbicmshaping.internal import channel as awgn
from libbicmshaping.internal import common
from libbicmshaping.internal import constellation as qam

logging_utils.SetUpLogger(__name__)
logger = logging_utils.GetLogger(__name__)

RHO_TOLERANCE = 1e-7
PROPORTIONAL = 'proportional'


@dataclasses.dataclass(frozen=True)
class ExponentPoint:
  """One point of an error exponent curve.

  Attributes:
    rate (float): Rate R in nats per channel use.
    exponent (float): E_r(R) in nats.
    rho (float): Maximizing rho.
    s (float): Maximizing s for the BICM decoder, None otherwise.
    scheme (str): Scheme tag.
    flagged (bool): True if a level rate exceeded its level capacity.
  """
  rate: float
  exponent: float
  rho: float
  s: Optional[float]
  scheme: str
  flagged: bool = False

  def __post_init__(self) -> None:
    if self.exponent < 0:
      raise ValueError('Exponents are nonnegative, got {0:g}'.format(
          self.exponent))
    if not 0 <= self.rho <= 1:
      raise ValueError('rho must lie in [0, 1], got {0:g}'.format(self.rho))
    if self.s is not None and not self.s > 0:
      raise ValueError('s must be positive, got {0:g}'.format(self.s))

  @property
  def rate_bits(self) -> float:
    """Rate in bits per channel use."""
    return common.NatsToBits(self.rate)


def _CheckRho(rho: float) -> None:
  """Raise ValueError unless rho lies in [0, 1]."""
  if not 0 <= rho <= 1:
    raise ValueError('rho must lie in [0, 1], got {0!s}'.format(rho))


class GallagerProfile:
  """E0 as a function of rho for one decoder.

  Attributes:
    scheme (str): Scheme tag.
  """

  def __init__(self, scheme: str) -> None:
    self.scheme = scheme
    self._cache = {}  # type: Dict[float, Tuple[float, Optional[float]]]

  def _Evaluate(self, rho: float) -> Tuple[float, Optional[float]]:
    """E0(rho) and the maximizing s (None if there is no s)."""
    raise NotImplementedError

  def Maximize(self, rho: float) -> Tuple[float, Optional[float]]:
    """E0(rho) maximized over s where applicable, with the maximizer.

    Args:
      rho (float): The Gallager parameter, in [0, 1].

    Returns:
      Tuple[float, Optional[float]]: The value and the maximizing s.
    """
    _CheckRho(rho)
    if rho not in self._cache:
      self._cache[rho] = self._Evaluate(rho)
    return self._cache[rho]

  def E0(self, rho: float) -> float:
    """E0(rho), maximized over s where applicable."""
    return self.Maximize(rho)[0]

  @property
  def matched_rate(self) -> float:
    """Rate at which the exponent vanishes (slope of E0 at 0)."""
    raise NotImplementedError


class CmProfile(GallagerProfile):
  """Matched maximum-likelihood decoder of coded modulation."""

  def __init__(self,
               constellation: qam.Constellation,
               distribution: qam.SymbolDistribution,
               channel: awgn.ChannelSpec,
               rule: Optional[awgn.QuadratureRule] = None) -> None:
    super(CmProfile, self).__init__(common.CM)
    self.table = rates.SymbolMetricTable(constellation, distribution,
                                         channel, rule)
    self._rate = None  # type: Optional[float]

  def _Evaluate(self, rho: float) -> Tuple[float, Optional[float]]:
    return self.table.GallagerE0(rho), None

  @property
  def matched_rate(self) -> float:
    if self._rate is None:
      self._rate = self.table.MutualInformation()
    return self._rate


class BicmProfile(GallagerProfile):
  """BICM decoder with the product bit metric, maximized over s.

  The search runs on ln s over rates.S_BRACKET; s = 1 / (1 + rho), the
  optimum for uniform inputs, is always evaluated as a candidate.
  """

  def __init__(self,
               constellation: qam.Constellation,
               marginals: qam.BitMarginals,
               channel: awgn.ChannelSpec,
               rule: Optional[awgn.QuadratureRule] = None,
               variant: str = rates.CLASSICAL,
               scheme: str = common.BICM) -> None:
    super(BicmProfile, self).__init__(scheme)
    self.table = rates.BitMetricTable(constellation, marginals, channel, rule)
    self.variant = variant
    self._optimum = None  # type: Optional[rates.GmiOptimum]

  def _Evaluate(self, rho: float) -> Tuple[float, Optional[float]]:
    guess = 1.0 / (1.0 + rho)
    if rho == 0:
      return 0.0, guess
    log_lower, log_upper = (math.log(value) for value in rates.S_BRACKET)
    log_s, value, _ = common.GoldenSectionMaximize(
        lambda u: self.table.BicmE0(rho, math.exp(u), self.variant),
        log_lower, log_upper, tolerance=rates.S_TOLERANCE)
    at_guess = self.table.BicmE0(rho, guess, self.variant)
    if at_guess >= value:
      return at_guess, guess
    return value, math.exp(log_s)

  def E0AtS(self, rho: float, s: float) -> float:
    """E0(rho, s) at a fixed s."""
    _CheckRho(rho)
    return self.table.BicmE0(rho, s, self.variant)

  @property
  def optimum(self) -> rates.GmiOptimum:
    """sup over s of the GMI."""
    if self._optimum is None:
      self._optimum = rates.SupremumOverS(self.table, self.variant)
    return self._optimum

  @property
  def matched_rate(self) -> float:
    return self.optimum.value


class ParallelChannelProfile(GallagerProfile):
  """BICM as m independent binary channels: E0 = sum_j E0,j(rho)."""

  def __init__(self,
               constellation: qam.Constellation,
               marginals: qam.BitMarginals,
               channel: awgn.ChannelSpec,
               rule: Optional[awgn.QuadratureRule] = None) -> None:
    super(ParallelChannelProfile, self).__init__(common.PARALLEL)
    self.table = rates.BitMetricTable(constellation, marginals, channel, rule)

  def _Evaluate(self, rho: float) -> Tuple[float, Optional[float]]:
    return sum(self.table.BinaryE0(level.position, rho)
               for level in self.table.levels), None

  @property
  def matched_rate(self) -> float:
    return sum(self.table.BitMutualInformation(level.position)
               for level in self.table.levels)


class LevelProfile(GallagerProfile):
  """Binary channel B_j -> (Y, earlier levels) of multistage decoding."""

  def __init__(self, table: rates.BitMetricTable, position: int) -> None:
    super(LevelProfile, self).__init__(common.MLC_MSD)
    self.table = table
    self.position = position

  def _Evaluate(self, rho: float) -> Tuple[float, Optional[float]]:
    return self.table.BinaryE0(self.position, rho), None

  @property
  def matched_rate(self) -> float:
    return self.table.BitMutualInformation(self.position)


def RandomCodingExponent(profile: GallagerProfile,
                         rate: float) -> ExponentPoint:
  """E_r(R) = max over rho in [0, 1] of E0(rho) - rho R.

  Args:
    profile (GallagerProfile): The Gallager function.
    rate (float): R in nats, >= 0.

  Returns:
    ExponentPoint: The exponent with its maximizing rho (and s).

  Raises:
    ValueError: If the rate is negative.
  """
  if rate < 0:
    raise ValueError('Rates are nonnegative, got {0!s}'.format(rate))
  rho, value, _ = common.GoldenSectionMaximize(
      lambda r: profile.E0(r) - r * rate, 0.0, 1.0,
      tolerance=RHO_TOLERANCE)
  if value <= 0:
    rho, value = 0.0, 0.0
  _, s = profile.Maximize(rho)
  return ExponentPoint(
      rate=rate, exponent=value, rho=rho, s=s, scheme=profile.scheme)


def E0CM(constellation: qam.Constellation,
         distribution: qam.SymbolDistribution,
         channel: awgn.ChannelSpec,
         rule: Optional[awgn.QuadratureRule],
         rho: float) -> float:
  """Gallager function of coded modulation, in nats.

  Raises:
    ValueError: If rho is outside [0, 1] or the constellation is not
        normalized.
  """
  _CheckRho(rho)
  return rates.SymbolMetricTable(constellation, distribution, channel,
                                 rule).GallagerE0(rho)


def E0BICM(constellation: qam.Constellation,
           marginals: qam.BitMarginals,
           channel: awgn.ChannelSpec,
           rule: Optional[awgn.QuadratureRule],
           rho: float,
           s: float,
           variant: str = rates.CLASSICAL) -> float:
  """Generalized Gallager function of the BICM decoder, in nats.

  Raises:
    ValueError: If rho is outside [0, 1], s is not positive or the
        constellation is not normalized.
  """
  _CheckRho(rho)
  if not s > 0:
    raise ValueError('s must be positive, got {0!s}'.format(s))
  return rates.BitMetricTable(constellation, marginals, channel,
                              rule).BicmE0(rho, s, variant)


def ParallelChannelExponent(constellation: qam.Constellation,
                            marginals: qam.BitMarginals,
                            channel: awgn.ChannelSpec,
                            rule: Optional[awgn.QuadratureRule],
                            rate: float) -> ExponentPoint:
  """Random-coding exponent of the BICM parallel-channel model."""
  profile = ParallelChannelProfile(constellation, marginals, channel, rule)
  return RandomCodingExponent(profile, rate)


class MlcMsdProfile:
  """Per-level profiles of MLC with multistage decoding.

  Attributes:
    table (BitMetricTable): Conditioned bit metrics.
    order (List[int]): 1-based decoding order.
    informations (List[float]): Chain-rule level informations, in order.
  """

  def __init__(self,
               constellation: qam.Constellation,
               marginals: qam.BitMarginals,
               channel: awgn.ChannelSpec,
               rule: Optional[awgn.QuadratureRule] = None,
               level_order: Optional[Sequence[int]] = None) -> None:
    self.order = list(level_order or range(1, constellation.m + 1))
    self.table = rates.BitMetricTable(
        constellation, marginals, channel, rule, level_order=self.order)
    self.informations = [
        self.table.BitMutualInformation(j - 1) for j in self.order]
    self.levels = {
        level.position: LevelProfile(self.table, level.position)
        for level in self.table.levels
    }

  @property
  def matched_rate(self) -> float:
    """I(X;Y), the sum of the level informations."""
    return sum(self.informations)

  def Allocate(self, rate: float) -> List[float]:
    """Split R across the levels in proportion to their informations."""
    total = self.matched_rate
    if total <= 0:
      return [0.0] * len(self.order)
    return [rate * information / total for information in self.informations]

  def Exponent(
      self, rate: float,
      allocation: Union[str, Sequence[float]] = PROPORTIONAL) -> ExponentPoint:
    """min over levels of the level exponent at its allocated rate.

    Args:
      rate (float): Total rate R in nats.
      allocation (Union[str, Sequence[float]]): Optional. PROPORTIONAL, or
          explicit level rates in nats (decoding order) summing to R.

    Returns:
      ExponentPoint: The smallest level exponent; flagged if a level rate
          exceeds its level information while R < I(X;Y).

    Raises:
      ValueError: If the rate is negative or an explicit allocation does not
          match the levels or the total rate.
    """
    if rate < 0:
      raise ValueError('Rates are nonnegative, got {0!s}'.format(rate))
    if isinstance(allocation, str):
      if allocation != PROPORTIONAL:
        raise ValueError('Unknown allocation {0:s}'.format(allocation))
      level_rates = self.Allocate(rate)
    else:
      level_rates = [float(value) for value in allocation]
      if len(level_rates) != len(self.order):
        raise ValueError('Expected {0:d} level rates, got {1:d}'.format(
            len(self.order), len(level_rates)))
      if min(level_rates) < 0 or abs(sum(level_rates) - rate) > 1e-9:
        raise ValueError(
            'Level rates {0!s} must be nonnegative and sum to {1:g}'.format(
                level_rates, rate))

    best = None  # type: Optional[ExponentPoint]
    overloaded = False
    for j, level_rate, information in zip(self.order, level_rates,
                                          self.informations):
      profile = self.levels.get(j - 1)
      if profile is None:
        continue
      if level_rate >= information:
        overloaded = True
        point = ExponentPoint(rate, 0.0, 0.0, None, common.MLC_MSD)
      else:
        level_point = RandomCodingExponent(profile, level_rate)
        point = ExponentPoint(rate, level_point.exponent, level_point.rho,
                              None, common.MLC_MSD)
      if best is None or point.exponent < best.exponent:
        best = point
    if best is None:
      best = ExponentPoint(rate, 0.0, 0.0, None, common.MLC_MSD)
    flagged = overloaded and rate < self.matched_rate
    if flagged:
      logger.warning(
          'Level rates {0!s} exceed level informations {1!s}'.format(
              level_rates, self.informations))
    return dataclasses.replace(best, flagged=flagged)


def MlcMsdExponent(constellation: qam.Constellation,
                   marginals: qam.BitMarginals,
                   channel: awgn.ChannelSpec,
                   rule: Optional[awgn.QuadratureRule],
                   rate: float,
                   allocation: Union[str, Sequence[float]] = PROPORTIONAL,
                   level_order: Optional[Sequence[int]] = None
                  ) -> ExponentPoint:
  """Error exponent of MLC with multistage decoding.

  Each level j sees the binary channel B_j -> (Y, earlier levels) at its
  allocated rate; the code fails if any level fails, so the exponent is the
  smallest level exponent.

  Args:
    constellation (Constellation): Normalized constellation.
    marginals (BitMarginals): Bit marginals.
    channel (ChannelSpec): The channel.
    rule (QuadratureRule): Quadrature rule, None for order 64.
    rate (float): Total rate in nats.
    allocation (Union[str, Sequence[float]]): Optional. PROPORTIONAL or
        explicit level rates.
    level_order (Sequence[int]): Optional. 1-based decoding order.

  Returns:
    ExponentPoint: The exponent.
  """
  profile = MlcMsdProfile(constellation, marginals, channel, rule,
                          level_order)
  return profile.Exponent(rate, allocation)

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
"""Achievable rates of CM, MLC and BICM over the complex AWGN channel.

All quantities are in nats. Expectations are quadrature sums over the noise
for every input point with positive probability; zero-probability points
never reach a logarithm (0 ln 0 = 0). The sums use the composite rule of
channel.PartitionedNoiseRule, whose panels shrink with sqrt(snr) times the
point spacing; the order of the given rule sets the nodes per panel.

When the input factors across the in-phase and quadrature dimensions, every
rate is the sum of two one-dimensional PAM computations, because the noise
is independent across dimensions and every bit lives in one dimension.
"""

import dataclasses
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from libbicmshaping import logging_utils
from libbicmshaping.internal import channel as awgn
from libbicmshaping.internal import common
from libbicmshaping.internal import constellation as qam

logging_utils.SetUpLogger(__name__)
logger = logging_utils.GetLogger(__name__)

# Bit metric variants. The classical metric is the sum of likelihoods over
# X_b^j weighted by the symbol probabilities; the normalized one divides it
# by P_Bj(b) and equals the equivalent binary channel density P_j(y|b).
CLASSICAL = 'classical'
NORMALIZED = 'normalized'
METRIC_VARIANTS = (CLASSICAL, NORMALIZED)

S_BRACKET = (0.05, 20.0)
S_TOLERANCE = 1e-6
_PROFILE_POINTS = 41
_SPACING_FLOOR = 1e-12


@dataclasses.dataclass(frozen=True)
class RatePoint:
  """One point of a rate curve.

  Attributes:
    snr (float): Linear snr.
    rate_nats (float): Rate in nats per channel use.
    scheme (str): Scheme tag, see common.CURVE_SCHEMES.
    shaping (Tuple[float, ...]): Free shaping parameters used.
  """
  snr: float
  rate_nats: float
  scheme: str
  shaping: Tuple[float, ...] = ()

  def __post_init__(self) -> None:
    if self.rate_nats < 0:
      raise ValueError('Rates are nonnegative, got {0:g}'.format(
          self.rate_nats))

  @property
  def rate_bits(self) -> float:
    """Rate in bits per channel use."""
    return common.NatsToBits(self.rate_nats)


@dataclasses.dataclass(frozen=True)
class GmiOptimum:
  """Result of the search over the GMI parameter s.

  Attributes:
    s (float): Maximizing s.
    value (float): GMI at s, in nats.
    concave (bool): False if the s profile showed more than one change of
        slope sign.
  """
  s: float
  value: float
  concave: bool = True


class _SignalSet:
  """Points, probabilities and labels of one decoding problem.

  Either a full complex constellation or the PAM of one dimension.

  Attributes:
    points (np.ndarray): Real (PAM) or complex (QAM) points.
    probs (np.ndarray): Point probabilities.
    labels (np.ndarray): (M, L) label bits; column c holds global label
        position positions[c].
    positions (Tuple[int, ...]): Global 0-based label positions.
    support (np.ndarray): Indices of the points with positive probability.
  """

  def __init__(self, points: np.ndarray, probs: np.ndarray,
               labels: np.ndarray, positions: Tuple[int, ...]) -> None:
    self.points = points
    self.probs = probs
    self.labels = labels
    self.positions = positions
    self.support = np.flatnonzero(probs > 0)
    with np.errstate(divide='ignore'):
      self.log_prior = np.log(probs)

  @property
  def spacing(self) -> float:
    """Smallest gap between distinct coordinates of the support points."""
    coordinates = self.points[self.support]
    if np.iscomplexobj(coordinates):
      coordinates = np.concatenate([coordinates.real, coordinates.imag])
    gaps = np.diff(np.unique(coordinates))
    gaps = gaps[gaps > _SPACING_FLOOR]
    return float(np.min(gaps)) if gaps.size else math.inf

  def Grid(self, rule: awgn.QuadratureRule,
           channel: awgn.ChannelSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Noise offsets and weights matching the dimension of the points.

    Complex points use the tensor product of the same one-dimensional rule,
    so the 2-D and per-dimension computations share their nodes.
    """
    rule = awgn.PartitionedNoiseRule(rule, channel, self.spacing)
    if np.iscomplexobj(self.points):
      return rule.ComplexGrid()
    return rule.RealGrid()

  def LogLikelihoods(self, channel: awgn.ChannelSpec,
                     rule: awgn.QuadratureRule) -> np.ndarray:
    """ln P(y|x') at y = sqrt(snr) x + offsets, for every x in the support.

    Returns:
      np.ndarray: Array of shape (S, N, M).
    """
    offsets, _ = self.Grid(rule, channel)
    return np.stack([
        awgn.LogTransitionDensities(
            channel.amplitude * self.points[index] + offsets, self.points,
            channel) for index in self.support
    ])


def _CheckNormalized(constellation: qam.Constellation,
                     distribution: qam.SymbolDistribution) -> None:
  """Raise ValueError unless the constellation has unit average energy."""
  if not qam.IsNormalized(constellation, distribution):
    raise ValueError(
        'Constellation is not normalized: average energy {0:.12g}'.format(
            constellation.Energy(distribution)))


def _SymbolSets(constellation: qam.Constellation,
                distribution: qam.SymbolDistribution,
                decompose: bool) -> List[_SignalSet]:
  """One 2-D set, or two PAM sets when the distribution factors."""
  if decompose:
    in_phase, quadrature, factorizes = constellation.DimensionMarginals(
        distribution)
    if factorizes:
      return [
          _SignalSet(constellation.pam_points, probs,
                     constellation.pam_labels, positions)
          for probs, positions in (
              (in_phase, constellation.in_phase_positions),
              (quadrature, constellation.quadrature_positions))
      ]
  return [
      _SignalSet(constellation.points, distribution.probs,
                 constellation.labels, tuple(range(constellation.m)))
  ]


def _BitSets(constellation: qam.Constellation, marginals: qam.BitMarginals,
             decompose: bool) -> List[_SignalSet]:
  """Signal sets for product-form inputs built from bit marginals."""
  if not decompose:
    distribution = qam.ProductDistribution(constellation, marginals)
    return _SymbolSets(constellation, distribution, False)
  return [
      _SignalSet(constellation.pam_points,
                 constellation.PamProbabilities(marginals, positions),
                 constellation.pam_labels, positions)
      for positions in (constellation.in_phase_positions,
                        constellation.quadrature_positions)
  ]


class SymbolMetricTable:
  """Log likelihood ratios ln P(y|x')/P(y|x) on the quadrature grid.

  The table is built once per (constellation, distribution, channel, rule)
  and serves the mutual information and the CM Gallager function.

  Attributes:
    groups (List[Tuple]): Per signal set: input probabilities (S,), weights
        (N,), log priors (M,) and log ratios (S, N, M).
  """

  def __init__(self,
               constellation: qam.Constellation,
               distribution: qam.SymbolDistribution,
               channel: awgn.ChannelSpec,
               rule: Optional[awgn.QuadratureRule] = None,
               decompose: bool = True) -> None:
    """Initialize the table.

    Args:
      constellation (Constellation): Normalized constellation.
      distribution (SymbolDistribution): Input distribution.
      channel (ChannelSpec): The channel.
      rule (QuadratureRule): Optional. Defaults to order 64.
      decompose (bool): Optional. Use the per-dimension decomposition when
          the distribution factors. False forces the 2-D tensor grid.

    Raises:
      ValueError: If the constellation is not normalized.
    """
    _CheckNormalized(constellation, distribution)
    rule = rule or awgn.GaussHermite(common.DEFAULT_QUADRATURE_ORDER)
    self.groups = []  # type: List[Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]]
    for signal_set in _SymbolSets(constellation, distribution, decompose):
      _, weights = signal_set.Grid(rule, channel)
      log_likelihoods = signal_set.LogLikelihoods(channel, rule)
      own = log_likelihoods[np.arange(signal_set.support.size), :,
                            signal_set.support]
      log_ratios = log_likelihoods - own[:, :, None]
      self.groups.append((signal_set.probs[signal_set.support], weights,
                          signal_set.log_prior, log_ratios))

  def MutualInformation(self) -> float:
    """I(X;Y) in nats."""
    total = 0.0
    for input_probs, weights, log_prior, log_ratios in self.groups:
      integrand = -special.logsumexp(log_ratios + log_prior, axis=2)
      total += float(input_probs @ (integrand @ weights))
    return max(total, 0.0)

  def GallagerE0(self, rho: float) -> float:
    """E0(rho) of the matched (ML) decoder, in nats."""
    if rho == 0:
      return 0.0
    total = 0.0
    for input_probs, weights, log_prior, log_ratios in self.groups:
      log_inner = special.logsumexp(
          log_prior + log_ratios / (1.0 + rho), axis=2)
      expectation = float(input_probs @ (np.exp(rho * log_inner) @ weights))
      total -= math.log(expectation)
    return total


class _Level:
  """Log bit metrics of one label position.

  Attributes:
    position (int): Global 0-based label position.
    group (int): Index of the signal set holding the position.
    bits (np.ndarray): Bit of every support input at this position.
    log_q (np.ndarray): (S, 2, N) log of sum_{x'} P(y|x') P(x') over the
        points with bit b (and matching conditioning bits).
    log_pb (np.ndarray): ln P_Bj(b) for b = 0, 1.
  """

  def __init__(self, position: int, group: int, bits: np.ndarray,
               log_q: np.ndarray, log_pb: np.ndarray) -> None:
    self.position = position
    self.group = group
    self.bits = bits
    self.log_q = log_q
    self.log_pb = log_pb

  def LogMetric(self, variant: str) -> np.ndarray:
    """ln q_j(b, y) for the chosen metric variant, shape (S, 2, N)."""
    if variant == NORMALIZED:
      return self.log_q - self.log_pb[None, :, None]
    return self.log_q

  def Own(self, values: np.ndarray) -> np.ndarray:
    """Select values[s, b_j(x_s), :] for every support input."""
    return values[np.arange(self.bits.size), self.bits, :]


class BitMetricTable:
  """Bit metrics of every non-degenerate label position on the grid.

  With conditioning, the metric of level j only sums over the points whose
  bits at the previously decoded levels (same dimension) match the
  transmitted ones, as in multistage decoding.

  Attributes:
    marginals (BitMarginals): The bit marginals.
    groups (List[Tuple[np.ndarray, np.ndarray]]): Per signal set: input
        probabilities (S,) and weights (N,).
    levels (List[_Level]): One entry per non-degenerate position, in
        decoding order.
  """

  def __init__(self,
               constellation: qam.Constellation,
               marginals: qam.BitMarginals,
               channel: awgn.ChannelSpec,
               rule: Optional[awgn.QuadratureRule] = None,
               decompose: bool = True,
               level_order: Optional[Sequence[int]] = None) -> None:
    """Initialize the table.

    Args:
      constellation (Constellation): Normalized constellation.
      marginals (BitMarginals): Bit marginals.
      channel (ChannelSpec): The channel.
      rule (QuadratureRule): Optional. Defaults to order 64.
      decompose (bool): Optional. Use the per-dimension decomposition.
      level_order (Sequence[int]): Optional. 1-based decoding order of the
          label positions. When given, each level is conditioned on the
          levels decoded before it.

    Raises:
      ValueError: If the constellation is not normalized or level_order is
          not a permutation of 1..m.
    """
    distribution = qam.ProductDistribution(constellation, marginals)
    _CheckNormalized(constellation, distribution)
    rule = rule or awgn.GaussHermite(common.DEFAULT_QUADRATURE_ORDER)
    self.marginals = marginals
    conditioned = level_order is not None
    if level_order is None:
      order = list(range(constellation.m))
    else:
      if sorted(level_order) != list(range(1, constellation.m + 1)):
        raise ValueError('Level order must be a permutation of 1..{0:d}, got '
                         '{1!s}'.format(constellation.m, list(level_order)))
      order = [j - 1 for j in level_order]
    rank = {position: index for index, position in enumerate(order)}
    table = marginals.Table()

    self.groups = []  # type: List[Tuple[np.ndarray, np.ndarray]]
    levels = []  # type: List[_Level]
    for group, signal_set in enumerate(
        _BitSets(constellation, marginals, decompose)):
      _, weights = signal_set.Grid(rule, channel)
      support = signal_set.support
      self.groups.append((signal_set.probs[support], weights))
      weighted = signal_set.LogLikelihoods(channel, rule) + (
          signal_set.log_prior[None, None, :])
      for column, position in enumerate(signal_set.positions):
        if marginals.IsDegenerate(position):
          continue
        previous = [
            other for other, other_position in enumerate(signal_set.positions)
            if conditioned and rank[other_position] < rank[position]
        ]
        log_q = np.full(
            (support.size, 2, weighted.shape[1]), -np.inf)
        for row, index in enumerate(support):
          same = np.all(
              signal_set.labels[:, previous] ==
              signal_set.labels[index, previous], axis=1)
          for bit in (0, 1):
            members = same & (signal_set.labels[:, column] == bit)
            members &= signal_set.probs > 0
            if np.any(members):
              log_q[row, bit] = special.logsumexp(
                  weighted[row][:, members], axis=1)
        levels.append(
            _Level(position, group, signal_set.labels[support, column],
                   log_q, np.log(table[position])))
    levels.sort(key=lambda level: rank[level.position])
    self.levels = levels

  def Level(self, position: int) -> Optional[_Level]:
    """The level of a 0-based position, None if the bit is degenerate."""
    for level in self.levels:
      if level.position == position:
        return level
    return None

  def _Expect(self, level: _Level, integrand: np.ndarray) -> float:
    """E[integrand] under P(x) P(y|x) in the level's signal set."""
    input_probs, weights = self.groups[level.group]
    return float(input_probs @ (integrand @ weights))

  def BitMutualInformation(self, position: int) -> float:
    """I(B_j; Y) (or I(B_j; Y | earlier levels)) in nats."""
    level = self.Level(position)
    if level is None:
      return 0.0
    log_p = level.LogMetric(NORMALIZED)
    integrand = level.Own(log_p) - special.logsumexp(level.log_q, axis=1)
    return max(self._Expect(level, integrand), 0.0)

  def Gmi(self, s: float, variant: str = CLASSICAL) -> float:
    """Sum over positions of the bit GMI at a fixed s, in nats."""
    total = 0.0
    for level in self.levels:
      log_metric = level.LogMetric(variant)
      denominator = special.logsumexp(
          level.log_pb[None, :, None] + s * log_metric, axis=1)
      total += self._Expect(level, s * level.Own(log_metric) - denominator)
    return total

  def BicmE0(self, rho: float, s: float, variant: str = CLASSICAL) -> float:
    """Generalized Gallager function of the BICM symbol metric.

    Uses sum_x' P(x') prod_j f_j(b_j(x')) = prod_j sum_b P_Bj(b) f_j(b).
    """
    if rho == 0:
      return 0.0
    total = 0.0
    for group, (input_probs, weights) in enumerate(self.groups):
      log_bracket = np.zeros((input_probs.size, weights.size))
      for level in self.levels:
        if level.group != group:
          continue
        log_metric = level.LogMetric(variant)
        log_bracket += special.logsumexp(
            level.log_pb[None, :, None]
            + s * (log_metric - level.Own(log_metric)[:, None, :]),
            axis=1)
      total -= math.log(float(input_probs @ (np.exp(rho * log_bracket)
                                             @ weights)))
    return total

  def BinaryE0(self, position: int, rho: float) -> float:
    """Gallager function of the binary channel of one level."""
    level = self.Level(position)
    if level is None or rho == 0:
      return 0.0
    log_p = level.LogMetric(NORMALIZED)
    log_bracket = special.logsumexp(
        level.log_pb[None, :, None]
        + (log_p - level.Own(log_p)[:, None, :]) / (1.0 + rho),
        axis=1)
    return -math.log(self._Expect(level, np.exp(rho * log_bracket)))


def MutualInformation(constellation: qam.Constellation,
                      distribution: qam.SymbolDistribution,
                      channel: awgn.ChannelSpec,
                      rule: Optional[awgn.QuadratureRule] = None,
                      decompose: bool = True) -> float:
  """I(X;Y) in nats.

  Args:
    constellation (Constellation): Normalized constellation.
    distribution (SymbolDistribution): Input distribution.
    channel (ChannelSpec): The channel.
    rule (QuadratureRule): Optional. Defaults to order 64.
    decompose (bool): Optional. Sum two PAM rates when the distribution
        factors across dimensions.

  Returns:
    float: The mutual information.

  Raises:
    ValueError: If the constellation is not normalized.
  """
  return SymbolMetricTable(constellation, distribution, channel, rule,
                           decompose).MutualInformation()


def BinaryChannelDensity(constellation: qam.Constellation,
                         marginals: qam.BitMarginals,
                         channel: awgn.ChannelSpec,
                         j: int,
                         b: int,
                         y: complex) -> float:
  """Equivalent binary channel density P_j(y|b).

  Args:
    constellation (Constellation): The constellation.
    marginals (BitMarginals): Bit marginals.
    channel (ChannelSpec): The channel.
    j (int): 1-based label position.
    b (int): Bit value.
    y (complex): Channel output.

  Returns:
    float: sum over X_b^j of P(y|x) P(x), divided by P_Bj(b).

  Raises:
    ValueError: If P_Bj(b) = 0.
  """
  subset = qam.LabelSubset(constellation, j, b)
  probs = qam.ProductDistribution(constellation, marginals).probs[subset]
  mass = float(np.sum(probs))
  if mass <= 0:
    raise ValueError(
        'Bit {0:d} at position {1:d} has probability zero'.format(b, j))
  densities = np.exp(
      awgn.LogTransitionDensities(
          np.array([complex(y)]), constellation.points[subset], channel)[0])
  return float(densities @ probs) / mass


def BitLevelMutualInformation(constellation: qam.Constellation,
                              marginals: qam.BitMarginals,
                              channel: awgn.ChannelSpec,
                              rule: Optional[awgn.QuadratureRule],
                              j: int,
                              decompose: bool = True) -> float:
  """I(B_j; Y) in nats for a 1-based label position j.

  A deterministic bit contributes exactly 0 without any integration.
  """
  if not 1 <= j <= constellation.m:
    raise ValueError('Label position {0:d} outside 1..{1:d}'.format(
        j, constellation.m))
  if marginals.IsDegenerate(j - 1):
    return 0.0
  return BitMetricTable(constellation, marginals, channel, rule,
                        decompose).BitMutualInformation(j - 1)


def BicmRate(constellation: qam.Constellation,
             marginals: qam.BitMarginals,
             channel: awgn.ChannelSpec,
             rule: Optional[awgn.QuadratureRule] = None,
             decompose: bool = True) -> float:
  """Sum over label positions of I(B_j; Y), in nats."""
  table = BitMetricTable(constellation, marginals, channel, rule, decompose)
  return sum(
      table.BitMutualInformation(level.position) for level in table.levels)


def BicmGmi(constellation: qam.Constellation,
            marginals: qam.BitMarginals,
            channel: awgn.ChannelSpec,
            rule: Optional[awgn.QuadratureRule],
            s: float,
            variant: str = CLASSICAL,
            decompose: bool = True) -> float:
  """BICM generalized mutual information at a fixed s, in nats.

  Raises:
    ValueError: If s is not positive or the variant is unknown.
  """
  _CheckGmiArguments(s, variant)
  return BitMetricTable(constellation, marginals, channel, rule,
                        decompose).Gmi(s, variant)


def _CheckGmiArguments(s: float, variant: str) -> None:
  """Validate the GMI parameter and metric variant."""
  if not s > 0:
    raise ValueError('s must be positive, got {0!s}'.format(s))
  if variant not in METRIC_VARIANTS:
    raise ValueError('Unknown metric variant {0:s}, expected one of '
                     '{1!s}'.format(variant, list(METRIC_VARIANTS)))


def SupremumOverS(table: BitMetricTable,
                  variant: str = CLASSICAL) -> GmiOptimum:
  """Maximize the GMI of a prebuilt table over s.

  Golden-section search on ln s over S_BRACKET. The profile is first
  sampled on a log grid; more than one sign change of its discrete slope is
  reported as non-concave and the full bracket is searched anyway.

  Args:
    table (BitMetricTable): The bit metrics.
    variant (str): Optional. Metric variant.

  Returns:
    GmiOptimum: The maximizer and maximum.
  """
  log_lower, log_upper = (math.log(value) for value in S_BRACKET)
  grid = np.linspace(log_lower, log_upper, _PROFILE_POINTS)
  profile = np.array([table.Gmi(math.exp(u), variant) for u in grid])
  slopes = np.diff(profile)
  signs = np.sign(slopes[np.abs(slopes) > 1e-14])
  concave = int(np.sum(signs[1:] != signs[:-1])) <= 1
  if not concave:
    logger.warning(
        'GMI profile over s is not concave ({0:s} metric); searching the '
        'whole bracket'.format(variant))
  log_s, value, _ = common.GoldenSectionMaximize(
      lambda u: table.Gmi(math.exp(u), variant), log_lower, log_upper,
      tolerance=S_TOLERANCE)
  return GmiOptimum(s=math.exp(log_s), value=value, concave=concave)


def GmiSupS(constellation: qam.Constellation,
            marginals: qam.BitMarginals,
            channel: awgn.ChannelSpec,
            rule: Optional[awgn.QuadratureRule] = None,
            variant: str = CLASSICAL) -> GmiOptimum:
  """sup over s of the BICM GMI.

  Args:
    constellation (Constellation): Normalized constellation.
    marginals (BitMarginals): Bit marginals.
    channel (ChannelSpec): The channel.
    rule (QuadratureRule): Optional. Defaults to order 64.
    variant (str): Optional. Metric variant.

  Returns:
    GmiOptimum: The maximizing s and the GMI.
  """
  _CheckGmiArguments(1.0, variant)
  table = BitMetricTable(constellation, marginals, channel, rule)
  return SupremumOverS(table, variant)


def GmiProfile(constellation: qam.Constellation,
               marginals: qam.BitMarginals,
               channel: awgn.ChannelSpec,
               s_values: Sequence[float],
               rule: Optional[awgn.QuadratureRule] = None,
               variant: str = CLASSICAL) -> np.ndarray:
  """GMI evaluated at every s in s_values, in nats."""
  table = BitMetricTable(constellation, marginals, channel, rule)
  for s in s_values:
    _CheckGmiArguments(s, variant)
  return np.array([table.Gmi(s, variant) for s in s_values])


def LevelMutualInformations(
    constellation: qam.Constellation,
    marginals: qam.BitMarginals,
    channel: awgn.ChannelSpec,
    rule: Optional[awgn.QuadratureRule] = None,
    level_order: Optional[Sequence[int]] = None) -> List[float]:
  """Chain-rule informations I(B_j; Y | earlier levels), in decoding order.

  Args:
    constellation (Constellation): Normalized constellation.
    marginals (BitMarginals): Bit marginals.
    channel (ChannelSpec): The channel.
    rule (QuadratureRule): Optional. Defaults to order 64.
    level_order (Sequence[int]): Optional. 1-based decoding order, label
        order by default.

  Returns:
    List[float]: One value per level, degenerate levels giving 0. The sum
        is I(X;Y).
  """
  order = list(level_order or range(1, constellation.m + 1))
  table = BitMetricTable(constellation, marginals, channel, rule,
                         level_order=order)
  return [table.BitMutualInformation(j - 1) for j in order]


def GaussianCapacity(channel: awgn.ChannelSpec) -> float:
  """ln(1 + snr), the capacity with Gaussian inputs."""
  return math.log1p(channel.snr)

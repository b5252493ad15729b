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
"""Complex AWGN channel Y = sqrt(snr) X + Z.

Z is circularly symmetric with total variance 1, i.e. variance 1/2 per real
dimension. Gaussian expectations are evaluated with rules for integrals
against exp(-t^2): with Z = t_i + 1j t_k,

  E[g(Y) | X = x] = sum_{i,k} w_i w_k / pi * g(sqrt(snr) x + t_i + 1j t_k).

A plain Gauss-Hermite rule serves smooth integrands. Log-likelihood sums
bend sharply between neighbouring points once snr is large, so the rate
computations switch to a composite Gauss-Legendre rule whose panels are
narrower than the bends.

Monte-Carlo samples come from numpy's PCG64 generator; symbols are drawn by
inverse-CDF search (Generator.choice with explicit probabilities) and the
noise by Generator.standard_normal, in that order, so a seed reproduces the
same sequence on every platform.
"""

import math
from typing import Callable, Dict, Tuple

import numpy as np
from numpy.polynomial import hermite
from numpy.polynomial import legendre

from libbicmshaping.internal import common
from libbicmshaping.internal import constellation as qam

MIN_QUADRATURE_ORDER = 2
MAX_QUADRATURE_ORDER = 256
# Composite rule: the noise is cut at +-TRUNCATION (mass below 1e-18).
TRUNCATION = 6.5
MAX_PANEL_WIDTH = 2.0
MAX_PANELS = 1024
MIN_PANEL_NODES = 8
NOISE_VARIANCE_PER_DIMENSION = 0.5


class ChannelSpec:
  """AWGN channel parameters.

  Attributes:
    snr (float): Linear signal-to-noise ratio.
  """

  def __init__(self, snr: float) -> None:
    """Initialize the channel.

    Args:
      snr (float): Linear signal-to-noise ratio, >= 0.

    Raises:
      ValueError: If snr is negative or not finite.
    """
    if not math.isfinite(snr) or snr < 0:
      raise ValueError(
          'snr must be a finite nonnegative number, got {0!s}'.format(snr))
    self.snr = float(snr)

  @classmethod
  def FromDecibels(cls, snr_db: float) -> 'ChannelSpec':
    """Build a channel from an snr in dB."""
    return cls(common.DecibelsToLinear(snr_db))

  @property
  def amplitude(self) -> float:
    """sqrt(snr), the gain applied to the channel input."""
    return math.sqrt(self.snr)

  def __repr__(self) -> str:
    return 'ChannelSpec(snr={0:g})'.format(self.snr)


class QuadratureRule:
  """Physicists' Gauss-Hermite rule for integrals against exp(-t^2).

  Attributes:
    order (int): Nominal order, the number of Gauss-Hermite nodes.
    nodes (np.ndarray): The nodes, symmetric about 0.
    weights (np.ndarray): The weights, summing to sqrt(pi).
  """

  def __init__(self, order: int, nodes: np.ndarray,
               weights: np.ndarray) -> None:
    self.order = order
    self.nodes = nodes
    self.weights = weights
    self.nodes.setflags(write=False)
    self.weights.setflags(write=False)

  def RealGrid(self) -> Tuple[np.ndarray, np.ndarray]:
    """Noise offsets and probability weights for one real dimension.

    Returns:
      Tuple[np.ndarray, np.ndarray]: Offsets (variance 1/2 noise samples)
          and weights summing to 1.
    """
    return self.nodes, self.weights / math.sqrt(math.pi)

  def ComplexGrid(self) -> Tuple[np.ndarray, np.ndarray]:
    """Noise offsets and probability weights on the order x order grid.

    Returns:
      Tuple[np.ndarray, np.ndarray]: Complex offsets and weights summing
          to 1, flattened.
    """
    offsets = self.nodes[:, None] + 1j * self.nodes[None, :]
    weights = self.weights[:, None] * self.weights[None, :] / math.pi
    return offsets.reshape(-1), weights.reshape(-1)


_RULE_CACHE = {}  # type: Dict[int, QuadratureRule]


def GaussHermite(order: int) -> QuadratureRule:
  """Return the Gauss-Hermite rule of a given order.

  The rule integrates t^p exp(-t^2) exactly for p <= 2 * order - 1.

  Args:
    order (int): Number of nodes.

  Returns:
    QuadratureRule: The rule.

  Raises:
    ValueError: If order is outside [2, 256].
  """
  if not MIN_QUADRATURE_ORDER <= order <= MAX_QUADRATURE_ORDER:
    raise ValueError('Quadrature order must lie in [{0:d}, {1:d}], got '
                     '{2:d}'.format(MIN_QUADRATURE_ORDER,
                                    MAX_QUADRATURE_ORDER, order))
  if order not in _RULE_CACHE:
    nodes, weights = hermite.hermgauss(order)
    _RULE_CACHE[order] = QuadratureRule(order, nodes, weights)
  return _RULE_CACHE[order]


class PartitionedRule(QuadratureRule):
  """Composite Gauss-Legendre rule for integrals against exp(-t^2).

  [-TRUNCATION, TRUNCATION] is split into equal panels, each carrying a
  Gauss-Legendre rule of max(MIN_PANEL_NODES, order // 4) nodes; the
  Gaussian weight is folded into the node weights.

  Attributes:
    panels (int): Number of panels.
  """

  def __init__(self, order: int, panels: int) -> None:
    unit_nodes, unit_weights = legendre.leggauss(
        max(MIN_PANEL_NODES, order // 4))
    edges = np.linspace(-TRUNCATION, TRUNCATION, panels + 1)
    half = 0.5 * (edges[1] - edges[0])
    centers = 0.5 * (edges[1:] + edges[:-1])
    nodes = (centers[:, None] + half * unit_nodes[None, :]).reshape(-1)
    weights = np.tile(half * unit_weights, panels) * np.exp(-nodes ** 2)
    weights *= math.sqrt(math.pi) / np.sum(weights)
    super(PartitionedRule, self).__init__(order, nodes, weights)
    self.panels = panels


_PARTITIONED_CACHE = {}  # type: Dict[Tuple[int, int], PartitionedRule]


def PartitionedNoiseRule(rule: QuadratureRule, channel: ChannelSpec,
                         spacing: float) -> QuadratureRule:
  """Return the composite rule resolving log-likelihood sums.

  ln sum_x' P(x') P(y|x') has complex singularities at distance
  pi / (2 sqrt(snr) spacing) from the real noise axis, where spacing is the
  smallest gap between point coordinates. Panels are no wider than that
  distance, so the per-panel rules converge geometrically at every snr.

  Args:
    rule (QuadratureRule): Rule whose order sets the nodes per panel. A
        PartitionedRule is returned unchanged.
    channel (ChannelSpec): The channel.
    spacing (float): Smallest gap between distinct point coordinates,
        math.inf for a single point.

  Returns:
    QuadratureRule: The composite rule.
  """
  if isinstance(rule, PartitionedRule):
    return rule
  width = MAX_PANEL_WIDTH
  if channel.snr > 0 and 0 < spacing < math.inf:
    width = min(width, math.pi / (2.0 * channel.amplitude * spacing))
  panels = min(int(math.ceil(2.0 * TRUNCATION / width)), MAX_PANELS)
  key = (rule.order, panels)
  if key not in _PARTITIONED_CACHE:
    _PARTITIONED_CACHE[key] = PartitionedRule(rule.order, panels)
  return _PARTITIONED_CACHE[key]


def TransitionDensity(y: complex, x: complex, channel: ChannelSpec) -> float:
  """Density of Y at y given X = x.

  Args:
    y (complex): Channel output.
    x (complex): Channel input.
    channel (ChannelSpec): The channel.

  Returns:
    float: exp(-|y - sqrt(snr) x|^2) / pi.
  """
  return math.exp(-abs(y - channel.amplitude * x) ** 2) / math.pi


def LogTransitionDensities(y: np.ndarray, points: np.ndarray,
                           channel: ChannelSpec) -> np.ndarray:
  """Log-densities ln P(y|x) for every output and every point.

  Real outputs and points are treated as one dimension of the channel
  (noise variance 1/2), complex ones as the full complex channel.

  Args:
    y (np.ndarray): Outputs, shape (N,).
    points (np.ndarray): Inputs, shape (M,).
    channel (ChannelSpec): The channel.

  Returns:
    np.ndarray: Array of shape (N, M).
  """
  offsets = y[:, None] - channel.amplitude * points[None, :]
  if np.iscomplexobj(y) or np.iscomplexobj(points):
    return -(offsets.real ** 2 + offsets.imag ** 2) - math.log(math.pi)
  return -offsets ** 2 - 0.5 * math.log(math.pi)


def ExpectGivenX(x: complex, channel: ChannelSpec, rule: QuadratureRule,
                 g: Callable[[np.ndarray], np.ndarray]) -> float:
  """Tensor Gauss-Hermite estimate of E[g(Y) | X = x].

  Args:
    x (complex): Channel input.
    channel (ChannelSpec): The channel.
    rule (QuadratureRule): The quadrature rule.
    g (Callable): Vectorized function of complex outputs.

  Returns:
    float: The expectation.

  Raises:
    RuntimeError: If g is not finite at some node.
  """
  offsets, weights = rule.ComplexGrid()
  values = np.asarray(g(channel.amplitude * x + offsets), dtype=float)
  if not np.all(np.isfinite(values)):
    raise RuntimeError(
        'Integrand is not finite at {0:d} quadrature nodes'.format(
            int(np.sum(~np.isfinite(values)))))
  return float(np.dot(weights, values))


def ExpectGivenAmplitude(a: float, channel: ChannelSpec,
                         rule: QuadratureRule,
                         g: Callable[[np.ndarray], np.ndarray]) -> float:
  """Gauss-Hermite estimate of E[g(Y) | A = a] on one real dimension.

  Y = sqrt(snr) a + N with N of variance 1/2.

  Args:
    a (float): PAM amplitude.
    channel (ChannelSpec): The channel.
    rule (QuadratureRule): The quadrature rule.
    g (Callable): Vectorized function of real outputs.

  Returns:
    float: The expectation.

  Raises:
    RuntimeError: If g is not finite at some node.
  """
  offsets, weights = rule.RealGrid()
  values = np.asarray(g(channel.amplitude * a + offsets), dtype=float)
  if not np.all(np.isfinite(values)):
    raise RuntimeError(
        'Integrand is not finite at {0:d} quadrature nodes'.format(
            int(np.sum(~np.isfinite(values)))))
  return float(np.dot(weights, values))


class ChannelSamples:
  """Monte-Carlo draws of (X, Y).

  Attributes:
    indices (np.ndarray): Drawn point indices.
    x (np.ndarray): Drawn points.
    y (np.ndarray): Channel outputs.
    seed (int): Seed used for the draws.
  """

  def __init__(self, indices: np.ndarray, x: np.ndarray, y: np.ndarray,
               seed: int) -> None:
    self.indices = indices
    self.x = x
    self.y = y
    self.seed = seed

  def __len__(self) -> int:
    return int(self.indices.size)


def SampleChannel(distribution: qam.SymbolDistribution,
                  constellation: qam.Constellation,
                  channel: ChannelSpec,
                  seed: int,
                  n: int) -> ChannelSamples:
  """Draw n independent (x, y) pairs.

  Args:
    distribution (SymbolDistribution): Input distribution.
    constellation (Constellation): Normalized constellation.
    channel (ChannelSpec): The channel.
    seed (int): Generator seed.
    n (int): Number of draws.

  Returns:
    ChannelSamples: The draws.

  Raises:
    ValueError: If n < 1 or the constellation is not normalized.
  """
  if n < 1:
    raise ValueError('Need at least one sample, got {0:d}'.format(n))
  if not qam.IsNormalized(constellation, distribution):
    raise ValueError('Constellation is not normalized under the distribution')
  rng = np.random.Generator(np.random.PCG64(seed))
  indices = rng.choice(constellation.size, size=n, p=distribution.probs)
  noise = rng.standard_normal((n, 2)) * math.sqrt(
      NOISE_VARIANCE_PER_DIMENSION)
  x = constellation.points[indices]
  y = channel.amplitude * x + noise[:, 0] + 1j * noise[:, 1]
  return ChannelSamples(indices, x, y, seed)

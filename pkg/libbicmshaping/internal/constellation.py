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
"""Gray-labeled square QAM signal sets and their shaping distributions.

Conventions:
  - Label positions are 1-based in the public functions (j = 1..m) and
    0-based in array columns.
  - Per dimension, the BRGC list is assigned to the PAM amplitudes in
    ascending order, so the most significant bit 0 selects the negative half
    and, for 16-QAM, the amplitude bit 0 selects the outer amplitudes +-3.
  - The first m/2 label bits index the in-phase dimension, the last m/2 the
    quadrature dimension, unless the labels were permuted.
"""

from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from libbicmshaping.internal import common

Label = Tuple[int, ...]


class BitMarginals:
  """Per-position bit probabilities P_Bj(0).

  Attributes:
    p0 (np.ndarray): p0[j] is the probability that label bit j + 1 is 0.
  """

  def __init__(self, p0: Sequence[float]) -> None:
    """Initialize the bit marginals.

    Args:
      p0 (Sequence[float]): Probability of a 0 at every label position.

    Raises:
      ValueError: If an entry lies outside [0, 1] or the sequence is empty.
    """
    values = np.array(p0, dtype=float).reshape(-1)
    if values.size == 0:
      raise ValueError('Bit marginals need at least one label position')
    if np.any(~np.isfinite(values)) or np.any(values < 0) or np.any(
        values > 1):
      raise ValueError(
          'Bit probabilities must lie in [0, 1], got {0!s}'.format(
              values.tolist()))
    values.setflags(write=False)
    self.p0 = values

  @classmethod
  def Uniform(cls, m: int) -> 'BitMarginals':
    """Equiprobable bits at every one of the m positions."""
    return cls([0.5] * m)

  @property
  def m(self) -> int:
    """Number of label positions."""
    return int(self.p0.size)

  def Table(self) -> np.ndarray:
    """Return the (m, 2) table of P_Bj(b)."""
    return np.stack([self.p0, 1.0 - self.p0], axis=1)

  def Probability(self, position: int, bit: int) -> float:
    """P_Bj(bit) for a 0-based position."""
    p_zero = float(self.p0[position])
    return p_zero if bit == 0 else 1.0 - p_zero

  def IsDegenerate(self, position: int) -> bool:
    """True if the bit at a 0-based position is deterministic."""
    return self.p0[position] in (0.0, 1.0)

  def Entropy(self) -> float:
    """Sum of the bit entropies H(B_j), in nats."""
    table = self.Table()
    positive = table > 0
    return float(-np.sum(table[positive] * np.log(table[positive])))

  def Permuted(self, permutation: Sequence[int]) -> 'BitMarginals':
    """Marginals of labels permuted by Constellation.PermuteLabels."""
    return BitMarginals(self.p0[list(permutation)])

  def __repr__(self) -> str:
    return 'BitMarginals({0!s})'.format(self.p0.tolist())


class SymbolDistribution:
  """Probability vector over the points of a constellation.

  Attributes:
    probs (np.ndarray): Nonnegative probabilities summing to 1.
  """

  def __init__(self, probs: Sequence[float]) -> None:
    """Initialize the distribution.

    Args:
      probs (Sequence[float]): One probability per point.

    Raises:
      ValueError: If an entry is negative or the sum is not 1.
    """
    values = np.array(probs, dtype=float).reshape(-1)
    if np.any(~np.isfinite(values)) or np.any(values < 0):
      raise ValueError('Symbol probabilities must be finite and nonnegative')
    total = float(np.sum(values))
    if abs(total - 1.0) > common.PROBABILITY_TOLERANCE:
      raise ValueError(
          'Symbol probabilities sum to {0:.17g}, expected 1'.format(total))
    values.setflags(write=False)
    self.probs = values

  @classmethod
  def Uniform(cls, size: int) -> 'SymbolDistribution':
    """Equiprobable distribution over size points."""
    return cls(np.full(size, 1.0 / size))

  @property
  def support(self) -> np.ndarray:
    """Indices of the points with positive probability."""
    return np.flatnonzero(self.probs > 0)

  def Entropy(self) -> float:
    """Entropy H(X) in nats."""
    positive = self.probs[self.probs > 0]
    return float(-np.sum(positive * np.log(positive)))

  def __len__(self) -> int:
    return int(self.probs.size)


class Constellation:
  """A labeled square QAM signal set.

  Attributes:
    m (int): Number of label bits.
    points (np.ndarray): The M complex signal points.
    labels (np.ndarray): (M, m) array of label bits, in point order.
    pam_points (np.ndarray): The per-dimension PAM amplitudes, ascending.
    pam_labels (np.ndarray): (2^(m/2), m/2) BRGC labels of pam_points.
    in_phase_index (np.ndarray): For every point, the index of its in-phase
        amplitude in pam_points.
    quadrature_index (np.ndarray): For every point, the index of its
        quadrature amplitude in pam_points.
    in_phase_positions (Tuple[int, ...]): 0-based label positions of the
        in-phase bits, most significant first.
    quadrature_positions (Tuple[int, ...]): 0-based label positions of the
        quadrature bits, most significant first.
    scale (float): Factor applied to the odd-integer amplitudes.
  """

  def __init__(self,
               m: int,
               pam_points: np.ndarray,
               pam_labels: np.ndarray,
               in_phase_positions: Tuple[int, ...],
               quadrature_positions: Tuple[int, ...],
               scale: float = 1.0) -> None:
    """Initialize the constellation from its per-dimension structure.

    Args:
      m (int): Number of label bits.
      pam_points (np.ndarray): Ascending PAM amplitudes (unscaled).
      pam_labels (np.ndarray): BRGC labels of the PAM amplitudes.
      in_phase_positions (Tuple[int, ...]): Label positions of the in-phase
          bits.
      quadrature_positions (Tuple[int, ...]): Label positions of the
          quadrature bits.
      scale (float): Optional. Factor applied to the PAM amplitudes.
    """
    self.m = m
    self.scale = float(scale)
    side = pam_points.size
    self.pam_points = np.asarray(pam_points, dtype=float) * self.scale
    self.pam_labels = np.asarray(pam_labels, dtype=np.int8)
    self._unscaled_pam = np.asarray(pam_points, dtype=float)
    self.in_phase_positions = tuple(in_phase_positions)
    self.quadrature_positions = tuple(quadrature_positions)

    grid_i, grid_q = np.meshgrid(
        np.arange(side), np.arange(side), indexing='ij')
    self.in_phase_index = grid_i.reshape(-1)
    self.quadrature_index = grid_q.reshape(-1)
    self.points = (self.pam_points[self.in_phase_index]
                   + 1j * self.pam_points[self.quadrature_index])
    labels = np.zeros((side * side, m), dtype=np.int8)
    labels[:, list(self.in_phase_positions)] = self.pam_labels[
        self.in_phase_index]
    labels[:, list(self.quadrature_positions)] = self.pam_labels[
        self.quadrature_index]
    self.labels = labels
    for array in (self.points, self.labels, self.pam_points, self.pam_labels,
                  self.in_phase_index, self.quadrature_index):
      array.setflags(write=False)

  @property
  def size(self) -> int:
    """Number of points M = 2^m."""
    return int(self.points.size)

  def Scaled(self, factor: float) -> 'Constellation':
    """Return the constellation with every point multiplied by factor."""
    return Constellation(self.m, self._unscaled_pam, self.pam_labels,
                         self.in_phase_positions, self.quadrature_positions,
                         scale=self.scale * factor)

  def PermuteLabels(self, permutation: Sequence[int]) -> 'Constellation':
    """Reorder the label positions.

    Position j of the new labels holds position permutation[j] of the old
    ones, matching BitMarginals.Permuted.

    Args:
      permutation (Sequence[int]): A permutation of range(m).

    Returns:
      Constellation: Same points, permuted labels.

    Raises:
      ValueError: If permutation is not a permutation of range(m).
    """
    if sorted(permutation) != list(range(self.m)):
      raise ValueError(
          'Not a permutation of {0:d} label positions: {1!s}'.format(
              self.m, list(permutation)))
    inverse = [0] * self.m
    for new_position, old_position in enumerate(permutation):
      inverse[old_position] = new_position
    return Constellation(
        self.m, self._unscaled_pam, self.pam_labels,
        tuple(inverse[p] for p in self.in_phase_positions),
        tuple(inverse[p] for p in self.quadrature_positions),
        scale=self.scale)

  def Energy(self, distribution: SymbolDistribution) -> float:
    """Average energy sum_i d_i |x_i|^2."""
    return float(np.sum(distribution.probs * np.abs(self.points) ** 2))

  def Mean(self, distribution: SymbolDistribution) -> complex:
    """Average point sum_i d_i x_i."""
    return complex(np.sum(distribution.probs * self.points))

  def DimensionMarginals(
      self, distribution: SymbolDistribution
  ) -> Tuple[np.ndarray, np.ndarray, bool]:
    """Split a distribution into its per-dimension PAM marginals.

    Args:
      distribution (SymbolDistribution): A distribution over the points.

    Returns:
      Tuple[np.ndarray, np.ndarray, bool]: The in-phase and quadrature
          amplitude probabilities, and whether the distribution is their
          product.
    """
    side = self.pam_points.size
    in_phase = np.bincount(
        self.in_phase_index, weights=distribution.probs, minlength=side)
    quadrature = np.bincount(
        self.quadrature_index, weights=distribution.probs, minlength=side)
    product = in_phase[self.in_phase_index] * quadrature[self.quadrature_index]
    factorizes = bool(
        np.max(np.abs(product - distribution.probs)) <= 1e-15)
    return in_phase, quadrature, factorizes

  def PamProbabilities(self, marginals: BitMarginals,
                       positions: Tuple[int, ...]) -> np.ndarray:
    """Amplitude probabilities of one dimension under product marginals.

    Args:
      marginals (BitMarginals): The bit marginals.
      positions (Tuple[int, ...]): The label positions of that dimension.

    Returns:
      np.ndarray: One probability per PAM amplitude.
    """
    table = marginals.Table()
    probs = np.ones(self.pam_points.size)
    for column, position in enumerate(positions):
      probs = probs * table[position, self.pam_labels[:, column]]
    return probs


def BRGC(k: int) -> List[Label]:
  """Binary reflected Gray code on k bits.

  code(k) is 0 prefixed to code(k - 1), followed by 1 prefixed to the
  reversed code(k - 1).

  Args:
    k (int): Number of bits.

  Returns:
    List[Label]: The 2^k labels, most significant bit first.

  Raises:
    ValueError: If k < 1.
  """
  if k < 1:
    raise ValueError('BRGC needs at least one bit, got {0:d}'.format(k))
  code = [(0,), (1,)]  # type: List[Label]
  for _ in range(k - 1):
    code = [(0,) + label for label in code] + [
        (1,) + label for label in reversed(code)]
  return code


def BuildQAM(m: int) -> Constellation:
  """Build the unnormalized Gray-labeled 2^m-QAM constellation.

  Args:
    m (int): Number of label bits, even.

  Returns:
    Constellation: Odd-integer amplitudes per dimension, in-phase bits
        first in every label.

  Raises:
    ValueError: If m is odd or smaller than 2.
  """
  if m < 2 or m % 2:
    raise ValueError(
        'Square QAM needs an even number of bits >= 2, got {0:d}'.format(m))
  k = m // 2
  side = 2 ** k
  pam_points = np.arange(-(side - 1), side, 2, dtype=float)
  pam_labels = np.array(BRGC(k), dtype=np.int8)
  return Constellation(m, pam_points, pam_labels,
                       tuple(range(k)), tuple(range(k, m)))


def LabelSubset(constellation: Constellation, j: int, b: int) -> np.ndarray:
  """Indices of the points with bit b at label position j.

  Args:
    constellation (Constellation): The constellation.
    j (int): 1-based label position.
    b (int): Bit value, 0 or 1.

  Returns:
    np.ndarray: Ascending point indices of the set X_b^j.

  Raises:
    ValueError: If j or b is out of range.
  """
  if not 1 <= j <= constellation.m:
    raise ValueError('Label position {0:d} outside 1..{1:d}'.format(
        j, constellation.m))
  if b not in (0, 1):
    raise ValueError('Bit value must be 0 or 1, got {0!s}'.format(b))
  return np.flatnonzero(constellation.labels[:, j - 1] == b)


def ProductDistribution(constellation: Constellation,
                        marginals: BitMarginals) -> SymbolDistribution:
  """Symbol probabilities induced by independent label bits.

  Args:
    constellation (Constellation): The constellation.
    marginals (BitMarginals): One marginal per label position.

  Returns:
    SymbolDistribution: probs[i] = prod_j P_Bj(b_j(x_i)).

  Raises:
    ValueError: If the number of marginals does not match m.
  """
  if marginals.m != constellation.m:
    raise ValueError('Expected {0:d} bit marginals, got {1:d}'.format(
        constellation.m, marginals.m))
  table = marginals.Table()
  probs = np.ones(constellation.size)
  for position in range(constellation.m):
    probs = probs * table[position, constellation.labels[:, position]]
  return SymbolDistribution(probs)


def Normalize(constellation: Constellation,
              distribution: SymbolDistribution) -> Constellation:
  """Scale a constellation to unit average energy under a distribution.

  Args:
    constellation (Constellation): The constellation.
    distribution (SymbolDistribution): The input distribution.

  Returns:
    Constellation: The scaled constellation.

  Raises:
    ValueError: If the distribution has no energy or a nonzero mean.
  """
  if len(distribution) != constellation.size:
    raise ValueError('Distribution has {0:d} entries for {1:d} points'.format(
        len(distribution), constellation.size))
  energy = constellation.Energy(distribution)
  if energy <= 0:
    raise ValueError('Distribution is concentrated on zero-energy points')
  normalized = constellation.Scaled(1.0 / np.sqrt(energy))
  mean = abs(normalized.Mean(distribution))
  if mean >= common.MEAN_TOLERANCE:
    raise ValueError(
        'Distribution has mean modulus {0:.3g} after scaling; only '
        'zero-mean (symmetric) distributions are supported'.format(mean))
  return normalized


def IsNormalized(constellation: Constellation,
                 distribution: SymbolDistribution) -> bool:
  """True if the average energy under the distribution is 1."""
  return abs(constellation.Energy(distribution) - 1.0) <= (
      common.ENERGY_TOLERANCE)


class ParameterMap:
  """Embedding of the free shaping parameters into full distributions.

  CM parameters are the probabilities of the outer per-dimension
  magnitudes (3, 5, ...), the innermost magnitude taking the remaining mass;
  they live in the open simplex. MLC and BICM parameters are P_Bj(0) of the
  non-sign bits of one dimension; the sign bits are fixed at 1/2 and both
  dimensions share the values.

  Attributes:
    m (int): Number of label bits.
    scheme (str): One of common.CM, common.MLC, common.BICM.
    num_parameters (int): Number of free parameters.
    in_phase_positions (Tuple[int, ...]): Label positions of the in-phase
        bits.
    quadrature_positions (Tuple[int, ...]): Label positions of the
        quadrature bits.
  """

  def __init__(self,
               m: int,
               scheme: str,
               in_phase_positions: Tuple[int, ...],
               quadrature_positions: Tuple[int, ...]) -> None:
    """Initialize the parameter map.

    Args:
      m (int): Number of label bits.
      scheme (str): One of common.CM, common.MLC, common.BICM.
      in_phase_positions (Tuple[int, ...]): Label positions of the in-phase
          bits.
      quadrature_positions (Tuple[int, ...]): Label positions of the
          quadrature bits.
    """
    self.m = m
    self.scheme = scheme
    self.in_phase_positions = in_phase_positions
    self.quadrature_positions = quadrature_positions
    k = m // 2
    if scheme == common.CM:
      self.num_parameters = 2 ** (k - 1) - 1
    else:
      self.num_parameters = k - 1

  def Barycenter(self) -> np.ndarray:
    """Center of the parameter domain, mapping to the uniform input."""
    if self.scheme == common.CM:
      return np.full(self.num_parameters, 1.0 / (self.num_parameters + 1))
    return np.full(self.num_parameters, 0.5)

  def Validate(self, theta: Sequence[float]) -> np.ndarray:
    """Check that theta lies in the closed parameter domain.

    Args:
      theta (Sequence[float]): Free parameters.

    Returns:
      np.ndarray: theta as a float array.

    Raises:
      ValueError: If theta has the wrong length or lies outside the domain.
    """
    values = np.array(theta, dtype=float).reshape(-1)
    if values.size != self.num_parameters:
      raise ValueError('{0:s} with m = {1:d} has {2:d} free parameters, got '
                       '{3:d}'.format(self.scheme, self.m,
                                      self.num_parameters, values.size))
    tolerance = common.PROBABILITY_TOLERANCE
    if np.any(values < 0) or np.any(values > 1):
      raise ValueError('Free parameters must lie in [0, 1]: {0!s}'.format(
          values.tolist()))
    if self.scheme == common.CM and np.sum(values) > 1 + tolerance:
      raise ValueError('CM parameters must sum to at most 1: {0!s}'.format(
          values.tolist()))
    return values

  def FromUnconstrained(self, u: Sequence[float]) -> np.ndarray:
    """Map optimizer coordinates to the open parameter domain.

    CM uses the additive logistic map onto the simplex, MLC/BICM the
    elementwise logistic map.

    Args:
      u (Sequence[float]): Unconstrained coordinates.

    Returns:
      np.ndarray: Free parameters.
    """
    u = np.asarray(u, dtype=float).reshape(-1)
    if self.scheme != common.CM:
      return common.Logistic(u)
    logits = np.concatenate([[0.0], u])
    weights = np.exp(logits - np.max(logits))
    weights = np.maximum(weights / np.sum(weights),
                         common.PROBABILITY_EPSILON)
    weights = weights / np.sum(weights)
    return weights[1:]

  def ToUnconstrained(self, theta: Sequence[float]) -> np.ndarray:
    """Inverse of FromUnconstrained."""
    theta = np.asarray(theta, dtype=float).reshape(-1)
    if self.scheme != common.CM:
      return common.Logit(theta)
    theta = np.maximum(theta, common.PROBABILITY_EPSILON)
    inner = max(1.0 - float(np.sum(theta)), common.PROBABILITY_EPSILON)
    return np.log(theta) - np.log(inner)

  def PamDistribution(self, theta: Sequence[float]) -> np.ndarray:
    """Per-dimension amplitude probabilities for CM parameters."""
    if self.scheme != common.CM:
      raise ValueError('PamDistribution only applies to CM parameters')
    values = self.Validate(theta)
    magnitudes = np.concatenate([[1.0 - np.sum(values)], values])
    magnitudes = np.maximum(magnitudes, 0.0)
    side = 2 ** (self.m // 2)
    magnitude_index = np.abs(2 * np.arange(side) - (side - 1)) // 2
    return magnitudes[magnitude_index] / 2.0

  def Expand(
      self, theta: Sequence[float]
  ) -> Union[SymbolDistribution, BitMarginals]:
    """Expand free parameters into the full shaping object.

    Args:
      theta (Sequence[float]): Free parameters.

    Returns:
      Union[SymbolDistribution, BitMarginals]: A symbol distribution for CM,
          bit marginals for MLC and BICM.
    """
    values = self.Validate(theta)
    if self.scheme == common.CM:
      pam = self.PamDistribution(values)
      side = pam.size
      grid_i, grid_q = np.meshgrid(
          np.arange(side), np.arange(side), indexing='ij')
      probs = pam[grid_i.reshape(-1)] * pam[grid_q.reshape(-1)]
      return SymbolDistribution(probs / np.sum(probs))
    p0 = np.full(self.m, 0.5)
    for positions in (self.in_phase_positions, self.quadrature_positions):
      for column, position in enumerate(positions[1:]):
        p0[position] = values[column]
    return BitMarginals(p0)

  def Distribution(self, theta: Sequence[float],
                   constellation: Constellation) -> SymbolDistribution:
    """Symbol distribution for free parameters, whatever the scheme."""
    expanded = self.Expand(theta)
    if isinstance(expanded, BitMarginals):
      return ProductDistribution(constellation, expanded)
    return expanded


def FreeParameterMap(
    m: int,
    scheme: str,
    constellation: Optional[Constellation] = None) -> ParameterMap:
  """Describe the symmetric shaping parameters of a scheme.

  Args:
    m (int): Number of label bits, even.
    scheme (str): One of common.CM, common.MLC, common.BICM.
    constellation (Constellation): Optional. Constellation whose label layout
        the marginals follow. Defaults to the layout of BuildQAM(m).

  Returns:
    ParameterMap: The parameter count and the embedding.

  Raises:
    ValueError: If m is odd or the scheme is unknown.
  """
  if m < 2 or m % 2:
    raise ValueError(
        'Square QAM needs an even number of bits >= 2, got {0:d}'.format(m))
  if scheme not in common.SHAPED_SCHEMES:
    raise ValueError('Unknown shaping scheme {0:s}, expected one of '
                     '{1!s}'.format(scheme, list(common.SHAPED_SCHEMES)))
  k = m // 2
  if constellation is not None:
    return ParameterMap(m, scheme, constellation.in_phase_positions,
                        constellation.quadrature_positions)
  return ParameterMap(m, scheme, tuple(range(k)), tuple(range(k, m)))

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
"""Low-snr behavior: R(snr) = c1 snr + c2 snr^2 + o(snr^2)."""

import dataclasses
import math
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from libbicmshaping import logging_utils
from libbicmshaping import rates
from libbicmshaping.internal import channel as awgn
from libbicmshaping.internal import common
from libbicmshaping.internal import constellation as qam

logging_utils.SetUpLogger(__name__)
logger = logging_utils.GetLogger(__name__)

DEFAULT_WIDEBAND_GRID = (0.1, 0.05, 0.025, 0.0125, 0.00625)
MIN_GRID_POINTS = 4
MAX_GRID_SNR = 0.1
# Largest accepted change of (c1, c2) when the largest snr is halved.
STABILITY_TOLERANCE = (1e-3, 1e-2)

RateFunction = Callable[[float], float]


@dataclasses.dataclass(frozen=True)
class WidebandFit:
  """Fitted low-snr coefficients of a rate function.

  Attributes:
    c1 (float): First-order coefficient.
    c2 (float): Second-order coefficient.
    residual (float): RMS residual of R/snr against the fitted model.
    grid (Tuple[float, ...]): snr values used, decreasing.
    stable (bool): False if halving the largest snr moved (c1, c2) by more
        than STABILITY_TOLERANCE.
  """
  c1: float
  c2: float
  residual: float
  grid: Tuple[float, ...]
  stable: bool = True

  @property
  def ebn0_lim_db(self) -> float:
    """Minimum Eb/N0 in dB, NaN when c1 is not positive."""
    if self.c1 <= 0:
      return float('nan')
    return EbN0Limit(self.c1)


def _CheckGrid(grid: Sequence[float]) -> Tuple[float, ...]:
  """Validate a fit grid and return it in decreasing order.

  Raises:
    ValueError: If the grid is too short, repeats a value or leaves
        (0, MAX_GRID_SNR].
  """
  values = tuple(sorted((float(snr) for snr in grid), reverse=True))
  if len(values) < MIN_GRID_POINTS:
    raise ValueError('Need at least {0:d} snr values, got {1:d}'.format(
        MIN_GRID_POINTS, len(values)))
  if len(set(values)) != len(values):
    raise ValueError('snr grid repeats values: {0!s}'.format(list(values)))
  if values[-1] <= 0 or values[0] > MAX_GRID_SNR:
    raise ValueError('snr grid must lie in (0, {0:g}], got {1!s}'.format(
        MAX_GRID_SNR, list(values)))
  return values


def _LeastSquares(rate_fn: RateFunction,
                  grid: Tuple[float, ...]) -> Tuple[np.ndarray, float]:
  """Fit R/snr = c1 + c2 snr + c3 snr^2 on the grid.

  The snr^2 term absorbs the o(snr^2) remainder of the rate. Without it the
  snr^3 / 3 term of ln(1 + snr) biases c1 by about 5e-4 on the default
  grid.

  Returns:
    Tuple[np.ndarray, float]: (c1, c2, c3) and the RMS residual.

  Raises:
    ValueError: If the rate function returns a negative value.
  """
  snr = np.array(grid)
  values = np.array([rate_fn(point) for point in grid], dtype=float)
  if np.any(values < 0):
    raise ValueError('Rate function returned negative values {0!s}'.format(
        values[values < 0].tolist()))
  ratios = values / snr
  design = np.stack([np.ones_like(snr), snr, snr ** 2], axis=1)
  coefficients, _, _, _ = np.linalg.lstsq(design, ratios, rcond=None)
  residual = float(np.sqrt(np.mean((design @ coefficients - ratios) ** 2)))
  return coefficients, residual


def FitC1C2(rate_fn: RateFunction,
            grid: Sequence[float] = DEFAULT_WIDEBAND_GRID) -> WidebandFit:
  """Estimate the wideband coefficients of a rate function.

  The fit is repeated with the largest grid point replaced by its half; if
  (c1, c2) move by more than STABILITY_TOLERANCE the result is flagged
  unstable.

  Args:
    rate_fn (Callable): snr -> rate in nats.
    grid (Sequence[float]): Optional. At least 4 distinct snr values in
        (0, 0.1].

  Returns:
    WidebandFit: The coefficients.

  Raises:
    ValueError: If the grid is invalid or the rate is negative somewhere.
  """
  values = _CheckGrid(grid)
  coefficients, residual = _LeastSquares(rate_fn, values)
  halved, _ = _LeastSquares(rate_fn, (values[0] / 2.0,) + values[1:])
  c1_change, c2_change = np.abs(halved[:2] - coefficients[:2])
  stable = bool(c1_change < STABILITY_TOLERANCE[0]
                and c2_change < STABILITY_TOLERANCE[1])
  if not stable:
    logger.warning('Unstable wideband fit: halving the largest snr moved c1 '
                   'by {0:.3g} and c2 by {1:.3g}'.format(c1_change, c2_change))
  logger.debug('Wideband fit c1 = {0:.6f}, c2 = {1:.6f}'.format(
      coefficients[0], coefficients[1]))
  return WidebandFit(
      c1=float(coefficients[0]),
      c2=float(coefficients[1]),
      residual=residual,
      grid=values,
      stable=stable)


def FixedBitMarginals(
    m: int,
    fixed_bits: Sequence[int],
    constellation: Optional[qam.Constellation] = None) -> qam.BitMarginals:
  """Marginals that pin every non-sign bit to a given value.

  The sign bit of each dimension stays equiprobable. Since the BRGC
  reflects around the sign bit, the two surviving amplitudes of each
  dimension are negatives of each other.

  Args:
    m (int): Number of label bits, even.
    fixed_bits (Sequence[int]): Values of the m/2 - 1 non-sign bits, shared
        by both dimensions, or m - 2 values (in-phase first).
    constellation (Constellation): Optional. Label layout, BuildQAM(m) by
        default.

  Returns:
    BitMarginals: The degenerate marginals.

  Raises:
    ValueError: If m is odd or fixed_bits has the wrong length or values.
  """
  if m < 2 or m % 2:
    raise ValueError(
        'Square QAM needs an even number of bits >= 2, got {0:d}'.format(m))
  layout = constellation or qam.BuildQAM(m)
  bits = [int(bit) for bit in fixed_bits]
  k = m // 2
  if len(bits) == k - 1:
    bits = bits + bits
  if len(bits) != 2 * (k - 1) or any(bit not in (0, 1) for bit in bits):
    raise ValueError('Expected {0:d} or {1:d} bit values in {{0, 1}}, got '
                     '{2!s}'.format(k - 1, 2 * (k - 1), list(fixed_bits)))
  p0 = np.full(m, 0.5)
  non_sign = (list(layout.in_phase_positions[1:])
              + list(layout.quadrature_positions[1:]))
  for position, bit in zip(non_sign, bits):
    p0[position] = 1.0 if bit == 0 else 0.0
  return qam.BitMarginals(p0)


def QpskLimitMarginals(m: int) -> qam.BitMarginals:
  """Marginals selecting a QPSK sub-constellation: non-sign bits fixed to 0.

  Args:
    m (int): Number of label bits, even.

  Returns:
    BitMarginals: Sign bits 1/2, all other bits 0 with probability 1.
  """
  return FixedBitMarginals(m, [0] * (m // 2 - 1))


def EbN0Limit(c1: float) -> float:
  """Minimum Eb/N0 10 log10(ln 2 / c1), in dB.

  Raises:
    ValueError: If c1 is not positive.
  """
  if c1 <= 0:
    raise ValueError('c1 must be positive, got {0!s}'.format(c1))
  return 10.0 * math.log10(math.log(2.0) / c1)


def BitRateFunction(m: int,
                    marginals: qam.BitMarginals,
                    scheme: str = common.BICM,
                    rule: Optional[awgn.QuadratureRule] = None
                   ) -> RateFunction:
  """snr -> rate of a scheme under fixed bit marginals.

  The constellation is normalized under the product distribution.

  Args:
    m (int): Number of label bits.
    marginals (BitMarginals): Bit marginals.
    scheme (str): Optional. common.BICM (sum of bit informations), or
        common.CM / common.MLC (mutual information).
    rule (QuadratureRule): Optional. Defaults to order 64.

  Returns:
    Callable: The rate function.
  """
  base = qam.BuildQAM(m)
  distribution = qam.ProductDistribution(base, marginals)
  normalized = qam.Normalize(base, distribution)

  def Rate(snr: float) -> float:
    channel = awgn.ChannelSpec(snr)
    if scheme == common.BICM:
      return rates.BicmRate(normalized, marginals, channel, rule)
    return rates.MutualInformation(normalized, distribution, channel, rule)

  return Rate


def GaussianRateFunction() -> RateFunction:
  """snr -> ln(1 + snr)."""
  return lambda snr: rates.GaussianCapacity(awgn.ChannelSpec(snr))

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
"""Common utilities."""

import math
from typing import Callable, Tuple

import numpy as np

from libbicmshaping import logging_utils

logging_utils.SetUpLogger(__name__)
logger = logging_utils.GetLogger(__name__)

# Scheme tags shared by the rate, shaping and exponent modules.
CM = 'cm'
MLC = 'mlc'
BICM = 'bicm'
BICM_UNIFORM = 'bicm-uniform'
GAUSSIAN = 'gaussian'
PARALLEL = 'bicm-parallel'
MLC_MSD = 'mlc-msd'
SHAPED_SCHEMES = (CM, MLC, BICM)
CURVE_SCHEMES = (CM, MLC, BICM, BICM_UNIFORM, GAUSSIAN)

DEFAULT_QUADRATURE_ORDER = 64
# Free shaping parameters live in (PROBABILITY_EPSILON,
# 1 - PROBABILITY_EPSILON) while optimizing.
PROBABILITY_EPSILON = 1e-9
# Tolerances used when validating distributions and normalized points.
PROBABILITY_TOLERANCE = 1e-12
ENERGY_TOLERANCE = 1e-9
MEAN_TOLERANCE = 1e-12

GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0
_INVERSE_GOLDEN = 1.0 / GOLDEN_RATIO


def DecibelsToLinear(value_db: float) -> float:
  """Convert a value in dB to a linear ratio.

  Args:
    value_db (float): The value in dB.

  Returns:
    float: The linear ratio.
  """
  return 10.0 ** (value_db / 10.0)


def LinearToDecibels(value: float) -> float:
  """Convert a positive linear ratio to dB.

  Args:
    value (float): The linear ratio.

  Returns:
    float: The value in dB.

  Raises:
    ValueError: If value is not positive.
  """
  if value <= 0:
    raise ValueError(
        'Cannot express {0:g} in dB: value must be positive'.format(value))
  return 10.0 * math.log10(value)


def NatsToBits(value: float) -> float:
  """Convert an information quantity from nats to bits."""
  return value / math.log(2.0)


def BitsToNats(value: float) -> float:
  """Convert an information quantity from bits to nats."""
  return value * math.log(2.0)


def EbN0Decibels(snr_db: float, rate_bits: float) -> float:
  """Energy per information bit over N0, in dB.

  Eb/N0 = snr / R with R in bits per channel use.

  Args:
    snr_db (float): The signal-to-noise ratio in dB.
    rate_bits (float): The rate in bits per channel use.

  Returns:
    float: Eb/N0 in dB, or NaN when the rate is not positive.
  """
  if rate_bits <= 0:
    return float('nan')
  return snr_db - 10.0 * math.log10(rate_bits)


def Logistic(u: np.ndarray) -> np.ndarray:
  """Map unconstrained values into (PROBABILITY_EPSILON, 1 - EPSILON).

  Args:
    u (np.ndarray): Unconstrained values.

  Returns:
    np.ndarray: Values in the open unit interval.
  """
  value = 0.5 * (1.0 + np.tanh(0.5 * np.asarray(u, dtype=float)))
  return np.clip(value, PROBABILITY_EPSILON, 1.0 - PROBABILITY_EPSILON)


def Logit(p: np.ndarray) -> np.ndarray:
  """Inverse of Logistic, clipping p into the open unit interval first."""
  p = np.clip(
      np.asarray(p, dtype=float), PROBABILITY_EPSILON,
      1.0 - PROBABILITY_EPSILON)
  return np.log(p) - np.log1p(-p)


def GoldenSectionMaximize(
    func: Callable[[float], float],
    lower: float,
    upper: float,
    tolerance: float = 1e-6,
    max_iterations: int = 200) -> Tuple[float, float, int]:
  """Maximize a unimodal function on a closed interval.

  The end points are compared with the interior optimum, so a maximum
  sitting on the boundary (e.g. rho = 0 above capacity) is returned
  exactly.

  Args:
    func (Callable): The function to maximize.
    lower (float): Lower end of the bracket.
    upper (float): Upper end of the bracket.
    tolerance (float): Optional. Width of the final bracket.
    max_iterations (int): Optional. Iteration cap.

  Returns:
    Tuple[float, float, int]: The maximizer, the maximum and the number of
        iterations used.

  Raises:
    ValueError: If the bracket is empty.
  """
  if not upper > lower:
    raise ValueError(
        'Empty bracket [{0:g}, {1:g}]'.format(lower, upper))
  a, b = lower, upper
  c = b - (b - a) * _INVERSE_GOLDEN
  d = a + (b - a) * _INVERSE_GOLDEN
  fc, fd = func(c), func(d)
  iterations = 0
  while b - a > tolerance and iterations < max_iterations:
    if fc > fd:
      b, d, fd = d, c, fc
      c = b - (b - a) * _INVERSE_GOLDEN
      fc = func(c)
    else:
      a, c, fc = c, d, fd
      d = a + (b - a) * _INVERSE_GOLDEN
      fd = func(d)
    iterations += 1
  if b - a > tolerance:
    logger.warning('Golden-section search stopped after {0:d} iterations '
                   'with bracket [{1:.6g}, {2:.6g}]'.format(iterations, a, b))
  else:
    logger.debug('Golden-section bracket [{0:.9g}, {1:.9g}] after {2:d} '
                 'iterations'.format(a, b, iterations))
  best_x, best_f = (c, fc) if fc > fd else (d, fd)
  for edge in (lower, upper):
    f_edge = func(edge)
    if f_edge > best_f:
      best_x, best_f = edge, f_edge
  return best_x, best_f, iterations

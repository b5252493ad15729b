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
"""Utils test methods"""
import unittest
from typing import Callable, List, Optional, Tuple

from libbicmshaping import oracle
from libbicmshaping.internal import constellation as qam

# Shaped 16-QAM marginals: P(amplitude bit = 0) selects the outer amplitude.
SHAPED_16QAM_MARGINALS = [
    qam.BitMarginals([0.5, 0.3, 0.5, 0.3]),
    qam.BitMarginals([0.5, 0.15, 0.5, 0.15]),
    qam.BitMarginals([0.5, 0.7, 0.5, 0.4]),
]  # type: List[qam.BitMarginals]


def NormalizedQAM(
    m: int,
    marginals: Optional[qam.BitMarginals] = None
) -> Tuple[qam.Constellation, qam.SymbolDistribution, qam.BitMarginals]:
  """Gray QAM normalized under product-form marginals.

  Args:
    m (int): Number of label bits.
    marginals (BitMarginals): Optional. Uniform by default.

  Returns:
    Tuple[Constellation, SymbolDistribution, BitMarginals]: The normalized
        constellation, its distribution and the marginals.
  """
  marginals = marginals or qam.BitMarginals.Uniform(m)
  base = qam.BuildQAM(m)
  distribution = qam.ProductDistribution(base, marginals)
  return qam.Normalize(base, distribution), distribution, marginals


def AssertWithinStandardErrors(
    test_case: unittest.TestCase,
    estimator: Callable[[int], oracle.McEstimate],
    expected: float,
    n: int,
    standard_errors: float = 3.0) -> oracle.McEstimate:
  """Assert that a Monte-Carlo estimate brackets an expected value.

  A miss is retried once with 4 times the samples before failing.

  Args:
    test_case (unittest.TestCase): The calling test.
    estimator (Callable): n -> McEstimate, with a pinned seed.
    expected (float): The value to bracket.
    n (int): Number of samples of the first attempt.
    standard_errors (float): Optional. Width of the band.

  Returns:
    McEstimate: The accepted estimate.
  """
  estimate = estimator(n)
  if estimate.Contains(expected, standard_errors):
    return estimate
  estimate = estimator(4 * n)
  test_case.assertTrue(
      estimate.Contains(expected, standard_errors),
      'Monte-Carlo {0:.6f} +- {1:.2g} misses {2:.6f}'.format(
          estimate.mean, estimate.standard_error, expected))
  return estimate

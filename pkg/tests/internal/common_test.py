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
"""Tests for the common module."""

import math
import typing
import unittest

import mock
import numpy as np

from libbicmshaping.internal import common


class CommonTest(unittest.TestCase):
  """Test the common utilities."""

  @typing.no_type_check
  def testDecibels(self):
    """Test dB conversions."""
    self.assertAlmostEqual(10.0, common.DecibelsToLinear(10.0))
    self.assertAlmostEqual(1.0, common.DecibelsToLinear(0.0))
    self.assertAlmostEqual(-10.0, common.LinearToDecibels(0.1))
    with self.assertRaises(ValueError):
      common.LinearToDecibels(0.0)

  @typing.no_type_check
  def testUnits(self):
    """Test nats/bits conversions and Eb/N0."""
    self.assertAlmostEqual(1.0, common.NatsToBits(math.log(2.0)))
    self.assertAlmostEqual(math.log(2.0), common.BitsToNats(1.0))
    self.assertAlmostEqual(10.0 - 10.0 * math.log10(2.0),
                           common.EbN0Decibels(10.0, 2.0))
    self.assertTrue(math.isnan(common.EbN0Decibels(0.0, 0.0)))

  @typing.no_type_check
  def testLogistic(self):
    """Test that Logit inverts Logistic inside the clipped interval."""
    p = np.array([0.1, 0.5, 0.75])
    np.testing.assert_allclose(p, common.Logistic(common.Logit(p)))
    clipped = common.Logistic(np.array([-1e3, 1e3]))
    self.assertAlmostEqual(common.PROBABILITY_EPSILON, clipped[0])
    self.assertAlmostEqual(1.0 - common.PROBABILITY_EPSILON, clipped[1])

  @typing.no_type_check
  def testGoldenSectionMaximize(self):
    """Test interior and boundary maxima."""
    x, value, iterations = common.GoldenSectionMaximize(
        lambda t: -(t - 0.3) ** 2, 0.0, 1.0, tolerance=1e-9)
    self.assertAlmostEqual(0.3, x, places=7)
    self.assertAlmostEqual(0.0, value, places=12)
    self.assertGreater(iterations, 0)

    x, value, _ = common.GoldenSectionMaximize(lambda t: -t, 0.0, 1.0)
    self.assertEqual(0.0, x)
    self.assertEqual(0.0, value)

    with self.assertRaises(ValueError):
      common.GoldenSectionMaximize(lambda t: t, 1.0, 1.0)

  @typing.no_type_check
  @mock.patch('libbicmshaping.internal.common.logger')
  def testGoldenSectionIterationCap(self, mock_logger):
    """Test that hitting the iteration cap is reported."""
    _, _, iterations = common.GoldenSectionMaximize(
        lambda t: -(t - 0.3) ** 2, 0.0, 1.0, max_iterations=3)
    self.assertEqual(3, iterations)
    mock_logger.warning.assert_called_once()
    mock_logger.debug.assert_not_called()

    common.GoldenSectionMaximize(lambda t: -(t - 0.3) ** 2, 0.0, 1.0)
    mock_logger.debug.assert_called_once()
    mock_logger.warning.assert_called_once()


if __name__ == '__main__':
  unittest.main()

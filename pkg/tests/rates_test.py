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
"""Tests for the rates module."""

import math
import typing
import unittest

import numpy as np

from libbicmshaping import rates
from libbicmshaping.internal import channel as awgn
from libbicmshaping.internal import common
from libbicmshaping.internal import constellation as qam
from tests.scripts import utils

SNRS_DB = (0.0, 5.0, 10.0)


class RatePointTest(unittest.TestCase):
  """Test the RatePoint record."""

  @typing.no_type_check
  def testRatePoint(self):
    """Test units and validation."""
    point = rates.RatePoint(snr=1.0, rate_nats=math.log(2.0),
                            scheme=common.CM)
    self.assertAlmostEqual(1.0, point.rate_bits)
    with self.assertRaises(ValueError):
      rates.RatePoint(snr=1.0, rate_nats=-0.1, scheme=common.CM)


class MutualInformationTest(unittest.TestCase):
  """Test the CM mutual information."""

  @typing.no_type_check
  def testBounds(self):
    """Test 0 <= I(X;Y) <= min(H(X), ln(1 + snr)) and monotonicity."""
    constellation, distribution, _ = utils.NormalizedQAM(4)
    previous = 0.0
    for snr_db in SNRS_DB + (15.0, 20.0):
      channel = awgn.ChannelSpec.FromDecibels(snr_db)
      value = rates.MutualInformation(constellation, distribution, channel)
      self.assertGreater(value, previous)
      self.assertLessEqual(value, rates.GaussianCapacity(channel))
      self.assertLessEqual(value, distribution.Entropy() + 1e-12)
      previous = value

  @typing.no_type_check
  def testLimits(self):
    """Test zero snr and the high-snr saturation at H(X)."""
    constellation, distribution, _ = utils.NormalizedQAM(4)
    self.assertAlmostEqual(
        0.0,
        rates.MutualInformation(constellation, distribution,
                                awgn.ChannelSpec(0.0)),
        places=12)
    self.assertAlmostEqual(
        4.0 * math.log(2.0),
        rates.MutualInformation(constellation, distribution,
                                awgn.ChannelSpec.FromDecibels(30.0)),
        delta=1e-6)

  @typing.no_type_check
  def testQuadratureOrder(self):
    """Test that orders 64 and 128 agree up to 20 dB for m = 2, 4 and 6."""
    low, high = awgn.GaussHermite(64), awgn.GaussHermite(128)
    for m in (2, 4, 6):
      constellation, distribution, marginals = utils.NormalizedQAM(m)
      for snr_db in (0.0, 5.0, 10.0, 15.0, 20.0):
        channel = awgn.ChannelSpec.FromDecibels(snr_db)
        message = 'm={0:d}, {1:g} dB'.format(m, snr_db)
        self.assertAlmostEqual(
            rates.MutualInformation(constellation, distribution, channel,
                                    low),
            rates.MutualInformation(constellation, distribution, channel,
                                    high),
            delta=1e-9, msg=message)
        self.assertAlmostEqual(
            rates.BicmRate(constellation, marginals, channel, low),
            rates.BicmRate(constellation, marginals, channel, high),
            delta=1e-9, msg=message)

  @typing.no_type_check
  def testDecomposition(self):
    """Test that the PAM decomposition matches the 2-D tensor grid."""
    rule = awgn.GaussHermite(16)
    for marginals in utils.SHAPED_16QAM_MARGINALS:
      constellation, distribution, _ = utils.NormalizedQAM(4, marginals)
      channel = awgn.ChannelSpec.FromDecibels(5.0)
      self.assertAlmostEqual(
          rates.MutualInformation(constellation, distribution, channel, rule),
          rates.MutualInformation(constellation, distribution, channel, rule,
                                  decompose=False),
          delta=1e-10)
      self.assertAlmostEqual(
          rates.BicmRate(constellation, marginals, channel, rule),
          rates.BicmRate(constellation, marginals, channel, rule,
                         decompose=False),
          delta=1e-10)

  @typing.no_type_check
  def testNotNormalized(self):
    """Test that an unnormalized constellation is rejected."""
    constellation = qam.BuildQAM(4)
    distribution = qam.SymbolDistribution.Uniform(16)
    with self.assertRaises(ValueError):
      rates.MutualInformation(constellation, distribution,
                              awgn.ChannelSpec(1.0))


class BitRatesTest(unittest.TestCase):
  """Test the bit-level rates, BICM and MLC."""

  @typing.no_type_check
  def testQpskBicmEqualsCm(self):
    """Test that BICM loses nothing on Gray QPSK."""
    constellation, distribution, marginals = utils.NormalizedQAM(2)
    for snr_db in SNRS_DB:
      channel = awgn.ChannelSpec.FromDecibels(snr_db)
      self.assertAlmostEqual(
          rates.MutualInformation(constellation, distribution, channel),
          rates.BicmRate(constellation, marginals, channel),
          delta=1e-10)

  @typing.no_type_check
  def testOrdering(self):
    """Test BICM <= CM for uniform and shaped 16-QAM."""
    for marginals in [None] + utils.SHAPED_16QAM_MARGINALS:
      constellation, distribution, marginals = utils.NormalizedQAM(
          4, marginals)
      for snr_db in SNRS_DB:
        channel = awgn.ChannelSpec.FromDecibels(snr_db)
        cm = rates.MutualInformation(constellation, distribution, channel)
        bicm = rates.BicmRate(constellation, marginals, channel)
        self.assertLessEqual(bicm, cm + 1e-12)
        self.assertGreaterEqual(bicm, 0.0)

  @typing.no_type_check
  def testChainRule(self):
    """Test that the MLC levels sum to I(X;Y) in any decoding order."""
    for marginals in utils.SHAPED_16QAM_MARGINALS:
      constellation, distribution, _ = utils.NormalizedQAM(4, marginals)
      channel = awgn.ChannelSpec.FromDecibels(5.0)
      cm = rates.MutualInformation(constellation, distribution, channel)
      for order in (None, [2, 1, 4, 3], [3, 1, 4, 2]):
        levels = rates.LevelMutualInformations(
            constellation, marginals, channel, level_order=order)
        self.assertEqual(4, len(levels))
        self.assertAlmostEqual(cm, sum(levels), delta=1e-10)

  @typing.no_type_check
  def testLevelOrderInvalid(self):
    """Test that a decoding order must be a permutation of 1..m."""
    constellation, _, marginals = utils.NormalizedQAM(4)
    with self.assertRaises(ValueError):
      rates.LevelMutualInformations(constellation, marginals,
                                    awgn.ChannelSpec(1.0),
                                    level_order=[0, 1, 2, 3])

  @typing.no_type_check
  def testDegenerateBits(self):
    """Test 16-QAM with the amplitude bits fixed to the outer points.

    The input is then QPSK with a larger scale, so every rate equals the
    QPSK one and the fixed bits contribute exactly 0.
    """
    marginals = qam.BitMarginals([0.5, 1.0, 0.5, 1.0])
    constellation, distribution, _ = utils.NormalizedQAM(4, marginals)
    qpsk, qpsk_distribution, qpsk_marginals = utils.NormalizedQAM(2)
    channel = awgn.ChannelSpec.FromDecibels(3.0)
    for j in (2, 4):
      self.assertEqual(
          0.0,
          rates.BitLevelMutualInformation(constellation, marginals, channel,
                                          None, j))
    self.assertAlmostEqual(
        rates.BicmRate(qpsk, qpsk_marginals, channel),
        rates.BicmRate(constellation, marginals, channel),
        delta=1e-10)
    self.assertAlmostEqual(
        rates.MutualInformation(qpsk, qpsk_distribution, channel),
        rates.MutualInformation(constellation, distribution, channel),
        delta=1e-10)
    with self.assertRaises(ValueError):
      rates.BitLevelMutualInformation(constellation, marginals, channel,
                                      None, 5)

  @typing.no_type_check
  def testBinaryChannelDensity(self):
    """Test P_j(y|b) against a direct average over X_b^j."""
    constellation, _, marginals = utils.NormalizedQAM(4)
    channel = awgn.ChannelSpec(2.0)
    y = complex(0.4, -0.2)
    subset = qam.LabelSubset(constellation, 2, 1)
    expected = np.mean([
        awgn.TransitionDensity(y, point, channel)
        for point in constellation.points[subset]
    ])
    self.assertAlmostEqual(
        expected,
        rates.BinaryChannelDensity(constellation, marginals, channel, 2, 1,
                                   y))
    degenerate = qam.BitMarginals([0.5, 1.0, 0.5, 0.5])
    shaped, _, _ = utils.NormalizedQAM(4, degenerate)
    with self.assertRaises(ValueError):
      rates.BinaryChannelDensity(shaped, degenerate, channel, 2, 1, y)


class GmiTest(unittest.TestCase):
  """Test the BICM generalized mutual information."""

  @typing.no_type_check
  def testNormalizedMetric(self):
    """Test that the normalized metric peaks at s = 1 on the BICM rate."""
    for marginals in utils.SHAPED_16QAM_MARGINALS:
      constellation, _, _ = utils.NormalizedQAM(4, marginals)
      channel = awgn.ChannelSpec.FromDecibels(5.0)
      optimum = rates.GmiSupS(constellation, marginals, channel,
                              variant=rates.NORMALIZED)
      bicm = rates.BicmRate(constellation, marginals, channel)
      self.assertAlmostEqual(1.0, optimum.s, delta=1e-3)
      self.assertAlmostEqual(bicm, optimum.value, delta=1e-9)
      self.assertTrue(optimum.concave)
      self.assertAlmostEqual(
          bicm,
          rates.BicmGmi(constellation, marginals, channel, None, 1.0,
                        rates.NORMALIZED),
          delta=1e-12)

  @typing.no_type_check
  def testClassicalMetric(self):
    """Test that the classical metric never beats the BICM rate."""
    for marginals in utils.SHAPED_16QAM_MARGINALS:
      constellation, _, _ = utils.NormalizedQAM(4, marginals)
      for snr_db in SNRS_DB:
        channel = awgn.ChannelSpec.FromDecibels(snr_db)
        optimum = rates.GmiSupS(constellation, marginals, channel)
        self.assertLessEqual(
            optimum.value,
            rates.BicmRate(constellation, marginals, channel) + 1e-9)
        self.assertGreater(optimum.value, 0.0)

  @typing.no_type_check
  def testUniformVariantsAgree(self):
    """Test that both metrics coincide for uniform bits at every s."""
    constellation, _, marginals = utils.NormalizedQAM(4)
    channel = awgn.ChannelSpec.FromDecibels(5.0)
    for s in (0.5, 1.0, 2.0):
      self.assertAlmostEqual(
          rates.BicmGmi(constellation, marginals, channel, None, s,
                        rates.CLASSICAL),
          rates.BicmGmi(constellation, marginals, channel, None, s,
                        rates.NORMALIZED),
          delta=1e-12)

  @typing.no_type_check
  def testUniformClassicalOptimum(self):
    """Test s* = 1 for uniform bits with the classical metric."""
    constellation, _, marginals = utils.NormalizedQAM(4)
    for snr_db in SNRS_DB:
      channel = awgn.ChannelSpec.FromDecibels(snr_db)
      optimum = rates.GmiSupS(constellation, marginals, channel,
                              variant=rates.CLASSICAL)
      self.assertAlmostEqual(1.0, optimum.s, delta=1e-3)
      self.assertAlmostEqual(
          rates.BicmRate(constellation, marginals, channel), optimum.value,
          delta=1e-9)

  @typing.no_type_check
  def testSmallS(self):
    """Test that the GMI vanishes linearly as s goes to 0."""
    marginals = utils.SHAPED_16QAM_MARGINALS[0]
    constellation, _, _ = utils.NormalizedQAM(4, marginals)
    channel = awgn.ChannelSpec.FromDecibels(5.0)
    for variant in rates.METRIC_VARIANTS:
      small = rates.BicmGmi(constellation, marginals, channel, None, 1e-6,
                            variant)
      smaller = rates.BicmGmi(constellation, marginals, channel, None, 1e-7,
                              variant)
      self.assertLess(abs(small), 1e-5)
      self.assertAlmostEqual(0.1 * small, smaller, delta=1e-9)

  @typing.no_type_check
  def testLabelPermutation(self):
    """Test that relabelling bits and marginals together changes no rate."""
    marginals = utils.SHAPED_16QAM_MARGINALS[1]
    constellation, distribution, _ = utils.NormalizedQAM(4, marginals)
    permutation = [2, 0, 3, 1]
    permuted = constellation.PermuteLabels(permutation)
    permuted_marginals = marginals.Permuted(permutation)
    channel = awgn.ChannelSpec.FromDecibels(5.0)
    np.testing.assert_allclose(
        distribution.probs,
        qam.ProductDistribution(permuted, permuted_marginals).probs,
        atol=1e-15)
    self.assertAlmostEqual(
        rates.MutualInformation(constellation, distribution, channel),
        rates.MutualInformation(permuted, distribution, channel),
        delta=1e-12)
    self.assertAlmostEqual(
        rates.BicmRate(constellation, marginals, channel),
        rates.BicmRate(permuted, permuted_marginals, channel),
        delta=1e-12)
    for variant in rates.METRIC_VARIANTS:
      self.assertAlmostEqual(
          rates.BicmGmi(constellation, marginals, channel, None, 0.7,
                        variant),
          rates.BicmGmi(permuted, permuted_marginals, channel, None, 0.7,
                        variant),
          delta=1e-12)

  @typing.no_type_check
  def testGmiProfile(self):
    """Test that the profile never exceeds the supremum."""
    marginals = utils.SHAPED_16QAM_MARGINALS[0]
    constellation, _, _ = utils.NormalizedQAM(4, marginals)
    channel = awgn.ChannelSpec.FromDecibels(5.0)
    s_values = [0.25, 0.5, 1.0, 2.0, 4.0]
    profile = rates.GmiProfile(constellation, marginals, channel, s_values)
    optimum = rates.GmiSupS(constellation, marginals, channel)
    self.assertEqual(len(s_values), profile.size)
    self.assertLessEqual(float(np.max(profile)), optimum.value + 1e-9)

  @typing.no_type_check
  def testInvalidArguments(self):
    """Test s <= 0 and unknown variants."""
    constellation, _, marginals = utils.NormalizedQAM(4)
    channel = awgn.ChannelSpec(1.0)
    with self.assertRaises(ValueError):
      rates.BicmGmi(constellation, marginals, channel, None, 0.0)
    with self.assertRaises(ValueError):
      rates.BicmGmi(constellation, marginals, channel, None, 1.0, 'other')
    with self.assertRaises(ValueError):
      rates.GmiProfile(constellation, marginals, channel, [1.0, -1.0])


class GaussianCapacityTest(unittest.TestCase):
  """Test GaussianCapacity."""

  @typing.no_type_check
  def testGaussianCapacity(self):
    """Test ln(1 + snr)."""
    self.assertAlmostEqual(math.log(11.0),
                           rates.GaussianCapacity(awgn.ChannelSpec(10.0)))
    self.assertEqual(0.0, rates.GaussianCapacity(awgn.ChannelSpec(0.0)))


if __name__ == '__main__':
  unittest.main()

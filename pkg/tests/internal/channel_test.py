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
"""Tests for the channel module."""

import math
import typing
import unittest

import numpy as np

from libbicmshaping.internal import channel as awgn
from libbicmshaping.internal import constellation as qam
from tests.scripts import utils


class ChannelSpecTest(unittest.TestCase):
  """Test ChannelSpec."""

  @typing.no_type_check
  def testChannelSpec(self):
    """Test construction and validation."""
    self.assertAlmostEqual(10.0, awgn.ChannelSpec.FromDecibels(10.0).snr)
    self.assertAlmostEqual(2.0, awgn.ChannelSpec(4.0).amplitude)
    self.assertEqual(0.0, awgn.ChannelSpec(0.0).snr)
    for snr in (-1.0, float('inf'), float('nan')):
      with self.assertRaises(ValueError):
        awgn.ChannelSpec(snr)


class QuadratureTest(unittest.TestCase):
  """Test the Gauss-Hermite rules and expectations."""

  @typing.no_type_check
  def testGaussHermite(self):
    """Test weights and moments of the rule."""
    rule = awgn.GaussHermite(16)
    self.assertIs(rule, awgn.GaussHermite(16))
    self.assertAlmostEqual(math.sqrt(math.pi), float(np.sum(rule.weights)))
    nodes, weights = rule.RealGrid()
    self.assertAlmostEqual(1.0, float(np.sum(weights)))
    # Per-dimension noise variance is 1/2.
    self.assertAlmostEqual(0.5, float(np.dot(weights, nodes ** 2)))
    offsets, weights = rule.ComplexGrid()
    self.assertEqual(256, offsets.size)
    self.assertAlmostEqual(1.0, float(np.sum(weights)))
    self.assertAlmostEqual(1.0, float(np.dot(weights, np.abs(offsets) ** 2)))

  @typing.no_type_check
  def testGaussHermiteClosedForms(self):
    """Test the order-2 rule and the integral of exp(-t^2) cos t."""
    rule = awgn.GaussHermite(2)
    np.testing.assert_allclose([-1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0)],
                               rule.nodes)
    np.testing.assert_allclose([math.sqrt(math.pi) / 2.0] * 2, rule.weights)
    rule = awgn.GaussHermite(64)
    self.assertAlmostEqual(math.sqrt(math.pi) * math.exp(-0.25),
                           float(np.dot(rule.weights, np.cos(rule.nodes))),
                           delta=1e-12)

  @typing.no_type_check
  def testGaussHermiteOrder(self):
    """Test the order bounds."""
    with self.assertRaises(ValueError):
      awgn.GaussHermite(1)
    with self.assertRaises(ValueError):
      awgn.GaussHermite(257)

  @typing.no_type_check
  def testPartitionedRule(self):
    """Test the moments and the panel count of the composite rule."""
    rule = awgn.PartitionedNoiseRule(awgn.GaussHermite(64),
                                     awgn.ChannelSpec(100.0), 0.3)
    self.assertIsInstance(rule, awgn.PartitionedRule)
    self.assertEqual(64, rule.order)
    self.assertEqual(16 * rule.panels, rule.nodes.size)
    nodes, weights = rule.RealGrid()
    self.assertAlmostEqual(1.0, float(np.sum(weights)), delta=1e-14)
    self.assertAlmostEqual(0.5, float(np.dot(weights, nodes ** 2)),
                           delta=1e-12)
    self.assertAlmostEqual(math.exp(-0.25),
                           float(np.dot(weights, np.cos(nodes))), delta=1e-12)
    # Panels no wider than pi / (2 sqrt(snr) spacing).
    self.assertLessEqual(2.0 * awgn.TRUNCATION / rule.panels,
                         math.pi / (2.0 * 10.0 * 0.3))
    self.assertIs(rule, awgn.PartitionedNoiseRule(rule, awgn.ChannelSpec(1.0),
                                                  1.0))
    self.assertIs(
        rule,
        awgn.PartitionedNoiseRule(awgn.GaussHermite(64),
                                  awgn.ChannelSpec(100.0), 0.3))

  @typing.no_type_check
  def testPartitionedRulePanels(self):
    """Test that the panel count grows with snr and floors at low snr."""
    order = awgn.GaussHermite(16)
    counts = [
        awgn.PartitionedNoiseRule(order, awgn.ChannelSpec(snr), 0.6).panels
        for snr in (0.0, 0.01, 1.0, 100.0, 1e4)
    ]
    self.assertEqual(counts, sorted(counts))
    self.assertLess(counts[2], counts[3])
    self.assertEqual(
        int(math.ceil(2.0 * awgn.TRUNCATION / awgn.MAX_PANEL_WIDTH)),
        counts[0])
    self.assertEqual(counts[0], awgn.PartitionedNoiseRule(
        order, awgn.ChannelSpec(100.0), math.inf).panels)
    # Eight nodes per panel below order 32.
    self.assertEqual(
        8 * counts[-1],
        awgn.PartitionedNoiseRule(order, awgn.ChannelSpec(1e4),
                                  0.6).nodes.size)

  @typing.no_type_check
  def testExpectGivenX(self):
    """Test E[|Y - sqrt(snr) x|^2 | x] = 1 and E[Y | x] = sqrt(snr) x."""
    channel = awgn.ChannelSpec(4.0)
    rule = awgn.GaussHermite(8)
    x = complex(0.3, -0.7)
    self.assertAlmostEqual(
        1.0,
        awgn.ExpectGivenX(x, channel, rule,
                          lambda y: np.abs(y - 2.0 * x) ** 2))
    self.assertAlmostEqual(
        0.6, awgn.ExpectGivenX(x, channel, rule, lambda y: y.real))
    with self.assertRaises(RuntimeError):
      awgn.ExpectGivenX(x, channel, rule, lambda y: np.full(y.shape, np.nan))

  @typing.no_type_check
  def testExpectGivenAmplitude(self):
    """Test the one-dimensional expectation."""
    channel = awgn.ChannelSpec(9.0)
    rule = awgn.GaussHermite(8)
    self.assertAlmostEqual(
        1.5, awgn.ExpectGivenAmplitude(0.5, channel, rule, lambda y: y))
    self.assertAlmostEqual(
        0.5,
        awgn.ExpectGivenAmplitude(0.5, channel, rule,
                                  lambda y: (y - 1.5) ** 2))
    with self.assertRaises(RuntimeError):
      awgn.ExpectGivenAmplitude(0.5, channel, rule, lambda y: np.log(y * 0))

  @typing.no_type_check
  def testDensities(self):
    """Test the transition density and its vectorized logarithm."""
    channel = awgn.ChannelSpec(4.0)
    self.assertAlmostEqual(1.0 / math.pi,
                           awgn.TransitionDensity(2.0 + 2.0j, 1.0 + 1.0j,
                                                  channel))
    y = np.array([0.5 + 0.5j, 2.0 - 1.0j])
    points = np.array([1.0 + 0.0j, -1.0 + 0.0j])
    log_densities = awgn.LogTransitionDensities(y, points, channel)
    self.assertEqual((2, 2), log_densities.shape)
    self.assertAlmostEqual(
        math.log(awgn.TransitionDensity(y[1], points[1], channel)),
        log_densities[1, 1])
    real = awgn.LogTransitionDensities(
        np.array([2.0]), np.array([1.0]), channel)
    self.assertAlmostEqual(-0.5 * math.log(math.pi), real[0, 0])


class SampleChannelTest(unittest.TestCase):
  """Test SampleChannel."""

  @typing.no_type_check
  def testSampleChannel(self):
    """Test reproducibility and the noise variance."""
    constellation, distribution, _ = utils.NormalizedQAM(4)
    channel = awgn.ChannelSpec(2.0)
    samples = awgn.SampleChannel(distribution, constellation, channel, 7,
                                 100000)
    again = awgn.SampleChannel(distribution, constellation, channel, 7,
                               100000)
    self.assertEqual(100000, len(samples))
    np.testing.assert_array_equal(samples.y, again.y)
    noise = samples.y - channel.amplitude * samples.x
    self.assertAlmostEqual(0.5, float(np.var(noise.real)), delta=0.01)
    self.assertAlmostEqual(0.5, float(np.var(noise.imag)), delta=0.01)
    self.assertAlmostEqual(1.0, float(np.mean(np.abs(samples.x) ** 2)),
                           delta=0.02)

  @typing.no_type_check
  def testSampleStatistics(self):
    """Test symbol frequencies and E|Y|^2 = snr + 1 on shaped 16-QAM."""
    marginals = utils.SHAPED_16QAM_MARGINALS[0]
    constellation, distribution, _ = utils.NormalizedQAM(4, marginals)
    channel = awgn.ChannelSpec(3.0)
    n = 200000
    samples = awgn.SampleChannel(distribution, constellation, channel, 11, n)
    counts = np.bincount(samples.indices, minlength=constellation.size)
    frequencies = counts / n
    standard_errors = np.sqrt(distribution.probs *
                              (1.0 - distribution.probs) / n)
    self.assertTrue(
        np.all(np.abs(frequencies - distribution.probs) <=
               4.0 * standard_errors))
    energy = np.abs(samples.y) ** 2
    self.assertLessEqual(
        abs(float(np.mean(energy)) - (channel.snr + 1.0)),
        4.0 * float(np.std(energy)) / math.sqrt(n))

  @typing.no_type_check
  def testSampleChannelInvalid(self):
    """Test that bad sizes and unnormalized inputs are rejected."""
    constellation, distribution, _ = utils.NormalizedQAM(4)
    channel = awgn.ChannelSpec(2.0)
    with self.assertRaises(ValueError):
      awgn.SampleChannel(distribution, constellation, channel, 0, 0)
    with self.assertRaises(ValueError):
      awgn.SampleChannel(distribution, qam.BuildQAM(4), channel, 0, 10)


if __name__ == '__main__':
  unittest.main()

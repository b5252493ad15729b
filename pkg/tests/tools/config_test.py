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
"""Tests for the sweep configuration."""

import json
import os
import shutil
import tempfile
import typing
import unittest

from libbicmshaping.internal import common
from tools import cli
from tools import config as sweep_config


class ParseRangeTest(unittest.TestCase):
  """Test ParseRange."""

  @typing.no_type_check
  def testRanges(self):
    """Test start:stop:step and lists."""
    self.assertEqual([0.0, 0.5, 1.0, 1.5, 2.0],
                     sweep_config.ParseRange('0:2:0.5'))
    self.assertEqual([-2.0], sweep_config.ParseRange('-2:-2:1'))
    self.assertEqual([1.0, 2.5, 3.0], sweep_config.ParseRange(' 1, 2.5,3 '))
    self.assertEqual(21, len(sweep_config.ParseRange('0:20:1')))

  @typing.no_type_check
  def testMalformed(self):
    """Test malformed specifications."""
    for text in ('0:1', '0:1:0', '0:1:-1', 'a,b', '', '2:1:1'):
      with self.assertRaises(sweep_config.ConfigError):
        sweep_config.ParseRange(text)


class ConfigFileTest(unittest.TestCase):
  """Test the key=value file and the marginals file."""

  def setUp(self):
    self.directory = tempfile.mkdtemp()

  def tearDown(self):
    shutil.rmtree(self.directory)

  def _Write(self, name: str, content: str) -> str:
    path = os.path.join(self.directory, name)
    with open(path, 'w') as output:
      output.write(content)
    return path

  @typing.no_type_check
  def testReadConfigFile(self):
    """Test comments, blank lines and dashed keys."""
    path = self._Write('sweep.cfg', '# 64-QAM sweep\n\nm = 6\n'
                                    '--snr-db=0:4:2\nquadrature_order=32\n')
    self.assertEqual({'m': '6', 'snr_db': '0:4:2', 'quadrature_order': '32'},
                     sweep_config.ReadConfigFile(path))

  @typing.no_type_check
  def testReadConfigFileErrors(self):
    """Test that diagnostics name the file and line."""
    path = self._Write('bad.cfg', 'm=4\ncolor=blue\n')
    with self.assertRaisesRegex(sweep_config.ConfigError, 'bad.cfg:2'):
      sweep_config.ReadConfigFile(path)
    path = self._Write('bad2.cfg', 'm 4\n')
    with self.assertRaisesRegex(sweep_config.ConfigError, 'bad2.cfg:1'):
      sweep_config.ReadConfigFile(path)
    with self.assertRaises(OSError):
      sweep_config.ReadConfigFile(os.path.join(self.directory, 'missing'))

  @typing.no_type_check
  def testLoadMarginals(self):
    """Test the optimize output format and its errors."""
    path = self._Write('shaping.json', json.dumps(
        [{'scheme': 'bicm', 'bit_marginals': [0.5, 0.2, 0.5, 0.2]}]))
    marginals = sweep_config.LoadMarginals(path, 4)
    self.assertEqual([0.5, 0.2, 0.5, 0.2], marginals.p0.tolist())
    with self.assertRaises(sweep_config.ConfigError):
      sweep_config.LoadMarginals(path, 6)
    for content in ('{"theta": [0.2]}', 'not json',
                    '{"bit_marginals": [0.5, 1.5, 0.5, 0.5]}'):
      path = self._Write('broken.json', content)
      with self.assertRaises(sweep_config.ConfigError):
        sweep_config.LoadMarginals(path, 4)

  @typing.no_type_check
  def testPriority(self):
    """Test that flags override the file, which overrides the defaults."""
    path = self._Write('sweep.cfg', 'm=8\nsnr-db=1:3:1\nformat=json\n')
    args = cli.BuildParser().parse_args(
        ['capacity', '--config', path, '--m', '6'])
    config = sweep_config.SweepConfig.FromArguments(args)
    self.assertEqual(6, config.m)
    self.assertEqual([1.0, 2.0, 3.0], config.snr_db)
    self.assertEqual(sweep_config.FORMAT_JSON, config.output_format)
    self.assertEqual(sweep_config.SHAPING_OPTIMIZED, config.shaping)
    self.assertEqual(common.DEFAULT_QUADRATURE_ORDER, config.quadrature_order)
    self.assertIsNone(config.Marginals())


class SweepConfigTest(unittest.TestCase):
  """Test SweepConfig."""

  @typing.no_type_check
  def testDefaults(self):
    """Test the defaults of a bare subcommand."""
    args = cli.BuildParser().parse_args(['exponent', '--m', '2'])
    config = sweep_config.SweepConfig.FromArguments(args)
    self.assertEqual(21, len(config.snr_db))
    self.assertEqual(['cm', 'mlc', 'bicm', 'bicm-uniform'], config.schemes)
    self.assertEqual(41, len(config.rates_bits))
    self.assertEqual(0.0, config.rates_bits[0])
    self.assertAlmostEqual(2.0, config.rates_bits[-1])
    self.assertEqual(1, config.workers)
    self.assertIsNone(config.output_path)
    self.assertEqual(common.DEFAULT_QUADRATURE_ORDER, config.rule.order)

  @typing.no_type_check
  def testValidate(self):
    """Test every rejected field."""
    invalid = [
        {'m': 5},
        {'m': 0},
        {'snr_db': []},
        {'schemes': ['cm', 'turbo']},
        {'quadrature_order': 300},
        {'output_format': 'xml'},
        {'workers': 0},
        {'rates_bits': [0.5, -0.5]},
    ]
    for fields in invalid:
      with self.assertRaises(sweep_config.ConfigError, msg=str(fields)):
        sweep_config.SweepConfig(**fields).Validate()
    sweep_config.SweepConfig().Validate()

  @typing.no_type_check
  def testBadIntegers(self):
    """Test non-integer values of integer options."""
    args = cli.BuildParser().parse_args(['capacity', '--workers', 'two'])
    with self.assertRaises(sweep_config.ConfigError):
      sweep_config.SweepConfig.FromArguments(args)


if __name__ == '__main__':
  unittest.main()

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
"""Brute-force estimators used to cross-check the quadrature code.

Monte-Carlo estimators draw from channel.SampleChannel in batches whose
seeds are spawned from the root seed, so every estimate is reproducible.
The exhaustive check works on a 4-point channel with a quantized output,
where every quantity is a finite sum.
"""

import dataclasses
import itertools
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import special
from scipy import stats

from libbicmshaping import logging_utils
from libbicmshaping import rates
from libbicmshaping.internal import channel as awgn
from libbicmshaping.internal import common
from libbicmshaping.internal import constellation as qam

logging_utils.SetUpLogger(__name__)
logger = logging_utils.GetLogger(__name__)

MIN_SAMPLES = 10000
BATCH_SIZE = 100000
IDENTITY_TOLERANCE = 1e-12
DEFAULT_GRID_RESOLUTION = 1000


@dataclasses.dataclass(frozen=True)
class McEstimate:
  """Monte-Carlo estimate.

  Attributes:
    mean (float): The estimate.
    standard_error (float): Sample standard deviation over sqrt(n).
    n (int): Number of samples.
    seed (int): Root seed.
  """
  mean: float
  standard_error: float
  n: int
  seed: int

  @classmethod
  def FromSamples(cls, values: np.ndarray, seed: int) -> 'McEstimate':
    """Estimate from i.i.d. samples."""
    n = int(values.size)
    return cls(
        mean=float(np.mean(values)),
        standard_error=float(np.std(values, ddof=1) / math.sqrt(n)),
        n=n,
        seed=seed)

  def Contains(self, value: float, standard_errors: float = 3.0) -> bool:
    """True if value lies within the given number of standard errors."""
    return abs(value - self.mean) <= standard_errors * self.standard_error


def _CheckSamples(n: int) -> None:
  """Raise ValueError below MIN_SAMPLES."""
  if n < MIN_SAMPLES:
    raise ValueError('Monte-Carlo estimates need at least {0:d} samples, got '
                     '{1:d}'.format(MIN_SAMPLES, n))


def _BatchSamples(distribution: qam.SymbolDistribution,
                  constellation: qam.Constellation,
                  channel: awgn.ChannelSpec,
                  seed: int,
                  n: int) -> List[awgn.ChannelSamples]:
  """Draw n samples in batches with seeds spawned from the root seed."""
  sizes = [BATCH_SIZE] * (n // BATCH_SIZE)
  if n % BATCH_SIZE:
    sizes.append(n % BATCH_SIZE)
  children = np.random.SeedSequence(seed).spawn(len(sizes))
  return [
      awgn.SampleChannel(distribution, constellation, channel,
                         int(child.generate_state(1)[0]), size)
      for child, size in zip(children, sizes)
  ]


def _LogLikelihoods(samples: awgn.ChannelSamples,
                    constellation: qam.Constellation,
                    channel: awgn.ChannelSpec) -> Tuple[np.ndarray, np.ndarray]:
  """ln P(y|x') for every sample and point, and ln P(y|x) of the draw."""
  log_likelihoods = awgn.LogTransitionDensities(samples.y,
                                                constellation.points, channel)
  own = log_likelihoods[np.arange(len(samples)), samples.indices]
  return log_likelihoods, own


def _LogPrior(distribution: qam.SymbolDistribution) -> np.ndarray:
  with np.errstate(divide='ignore'):
    return np.log(distribution.probs)


def MonteCarloMutualInformation(constellation: qam.Constellation,
                                distribution: qam.SymbolDistribution,
                                channel: awgn.ChannelSpec,
                                seed: int,
                                n: int) -> McEstimate:
  """Sample mean of ln P(y|x) / sum_x' P(x') P(y|x').

  Args:
    constellation (Constellation): Normalized constellation.
    distribution (SymbolDistribution): Input distribution.
    channel (ChannelSpec): The channel.
    seed (int): Root seed.
    n (int): Number of samples, >= MIN_SAMPLES.

  Returns:
    McEstimate: The estimate of I(X;Y) in nats.
  """
  _CheckSamples(n)
  log_prior = _LogPrior(distribution)
  values = []
  for samples in _BatchSamples(distribution, constellation, channel, seed, n):
    log_likelihoods, own = _LogLikelihoods(samples, constellation, channel)
    values.append(own - special.logsumexp(log_likelihoods + log_prior, axis=1))
  return McEstimate.FromSamples(np.concatenate(values), seed)


def _LogBitMetrics(log_likelihoods: np.ndarray, log_prior: np.ndarray,
                   constellation: qam.Constellation,
                   position: int) -> np.ndarray:
  """ln sum_{x in X_b} P(y|x) P(x) for b = 0, 1, shape (n, 2)."""
  columns = []
  for bit in (0, 1):
    members = (constellation.labels[:, position] == bit) & np.isfinite(
        log_prior)
    columns.append(
        special.logsumexp(log_likelihoods[:, members] + log_prior[members],
                          axis=1))
  return np.stack(columns, axis=1)


def MonteCarloBitLevelInformation(constellation: qam.Constellation,
                                  marginals: qam.BitMarginals,
                                  channel: awgn.ChannelSpec,
                                  j: int,
                                  seed: int,
                                  n: int) -> McEstimate:
  """Monte-Carlo estimate of I(B_j; Y) for a 1-based position j."""
  _CheckSamples(n)
  if not 1 <= j <= constellation.m:
    raise ValueError('Label position {0:d} outside 1..{1:d}'.format(
        j, constellation.m))
  distribution = qam.ProductDistribution(constellation, marginals)
  if marginals.IsDegenerate(j - 1):
    return McEstimate(0.0, 0.0, n, seed)
  log_prior = _LogPrior(distribution)
  log_pb = np.log(marginals.Table()[j - 1])
  values = []
  for samples in _BatchSamples(distribution, constellation, channel, seed, n):
    log_likelihoods, _ = _LogLikelihoods(samples, constellation, channel)
    log_q = _LogBitMetrics(log_likelihoods, log_prior, constellation, j - 1)
    bits = constellation.labels[samples.indices, j - 1]
    rows = np.arange(len(samples))
    values.append(log_q[rows, bits] - log_pb[bits]
                  - special.logsumexp(log_q, axis=1))
  return McEstimate.FromSamples(np.concatenate(values), seed)


def MonteCarloE0(constellation: qam.Constellation,
                 shaping: Union[qam.SymbolDistribution, qam.BitMarginals],
                 channel: awgn.ChannelSpec,
                 scheme: str,
                 rho: float,
                 s: Optional[float],
                 seed: int,
                 n: int,
                 variant: str = rates.CLASSICAL) -> McEstimate:
  """Monte-Carlo estimate of a Gallager function.

  The inner bracket is averaged over the draws and E0 = -ln(mean); the
  standard error follows from the delta method.

  Args:
    constellation (Constellation): Normalized constellation.
    shaping (Union[SymbolDistribution, BitMarginals]): Input distribution,
        bit marginals for the BICM decoder.
    channel (ChannelSpec): The channel.
    scheme (str): common.CM or common.BICM.
    rho (float): Gallager parameter.
    s (float): Metric exponent of the BICM decoder; ignored for CM.
    seed (int): Root seed.
    n (int): Number of samples.
    variant (str): Optional. Bit metric variant.

  Returns:
    McEstimate: The estimate of E0 in nats.

  Raises:
    ValueError: If the scheme and shaping do not match.
  """
  _CheckSamples(n)
  if isinstance(shaping, qam.BitMarginals):
    marginals = shaping  # type: Optional[qam.BitMarginals]
    distribution = qam.ProductDistribution(constellation, shaping)
  else:
    marginals = None
    distribution = shaping
  if scheme == common.BICM and (marginals is None or s is None):
    raise ValueError('The BICM decoder needs bit marginals and s')
  if scheme not in (common.CM, common.BICM):
    raise ValueError('Unknown decoder {0:s}'.format(scheme))
  if rho == 0:
    return McEstimate(0.0, 0.0, n, seed)

  log_prior = _LogPrior(distribution)
  brackets = []
  for samples in _BatchSamples(distribution, constellation, channel, seed, n):
    log_likelihoods, own = _LogLikelihoods(samples, constellation, channel)
    if scheme == common.CM:
      log_bracket = special.logsumexp(
          log_prior + (log_likelihoods - own[:, None]) / (1.0 + rho), axis=1)
    else:
      rows = np.arange(len(samples))
      table = marginals.Table()
      log_bracket = np.zeros(len(samples))
      for position in range(constellation.m):
        if marginals.IsDegenerate(position):
          continue
        log_pb = np.log(table[position])
        log_metric = _LogBitMetrics(log_likelihoods, log_prior,
                                    constellation, position)
        if variant == rates.NORMALIZED:
          log_metric = log_metric - log_pb
        bits = constellation.labels[samples.indices, position]
        log_bracket += special.logsumexp(
            log_pb + s * (log_metric - log_metric[rows, bits][:, None]),
            axis=1)
    brackets.append(np.exp(rho * log_bracket))
  inner = McEstimate.FromSamples(np.concatenate(brackets), seed)
  return McEstimate(
      mean=-math.log(inner.mean),
      standard_error=inner.standard_error / inner.mean,
      n=n,
      seed=seed)


@dataclasses.dataclass(frozen=True)
class ExpectationCheck:
  """Quadrature and Monte-Carlo values of one conditional expectation.

  Attributes:
    quadrature (float): Gauss-Hermite value.
    estimate (McEstimate): Sampled value.
  """
  quadrature: float
  estimate: McEstimate

  @property
  def passed(self) -> bool:
    """True if the quadrature value lies within 3 standard errors."""
    return self.estimate.Contains(self.quadrature)


def CheckConditionalExpectation(
    x: Union[float, complex],
    channel: awgn.ChannelSpec,
    g: Callable[[np.ndarray], np.ndarray],
    seed: int,
    n: int,
    rule: Optional[awgn.QuadratureRule] = None) -> ExpectationCheck:
  """Compare quadrature and sampling on E[g(Y) | X = x].

  A real x is a PAM amplitude on one dimension (noise variance 1/2), a
  complex x an input of the full complex channel.

  Args:
    x (Union[float, complex]): Channel input.
    channel (ChannelSpec): The channel.
    g (Callable): Vectorized function of the outputs.
    seed (int): Generator seed.
    n (int): Number of samples, >= MIN_SAMPLES.
    rule (QuadratureRule): Optional. Defaults to order 64.

  Returns:
    ExpectationCheck: Both values.
  """
  _CheckSamples(n)
  rule = rule or awgn.GaussHermite(common.DEFAULT_QUADRATURE_ORDER)
  rng = np.random.Generator(np.random.PCG64(seed))
  scale = math.sqrt(awgn.NOISE_VARIANCE_PER_DIMENSION)
  if isinstance(x, complex):
    quadrature = awgn.ExpectGivenX(x, channel, rule, g)
    noise = rng.standard_normal((n, 2)) * scale
    y = channel.amplitude * x + noise[:, 0] + 1j * noise[:, 1]
  else:
    quadrature = awgn.ExpectGivenAmplitude(x, channel, rule, g)
    y = channel.amplitude * x + rng.standard_normal(n) * scale
  estimate = McEstimate.FromSamples(np.asarray(g(y), dtype=float), seed)
  logger.debug('E[g(Y) | x={0!s}]: quadrature {1:.8f}, sampled {2:.8f} +- '
               '{3:.2g}'.format(x, quadrature, estimate.mean,
                                estimate.standard_error))
  return ExpectationCheck(quadrature, estimate)


@dataclasses.dataclass
class DiscreteCheckReport:
  """Finite-sum quantities of the 4-point quantized toy channel.

  Attributes:
    bit_marginals (Tuple[float, float]): P_Bj(0) of the two label bits.
    mutual_information (float): I(X;Y) in nats.
    input_entropy (float): H(X).
    bit_entropies (float): sum_j H(B_j).
    bit_informations (List[float]): I(B_j;Y) per label position.
    s_grid (np.ndarray): GMI parameters evaluated.
    gmi (Dict[str, np.ndarray]): Per-bit decomposition of the GMI per metric
        variant, over s_grid.
    direct_gmi (Dict[str, np.ndarray]): Symbol-level GMI with the product
        metric, per variant.
    e0_cm (float): CM Gallager function at rho = 1.
    e0_bicm_direct (float): BICM Gallager function at (1, 1/2), summing
        over the points.
    e0_bicm_factored (float): The same, summing bit by bit.
    identity_error (float): Largest |direct - decomposed| difference.
    classical_gap (float): sum_j I(B_j;Y) minus the classical GMI at s = 1.
  """
  bit_marginals: Tuple[float, float]
  mutual_information: float
  input_entropy: float
  bit_entropies: float
  bit_informations: List[float]
  s_grid: np.ndarray
  gmi: Dict[str, np.ndarray]
  direct_gmi: Dict[str, np.ndarray]
  e0_cm: float
  e0_bicm_direct: float
  e0_bicm_factored: float
  identity_error: float
  classical_gap: float

  @property
  def passed(self) -> bool:
    """True if every identity holds to IDENTITY_TOLERANCE."""
    return self.identity_error <= IDENTITY_TOLERANCE


def _ToyTransitions(snr: float, noiseless: bool) -> np.ndarray:
  """(4, 8) transition matrix of 4-PAM through a quantized AWGN channel."""
  if noiseless:
    transitions = np.zeros((4, 8))
    transitions[np.arange(4), 2 * np.arange(4) + 1] = 1.0
    return transitions
  amplitudes = np.array([-3.0, -1.0, 1.0, 3.0]) / math.sqrt(5.0)
  edges = np.concatenate([[-np.inf], np.linspace(-1.5, 1.5, 7), [np.inf]])
  noise = stats.norm(
      scale=math.sqrt(awgn.NOISE_VARIANCE_PER_DIMENSION))
  centered = edges[None, :] - math.sqrt(snr) * amplitudes[:, None]
  return np.diff(noise.cdf(centered), axis=1)


def _XLogY(weights: np.ndarray, values: np.ndarray) -> float:
  """sum of weights * ln(values) over the positive weights."""
  positive = weights > 0
  return float(np.sum(weights[positive] * np.log(values[positive])))


def ExhaustiveDiscreteCheck(
    bit_marginals: Sequence[float] = (0.5, 0.5),
    snr: float = 1.0,
    noiseless: bool = False,
    s_grid: Sequence[float] = (0.25, 0.5, 1.0, 2.0, 4.0)
) -> DiscreteCheckReport:
  """Evaluate the rate and exponent identities by exact finite sums.

  The toy input is 4-PAM with the 2-bit BRGC in ascending order and
  independent bits; the output is quantized to 8 bins.

  Args:
    bit_marginals (Sequence[float]): Optional. P_Bj(0) of the two bits.
    snr (float): Optional. Linear snr.
    noiseless (bool): Optional. Map every point to its own bin.
    s_grid (Sequence[float]): Optional. GMI parameters.

  Returns:
    DiscreteCheckReport: The report.
  """
  marginals = qam.BitMarginals(bit_marginals)
  labels = np.array(qam.BRGC(2), dtype=np.int8)
  table = marginals.Table()
  input_probs = table[0, labels[:, 0]] * table[1, labels[:, 1]]
  transitions = _ToyTransitions(snr, noiseless)
  joint = input_probs[:, None] * transitions
  output = joint.sum(axis=0)

  with np.errstate(divide='ignore', invalid='ignore'):
    mutual_information = _XLogY(joint, transitions / output[None, :])
    bit_metrics = []  # type: List[np.ndarray]
    bit_informations = []  # type: List[float]
    for position in range(2):
      q = np.stack([
          joint[labels[:, position] == bit].sum(axis=0) for bit in (0, 1)])
      bit_metrics.append(q)
      bit_joint = np.zeros_like(q) if marginals.IsDegenerate(position) else q
      bit_informations.append(
          _XLogY(bit_joint,
                 q / (table[position][:, None] * q.sum(axis=0)[None, :])))

    s_values = np.array(s_grid, dtype=float)
    gmi = {}  # type: Dict[str, np.ndarray]
    direct_gmi = {}  # type: Dict[str, np.ndarray]
    for variant in rates.METRIC_VARIANTS:
      safe_table = np.where(table > 0, table, 1.0)
      metrics = [
          q / safe_table[position][:, None]
          if variant == rates.NORMALIZED else q
          for position, q in enumerate(bit_metrics)
      ]
      symbol_metric = (metrics[0][labels[:, 0]] * metrics[1][labels[:, 1]])
      decomposed, direct = [], []
      for s in s_values:
        total = 0.0
        for position, metric in enumerate(metrics):
          if marginals.IsDegenerate(position):
            continue
          own = metric[labels[:, position]]
          denominator = (table[position][:, None] * metric ** s).sum(axis=0)
          total += _XLogY(joint, own ** s / denominator[None, :])
        decomposed.append(total)
        denominator = (input_probs[:, None] * symbol_metric ** s).sum(axis=0)
        direct.append(_XLogY(joint, symbol_metric ** s / denominator[None, :]))
      gmi[variant] = np.array(decomposed)
      direct_gmi[variant] = np.array(direct)

    e0_cm = _ToyE0Cm(input_probs, transitions, rho=1.0)
    e0_direct, e0_factored = _ToyE0Bicm(input_probs, labels, table,
                                        bit_metrics, joint, rho=1.0, s=0.5)

  identity_error = max(
      float(np.max(np.abs(gmi[variant] - direct_gmi[variant])))
      for variant in rates.METRIC_VARIANTS)
  identity_error = max(identity_error, abs(e0_direct - e0_factored))
  if identity_error > IDENTITY_TOLERANCE:
    logger.error('Decomposition identity off by {0:.3g}'.format(
        identity_error))
  unit = np.flatnonzero(np.isclose(s_values, 1.0))
  classical_gap = (sum(bit_informations) - float(
      gmi[rates.CLASSICAL][unit[0]]) if unit.size else float('nan'))
  return DiscreteCheckReport(
      bit_marginals=(float(marginals.p0[0]), float(marginals.p0[1])),
      mutual_information=mutual_information,
      input_entropy=qam.SymbolDistribution(input_probs).Entropy(),
      bit_entropies=marginals.Entropy(),
      bit_informations=bit_informations,
      s_grid=s_values,
      gmi=gmi,
      direct_gmi=direct_gmi,
      e0_cm=e0_cm,
      e0_bicm_direct=e0_direct,
      e0_bicm_factored=e0_factored,
      identity_error=identity_error,
      classical_gap=classical_gap)


def _ToyE0Cm(input_probs: np.ndarray, transitions: np.ndarray,
             rho: float) -> float:
  """Matched Gallager function of the toy channel."""
  total = 0.0
  for x, p_x in enumerate(input_probs):
    for y in range(transitions.shape[1]):
      weight = p_x * transitions[x, y]
      if weight <= 0:
        continue
      inner = np.sum(input_probs * (transitions[:, y] / transitions[x, y])
                     ** (1.0 / (1.0 + rho)))
      total += weight * inner ** rho
  return -math.log(total)


def _ToyE0Bicm(input_probs: np.ndarray, labels: np.ndarray,
               table: np.ndarray, bit_metrics: List[np.ndarray],
               joint: np.ndarray, rho: float, s: float) -> Tuple[float, float]:
  """BICM Gallager function of the toy channel, two ways."""
  symbol_metric = bit_metrics[0][labels[:, 0]] * bit_metrics[1][labels[:, 1]]
  direct, factored = 0.0, 0.0
  for x in range(labels.shape[0]):
    for y in range(joint.shape[1]):
      weight = joint[x, y]
      if weight <= 0:
        continue
      ratio = (symbol_metric[:, y] / symbol_metric[x, y]) ** s
      direct += weight * float(np.sum(input_probs * ratio)) ** rho
      product = 1.0
      for position, metric in enumerate(bit_metrics):
        own = metric[labels[x, position], y]
        product *= float(np.sum(table[position] * (metric[:, y] / own) ** s))
      factored += weight * product ** rho
  return -math.log(direct), -math.log(factored)


def ProductSumIdentity(table: np.ndarray) -> Tuple[float, float]:
  """Sum over all labels of prod_j f_j(b_j), directly and factored.

  Args:
    table (np.ndarray): (m, 2) nonnegative table f_j(b).

  Returns:
    Tuple[float, float]: sum_b prod_j f_j(b_j) and prod_j sum_b f_j(b).
  """
  values = np.asarray(table, dtype=float)
  direct = 0.0
  for label in itertools.product((0, 1), repeat=values.shape[0]):
    direct += float(np.prod(values[np.arange(values.shape[0]), label]))
  return direct, float(np.prod(values.sum(axis=1)))


def GridScan(parameter_map: qam.ParameterMap,
             objective: Callable[[np.ndarray], float],
             resolution: int = DEFAULT_GRID_RESOLUTION
            ) -> Tuple[np.ndarray, float]:
  """Evaluate a shaping objective on a dense grid of free parameters.

  One parameter is scanned on resolution points of (epsilon, 1 - epsilon),
  two on the resolution x resolution product grid (restricted to the
  simplex for CM).

  Args:
    parameter_map (ParameterMap): The free parameters.
    objective (Callable): theta -> rate.
    resolution (int): Optional. Points per parameter.

  Returns:
    Tuple[np.ndarray, float]: The best grid point and its value.

  Raises:
    ValueError: For more than two free parameters.
  """
  dimension = parameter_map.num_parameters
  if dimension == 0:
    theta = np.zeros(0)
    return theta, objective(theta)
  if dimension > 2:
    raise ValueError('Grid scans support at most two free parameters, got '
                     '{0:d}'.format(dimension))
  axis = np.linspace(common.PROBABILITY_EPSILON,
                     1.0 - common.PROBABILITY_EPSILON, resolution)
  if dimension == 1:
    points = [np.array([value]) for value in axis]
  else:
    points = [np.array(pair) for pair in itertools.product(axis, axis)]
    if parameter_map.scheme == common.CM:
      points = [point for point in points if point.sum() < 1.0]
  best_theta, best_value = points[0], -np.inf
  for point in points:
    value = objective(point)
    if value > best_value:
      best_theta, best_value = point, value
  return best_theta, float(best_value)

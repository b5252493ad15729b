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
"""Capacity-achieving shaping for CM, MLC and BICM.

The optimizers work in unconstrained coordinates (logistic or additive
logistic maps of the free parameters) and renormalize the constellation
energy inside the objective.
"""

import dataclasses
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy import optimize

from libbicmshaping import logging_utils
from libbicmshaping import rates
from libbicmshaping.internal import channel as awgn
from libbicmshaping.internal import common
from libbicmshaping.internal import constellation as qam

logging_utils.SetUpLogger(__name__)
logger = logging_utils.GetLogger(__name__)

RESTARTS = 5
MAX_ITERATIONS = 500
SIMPLEX_TOLERANCE = 1e-7
RESTART_SEED = 1008
INITIAL_STEP = 0.5
PERTURBATION_SCALE = 1.5
GOLDEN_TOLERANCE = 1e-9


@dataclasses.dataclass
class ShapingResult:
  """Outcome of a shaping optimization.

  Attributes:
    scheme (str): One of common.CM, common.MLC, common.BICM.
    snr (float): Linear snr.
    rate_nats (float): Optimized rate in nats.
    theta (np.ndarray): Optimal free parameters.
    distribution (SymbolDistribution): Expanded symbol distribution.
    marginals (BitMarginals): Expanded bit marginals, None for CM.
    constellation (Constellation): Constellation normalized under the
        optimal distribution.
    restarts (int): Number of Nelder-Mead runs.
    iterations (int): Total Nelder-Mead iterations.
    gap (float): Best minus second-best restart value, in nats.
    converged (bool): False if no restart met the simplex tolerance.
  """
  scheme: str
  snr: float
  rate_nats: float
  theta: np.ndarray
  distribution: qam.SymbolDistribution
  marginals: Optional[qam.BitMarginals]
  constellation: qam.Constellation
  restarts: int = 0
  iterations: int = 0
  gap: float = 0.0
  converged: bool = True

  @property
  def rate_bits(self) -> float:
    """Optimized rate in bits."""
    return common.NatsToBits(self.rate_nats)

  def AsDict(self) -> Dict[str, Any]:
    """JSON-friendly view of the result."""
    report = {
        'scheme': self.scheme,
        'snr': self.snr,
        'snr_db': (common.LinearToDecibels(self.snr) if self.snr > 0
                   else float('-inf')),
        'rate_nats': self.rate_nats,
        'rate_bits': self.rate_bits,
        'theta': self.theta.tolist(),
        'symbol_probabilities': self.distribution.probs.tolist(),
        'scale': self.constellation.scale,
        'restarts': self.restarts,
        'iterations': self.iterations,
        'gap': self.gap,
        'converged': self.converged,
    }  # type: Dict[str, Any]
    if self.marginals is not None:
      report['bit_marginals'] = self.marginals.p0.tolist()
    return report


def ShapingObjective(
    scheme: str,
    constellation: qam.Constellation,
    channel: awgn.ChannelSpec,
    rule: Optional[awgn.QuadratureRule] = None
) -> Tuple[qam.ParameterMap, Callable[[np.ndarray], float]]:
  """Rate as a function of the free shaping parameters.

  Args:
    scheme (str): One of common.CM, common.MLC, common.BICM.
    constellation (Constellation): Unnormalized constellation; it is
        rescaled to unit energy for every parameter value.
    channel (ChannelSpec): The channel.
    rule (QuadratureRule): Optional. Defaults to order 64.

  Returns:
    Tuple[ParameterMap, Callable]: The parameter map and the objective.
  """
  parameter_map = qam.FreeParameterMap(constellation.m, scheme, constellation)
  rule = rule or awgn.GaussHermite(common.DEFAULT_QUADRATURE_ORDER)

  def Objective(theta: np.ndarray) -> float:
    expanded = parameter_map.Expand(theta)
    distribution = parameter_map.Distribution(theta, constellation)
    normalized = qam.Normalize(constellation, distribution)
    if scheme == common.BICM:
      return rates.BicmRate(normalized, expanded, channel, rule)
    return rates.MutualInformation(normalized, distribution, channel, rule)

  return parameter_map, Objective


def _StartingPoints(parameter_map: qam.ParameterMap,
                    seed: int) -> List[np.ndarray]:
  """Uniform start followed by RESTARTS - 1 pinned perturbations."""
  center = parameter_map.ToUnconstrained(parameter_map.Barycenter())
  rng = np.random.Generator(np.random.PCG64(seed))
  perturbations = rng.standard_normal(
      (RESTARTS - 1, parameter_map.num_parameters)) * PERTURBATION_SCALE
  return [center] + [center + delta for delta in perturbations]


def Optimize(scheme: str,
             m: int,
             channel: awgn.ChannelSpec,
             rule: Optional[awgn.QuadratureRule] = None,
             constellation: Optional[qam.Constellation] = None,
             seed: int = RESTART_SEED) -> ShapingResult:
  """Maximize the rate of a scheme over its symmetric shaping parameters.

  Args:
    scheme (str): One of common.CM, common.MLC, common.BICM.
    m (int): Number of label bits, even.
    channel (ChannelSpec): The channel.
    rule (QuadratureRule): Optional. Defaults to order 64.
    constellation (Constellation): Optional. Labeled constellation to
        shape, BuildQAM(m) by default.
    seed (int): Optional. Seed of the pinned restart perturbations.

  Returns:
    ShapingResult: The best point found.

  Raises:
    ValueError: If m is odd or the scheme is unknown.
  """
  base = constellation or qam.BuildQAM(m)
  parameter_map, objective = ShapingObjective(scheme, base, channel, rule)

  candidates = []  # type: List[Tuple[float, np.ndarray]]
  iterations = 0
  restarts = 0
  converged = parameter_map.num_parameters == 0
  if parameter_map.num_parameters == 0:
    theta = np.zeros(0)
    candidates.append((objective(theta), theta))
  else:
    dimension = parameter_map.num_parameters
    candidates.append(
        (objective(parameter_map.Barycenter()), parameter_map.Barycenter()))
    for start in _StartingPoints(parameter_map, seed):
      simplex = np.vstack([start, start + INITIAL_STEP * np.eye(dimension)])
      outcome = optimize.minimize(
          lambda u: -objective(parameter_map.FromUnconstrained(u)),
          start,
          method='Nelder-Mead',
          options={
              'initial_simplex': simplex,
              'xatol': SIMPLEX_TOLERANCE,
              'fatol': np.inf,
              'maxiter': MAX_ITERATIONS
          })
      restarts += 1
      iterations += int(outcome.nit)
      converged = converged or bool(outcome.success)
      candidates.append(
          (-float(outcome.fun), parameter_map.FromUnconstrained(outcome.x)))
      logger.debug('{0:s} restart {1:d}: {2:.12f} nats after {3:d} '
                   'iterations'.format(scheme, restarts, -float(outcome.fun),
                                       int(outcome.nit)))
    if dimension == 1:
      theta_star, value, _ = common.GoldenSectionMaximize(
          lambda t: objective(np.array([t])), common.PROBABILITY_EPSILON,
          1.0 - common.PROBABILITY_EPSILON, tolerance=GOLDEN_TOLERANCE)
      candidates.append((value, np.array([theta_star])))

  candidates.sort(key=lambda candidate: -candidate[0])
  best_value, best_theta = candidates[0]
  gap = best_value - candidates[1][0] if len(candidates) > 1 else 0.0
  if not converged:
    logger.warning('{0:s} shaping at snr {1:g}: no restart converged within '
                   '{2:d} iterations'.format(scheme, channel.snr,
                                             MAX_ITERATIONS))
  expanded = parameter_map.Expand(best_theta)
  distribution = parameter_map.Distribution(best_theta, base)
  logger.debug('{0:s} optimum {1:.12f} nats at theta {2!s}'.format(
      scheme, best_value, best_theta.tolist()))
  return ShapingResult(
      scheme=scheme,
      snr=channel.snr,
      rate_nats=best_value,
      theta=best_theta,
      distribution=distribution,
      marginals=(expanded if isinstance(expanded, qam.BitMarginals)
                 else None),
      constellation=qam.Normalize(base, distribution),
      restarts=restarts,
      iterations=iterations,
      gap=gap,
      converged=converged)


def OptimizeCM(m: int,
               channel: awgn.ChannelSpec,
               rule: Optional[awgn.QuadratureRule] = None) -> ShapingResult:
  """C_cm over the per-dimension symmetric amplitude distributions."""
  return Optimize(common.CM, m, channel, rule)


def OptimizeMLC(m: int,
                channel: awgn.ChannelSpec,
                rule: Optional[awgn.QuadratureRule] = None) -> ShapingResult:
  """C_mlc: mutual information over product-form bit marginals."""
  return Optimize(common.MLC, m, channel, rule)


def OptimizeBICM(m: int,
                 channel: awgn.ChannelSpec,
                 rule: Optional[awgn.QuadratureRule] = None) -> ShapingResult:
  """C_bicm: BICM rate over product-form bit marginals."""
  return Optimize(common.BICM, m, channel, rule)

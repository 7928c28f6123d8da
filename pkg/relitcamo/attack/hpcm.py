#!/usr/bin/env python3

'''

   Copyright 2026 The relitcamo Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

     http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.

'''

## @file
#
#  Hard configuration mining.  Every cell of the configuration space has a difficulty score,
#  a momentum average of the losses seen there.  Cells are drawn with softmax probabilities over
#  the scores, so the optimizer keeps coming back to where the attack still fails.
#
#  Drawing with the softmax of the current losses and averaging the gradients is, in
#  expectation, the gradient of the log-sum-exp of the losses, τ·log Σ exp(L_i/τ), a smooth
#  upper bound on the worst cell:
#
#      max L ≤ LSE ≤ max L + τ·log M
#
#  The functions for the objective, its gradient weights and the bound are here too.

import csv

import numpy as np

from relitcamo import exceptions
from relitcamo import log
from relitcamo import paths
from relitcamo.scene import io

_log = log.GetLogger(__name__)

## Tolerance of CheckBounds.
BOUND_TOLERANCE = 1e-9

## Softmax of values/tau, shifted by the maximum so nothing overflows.
def Softmax(values, tau):
    values = np.asarray(values, dtype=np.float64)
    e = np.exp( (values - values.max() ) / tau)
    return e / e.sum()

def _losses(losses):
    losses = np.asarray(losses, dtype=np.float64).reshape(-1)
    if losses.shape[0] == 0:
        raise exceptions.rcValidationError("need at least one loss", "losses")
    if not np.all(np.isfinite(losses) ):
        raise exceptions.rcNumericError("losses are not finite")
    return losses

def _tau(tau):
    tau = float(tau)
    if not tau > 0.0:
        raise exceptions.rcConfigError("tau: must be positive, got " + repr(tau) )
    return tau


## @class GlobalDifficultyTable
#
#  The per-cell difficulty scores.  One writer at a time: UpdateScore is not synchronized.
class GlobalDifficultyTable(object):
    __scores = None
    __mu = None
    __tau = None
    __init_value = None

    def __init__(self, q, init_value=10.0, mu=0.5, tau=1.0):
        q = int(q)
        if q < 1:
            raise exceptions.rcConfigError("the difficulty table needs at least one cell, got q=" + str(q) )
        mu = float(mu)
        if not 0.0 <= mu < 1.0:
            raise exceptions.rcConfigError("mu: must be in [0, 1), got " + repr(mu) )
        self.__tau = _tau(tau)
        self.__mu = mu
        self.__init_value = float(init_value)
        if not np.isfinite(self.__init_value):
            raise exceptions.rcConfigError("init_score: must be finite")
        self.__scores = np.full(q, self.__init_value)

    def Q(self):
        return self.__scores.shape[0]

    def __len__(self):
        return self.Q()

    def Mu(self):
        return self.__mu

    def Tau(self):
        return self.__tau

    def InitValue(self):
        return self.__init_value

    def Scores(self):
        return self.__scores.copy()

    def Score(self, i):
        return float(self.__scores[i])

    ## Replaces every score, i.e. when resuming from a checkpoint.
    def SetScores(self, scores):
        scores = np.asarray(scores, dtype=np.float64)
        if scores.shape != self.__scores.shape:
            raise exceptions.rcValidationError("expected " + str(self.Q() ) + " scores, got " + str(scores.shape), "scores")
        if not np.all(np.isfinite(scores) ):
            raise exceptions.rcNumericError("difficulty scores are not finite")
        self.__scores = scores.copy()

    ## s_i ← μ·s_i + (1−μ)·L.  Only cell i changes.
    def UpdateScore(self, i, L_curr):
        i = int(i)
        if i < 0 or i >= self.Q():
            raise exceptions.rcValidationError("cell index " + str(i) + " out of range [0, " + str(self.Q() ) + ")", "cell")
        L_curr = float(L_curr)
        if not np.isfinite(L_curr):
            raise exceptions.rcNumericError("loss for cell " + str(i) + " is not finite")
        self.__scores[i] = self.__mu * self.__scores[i] + (1.0 - self.__mu) * L_curr

    def Copy(self):
        t = GlobalDifficultyTable(self.Q(), self.__init_value, self.__mu, self.__tau)
        t.SetScores(self.__scores)
        return t

def InitTable(q, init_value=10.0, mu=0.5, tau=1.0):
    return GlobalDifficultyTable(q, init_value, mu, tau)

## P(i) = exp(s_i/τ) / Σ_j exp(s_j/τ)
def SamplingProbs(table):
    return Softmax(table.Scores(), table.Tau() )

## Inverse-CDF draw of one index from a probability vector.
def SampleIndex(probs, u):
    cdf = np.cumsum(probs)
    i = int(np.searchsorted(cdf, u * cdf[-1], side='right') )
    return min(i, probs.shape[0] - 1)

## Draws a cell by difficulty.  Returns (index, advanced rng state).
def SampleConfig(table, rng_state):
    u, rng_state = rng_state.Uniform()
    return SampleIndex(SamplingProbs(table), u), rng_state

## Draws a cell uniformly from the same stream.  Returns (index, advanced rng state).
def SampleUniform(q, rng_state):
    u, rng_state = rng_state.Uniform()
    return SampleIndex(np.full(int(q), 1.0 / int(q) ), u), rng_state

## τ·log Σ exp(L_i/τ)
def LseObjective(losses, tau):
    losses = _losses(losses)
    tau = _tau(tau)
    m = losses.max()
    return float(m + tau * np.log(np.exp( (losses - m) / tau).sum() ) )

## ∂LSE/∂L_i, which is the softmax of the losses.
def LseGradientWeights(losses, tau):
    return Softmax(_losses(losses), _tau(tau) )

## Returns (max, lse, upper) and makes sure max ≤ lse ≤ upper = max + τ·log M.
def CheckBounds(losses, tau):
    losses = _losses(losses)
    tau = _tau(tau)
    m = float(losses.max() )
    lse = LseObjective(losses, tau)
    upper = m + tau * float(np.log(losses.shape[0]) )
    if lse < m - BOUND_TOLERANCE or lse > upper + BOUND_TOLERANCE:
        raise exceptions.rcNumericError("log-sum-exp bound violated: max %r, lse %r, upper %r" % (m, lse, upper) )
    return m, lse, upper

## Writes the table as CSV: cell_index,pitch,azimuth,distance,env,score,prob
def ExportTable(table, space, path):
    if table.Q() != space.Q():
        raise exceptions.rcValidationError("table has " + str(table.Q() ) + " cells, space has " + str(space.Q() ), "table")
    probs = SamplingProbs(table)
    scores = table.Scores()
    with paths.OpenFile(path, 'w') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['cell_index', 'pitch', 'azimuth', 'distance', 'env', 'score', 'prob'])
        for i in range(table.Q() ):
            cfg = space.ConfigOf(i)
            writer.writerow([i, io.FormatFloat(cfg.pitch), io.FormatFloat(cfg.azimuth), io.FormatFloat(cfg.distance),
                             cfg.env, io.FormatFloat(scores[i]), repr(float(probs[i]) )])

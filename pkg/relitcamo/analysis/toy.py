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
#  A toy attack problem, cheap enough to run thousands of iterations in a test.  There is a
#  12×10 azimuth by pitch grid of cells and a 16-dimensional "albedo" a, and the loss of cell i
#  is
#
#      L_i(a) = sigmoid(w_iᵀa + b_i)
#
#  Most cells agree on which way is down.  A handful of hard cells start out much higher and
#  mostly disagree with the rest, so an average over all cells pushes them up, and only an
#  optimizer that keeps visiting them finds the direction that helps everybody.
#
#  The sampler, table and random stream are the same ones the real attack uses.

import numpy as np

from relitcamo import exceptions
from relitcamo import log
from relitcamo.analysis import landscape
from relitcamo.attack import hpcm
from relitcamo.attack import rng
from relitcamo.scene import model

_log = log.GetLogger(__name__)

AZIMUTHS = 12
PITCHES = 10
DIM = 16
HARD_CELLS = 8

## Defaults of the toy A/B comparison.
TOY_DEFAULTS = {
    'iters' : 2000,
    'lr' : 0.5,
    'batch' : 8,
    'tau' : 0.2,
    'mu' : 0.5,
    'init_score' : 10.0,
}

def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z) )


## @class ToyProblem
class ToyProblem(object):
    __seed = None
    ## q×DIM
    __w = None
    __b = None
    __hard = None
    __space = None

    def __init__(self, seed=0):
        self.__seed = int(seed)
        gen = np.random.Generator(np.random.Philox(key=self.__seed) )
        q = AZIMUTHS * PITCHES

        u = gen.normal(size=DIM)
        u /= np.linalg.norm(u)
        v = gen.normal(size=DIM)
        v -= np.dot(v, u) * u
        v /= np.linalg.norm(v)

        hard = np.sort(gen.permutation(q)[:HARD_CELLS])
        w = 2.0 * u[None, :] + gen.normal(0.0, 0.1, size=(q, DIM) )
        b = gen.uniform(-1.0, 0.5, size=q)
        w[hard] = 2.0 * (0.8 * v - 0.6 * u)[None, :] + gen.normal(0.0, 0.1, size=(HARD_CELLS, DIM) )
        b[hard] = gen.uniform(2.0, 3.0, size=HARD_CELLS)

        self.__w = w
        self.__b = b
        self.__hard = hard
        self.__space = model.DiscretizeSpace([ 10.0 * a for a in range(PITCHES) ],
                                             [ 30.0 * a for a in range(AZIMUTHS) ],
                                             [10.0], ["toy"])

    def Seed(self):
        return self.__seed

    def Q(self):
        return self.__b.shape[0]

    def Dim(self):
        return DIM

    def HardCells(self):
        return self.__hard.copy()

    ## The toy's configuration space: pitch by azimuth, one distance, one environment.
    def Space(self):
        return self.__space

    def Losses(self, a):
        return _sigmoid(self.__w @ np.asarray(a, dtype=np.float64) + self.__b)

    def Loss(self, i, a):
        return float(_sigmoid(np.dot(self.__w[i], a) + self.__b[i]) )

    ## ∂L_i/∂a = L_i·(1 − L_i)·w_i
    def Gradient(self, i, a):
        L = self.Loss(i, a)
        return L * (1.0 - L) * self.__w[i]

    ## All q gradients, q×DIM.
    def Gradients(self, a):
        L = self.Losses(a)
        return (L * (1.0 - L) )[:, None] * self.__w

    def Grid(self, a):
        return landscape.LandscapeGrid(self.__space, self.Losses(a) )

## Runs the attack loop on the toy problem, with plain gradient descent and no clamping.
#
#  @param mode "eot" or "hpcm"
#  @return a dictionary with the final params, the final per-cell losses, the metrics of the
#          final landscape (max, mean, max_minus_mean, variance) and the batch loss history.
def RunToyAttack(problem, mode, iters=2000, lr=0.5, batch=8, seed=0, tau=0.2, mu=0.5, init_score=10.0):
    if mode not in ('eot', 'hpcm'):
        raise exceptions.rcConfigError("mode: must be eot or hpcm, got " + repr(mode) )
    q = problem.Q()
    a = np.zeros(problem.Dim() )
    stream = rng.RngState(seed, 0)
    table = hpcm.InitTable(q, init_score, mu, tau)
    uniform = np.full(q, 1.0 / q)
    history = []

    for it in range(int(iters) ):
        probs = hpcm.SamplingProbs(table) if mode == 'hpcm' else uniform
        u, stream = stream.Uniforms(batch)
        cells = [ hpcm.SampleIndex(probs, x) for x in u ]

        grad = np.zeros_like(a)
        total = 0.0
        losses = []
        for c in cells:
            L = problem.Loss(c, a)
            losses.append(L)
            total += L
            grad += problem.Gradient(c, a)
        a = a - lr * grad / len(cells)
        history.append(total / len(cells) )

        if mode == 'hpcm':
            for c, L in zip(cells, losses):
                table.UpdateScore(c, L)

    grid = problem.Grid(a)
    return {
        'params' : a,
        'losses' : grid.Losses(),
        'metrics' : landscape.FlatnessMetrics(grid),
        'history' : history,
    }

## Runs EoT and HPCM on the toy problem of every seed with the same budget.
#
#  @return a list of { "seed", "eot", "hpcm" } with the metrics of both runs.
def CompareModes(seeds=range(10), **args):
    settings = dict(TOY_DEFAULTS)
    settings.update(args)
    results = []
    for s in seeds:
        problem = ToyProblem(s)
        row = { 'seed' : int(s) }
        for mode in ('eot', 'hpcm'):
            row[mode] = RunToyAttack(problem, mode, seed=s, **settings)['metrics']
        _log.debug("toy seed %d: eot max %.4f gap %.4f, hpcm max %.4f gap %.4f", s,
                   row['eot']['max'], row['eot']['max_minus_mean'], row['hpcm']['max'], row['hpcm']['max_minus_mean'])
        results.append(row)
    return results

## How many seeds HPCM won on both the max and the max−mean gap.
def CountWins(results):
    return sum(1 for r in results
               if r['hpcm']['max'] < r['eot']['max'] and r['hpcm']['max_minus_mean'] < r['eot']['max_minus_mean'])

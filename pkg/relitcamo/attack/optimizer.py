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
#  The attack loop.  Each step draws a batch of cells (uniformly for EoT, by difficulty for
#  HPCM), renders each cell's frame with the current camo albedo, scores it with the detector
#  and pulls the detection loss back to the albedo.  The batch gradient is the mean over the
#  batch, and the optimizer moves the albedo against it, clamped to [0,1].  In HPCM mode the
#  loss of every drawn cell also feeds its difficulty score.
#
#  Steps never modify the state they're given.  A failed step leaves the caller with the state
#  from before it, which is what makes checkpoints and resuming exact.

import csv

import numpy as np

from relitcamo import callback
from relitcamo import exceptions
from relitcamo import log
from relitcamo import parallel
from relitcamo import paths
from relitcamo.attack import checkpoint
from relitcamo.attack import config as runconfig
from relitcamo.attack import frames
from relitcamo.attack import hpcm
from relitcamo.attack import rng

_log = log.GetLogger(__name__)

## How many times DescentStep halves the learning rate before giving up.
MAX_HALVINGS = 20


## @class Optimizer
#
#  Turns a gradient into an update.  Optimizers are stateless objects; whatever state they need
#  (moments and the like) is a flat float64 vector passed in and handed back, so it can live in
#  the attack state and in checkpoints.
class Optimizer(object):
    _size = None
    _config = None

    ## @param size the number of parameters.
    #  @param config the RunConfig, for the learning rate and friends.
    def __init__(self, **args):
        self._size = int(args['size'])
        self._config = args['config']

    def InitialState(self):
        return np.zeros(0)

    ## Returns (new params, new state).  params are float32 and stay that way, the arithmetic
    #  is done in float64.
    def Update(self, params, grad, state, lr):
        raise exceptions.rcExceptionNotImplemented("Update must be implemented by " + type(self).__name__)

    def _finish(self, params, step):
        new = np.clip(params.astype(np.float64) - step, 0.0, 1.0).astype(np.float32)
        if not np.all(np.isfinite(new) ):
            raise exceptions.rcNumericError("albedo update is not finite")
        return new

## @class SgdOptimizer
#
#  a ← clamp(a − η·g, 0, 1)
class SgdOptimizer(Optimizer):
    def Update(self, params, grad, state, lr):
        return self._finish(params, lr * grad), state

## @class AdamWOptimizer
#
#  Adam with decoupled weight decay.  The state is [t, m_1..m_n, v_1..v_n].
class AdamWOptimizer(Optimizer):
    def InitialState(self):
        return np.zeros(1 + 2 * self._size)

    def Update(self, params, grad, state, lr):
        if state.shape[0] != 1 + 2 * self._size:
            raise exceptions.rcValidationError("AdamW state has " + str(state.shape[0]) + " values, expected " + str(1 + 2 * self._size), "optimizer_state")
        b1 = self._config.adam_beta1
        b2 = self._config.adam_beta2
        eps = self._config.adam_eps
        wd = self._config.weight_decay

        n = self._size
        t = state[0] + 1.0
        m = b1 * state[1:1 + n] + (1.0 - b1) * grad
        v = b2 * state[1 + n:] + (1.0 - b2) * grad * grad
        mhat = m / (1.0 - b1 ** t)
        vhat = v / (1.0 - b2 ** t)
        step = lr * (mhat / (np.sqrt(vhat) + eps) + wd * params.astype(np.float64) )
        return self._finish(params, step), np.concatenate([[t], m, v])


## @class AttackState
#
#  Where an attack is.  Immutable: every step returns a new one.
class AttackState(object):
    __albedo = None
    __iteration = None
    __rng = None
    __history = None
    __table = None
    __optimizer_state = None
    __config = None

    ## Keyword arguments: albedo (flat camo albedos), iteration, rng (an RngState), history,
    #  table (a GlobalDifficultyTable, or None for EoT), optimizer_state and config.
    def __init__(self, **args):
        self.__albedo = np.array(args['albedo'], dtype=np.float32).reshape(-1)
        if np.any(self.__albedo < 0.0) or np.any(self.__albedo > 1.0) or not np.all(np.isfinite(self.__albedo) ):
            raise exceptions.rcValidationError("albedo parameters must be in [0,1]", "albedo")
        self.__albedo.setflags(write=False)
        self.__iteration = int(args.get('iteration', 0) )
        self.__rng = args['rng']
        self.__history = tuple(float(a) for a in args.get('history', () ) )
        self.__table = args.get('table')
        self.__optimizer_state = np.array(args.get('optimizer_state', () ), dtype=np.float64)
        self.__optimizer_state.setflags(write=False)
        self.__config = args['config']

        if len(self.__history) != self.__iteration:
            raise exceptions.rcValidationError("history has " + str(len(self.__history) ) + " entries at iteration " + str(self.__iteration), "history")

    def Albedo(self):
        return self.__albedo

    def Iteration(self):
        return self.__iteration

    def Rng(self):
        return self.__rng

    def History(self):
        return list(self.__history)

    def Table(self):
        return self.__table

    def OptimizerState(self):
        return self.__optimizer_state

    def Config(self):
        return self.__config

    def Mode(self):
        return self.__config.mode

    def Seed(self):
        return self.__rng.Seed()

    def LearningRate(self):
        return self.__config.lr

    def BatchSize(self):
        return self.__config.batch

    ## The state as a checkpoint.
    def Checkpoint(self):
        scores = self.__table.Scores() if self.__table is not None else np.zeros(0)
        return checkpoint.Checkpoint(iteration=self.__iteration, seed=self.__rng.Seed(), counter=self.__rng.Counter(),
                                     mode=self.Mode(), albedo=self.__albedo, scores=scores,
                                     history=np.array(self.__history), optimizer_state=self.__optimizer_state)

## The state an attack starts from: the scene's camo albedos, a fresh table, and the rng at the
#  start of the config's seed.
def InitialState(scene, config):
    cloud = scene.Cloud()
    albedo = cloud.Albedos()[cloud.CamoIndices()].reshape(-1)
    table = None
    if config.mode == 'hpcm':
        table = hpcm.InitTable(scene.Space().Q(), config.init_score, config.mu, config.tau)
    opt = config.Optimizer(albedo.shape[0])
    return AttackState(albedo=albedo, iteration=0, rng=rng.RngState(config.seed, 0), history=(),
                       table=table, optimizer_state=opt.InitialState(), config=config)

## Rebuilds a state from a checkpoint.  The checkpoint has to belong to this scene and config.
def StateFromCheckpoint(ckpt, scene, config):
    if ckpt.mode != config.mode:
        raise exceptions.rcConfigError("checkpoint is from a " + ckpt.mode + " run, the config says " + config.mode)
    if ckpt.seed != config.seed:
        raise exceptions.rcConfigError("checkpoint is from seed " + str(ckpt.seed) + ", the config says " + str(config.seed) )
    size = 3 * len(scene.Cloud().CamoIndices() )
    if ckpt.albedo.shape[0] != size:
        raise exceptions.rcValidationError("checkpoint has " + str(ckpt.albedo.shape[0]) + " albedo values, the scene has " + str(size), "checkpoint.albedo")

    table = None
    if config.mode == 'hpcm':
        table = hpcm.InitTable(scene.Space().Q(), config.init_score, config.mu, config.tau)
        table.SetScores(ckpt.scores)
    return AttackState(albedo=ckpt.albedo, iteration=ckpt.iteration, rng=rng.RngState(ckpt.seed, ckpt.counter),
                       history=ckpt.history, table=table, optimizer_state=ckpt.optimizer_state, config=config)


## @class AttackContext
#
#  What the steps of one attack share: the frame cache, the optimizer and the frozen albedos.
class AttackContext(object):
    __scene = None
    __detector = None
    __config = None
    __frames = None
    __optimizer = None
    __base = None
    __camo = None

    ## @param frame_capacity how many frames to keep built, see frames.FrameCache.
    def __init__(self, scene, detector, config, space=None, frame_capacity=frames.MAX_FRAMES):
        self.__scene = scene
        self.__detector = detector
        self.__config = config
        self.__frames = frames.FrameCache(scene, config, space, frame_capacity)
        self.__base = scene.Cloud().Albedos()
        self.__base.setflags(write=False)
        self.__camo = scene.Cloud().CamoIndices()
        self.__optimizer = config.Optimizer(3 * self.__camo.shape[0])

    def Scene(self):
        return self.__scene

    def Detector(self):
        return self.__detector

    def Config(self):
        return self.__config

    def Frames(self):
        return self.__frames

    def Optimizer(self):
        return self.__optimizer

    def CamoIndices(self):
        return self.__camo

    ## Full N×3 albedos with the camo rows taken from params.
    def Albedos(self, params):
        albedos = self.__base.copy()
        albedos[self.__camo] = np.asarray(params, dtype=np.float64).reshape(-1, 3)
        return albedos

    ## Loss and flat camo gradient of one cell.
    def CellLossAndGradient(self, cell, params):
        loss, grad = frames.FrameLossAndGradient(self.__frames.Get(cell), self.Albedos(params), self.__detector)
        return loss, grad[self.__camo].reshape(-1)

    def CellLoss(self, cell, params):
        return frames.FrameLoss(self.__frames.Get(cell), self.Albedos(params), self.__detector)

## Draws the cells of one batch.  Every lane takes the next draw of the stream; EoT and HPCM
#  use the same uniforms, so they pick the same cells while the table is still flat.
def DrawBatch(state, q):
    if state.Mode() == 'hpcm':
        probs = hpcm.SamplingProbs(state.Table() )
    else:
        probs = np.full(q, 1.0 / q)
    u, nextRng = state.Rng().Uniforms(state.BatchSize() )
    return [ hpcm.SampleIndex(probs, a) for a in u ], nextRng

## One step of the attack.  Returns the new state; the one passed in is left alone.
def AttackStep(state, scene, detector, context=None):
    if context is None:
        context = AttackContext(scene, detector, state.Config() )
    space = context.Frames().Space()

    cells, nextRng = DrawBatch(state, space.Q() )
    _log.debug("iteration %d: cells %s", state.Iteration() + 1, cells)

    params = state.Albedo()
    results = parallel.MapOrdered(lambda cell: context.CellLossAndGradient(cell, params), cells)

    grad = np.zeros(params.shape[0])
    total = 0.0
    for loss, g in results:
        grad += g
        total += loss
    grad /= len(cells)
    mean = total / len(cells)
    if not (np.isfinite(mean) and np.all(np.isfinite(grad) ) ):
        raise exceptions.rcNumericError("non-finite batch loss or gradient at iteration " + str(state.Iteration() + 1) )

    newParams, optState = context.Optimizer().Update(params, grad, state.OptimizerState(), state.LearningRate() )

    table = state.Table()
    if table is not None:
        table = table.Copy()
        for cell, (loss, g) in zip(cells, results):
            table.UpdateScore(cell, loss)

    return AttackState(albedo=newParams, iteration=state.Iteration() + 1, rng=nextRng,
                       history=state.History() + [mean], table=table, optimizer_state=optState,
                       config=state.Config() )

## Where the periodic checkpoint of an iteration goes.
def CheckpointPath(out_dir, iteration):
    return paths.JoinPaths(out_dir, "checkpoint_%06d.rpga" % iteration)

## Runs an attack up to config.iters iterations.
#
#  @param state where to start, i.e. a state restored from a checkpoint.  Defaults to
#               InitialState().
#  @param out_dir if given, checkpoints go there every config.checkpoint_every iterations, and
#                 the final state goes to final.rpga if any iteration was run.
#  @param callbacks a CallbackList.  Emits "step" (state), "checkpoint" (state, path) and
#                   "finish" (state).
#  @return (state, artifacts): artifacts maps "checkpoints" to the files written.
def RunAttack(scene, detector, config, state=None, out_dir=None, callbacks=None):
    context = AttackContext(scene, detector, config)
    if state is None:
        state = InitialState(scene, config)
    if callbacks is None:
        callbacks = callback.CallbackList()
    if out_dir is not None:
        paths.MkDir(out_dir)

    artifacts = { 'checkpoints' : [] }
    start = state.Iteration()
    every = config.checkpoint_every
    _log.info("%s attack: %d of %d iterations done, q=%d, batch %d, lr %g",
              config.mode, state.Iteration(), config.iters, context.Frames().Space().Q(), config.batch, config.lr)

    while state.Iteration() < config.iters:
        state = AttackStep(state, scene, detector, context)
        callbacks.Emit('step', counter=state.Iteration(), state=state)

        if out_dir is not None and every > 0 and state.Iteration() % every == 0:
            path = CheckpointPath(out_dir, state.Iteration() )
            checkpoint.WriteCheckpoint(path, state.Checkpoint() )
            artifacts['checkpoints'].append(path)
            callbacks.Emit('checkpoint', counter=state.Iteration(), state=state, path=path)

    if out_dir is not None and state.Iteration() > start:
        path = paths.JoinPaths(out_dir, "final.rpga")
        checkpoint.WriteCheckpoint(path, state.Checkpoint() )
        artifacts['checkpoints'].append(path)
        callbacks.Emit('checkpoint', counter=state.Iteration(), state=state, path=path)

    callbacks.Emit('finish', state=state)
    if state.Iteration() > 0:
        _log.info("attack finished at iteration %d, last batch loss %.6g", state.Iteration(), state.History()[-1])
    return state, artifacts

## A single-cell gradient step that backtracks: the learning rate is halved until the cell's
#  loss doesn't go up, at most MAX_HALVINGS times.
#
#  @return (params, loss, lr used).  If no step size works, the params come back unchanged
#          with a learning rate of 0.
def DescentStep(context, params, cell, lr):
    params = np.asarray(params, dtype=np.float32)
    loss, grad = context.CellLossAndGradient(cell, params)
    step = float(lr)
    for a in range(MAX_HALVINGS + 1):
        trial = np.clip(params.astype(np.float64) - step * grad, 0.0, 1.0).astype(np.float32)
        trialLoss = context.CellLoss(cell, trial)
        if trialLoss <= loss:
            return trial, trialLoss, step
        step *= 0.5
    return params, loss, 0.0

## Sweeps every cell with frozen albedos.  Returns the q losses in cell order.
#
#  @param albedo_params flat camo albedos.
#  @param space the space to sweep, the scene's own by default.
#  @param config a RunConfig for the rendering settings, defaults if None.
def EvaluateGrid(scene, detector, albedo_params, space=None, config=None, context=None):
    if context is None:
        context = AttackContext(scene, detector, config if config is not None else runconfig.RunConfig(), space, frame_capacity=0)
    q = context.Frames().Space().Q()
    params = np.asarray(albedo_params, dtype=np.float32)
    losses = np.array(parallel.MapOrdered(lambda cell: context.CellLoss(cell, params), range(q) ))
    if not np.all(np.isfinite(losses) ):
        raise exceptions.rcNumericError("grid sweep produced non-finite losses")
    return losses

## A copy of the scene with the camo albedos replaced.
def ApplyAlbedo(scene, albedo_params):
    cloud = scene.Cloud()
    albedos = cloud.Albedos()
    albedos[cloud.CamoIndices()] = np.asarray(albedo_params, dtype=np.float64).reshape(-1, 3)
    return scene.WithCloud(cloud.WithAlbedos(albedos) )

## Writes the loss history as CSV: iteration,mean_loss
def ExportHistory(history, path):
    with paths.OpenFile(path, 'w') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['iteration', 'mean_loss'])
        for i, loss in enumerate(history):
            writer.writerow([i + 1, repr(float(loss) )])

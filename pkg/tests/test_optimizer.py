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

import csv
import os

import numpy as np
import pytest

from relitcamo import callback
from relitcamo import exceptions
from relitcamo import parallel
from relitcamo.attack import checkpoint
from relitcamo.attack import config as runconfig
from relitcamo.attack import optimizer
from relitcamo.attack import rng

def _run(scene, config, **args):
    return optimizer.RunAttack(scene, config.Detector(), config, **args)


def test_sgd_clamps_to_the_unit_interval(small_config):
    opt = optimizer.SgdOptimizer(size=3, config=small_config)
    params = np.float32( [0.5, 0.02, 0.98] )
    new, state = opt.Update(params, np.array([1.0, 1.0, -1.0]), opt.InitialState(), 0.1)
    assert new.dtype == np.float32
    assert new.tolist() == pytest.approx([0.4, 0.0, 1.0])
    assert state.shape == (0,)

def test_adamw_first_step_is_the_learning_rate(small_config):
    opt = optimizer.AdamWOptimizer(size=3, config=small_config)
    state = opt.InitialState()
    assert state.shape == (7,)
    params = np.float32( [0.5, 0.5, 0.5] )
    new, state = opt.Update(params, np.array([3.0, -0.001, 0.0]), state, 0.01)
    assert new.tolist() == pytest.approx([0.49, 0.51, 0.5], abs=1e-6)
    assert state[0] == 1.0

def test_adamw_decays_weights(small_config):
    config = small_config.With(weight_decay=0.5)
    opt = optimizer.AdamWOptimizer(size=1, config=config)
    new, state = opt.Update(np.float32( [0.8] ), np.zeros(1), opt.InitialState(), 0.1)
    assert new[0] == pytest.approx(0.8 - 0.1 * 0.5 * 0.8, abs=1e-6)

def test_adamw_state_size(small_config):
    opt = optimizer.AdamWOptimizer(size=2, config=small_config)
    with pytest.raises(exceptions.rcValidationError):
        opt.Update(np.float32( [0.5, 0.5] ), np.zeros(2), np.zeros(3), 0.1)

def test_base_optimizer_is_abstract(small_config):
    with pytest.raises(exceptions.rcExceptionNotImplemented):
        optimizer.Optimizer(size=1, config=small_config).Update(np.float32( [0.5] ), np.zeros(1), np.zeros(0), 0.1)


def test_attack_state_checks_itself(small_config):
    with pytest.raises(exceptions.rcValidationError):
        optimizer.AttackState(albedo=[0.5, 1.5, 0.0], rng=rng.RngState(0), config=small_config)
    with pytest.raises(exceptions.rcValidationError):
        optimizer.AttackState(albedo=[0.5], iteration=2, history=[0.1], rng=rng.RngState(0), config=small_config)

def test_initial_state(small_scene, small_config):
    state = optimizer.InitialState(small_scene, small_config)
    cloud = small_scene.Cloud()
    assert state.Albedo().shape == (3 * len(cloud.CamoIndices() ),)
    assert np.array_equal(state.Albedo(), np.float32(cloud.Albedos()[cloud.CamoIndices()].reshape(-1) ) )
    assert state.Table().Q() == 8
    assert state.Rng() == rng.RngState(0, 0)
    assert optimizer.InitialState(small_scene, small_config.With(mode='eot') ).Table() is None

def test_flat_table_draws_like_eot(small_scene, small_config):
    hp = optimizer.InitialState(small_scene, small_config.With(batch=6) )
    eot = optimizer.InitialState(small_scene, small_config.With(batch=6, mode='eot') )
    a, ra = optimizer.DrawBatch(hp, 8)
    b, rb = optimizer.DrawBatch(eot, 8)
    assert a == b
    assert ra == rb == rng.RngState(0, 6)

def test_step_leaves_its_input_alone(small_scene, small_config):
    state = optimizer.InitialState(small_scene, small_config)
    scores = state.Table().Scores()
    albedo = state.Albedo().copy()
    new = optimizer.AttackStep(state, small_scene, small_config.Detector() )
    assert state.Iteration() == 0
    assert np.array_equal(state.Table().Scores(), scores)
    assert np.array_equal(state.Albedo(), albedo)
    assert new.Iteration() == 1
    assert len(new.History() ) == 1
    assert new.Rng().Counter() == small_config.batch

def test_step_updates_only_drawn_cells(small_scene, small_config):
    state = optimizer.InitialState(small_scene, small_config)
    cells, r = optimizer.DrawBatch(state, 8)
    new = optimizer.AttackStep(state, small_scene, small_config.Detector() )
    untouched = [ i for i in range(8) if i not in cells ]
    assert np.all(new.Table().Scores()[untouched] == small_config.init_score)
    assert np.all(new.Table().Scores()[cells] < small_config.init_score)


def test_zero_learning_rate_keeps_albedo(small_scene, small_config):
    state, artifacts = _run(small_scene, small_config.With(lr=0.0) )
    assert np.array_equal(state.Albedo(), optimizer.InitialState(small_scene, small_config).Albedo() )
    assert state.Iteration() == small_config.iters

def test_frozen_albedo_is_untouched(small_scene, small_config):
    state, artifacts = _run(small_scene, small_config.With(lr=1.0) )
    before = small_scene.Cloud()
    after = optimizer.ApplyAlbedo(small_scene, state.Albedo() ).Cloud()
    frozen = ~before.CamoMask()
    assert np.array_equal(after.Albedos()[frozen], before.Albedos()[frozen])
    assert np.all( (after.Albedos() >= 0.0) & (after.Albedos() <= 1.0) )

def test_first_loss_is_the_same_for_both_modes(small_scene, small_config):
    hp, a = _run(small_scene, small_config.With(iters=1) )
    eot, b = _run(small_scene, small_config.With(iters=1, mode='eot') )
    assert hp.History()[0] == eot.History()[0]

def test_callbacks(small_scene, small_config, tmp_path):
    events = []
    callbacks = callback.CallbackList()
    callbacks.RegisterCallback('step', lambda state: events.append( ('step', state.Iteration() ) ) )
    callbacks.RegisterCallback('checkpoint', lambda state, path: events.append( ('checkpoint', os.path.basename(path) ) ) )
    callbacks.RegisterCallback('finish', lambda state: events.append( ('finish', state.Iteration() ) ) )
    _run(small_scene, small_config.With(iters=2, checkpoint_every=2), out_dir=str(tmp_path), callbacks=callbacks)
    assert events == [ ('step', 1), ('step', 2), ('checkpoint', 'checkpoint_000002.rpga'),
                       ('checkpoint', 'final.rpga'), ('finish', 2) ]


def test_checkpoints_are_written(small_scene, small_config, tmp_path):
    state, artifacts = _run(small_scene, small_config, out_dir=str(tmp_path) )
    names = [ os.path.basename(p) for p in artifacts['checkpoints'] ]
    assert names == ['checkpoint_000001.rpga', 'checkpoint_000002.rpga', 'checkpoint_000003.rpga', 'final.rpga']
    final = checkpoint.ReadCheckpoint(str(tmp_path / "final.rpga") )
    assert final.iteration == 3
    assert final.mode == 'hpcm'
    assert np.array_equal(final.albedo, state.Albedo() )
    assert final.history.tolist() == state.History()
    assert final.scores.tolist() == state.Table().Scores().tolist()

def test_resume_is_exact(small_scene, small_config, tmp_path):
    config = small_config.With(optimizer='adamw')
    whole, artifacts = _run(config=config, scene=small_scene, out_dir=str(tmp_path) )
    ckpt = checkpoint.ReadCheckpoint(str(tmp_path / "checkpoint_000001.rpga") )
    resumed, more = _run(small_scene, config, state=optimizer.StateFromCheckpoint(ckpt, small_scene, config) )
    assert resumed.Iteration() == 3
    assert np.array_equal(resumed.Albedo(), whole.Albedo() )
    assert resumed.History() == whole.History()
    assert resumed.Rng() == whole.Rng()
    assert np.array_equal(resumed.Table().Scores(), whole.Table().Scores() )
    assert np.array_equal(resumed.OptimizerState(), whole.OptimizerState() )

def test_resume_from_the_wrong_run(small_scene, small_config):
    ckpt = optimizer.InitialState(small_scene, small_config).Checkpoint()
    with pytest.raises(exceptions.rcConfigError):
        optimizer.StateFromCheckpoint(ckpt, small_scene, small_config.With(mode='eot') )
    with pytest.raises(exceptions.rcConfigError):
        optimizer.StateFromCheckpoint(ckpt, small_scene, small_config.With(seed=4) )
    ckpt.albedo = ckpt.albedo[:-3]
    with pytest.raises(exceptions.rcValidationError):
        optimizer.StateFromCheckpoint(ckpt, small_scene, small_config)

def test_zero_iterations_write_nothing(small_scene, small_config, tmp_path):
    state, artifacts = _run(small_scene, small_config.With(iters=0), out_dir=str(tmp_path) )
    assert state.Iteration() == 0
    assert artifacts['checkpoints'] == []
    assert not (tmp_path / "final.rpga").exists()

def test_thread_count_does_not_change_the_run(small_scene, small_config):
    one, a = _run(small_scene, small_config)
    parallel.SetThreads(3)
    three, b = _run(small_scene, small_config)
    assert np.array_equal(one.Albedo(), three.Albedo() )
    assert one.History() == three.History()


def test_descent_step_never_goes_up(small_scene, small_config):
    context = optimizer.AttackContext(small_scene, small_config.Detector(), small_config)
    params = optimizer.InitialState(small_scene, small_config).Albedo()
    for cell in range(context.Frames().Space().Q() ):
        before = context.CellLoss(cell, params)
        new, loss, lr = optimizer.DescentStep(context, params, cell, 0.5)
        assert loss <= before
        assert loss == context.CellLoss(cell, new)
        assert 0.0 <= lr <= 0.5

def test_evaluate_grid(small_scene, small_config):
    detector = small_config.Detector()
    params = optimizer.InitialState(small_scene, small_config).Albedo()
    losses = optimizer.EvaluateGrid(small_scene, detector, params, config=small_config)
    assert losses.shape == (8,)
    assert np.all( (losses >= 0.0) & (losses <= 1.0) )
    context = optimizer.AttackContext(small_scene, detector, small_config)
    assert losses.tolist() == [ context.CellLoss(i, params) for i in range(8) ]

def test_export_history(tmp_path):
    path = tmp_path / "history.csv"
    optimizer.ExportHistory( [0.5, 0.25], str(path) )
    with open(path) as f:
        rows = list(csv.reader(f) )
    assert rows == [ ['iteration', 'mean_loss'], ['1', '0.5'], ['2', '0.25'] ]

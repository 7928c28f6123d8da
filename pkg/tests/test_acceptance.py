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
#  End to end runs on the demo scene.  These take minutes, so they're marked slow and only run
#  with "./build.sh test-all".

import os

import numpy as np
import pytest

from relitcamo import console
from relitcamo import demo
from relitcamo import parallel
from relitcamo.attack import config as runconfig
from relitcamo.attack import optimizer
from relitcamo.scene import io

pytestmark = pytest.mark.slow

def _files(directory):
    out = {}
    for root, dirs, names in os.walk(directory):
        for name in names:
            path = os.path.join(root, name)
            if name == "run_config.json":
                continue
            with open(path, 'rb') as f:
                out[os.path.relpath(path, directory)] = f.read()
    return out


def test_demo_attack_halves_the_grid_loss():
    scene = demo.BuildDemoScene()
    config = runconfig.RunConfig(**demo.DEMO_RUN_CONFIG)
    detector = config.Detector()
    parallel.SetThreads(os.cpu_count() or 1)

    initial = optimizer.InitialState(scene, config).Albedo()
    before = optimizer.EvaluateGrid(scene, detector, initial, config=config)
    state, artifacts = optimizer.RunAttack(scene, detector, config)
    after = optimizer.EvaluateGrid(scene, detector, state.Albedo(), config=config)

    assert state.Iteration() == 2000
    assert after.mean() <= 0.5 * before.mean()

def test_attack_is_bit_identical_across_thread_counts(tmp_path):
    assert console.main(['demo', '--out', str(tmp_path / "demo")]) == 0
    scenePath = str(tmp_path / "demo" / "scene.json")
    configPath = str(tmp_path / "short.json")
    runconfig.SaveRunConfig(runconfig.RunConfig(**dict(demo.DEMO_RUN_CONFIG, iters=40, checkpoint_every=10) ), configPath)

    runs = []
    for threads in ('1', '4'):
        out = str(tmp_path / ("run" + threads) )
        assert console.main(['attack', '--scene', scenePath, '--run-config', configPath, '--out', out,
                             '--threads', threads]) == 0
        runs.append(_files(out) )

    assert set(runs[0]) >= {'adversarial_scene.json', 'checkpoint_000010.rpga', 'checkpoint_000020.rpga',
                               'checkpoint_000030.rpga', 'checkpoint_000040.rpga', 'final.rpga',
                               'history.csv', 'table.csv'}
    assert runs[0] == runs[1]

def test_demo_scene_loads_back_with_the_same_grid(tmp_path):
    written = demo.WriteDemo(str(tmp_path) )
    scene = io.LoadScene(written['scene'])
    assert scene.Space().Q() == 32
    assert len(scene.Cloud() ) <= 200
    losses = optimizer.EvaluateGrid(scene, runconfig.RunConfig().Detector(), scene.Cloud().Albedos()[scene.Cloud().CamoIndices()].reshape(-1) )
    assert np.all(np.isfinite(losses) )

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
#  Shared fixtures.  Hypothesis runs the "fast" profile unless HYPOTHESIS_PROFILE says
#  otherwise, and tests marked slow only run when asked for (build.sh test-all).

import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from relitcamo import parallel
from relitcamo import verify
from relitcamo.attack import config as runconfig
from relitcamo.scene import imageio
from relitcamo.scene import model

settings.register_profile("fast", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "fast") )

## Quadrature used by the small scenes.  Plenty for a constant environment.
SMALL_QUAD = { 'quad_theta' : 8, 'quad_phi' : 16 }

def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-sized tests, run with build.sh test-all")


@pytest.fixture(autouse=True)
def single_thread():
    parallel.SetThreads(1)
    yield
    parallel.SetThreads(1)

@pytest.fixture
def gen():
    return np.random.Generator(np.random.Philox(key=1234) )

## A small scene: a handful of random primitives, two constant environments, 32x32 and a
#  2x2x1x2 grid.
def BuildSmallScene(seed=0, count=8, fromMask=False):
    g = np.random.Generator(np.random.Philox(key=seed) )
    cloud = verify.RandomCloud(g, count)
    envs = [ model.ConstantEnvironment('bright', 0.6, ambient=(0.02, 0.02, 0.02) ),
             model.ConstantEnvironment('dim', (0.3, 0.25, 0.2) ) ]
    background = imageio.DecodeGamma(imageio.EncodeGamma(np.full( (32, 32, 3), 0.4) ) )
    return model.Scene(cloud=cloud, environments=envs, background=background,
                       ground_truth=model.GroundTruthBox(4, 4, 28, 28),
                       ground_truth_from_mask=fromMask,
                       space=model.DiscretizeSpace([10.0, 40.0], [0.0, 120.0], [4.0], ['bright', 'dim']) )

@pytest.fixture
def small_scene():
    return BuildSmallScene()

@pytest.fixture
def small_config():
    return runconfig.RunConfig(iters=3, batch=2, lr=0.05, checkpoint_every=1, **SMALL_QUAD)

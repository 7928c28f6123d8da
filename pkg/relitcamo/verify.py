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
#  The built-in property checks behind "relitcamo verify".  Each check takes a numpy Generator
#  and the quick flag and returns (passed, details).  The quick forms run in seconds and use
#  smaller samples; --full runs them at acceptance size.

import math
import time

import numpy as np

from relitcamo import exceptions
from relitcamo import log
from relitcamo.analysis import toy
from relitcamo.attack import hpcm
from relitcamo.render import compositor
from relitcamo.render import shading
from relitcamo.render import splat
from relitcamo.scene import model

_log = log.GetLogger(__name__)

ULPS = 4
GRADIENT_TOLERANCE = 1e-6
IDENTITY_TOLERANCE = 1e-10
FD_STEP = 1e-3
FD_TOLERANCE = 1e-3
FURNACE_TOLERANCE = 0.01

## A random unit quaternion.
def RandomRotation(gen):
    q = gen.normal(size=4)
    return q / np.linalg.norm(q)

## A cloud of count random primitives inside the unit cube around the origin.  At least one
#  of them is camouflage.
def RandomCloud(gen, count, metallic=0.0):
    prims = []
    camo = gen.random(count) < 0.6
    camo[gen.integers(count)] = True
    for a in range(count):
        prims.append(model.GaussianPrimitive(
            mean=gen.uniform(-0.8, 0.8, 3),
            scale=gen.uniform(0.05, 0.3, 3),
            rotation=RandomRotation(gen),
            opacity=gen.uniform(0.3, 0.95),
            albedo=gen.uniform(0.1, 0.9, 3),
            roughness=gen.uniform(0.2, 1.0),
            metallic=metallic,
            camo=bool(camo[a]) ) )
    return model.GaussianCloud(prims, (0.0, 0.0, 0.0) )

## A camera 4 m from the origin from a random direction.
def RandomCamera(gen, size=32, envId='const'):
    cfg = model.PhysicalConfiguration(gen.uniform(0.0, 60.0), gen.uniform(0.0, 359.0), 4.0, envId)
    return model.CameraFromConfig(cfg, (0.0, 0.0, 0.0), 45.0, size, size)

## Random analytic losses L_j(x) = a_j·x + ½ Σ h_j x², returned as (losses, q×d gradients).
def _quadraticProblem(a, h, x):
    losses = a @ x + 0.5 * (h * x * x).sum(axis=1)
    return losses, a + h * x


def CheckLseGradient(gen, quick):
    problems = 20 if quick else 100
    worstGrad = 0.0
    worstIdentity = 0.0
    for p in range(problems):
        q = int(gen.integers(2, 33) )
        d = 4
        tau = float(gen.choice([0.1, 1.0, 10.0]) )
        a = gen.normal(size=(q, d) )
        h = gen.uniform(0.1, 2.0, (q, d) )
        x = gen.normal(size=d)

        losses, grads = _quadraticProblem(a, h, x)
        weights = hpcm.LseGradientWeights(losses, tau)
        analytic = weights @ grads

        eps = 1e-5
        fd = np.zeros(d)
        for i in range(d):
            step = np.zeros(d)
            step[i] = eps
            up = hpcm.LseObjective(_quadraticProblem(a, h, x + step)[0], tau)
            down = hpcm.LseObjective(_quadraticProblem(a, h, x - step)[0], tau)
            fd[i] = (up - down) / (2.0 * eps)
        scale = max(np.abs(analytic).max(), 1e-12)
        worstGrad = max(worstGrad, float(np.abs(analytic - fd).max() / scale) )

        # Sampling by a table that holds the instantaneous losses is the same expectation.
        table = hpcm.InitTable(q, 0.0, 0.0, tau)
        table.SetScores(losses)
        expected = hpcm.SamplingProbs(table) @ grads
        worstIdentity = max(worstIdentity, float(np.abs(expected - analytic).max() ) )

    passed = worstGrad <= GRADIENT_TOLERANCE and worstIdentity <= IDENTITY_TOLERANCE
    return passed, { 'problems' : problems, 'max_relative_error' : worstGrad, 'max_identity_error' : worstIdentity }

def CheckLseBounds(gen, quick):
    vectors = 200 if quick else 1000
    failures = 0
    for taus in (0.1, 1.0, 10.0):
        for a in range(vectors):
            losses = gen.uniform(-5.0, 5.0, int(gen.integers(1, 65) ) )
            try:
                hpcm.CheckBounds(losses, taus)
            except exceptions.rcNumericError:
                failures += 1
    return failures == 0, { 'vectors' : 3 * vectors, 'failures' : failures }

def CheckRendererGradient(gen, quick):
    scenes = 5 if quick else 20
    env = model.ConstantEnvironment('const', 0.6)
    worst = 0.0
    leaked = 0.0
    checked = 0
    for s in range(scenes):
        cloud = RandomCloud(gen, int(gen.integers(1, 11) ) )
        camera = RandomCamera(gen)
        background = gen.uniform(0.0, 1.0, (32, 32, 3) )
        W = gen.normal(size=(32, 32, 3) )

        shaded = shading.ShadeCloud(cloud, camera, env, 8, 16)
        weights = splat.SplatWeights(cloud, camera)
        mask = 1.0 - weights.Transmittance()

        def loss(albedos):
            colors, clamped = shaded.Colors(albedos)
            image = compositor.CompositeArrays(splat.Blend(weights, colors), mask, background)
            return float( (W * image).sum() )

        albedos = cloud.Albedos()
        grad = splat.BackwardAlbedo(weights, compositor.CompositeBackward(mask, W), shaded.JacobianDiagonals(albedos) )
        leaked = max(leaked, float(np.abs(grad[~cloud.CamoMask()]).max(initial=0.0) ) )

        for i in cloud.CamoIndices():
            for c in range(3):
                up = albedos.copy()
                up[i, c] += FD_STEP
                down = albedos.copy()
                down[i, c] -= FD_STEP
                fd = (loss(up) - loss(down) ) / (2.0 * FD_STEP)
                if abs(grad[i, c]) > 1e-6:
                    worst = max(worst, abs(grad[i, c] - fd) / abs(grad[i, c]) )
                    checked += 1

    passed = worst < FD_TOLERANCE and leaked == 0.0
    return passed, { 'scenes' : scenes, 'coordinates' : checked, 'max_relative_error' : worst, 'frozen_gradient' : leaked }

def CheckFurnace(gen, quick):
    radiance = 1.0
    env = model.ConstantEnvironment('furnace', radiance)
    camera = model.Camera(position=(0.0, -5.0, 0.0), look_at=(0.0, 0.0, 0.0), fov=45.0, width=8, height=8)
    quad = shading.BuildQuadrature( (0.0, -1.0, 0.0), shading.QUAD_THETA, shading.QUAD_PHI)
    worst = 0.0
    for a in range(10):
        albedo = gen.uniform(0.05, 1.0, 3)
        g = model.GaussianPrimitive(mean=(0.0, 0.0, 0.0), scale=(0.2, 0.01, 0.2), rotation=(1.0, 0.0, 0.0, 0.0),
                                    opacity=1.0, albedo=albedo, roughness=1.0, metallic=0.0)
        color, J = shading.Shade(g, camera, env, quad)
        diffuse = J @ albedo
        worst = max(worst, float(np.abs(diffuse / (albedo * radiance) - 1.0).max() ) )
    return worst <= FURNACE_TOLERANCE, { 'albedos' : 10, 'max_relative_error' : worst }

def CheckToyFlattening(gen, quick):
    seeds = range(2) if quick else range(10)
    results = toy.CompareModes(seeds=seeds)
    wins = toy.CountWins(results)
    needed = len(seeds) if quick else 9
    return wins >= needed, { 'seeds' : len(seeds), 'wins' : wins }

def CheckConservation(gen, quick):
    renders = 10 if quick else 50
    env = 'const'
    tolerance = ULPS * float(np.spacing(1.0) )
    worst = 0.0
    for r in range(renders):
        cloud = RandomCloud(gen, int(gen.integers(1, 31) ) )
        weights = splat.SplatWeights(cloud, RandomCamera(gen, envId=env) )
        T = weights.Transmittance()
        for tile in weights.Tiles():
            for p in range(tile.height * tile.width):
                y = tile.y0 + p // tile.width
                x = tile.x0 + p % tile.width
                total = math.fsum(list(tile.weights[:, p]) + [T[y, x]])
                worst = max(worst, abs(total - 1.0) )
    return worst <= tolerance, { 'renders' : renders, 'max_error' : worst, 'tolerance' : tolerance }

def CheckReferenceGrid(gen, quick):
    q = model.ReferenceSpace().Q()
    return q == 4320, { 'q' : q }

def CheckScoreIdentities(gen, quick):
    table = hpcm.InitTable(1, 10.0, 0.5, 1.0)
    table.UpdateScore(0, 2.0)
    momentum = table.Score(0) == 6.0

    p = hpcm.Softmax([3.0] * 7, 1.0)
    uniform = bool(np.all(p == p[0]) )

    values = gen.integers(-20, 20, 16).astype(np.float64)
    shift = bool(np.all(hpcm.Softmax(values, 1.0) == hpcm.Softmax(values + 17.0, 1.0) ) )

    passed = momentum and uniform and shift
    return passed, { 'momentum' : momentum, 'uniform' : uniform, 'shift_invariance' : shift }

CHECKS = [
    ('lse_gradient', CheckLseGradient),
    ('lse_bounds', CheckLseBounds),
    ('renderer_gradient', CheckRendererGradient),
    ('furnace', CheckFurnace),
    ('toy_flattening', CheckToyFlattening),
    ('blend_conservation', CheckConservation),
    ('reference_grid', CheckReferenceGrid),
    ('score_identities', CheckScoreIdentities),
]

## Runs every check.  A check that raises one of our exceptions fails with its message.
#
#  @return { "passed", "quick", "seed", "checks" : [ { "name", "passed", "details", "seconds" } ] }
def RunVerify(quick=True, seed=0, names=None):
    checks = []
    for name, func in CHECKS:
        if names is not None and name not in names:
            continue
        gen = np.random.Generator(np.random.Philox(key=int(seed) ) )
        start = time.perf_counter()
        try:
            passed, details = func(gen, quick)
        except exceptions.rcException as err:
            passed, details = False, { 'error' : str(err) }
        seconds = time.perf_counter() - start
        _log.info("%-20s %s (%.2fs)", name, "ok" if passed else "FAILED", seconds)
        checks.append({ 'name' : name, 'passed' : bool(passed), 'details' : details, 'seconds' : seconds })
    return {
        'passed' : all(a['passed'] for a in checks),
        'quick' : bool(quick),
        'seed' : int(seed),
        'checks' : checks,
    }

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
#  The demo scene: a box car of flat surfels on a smooth backdrop, 64x64, lit by a "noon" and
#  a "dusk" environment, with a 2x4x2x2 configuration grid.  The body panels carry the camo,
#  the windows and the bumpers are frozen.
#
#  Everything written here survives a save and reload bit for bit: radiance is float32 and the
#  background sits exactly on the 8-bit gamma grid.

import math

import numpy as np

from relitcamo import log
from relitcamo import paths
from relitcamo.attack import config as runconfig
from relitcamo.scene import imageio
from relitcamo.scene import io
from relitcamo.scene import model

_log = log.GetLogger(__name__)

SIZE = 64
ENV_HEIGHT = 16
SPACING = 0.4
THIN = 0.02

PITCHES = [10.0, 35.0]
AZIMUTHS = [0.0, 90.0, 180.0, 270.0]
DISTANCES = [6.0, 9.0]
ENVS = ['noon', 'dusk']

TARGET_CENTER = (0.0, 0.0, 0.8)

## Demo run config.  AdamW at 0.01 is the training setup the method was published with.
DEMO_RUN_CONFIG = {
    'mode' : 'hpcm',
    'optimizer' : 'adamw',
    'lr' : 0.01,
    'iters' : 2000,
    'batch' : 8,
    'checkpoint_every' : 500,
}

## Centers of a regular grid of surfels covering [lo, hi] on one axis.
def _steps(lo, hi):
    count = max(1, int(round( (hi - lo) / SPACING) ) )
    step = (hi - lo) / count
    return [lo + step * (a + 0.5) for a in range(count)]

## Surfels on the faces of an axis-aligned box, bottom left out.
#
#  @param faces which faces to cover, a subset of "+x -x +y -y +z".
#  @return a list of (mean, scale, face) tuples.
def _boxFaces(lo, hi, faces):
    out = []
    for face in faces:
        axis = "xyz".index(face[1])
        value = hi[axis] if face[0] == '+' else lo[axis]
        others = [a for a in range(3) if a != axis]
        for u in _steps(lo[others[0]], hi[others[0]]):
            for v in _steps(lo[others[1]], hi[others[1]]):
                mean = [0.0, 0.0, 0.0]
                mean[axis] = value
                mean[others[0]] = u
                mean[others[1]] = v
                scale = [0.6 * SPACING] * 3
                scale[axis] = THIN
                out.append( (mean, scale, face) )
    return out

## The car as a GaussianCloud.  Camo albedos are random from the seed so the start is an easy,
#  high-contrast target.
def BuildDemoCloud(seed=0):
    gen = np.random.Generator(np.random.Philox(key=int(seed) ) )
    identity = (1.0, 0.0, 0.0, 0.0)
    prims = []

    # Body: 4 x 1.8 x 1, wheels left to the imagination.
    for mean, scale, face in _boxFaces( (-2.0, -0.9, 0.2), (2.0, 0.9, 1.2), ('+z', '+y', '-y', '+x', '-x') ):
        camo = face in ('+z', '+y', '-y')
        if camo:
            albedo = gen.random(3)
        else:
            albedo = (0.35, 0.35, 0.35)
        prims.append(model.GaussianPrimitive(mean=mean, scale=scale, rotation=identity, opacity=0.95,
                                             albedo=albedo, roughness=0.6, metallic=0.0, camo=camo) )

    # Cabin: the roof is camo, the sides and ends are glass.
    for mean, scale, face in _boxFaces( (-1.0, -0.8, 1.2), (1.0, 0.8, 1.9), ('+z', '+y', '-y', '+x', '-x') ):
        camo = face == '+z'
        if camo:
            albedo = gen.random(3)
        else:
            albedo = (0.3, 0.32, 0.35)
        prims.append(model.GaussianPrimitive(mean=mean, scale=scale, rotation=identity, opacity=0.95,
                                             albedo=albedo, roughness=0.6 if camo else 0.15, metallic=0.0, camo=camo) )

    return model.GaussianCloud(prims, TARGET_CENTER)

## An equirectangular sky: a tinted dome, a brownish ground, and a sun.
def _sky(zenith, horizon, ground, sun, sun_theta, sun_phi, sun_size):
    h = ENV_HEIGHT
    theta = (np.arange(h) + 0.5) * math.pi / h
    phi = (np.arange(2 * h) + 0.5) * math.pi / h
    T, P = np.meshgrid(theta, phi, indexing='ij')

    t = np.clip(T / (0.5 * math.pi), 0.0, 1.0)[..., None]
    radiance = (1.0 - t) * np.asarray(zenith) + t * np.asarray(horizon)
    radiance = np.where( (T > 0.5 * math.pi)[..., None], np.asarray(ground, dtype=np.float64), radiance)

    cosang = (np.sin(T) * math.sin(sun_theta) * np.cos(P - sun_phi) + np.cos(T) * math.cos(sun_theta) )
    lobe = np.exp( (cosang - 1.0) / sun_size)[..., None]
    radiance = radiance + lobe * np.asarray(sun)
    return radiance.astype(np.float32)

def BuildDemoEnvironments():
    noon = model.EnvironmentMap(id='noon',
                                radiance=_sky( (0.8, 0.9, 1.1), (1.0, 1.0, 1.0), (0.3, 0.27, 0.22),
                                              (3.0, 2.9, 2.7), 0.3, 1.0, 0.02),
                                ambient=(0.04, 0.04, 0.05))
    dusk = model.EnvironmentMap(id='dusk',
                                radiance=_sky( (0.25, 0.25, 0.4), (0.7, 0.45, 0.3), (0.12, 0.1, 0.08),
                                              (2.0, 1.1, 0.5), 1.45, 4.0, 0.03),
                                ambient=(0.02, 0.015, 0.015))
    return [noon, dusk]

## A vertical gradient from sky to road, snapped to 8-bit gamma codes.
def BuildDemoBackground():
    t = ( (np.arange(SIZE) + 0.5) / SIZE)[:, None, None]
    sky = np.array( (0.55, 0.62, 0.75) )
    road = np.array( (0.3, 0.29, 0.27) )
    linear = np.where(t < 0.45, sky, road) * np.ones( (SIZE, SIZE, 1) )
    return imageio.DecodeGamma(imageio.EncodeGamma(linear) )

def BuildDemoScene(seed=0):
    space = model.DiscretizeSpace(PITCHES, AZIMUTHS, DISTANCES, ENVS)
    return model.Scene(cloud=BuildDemoCloud(seed),
                       environments=BuildDemoEnvironments(),
                       background=BuildDemoBackground(),
                       background_path="background.ppm",
                       background_env='noon',
                       ground_truth=model.GroundTruthBox(12, 20, 52, 48, class_id=0),
                       ground_truth_from_mask=True,
                       space=space,
                       fov=45.0)

## Writes scene.json with its assets and run_config.json into out_dir.
#  @return what was written, for printing.
def WriteDemo(out_dir, seed=0):
    scene = BuildDemoScene(seed)
    paths.MkDir(out_dir)
    scenePath = paths.JoinPaths(out_dir, "scene.json")
    io.SaveScene(scene, scenePath)
    configPath = paths.JoinPaths(out_dir, "run_config.json")
    runconfig.SaveRunConfig(runconfig.RunConfig(**DEMO_RUN_CONFIG), configPath)
    _log.info("demo scene written to %s", scenePath)
    return {
        'scene' : scenePath,
        'run_config' : configPath,
        'primitives' : len(scene.Cloud() ),
        'camo' : len(scene.Cloud().CamoIndices() ),
        'cells' : scene.Space().Q(),
    }

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
#  Putting the rendered vehicle back into a photo.  The background was captured under one
#  environment and the vehicle is rendered under another, so the background is relit first and
#  the foreground is laid over it with the soft object mask:
#
#      I = mask ⊙ rgb + (1 − mask) ⊙ relit background
#
#  Relighters are components (kind "relighter" in the pedia), the parametric one below is the
#  only one built in.

import numpy as np

from relitcamo import exceptions
from relitcamo.render import shading
from relitcamo.render import splat
from relitcamo.scene import model

## Relighting gains are clamped to this range.
MIN_GAIN = 0.05
MAX_GAIN = 20.0

## Source radiance below this counts as black.
MIN_RADIANCE = 1e-6


## @class BackgroundRelighter
#
#  Maps a background captured under one environment to what it would look like under another.
#  Implementations must keep the image size, stay within [0,1] and return the background
#  unchanged when both environments are the same.
class BackgroundRelighter(object):
    def __init__(self, **args):
        pass

    ## @param bg H×W×3 linear background.
    #  @param env_src the model.EnvironmentMap the background was captured under.
    #  @param env_tgt the model.EnvironmentMap to relight to.
    def Relight(self, bg, env_src, env_tgt):
        raise exceptions.rcExceptionNotImplemented("Relight is not implemented by " + type(self).__name__)


## @class ParametricRelighter
#
#  A per-channel photometric gain: the ratio of the mean radiance of the two environments.
class ParametricRelighter(BackgroundRelighter):
    def Relight(self, bg, env_src, env_tgt):
        return RelightBackgroundParametric(bg, env_src, env_tgt)

## The per-channel gains ParametricRelighter applies.
def RelightGains(env_src, env_tgt):
    gain = env_tgt.MeanRadiance() / np.maximum(env_src.MeanRadiance(), MIN_RADIANCE)
    return np.clip(gain, MIN_GAIN, MAX_GAIN)

## Relights a background by the mean radiance ratio of two environments.
#
#  @param shape the expected (height, width), if there is one to check against.
def RelightBackgroundParametric(bg, env_src, env_tgt, shape=None):
    bg = np.asarray(bg, dtype=np.float64)
    if bg.ndim != 3 or bg.shape[2] != 3:
        raise exceptions.rcRenderError("background must be H×W×3, got shape " + str(bg.shape), "background")
    if shape is not None and tuple(bg.shape[:2]) != tuple(shape):
        raise exceptions.rcRenderError("background is " + str(bg.shape[1]) + "x" + str(bg.shape[0]) + ", expected " + str(shape[1]) + "x" + str(shape[0]), "background")

    if env_src.id() == env_tgt.id():
        return bg.copy()
    return np.clip(bg * RelightGains(env_src, env_tgt), 0.0, 1.0)


## Composites foreground pixels over a background with a soft mask.
def CompositeArrays(rgb, mask, bg):
    rgb = np.asarray(rgb, dtype=np.float64)
    bg = np.asarray(bg, dtype=np.float64)
    if rgb.shape != bg.shape or tuple(np.shape(mask) ) != rgb.shape[:2]:
        raise exceptions.rcRenderError("foreground " + str(rgb.shape) + ", mask " + str(np.shape(mask) ) + " and background " + str(bg.shape) + " don't match", "background")
    m = np.asarray(mask, dtype=np.float64)[:, :, None]
    return np.clip(m * rgb + (1.0 - m) * bg, 0.0, 1.0)

## Composites a render over a (relit) background with its object mask.
def Composite(fg, bg_relit):
    return CompositeArrays(fg.Rgb(), fg.ObjectMask(), bg_relit)

## Pulls gradients of the composite back to the foreground pixels.  The mask does not depend
#  on albedo, so this is all the chain needs.
def CompositeBackward(mask, dL_dimage):
    return np.asarray(mask, dtype=np.float64)[:, :, None] * dL_dimage


## Shades and renders the whole cloud.  Every primitive shows up in the image; only the
#  camouflage ones will get a gradient from BackwardAlbedo.
#
#  @param quad a HemisphereQuadrature, a (n_theta, n_phi) pair, or None for the default.
#  @return (RenderOutput, ShadedCloud)
def ForegroundPass(cloud, camera, env, quad=None):
    if quad is None:
        n_theta, n_phi = shading.QUAD_THETA, shading.QUAD_PHI
    elif isinstance(quad, shading.HemisphereQuadrature):
        n_theta, n_phi = quad.Resolution()
    else:
        n_theta, n_phi = quad
    shaded = shading.ShadeCloud(cloud, camera, env, n_theta, n_phi)
    colors, clamped = shaded.Colors(cloud.Albedos() )
    return splat.Rasterize(cloud, camera, colors), shaded

def ForegroundWithFrozenRegions(cloud, camera, env, quad=None):
    return ForegroundPass(cloud, camera, env, quad)[0]

## The bounding box of mask > threshold, or None if the mask is empty there.
def MaskBox(mask, threshold=0.5, class_id=0):
    ys, xs = np.nonzero(np.asarray(mask) > threshold)
    if ys.shape[0] == 0:
        return None
    return model.GroundTruthBox(int(xs.min() ), int(ys.min() ), int(xs.max() ) + 1, int(ys.max() ) + 1, class_id)

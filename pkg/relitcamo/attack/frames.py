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
#  Per-cell frames.  Only the camo albedo changes during an attack, so everything else about a
#  cell's frame is worked out once: the camera, the shading factors, the blend weights and
#  object mask, the relit background and the ground truth box.  Rendering a frame for new
#  albedos is then a clamp, a blend and a composite.

import collections
import threading

import numpy as np

from relitcamo import exceptions
from relitcamo import log
from relitcamo.detect import surrogate
from relitcamo.render import compositor
from relitcamo.render import shading
from relitcamo.render import splat

_log = log.GetLogger(__name__)

## How many frames a FrameCache holds by default.  A frame at 64×64 with a couple hundred splats
#  is a few MB, mostly blend weights.
MAX_FRAMES = 64


## @class Frame
#
#  Everything about one cell that doesn't depend on albedo.
class Frame(object):
    index = None
    config = None
    camera = None
    ## shading.ShadedCloud
    shaded = None
    ## splat.BlendWeights
    weights = None
    mask = None
    ## The background the foreground is composited over, or None to render the foreground alone.
    background = None
    ground_truth = None

    def __init__(self, **args):
        for key, value in args.items():
            setattr(self, key, value)

    ## Renders the frame as the detector sees it.  albedos is the full N×3 array.
    #  @return (image, foreground rgb)
    def Render(self, albedos):
        colors, clamped = self.shaded.Colors(albedos)
        rgb = splat.Blend(self.weights, colors)
        if self.background is None:
            return rgb, rgb
        return compositor.CompositeArrays(rgb, self.mask, self.background), rgb

    ## Pulls an image gradient back to the full N×3 albedo gradient, camo rows only.
    def Backward(self, albedos, dL_dimage):
        if self.background is None:
            g = dL_dimage
        else:
            g = compositor.CompositeBackward(self.mask, dL_dimage)
        return splat.BackwardAlbedo(self.weights, g, self.shaded.JacobianDiagonals(albedos) )


## @class FrameCache
#
#  Builds frames on demand and keeps the most recently used ones, at most capacity of them.
#  With a capacity of 0 nothing is kept, which is what a one-pass sweep over the grid wants.
#  Safe to use from several threads; two threads asking for the same missing frame may both
#  build it, the results are identical.
class FrameCache(object):
    __scene = None
    __space = None
    __relighter = None
    __n_theta = None
    __n_phi = None
    __relight = None
    __hybrid = None
    __capacity = None
    ## index -> Frame, least recently used first.
    __frames = None
    __lock = None

    ## @param scene the model.Scene
    #  @param config a RunConfig, for the quadrature, the relighter and the ablation switches.
    #  @param space the configuration space to index, the scene's own by default.
    #  @param capacity the most frames kept at once.
    def __init__(self, scene, config, space=None, capacity=MAX_FRAMES):
        if int(capacity) < 0:
            raise exceptions.rcConfigError("frame cache capacity must be at least 0, got " + str(capacity) )
        self.__scene = scene
        self.__space = space if space is not None else scene.Space()
        self.__space.Validate(scene.Environments() )
        self.__relighter = config.Relighter()
        self.__n_theta = config.quad_theta
        self.__n_phi = config.quad_phi
        self.__relight = config.relight
        self.__hybrid = config.hybrid
        self.__capacity = int(capacity)
        self.__frames = collections.OrderedDict()
        self.__lock = threading.Lock()

    def Scene(self):
        return self.__scene

    def Space(self):
        return self.__space

    def Capacity(self):
        return self.__capacity

    ## The number of frames held right now.
    def __len__(self):
        with self.__lock:
            return len(self.__frames)

    def Get(self, index):
        index = int(index)
        with self.__lock:
            frame = self.__frames.get(index)
            if frame is not None:
                self.__frames.move_to_end(index)
        if frame is not None:
            return frame

        frame = self.__build(index)
        if self.__capacity == 0:
            return frame
        with self.__lock:
            frame = self.__frames.setdefault(index, frame)
            self.__frames.move_to_end(index)
            while len(self.__frames) > self.__capacity:
                dropped, old = self.__frames.popitem(last=False)
                _log.debug("frame cache full, dropped cell %d", dropped)
        return frame

    def __build(self, index):
        scene = self.__scene
        cfg = self.__space.ConfigOf(index)
        camera = scene.Camera(cfg)
        env = scene.Environment(cfg.env)
        cloud = scene.Cloud()

        shaded = shading.ShadeCloud(cloud, camera, env, self.__n_theta, self.__n_phi)
        weights = splat.SplatWeights(cloud, camera)
        mask = 1.0 - weights.Transmittance()

        background = None
        if self.__hybrid:
            background = scene.Background()
            if self.__relight:
                background = self.__relighter.Relight(background, scene.Environment(scene.BackgroundEnv() ), env)
            if background.shape[:2] != mask.shape:
                raise exceptions.rcRenderError("relit background has the wrong size " + str(background.shape), "background")

        gt = scene.GroundTruth()
        if scene.GroundTruthFromMask():
            box = compositor.MaskBox(mask, class_id=gt.class_id)
            if box is not None:
                gt = box

        return Frame(index=index, config=cfg, camera=camera, shaded=shaded, weights=weights,
                     mask=mask, background=background, ground_truth=gt)


## The detection loss of a frame and its gradient with respect to the full N×3 albedos.
def FrameLossAndGradient(frame, albedos, detector):
    image, rgb = frame.Render(albedos)
    loss, index, gimage = surrogate.LossAndGradient(detector, image, frame.ground_truth)
    if index < 0:
        return 0.0, np.zeros_like(albedos)
    grad = frame.Backward(albedos, gimage)
    if not (np.isfinite(loss) and np.all(np.isfinite(grad) ) ):
        raise exceptions.rcNumericError("non-finite loss or gradient in cell " + str(frame.index) )
    return float(loss), grad

## The detection loss of a frame, forward only.
def FrameLoss(frame, albedos, detector):
    image, rgb = frame.Render(albedos)
    loss, index = surrogate.DetectionLoss(surrogate.Detect(detector, image), frame.ground_truth)
    if not np.isfinite(loss):
        raise exceptions.rcNumericError("non-finite loss in cell " + str(frame.index) )
    return float(loss)

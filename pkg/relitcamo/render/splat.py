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
#  The splat rasterizer.  Gaussians are projected to 2D, sorted front to back once per view, and
#  alpha blended per 16×16 tile:
#
#      C = Σ_k c_k·α'_k·T_k,   T_k = Π_{j<k} (1 − α'_j)
#
#  with α'_k the splat's opacity times its 2D gaussian at the pixel center.  Contributions with
#  α' below 1/255 are skipped, and a pixel stops taking contributions once its transmittance
#  drops below 1/255.
#
#  The blend weights w_k = α'_k·T_k, computed as T_k − T_{k+1}, do not depend on color
#  at all, so they're computed once (SplatWeights) and can be reused for any set of colors
#  (Blend).  They are also everything the backward pass needs: the pixel color is linear in
#  the splat colors, with the weights as coefficients.
#
#  Tiles are independent.  They may be computed on worker threads, and their results are always
#  combined in tile order, so the output is the same for any number of threads.

import math

import numpy as np

from relitcamo import exceptions
from relitcamo import log
from relitcamo import parallel
from relitcamo.scene import model

_log = log.GetLogger(__name__)

## Anything closer to the camera than this, in meters, is culled.
NEAR_PLANE = 0.01

## Added to the diagonal of every 2D covariance, in pixels².
LOWPASS = 0.3

## Contributions with α' below this are skipped.
ALPHA_MIN = 1.0 / 255.0

## A pixel takes no more contributions once its transmittance is below this.
T_MIN = 1.0 / 255.0

TILE = 16


## Evaluates the unnormalized gaussian of g at the world point x.
def EvaluateGaussian(g, x):
    scale = g.Scale()
    if np.any(scale < model.MIN_SCALE):
        raise exceptions.rcRenderError("covariance is singular, scale " + repr(scale.tolist() ), "gaussian.scale")
    d = np.asarray(x, dtype=np.float64) - g.Mean()
    y = (g.RotationMatrix().T @ d) / scale
    return math.exp(-0.5 * float(np.dot(y, y) ) )


## @class Splat2D
#
#  One projected gaussian.
class Splat2D(object):
    ## (u, v) in pixels.
    mean2d = None
    ## 2×2, pixels², low-pass included.
    cov2d = None
    ## Camera-space z.
    depth = None
    color = None
    opacity = None
    source_index = None

    def __init__(self, **args):
        self.mean2d = args['mean2d']
        self.cov2d = args['cov2d']
        self.depth = args['depth']
        self.color = args.get('color')
        self.opacity = args['opacity']
        self.source_index = args.get('source_index', 0)


## Per-primitive arrays the rasterizer needs, from a GaussianCloud or a plain (possibly empty)
#  sequence of primitives.
def _cloudArrays(cloud):
    if isinstance(cloud, model.GaussianCloud):
        return cloud.Means(), cloud.Covariances(), cloud.Opacities(), cloud.CamoMask()
    prims = list(cloud)
    if len(prims) == 0:
        return np.zeros( (0, 3) ), np.zeros( (0, 3, 3) ), np.zeros(0), np.zeros(0, dtype=bool)
    return (np.array([ a.Mean() for a in prims ]),
            np.array([ a.Covariance() for a in prims ]),
            np.array([ a.Opacity() for a in prims ]),
            np.array([ a.IsCamo() for a in prims ], dtype=bool) )


## @class Projection
#
#  Every primitive of a cloud projected into one camera.  Culled primitives keep their slot
#  and are marked in Visible().
class Projection(object):
    __mean2d = None
    __cov2d = None
    ## Inverse 2D covariance as (a, b, c) for [[a, b], [b, c]].
    __conic = None
    __depth = None
    __opacity = None
    __visible = None
    ## Visible indices, front to back, ties by index.
    __order = None

    def __init__(self, means, covs, opacities, camera):
        n = means.shape[0]
        p = camera.WorldToCamera(means) if n else np.zeros( (0, 3) )
        x, y, z = p[:, 0], p[:, 1], p[:, 2]
        W = camera.Rotation()
        f = camera.Focal()
        cx, cy = camera.Principal()

        front = z >= NEAR_PLANE
        zs = np.where(front, z, 1.0)
        u = f * x / zs + cx
        v = f * y / zs + cy

        J = np.zeros( (n, 2, 3) )
        J[:, 0, 0] = f / zs
        J[:, 0, 2] = -f * x / (zs * zs)
        J[:, 1, 1] = f / zs
        J[:, 1, 2] = -f * y / (zs * zs)
        T = J @ W
        cov2d = T @ covs @ np.transpose(T, (0, 2, 1) )
        cov2d[:, 0, 0] += LOWPASS
        cov2d[:, 1, 1] += LOWPASS

        det = cov2d[:, 0, 0] * cov2d[:, 1, 1] - cov2d[:, 0, 1] * cov2d[:, 1, 0]
        det = np.where(front, det, 1.0)
        conic = np.stack([cov2d[:, 1, 1] / det, -cov2d[:, 0, 1] / det, cov2d[:, 0, 0] / det], axis=1)

        rx = 3.0 * np.sqrt(np.abs(cov2d[:, 0, 0]) )
        ry = 3.0 * np.sqrt(np.abs(cov2d[:, 1, 1]) )
        inside = (u + rx >= 0.0) & (u - rx <= camera.Width() ) & (v + ry >= 0.0) & (v - ry <= camera.Height() )
        visible = front & inside & np.isfinite(u) & np.isfinite(v)

        self.__mean2d = np.stack([u, v], axis=1)
        self.__cov2d = cov2d
        self.__conic = conic
        self.__depth = z
        self.__opacity = np.asarray(opacities, dtype=np.float64)
        self.__visible = visible

        idx = np.flatnonzero(visible)
        self.__order = idx[np.lexsort( (idx, z[idx]) )]

    def __len__(self):
        return self.__visible.shape[0]

    def Mean2d(self):
        return self.__mean2d

    def Cov2d(self):
        return self.__cov2d

    def Conic(self):
        return self.__conic

    def Depth(self):
        return self.__depth

    def Opacity(self):
        return self.__opacity

    def Visible(self):
        return self.__visible

    def Order(self):
        return self.__order

    ## Radius, in pixels, beyond which a splat's α' is below ALPHA_MIN.  Zero for splats that
    #  never reach it.
    def CutoffRadius(self):
        lam = 0.5 * (self.__cov2d[:, 0, 0] + self.__cov2d[:, 1, 1])
        lam = lam + np.sqrt(np.maximum(lam * lam - (self.__cov2d[:, 0, 0] * self.__cov2d[:, 1, 1] - self.__cov2d[:, 0, 1] ** 2), 0.0) )
        level = 255.0 * self.__opacity
        r = np.sqrt(lam * 2.0 * np.log(np.maximum(level, 1.0) ) )
        return np.where(level > 1.0, r, 0.0)

## Projects every primitive of a cloud.
def ProjectCloud(cloud, camera):
    means, covs, opacities, camo = _cloudArrays(cloud)
    return Projection(means, covs, opacities, camera)

## Projects one primitive.  Returns a Splat2D, or None when it's culled.
def ProjectGaussian(g, camera, color=None, source_index=0):
    proj = Projection(g.Mean()[None, :], g.Covariance()[None, :, :], np.array([g.Opacity()]), camera)
    if not proj.Visible()[0]:
        return None
    return Splat2D(mean2d=proj.Mean2d()[0].copy(), cov2d=proj.Cov2d()[0].copy(), depth=float(proj.Depth()[0]),
                   color=color, opacity=g.Opacity(), source_index=source_index)


## @class TileWeights
#
#  The blend weights of one tile.  Indices are the contributing primitives in blend order;
#  weights is K×P with P the tile's pixels in row-major order.
class TileWeights(object):
    y0 = None
    x0 = None
    height = None
    width = None
    indices = None
    weights = None

    def __init__(self, y0, x0, height, width, indices, weights):
        self.y0 = y0
        self.x0 = x0
        self.height = height
        self.width = width
        self.indices = indices
        self.weights = weights
        self.indices.setflags(write=False)
        self.weights.setflags(write=False)


## @class BlendWeights
#
#  The blend weights of every tile of one view, plus the final transmittance.  What's left of
#  a render once color is taken out.
class BlendWeights(object):
    __tiles = None
    __transmittance = None
    __count = None
    __camo = None

    def __init__(self, tiles, transmittance, count, camo):
        self.__tiles = tiles
        self.__transmittance = transmittance
        self.__transmittance.setflags(write=False)
        self.__count = count
        self.__camo = camo
        self.__camo.setflags(write=False)

    def Tiles(self):
        return self.__tiles

    def Transmittance(self):
        return self.__transmittance

    ## The number of primitives the weights index into.
    def Count(self):
        return self.__count

    def CamoMask(self):
        return self.__camo

    def Width(self):
        return self.__transmittance.shape[1]

    def Height(self):
        return self.__transmittance.shape[0]

def _tileWeights(proj, radius, order, y0, x0, height, width):
    u = proj.Mean2d()[order, 0]
    v = proj.Mean2d()[order, 1]
    r = radius[order] + 1.0
    hit = (r > 1.0) & (u + r >= x0) & (u - r <= x0 + width) & (v + r >= y0) & (v - r <= y0 + height)
    idx = order[hit]

    P = height * width
    if idx.shape[0] == 0:
        return TileWeights(y0, x0, height, width, idx, np.zeros( (0, P) ) ), np.ones(P)

    ys, xs = np.mgrid[y0:y0 + height, x0:x0 + width]
    px = xs.reshape(-1) + 0.5
    py = ys.reshape(-1) + 0.5

    dx = px[None, :] - proj.Mean2d()[idx, 0:1]
    dy = py[None, :] - proj.Mean2d()[idx, 1:2]
    a, b, c = (proj.Conic()[idx, 0:1], proj.Conic()[idx, 1:2], proj.Conic()[idx, 2:3])
    power = -0.5 * (a * dx * dx + 2.0 * b * dx * dy + c * dy * dy)
    alpha = np.minimum(proj.Opacity()[idx, None] * np.exp(np.minimum(power, 0.0) ), 1.0)
    alpha = np.where(alpha < ALPHA_MIN, 0.0, alpha)

    after = np.cumprod(1.0 - alpha, axis=0)
    before = np.vstack([np.ones( (1, P) ), after[:-1]])
    active = before >= T_MIN
    # before - after telescopes, so the weights and the final transmittance sum to one.
    weights = np.where(active, before - after, 0.0)
    final = np.where(active, after, 1.0).min(axis=0)

    keep = np.any(weights > 0.0, axis=1)
    return TileWeights(y0, x0, height, width, idx[keep], weights[keep]), final

## Computes the blend weights of a cloud seen from a camera.
def SplatWeights(cloud, camera):
    means, covs, opacities, camo = _cloudArrays(cloud)
    proj = Projection(means, covs, opacities, camera)
    radius = proj.CutoffRadius()
    order = proj.Order()

    H, W = camera.Height(), camera.Width()
    rects = []
    for y0 in range(0, H, TILE):
        for x0 in range(0, W, TILE):
            rects.append( (y0, x0, min(TILE, H - y0), min(TILE, W - x0) ) )

    results = parallel.MapOrdered(lambda r: _tileWeights(proj, radius, order, *r), rects)

    transmittance = np.ones( (H, W) )
    tiles = []
    for tile, final in results:
        transmittance[tile.y0:tile.y0 + tile.height, tile.x0:tile.x0 + tile.width] = final.reshape(tile.height, tile.width)
        tiles.append(tile)

    return BlendWeights(tiles, transmittance, means.shape[0], camo)

## Blends per-primitive colors with precomputed weights.  Returns H×W×3.
def Blend(weights, colors):
    colors = np.asarray(colors, dtype=np.float64)
    if colors.shape != (weights.Count(), 3):
        raise exceptions.rcRenderError("expected " + str(weights.Count() ) + "x3 colors, got " + str(colors.shape), "shaded_colors")

    rgb = np.zeros( (weights.Height(), weights.Width(), 3) )
    for tile in weights.Tiles():
        if tile.indices.shape[0] == 0:
            continue
        block = tile.weights.T @ colors[tile.indices]
        rgb[tile.y0:tile.y0 + tile.height, tile.x0:tile.x0 + tile.width] = block.reshape(tile.height, tile.width, 3)

    if not np.all(np.isfinite(rgb) ):
        raise exceptions.rcNumericError("blending produced non-finite pixels")
    return rgb


## @class RenderOutput
#
#  A rendered view: the image, the transmittance left after blending, the object mask and the
#  blend weights kept for the backward pass.  Immutable.
class RenderOutput(object):
    __rgb = None
    __weights = None
    __mask = None

    def __init__(self, rgb, weights):
        self.__rgb = rgb
        self.__rgb.setflags(write=False)
        self.__weights = weights
        self.__mask = 1.0 - weights.Transmittance()
        self.__mask.setflags(write=False)

    def Rgb(self):
        return self.__rgb

    def Transmittance(self):
        return self.__weights.Transmittance()

    ## 1 − transmittance.
    def ObjectMask(self):
        return self.__mask

    def Weights(self):
        return self.__weights

    def Width(self):
        return self.__rgb.shape[1]

    def Height(self):
        return self.__rgb.shape[0]

    ## The (source_index, weight) pairs of one pixel, in blend order.  Skipped and terminated
    #  contributions are not listed.
    def ContribRecords(self, y, x):
        for tile in self.__weights.Tiles():
            if tile.y0 <= y < tile.y0 + tile.height and tile.x0 <= x < tile.x0 + tile.width:
                p = (y - tile.y0) * tile.width + (x - tile.x0)
                return [ (int(i), float(w) ) for i, w in zip(tile.indices, tile.weights[:, p]) if w > 0.0 ]
        raise exceptions.rcRenderError("pixel (" + str(y) + ", " + str(x) + ") is outside the image", "pixel")

## Renders a cloud with the given per-primitive colors.
#
#  @param cloud a GaussianCloud, or any sequence of primitives.
#  @param shaded_colors N×3, one color per primitive.
def Rasterize(cloud, camera, shaded_colors):
    n = len(cloud)
    colors = np.asarray(shaded_colors, dtype=np.float64)
    if colors.shape != (n, 3):
        raise exceptions.rcRenderError("expected " + str(n) + "x3 colors, got " + str(colors.shape), "shaded_colors")
    weights = SplatWeights(cloud, camera)
    return RenderOutput(Blend(weights, colors), weights)

## Renders just the coverage of a cloud: 1 − transmittance.
def RenderObjectMask(cloud, camera):
    return 1.0 - SplatWeights(cloud, camera).Transmittance()


## Pulls pixel gradients back to per-primitive color gradients.  Tiles are accumulated in
#  order, so the sum is the same whatever thread computed each tile.
#
#  @param weights a BlendWeights or a RenderOutput.
#  @param dL_dpixels H×W×3
#  @return N×3
def BackwardColors(weights, dL_dpixels):
    if isinstance(weights, RenderOutput):
        weights = weights.Weights()
    if weights is None or weights.Tiles() is None:
        raise exceptions.rcRenderError("render has no blend weights to differentiate", "contrib_records")
    g = np.asarray(dL_dpixels, dtype=np.float64)
    if g.shape != (weights.Height(), weights.Width(), 3):
        raise exceptions.rcRenderError("expected " + str(weights.Height() ) + "x" + str(weights.Width() ) + "x3 pixel gradients, got " + str(g.shape), "dL_dpixels")

    def tileGrad(tile):
        if tile.indices.shape[0] == 0:
            return None
        block = g[tile.y0:tile.y0 + tile.height, tile.x0:tile.x0 + tile.width].reshape(-1, 3)
        return tile.weights @ block

    parts = parallel.MapOrdered(tileGrad, weights.Tiles() )

    grad = np.zeros( (weights.Count(), 3) )
    for tile, part in zip(weights.Tiles(), parts):
        if part is not None:
            grad[tile.indices] += part
    return grad

## Pulls pixel gradients all the way back to albedo.  Only camouflage primitives get a
#  gradient; everything else is frozen and reported as zero.
#
#  @param output the RenderOutput (or its BlendWeights) of the forward pass.
#  @param dL_dpixels H×W×3
#  @param shading_jacobians N×3×3 ∂color/∂albedo per primitive, or N×3 diagonals.
#  @param camo_mask optional override of which primitives are optimizable.
#  @return N×3
def BackwardAlbedo(output, dL_dpixels, shading_jacobians, camo_mask=None):
    weights = output.Weights() if isinstance(output, RenderOutput) else output
    if weights is None:
        raise exceptions.rcRenderError("render has no blend weights to differentiate", "contrib_records")
    J = np.asarray(shading_jacobians, dtype=np.float64)
    if J.shape[0] != weights.Count() or J.shape[1:] not in ( (3, 3), (3,) ):
        raise exceptions.rcRenderError("expected " + str(weights.Count() ) + " shading jacobians, got shape " + str(J.shape), "shading_jacobians")

    gc = BackwardColors(weights, dL_dpixels)
    if J.ndim == 2:
        ga = J * gc
    else:
        ga = np.einsum('nji,nj->ni', J, gc)

    mask = weights.CamoMask() if camo_mask is None else np.asarray(camo_mask, dtype=bool)
    ga[~mask] = 0.0
    return ga

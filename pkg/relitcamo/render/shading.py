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
#  Physically based shading of a primitive: a diffuse lobe plus a GGX specular lobe, lit by an
#  equirectangular environment through a fixed hemisphere quadrature, plus the environment's
#  constant ambient term.
#
#  Each primitive is shaded once per view, at its mean, with its normal taken from the
#  shortest axis of the gaussian.  For a fixed primitive and view the result is affine in the
#  albedo, per channel:
#
#      color = A ⊙ albedo + B
#
#  so the Jacobian with respect to albedo is diag(A).  ShadeCloud returns A and B directly,
#  the attack leans on that to shade each configuration only once.

import functools
import math

import numpy as np

from relitcamo import exceptions
from relitcamo.scene import model

## Default quadrature resolution, polar by azimuthal.
QUAD_THETA = 32
QUAD_PHI = 64

## Reflectance of dielectrics at normal incidence.
F0_DIELECTRIC = 0.04

## Lower bound on the GGX alpha, keeps the r = 0 lobe finite.
MIN_ALPHA = 1e-3

def _normalize(v):
    v = np.asarray(v, dtype=np.float64)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)

## Builds an orthonormal (tangent, bitangent) pair for each normal in an N×3 array.
def _tangentFrames(normals):
    helper = np.where( (np.abs(normals[:, 0]) < 0.9)[:, None], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    t = _normalize(np.cross(helper, normals) )
    b = np.cross(normals, t)
    return t, b


## @class BRDFSample
#
#  The BRDF evaluated for one incident direction.
class BRDFSample(object):
    ## RGB, per steradian.
    value = None
    ## Incident direction, unit length.
    wi = None
    ## wi·n
    cos_term = None

    def __init__(self, value, wi, cos_term):
        self.value = value
        self.wi = wi
        self.cos_term = cos_term


## @class HemisphereQuadrature
#
#  A product rule over the hemisphere around a normal: n_theta polar bands by n_phi azimuthal
#  wedges, one node at the middle of each cell.  Each node is weighted by the exact solid angle
#  of its cell, so the weights add up to 2π.
class HemisphereQuadrature(object):
    __normal = None
    __n_theta = None
    __n_phi = None
    ## K×3 in the local frame, z along the normal.
    __local = None
    __weights = None
    __directions = None

    def __init__(self, normal, n_theta=QUAD_THETA, n_phi=QUAD_PHI):
        if int(n_theta) < 1 or int(n_phi) < 1:
            raise exceptions.rcValidationError("quadrature needs at least one node per dimension, got " + str(n_theta) + "x" + str(n_phi), "quadrature")
        self.__n_theta = int(n_theta)
        self.__n_phi = int(n_phi)
        self.__normal = _normalize(model._vector(normal, 3, "quadrature.normal") )
        self.__local, self.__weights = LocalRule(self.__n_theta, self.__n_phi)

        t, b = _tangentFrames(self.__normal[None, :])
        self.__directions = self.__local[:, 0:1] * t + self.__local[:, 1:2] * b + self.__local[:, 2:3] * self.__normal

    def Normal(self):
        return self.__normal.copy()

    def Resolution(self):
        return (self.__n_theta, self.__n_phi)

    def __len__(self):
        return self.__weights.shape[0]

    ## K×3 world directions.
    def Directions(self):
        return self.__directions

    ## K solid angles.
    def Weights(self):
        return self.__weights

    ## K cosines to the normal.
    def Cosines(self):
        return self.__local[:, 2]

    ## (direction, weight) pairs.
    def Nodes(self):
        return list(zip(self.__directions, self.__weights) )

    ## The same rule around another normal.
    def Oriented(self, normal):
        return HemisphereQuadrature(normal, self.__n_theta, self.__n_phi)

## The quadrature rule around +z: K×3 local directions and K solid-angle weights.  Cached,
#  the arrays are read-only.
@functools.lru_cache(maxsize=16)
def LocalRule(n_theta, n_phi):
    dtheta = 0.5 * math.pi / n_theta
    dphi = 2.0 * math.pi / n_phi

    edges = np.arange(n_theta + 1) * dtheta
    theta = (np.arange(n_theta) + 0.5) * dtheta
    band = (np.cos(edges[:-1]) - np.cos(edges[1:]) ) * dphi
    phi = (np.arange(n_phi) + 0.5) * dphi

    st = np.repeat(np.sin(theta), n_phi)
    ct = np.repeat(np.cos(theta), n_phi)
    cp = np.tile(np.cos(phi), n_theta)
    sp = np.tile(np.sin(phi), n_theta)

    local = np.stack([st * cp, st * sp, ct], axis=1)
    weights = np.repeat(band, n_phi)
    local.setflags(write=False)
    weights.setflags(write=False)
    return local, weights

def BuildQuadrature(n, n_theta=QUAD_THETA, n_phi=QUAD_PHI):
    return HemisphereQuadrature(n, n_theta, n_phi)


## Looks up radiance in an equirectangular map with bilinear filtering.  Rows are clamped at
#  the poles, columns wrap around in azimuth.
#
#  @param env a model.EnvironmentMap
#  @param direction a unit 3-vector or an N×3 array of them.
#  @return RGB, or N×3.
def SampleEnv(env, direction):
    d = np.asarray(direction, dtype=np.float64)
    single = d.ndim == 1
    d = d.reshape(-1, 3)

    radiance = env.Radiance()
    h, w = env.Height(), env.Width()

    theta = np.arccos(np.clip(d[:, 2], -1.0, 1.0) )
    phi = np.mod(np.arctan2(d[:, 1], d[:, 0]), 2.0 * math.pi)

    v = theta / math.pi * h - 0.5
    u = phi / (2.0 * math.pi) * w - 0.5
    v0 = np.floor(v)
    u0 = np.floor(u)
    fv = (v - v0)[:, None]
    fu = (u - u0)[:, None]

    r0 = np.clip(v0.astype(np.int64), 0, h - 1)
    r1 = np.clip(v0.astype(np.int64) + 1, 0, h - 1)
    c0 = np.mod(u0.astype(np.int64), w)
    c1 = np.mod(u0.astype(np.int64) + 1, w)

    top = radiance[r0, c0] * (1.0 - fu) + radiance[r0, c1] * fu
    bottom = radiance[r1, c0] * (1.0 - fu) + radiance[r1, c1] * fu
    out = top * (1.0 - fv) + bottom * fv

    if single:
        return out[0]
    return out


## The normal of a flat gaussian: the rotation axis with the smallest scale, the lowest axis
#  winning ties, turned to face the viewer.
#
#  @param view_dir unit direction from the camera toward the primitive.
def SurfelNormal(g, view_dir):
    axis = int(np.argmin(g.Scale() ) )
    n = g.RotationMatrix()[:, axis]
    if np.dot(n, -np.asarray(view_dir, dtype=np.float64) ) < 0.0:
        n = -n
    return n

## SurfelNormal for every primitive.  R is N×3×3, scales N×3, view_dirs N×3.
def SurfelNormals(R, scales, view_dirs):
    axis = np.argmin(scales, axis=1)
    n = R[np.arange(R.shape[0]), :, axis]
    flip = np.einsum('ni,ni->n', n, -view_dirs) < 0.0
    n[flip] = -n[flip]
    return n


## The albedo-independent factors of the BRDF, for any broadcastable shapes.
#
#  @return (s, t): s = D·V, the GGX distribution times the height-correlated Smith visibility,
#          and t = (1 − wo·h)^5, the Schlick weight.  The full BRDF is then
#          f = (1−m)·a/π + s·(F0 + (1 − F0)·t) with F0 = 0.04·(1−m) + m·a.
def EvalBrdfLobes(roughness, NL, NV, NH, VH):
    alpha = np.maximum(np.asarray(roughness, dtype=np.float64) ** 2, MIN_ALPHA)
    a2 = alpha * alpha

    denom = NH * NH * (a2 - 1.0) + 1.0
    D = a2 / (math.pi * denom * denom)

    V = 0.5 / (NL * np.sqrt(NV * NV * (1.0 - a2) + a2) + NV * np.sqrt(NL * NL * (1.0 - a2) + a2) )

    t = (1.0 - np.clip(VH, 0.0, 1.0) ) ** 5
    return D * V, t

def _checkAbove(n, w, name):
    c = float(np.dot(n, w) )
    if not c > 0.0:
        raise exceptions.rcRenderError(name + " is below the surface, cosine " + repr(c), name)
    return c

## Evaluates the BRDF for one pair of directions and returns it as a BRDFSample.
def SampleBrdf(albedo, roughness, metallic, n, wi, wo):
    albedo = np.asarray(albedo, dtype=np.float64)
    n = np.asarray(n, dtype=np.float64)
    wi = np.asarray(wi, dtype=np.float64)
    wo = np.asarray(wo, dtype=np.float64)
    NL = _checkAbove(n, wi, "wi")
    NV = _checkAbove(n, wo, "wo")

    h = _normalize(wi + wo)
    s, t = EvalBrdfLobes(roughness, NL, NV, float(np.dot(n, h) ), float(np.dot(wo, h) ) )
    F0 = F0_DIELECTRIC * (1.0 - metallic) + metallic * albedo
    F = F0 + (1.0 - F0) * t
    value = (1.0 - metallic) * albedo / math.pi + s * F
    return BRDFSample(value, wi, NL)

## f(wi, wo) for the given attributes, in RGB per steradian.
def EvalBrdf(albedo, roughness, metallic, n, wi, wo):
    return SampleBrdf(albedo, roughness, metallic, n, wi, wo).value


## @class ShadedCloud
#
#  The affine shading of every primitive of a cloud for one view and environment.  The split
#  into A and B stays valid for any albedo; only the clamp depends on the albedo, and it is
#  applied when colors are asked for.
class ShadedCloud(object):
    ## N×3, the albedo factor.
    __A = None
    ## N×3, the albedo-free part.
    __B = None
    ## N×3 surfel normals.
    __normals = None

    def __init__(self, A, B, normals):
        self.__A = A
        self.__B = B
        self.__normals = normals
        for a in (self.__A, self.__B, self.__normals):
            a.setflags(write=False)

    def __len__(self):
        return self.__A.shape[0]

    def A(self):
        return self.__A

    def B(self):
        return self.__B

    def Normals(self):
        return self.__normals

    ## Unclamped colors for an N×3 albedo array.
    def RawColors(self, albedos):
        return self.__A * albedos + self.__B

    ## Colors as handed to the rasterizer, clamped to [0,1], and the mask of clamped channels.
    def Colors(self, albedos):
        raw = self.RawColors(albedos)
        return np.clip(raw, 0.0, 1.0), (raw < 0.0) | (raw > 1.0)

    ## N×3×3 albedo Jacobians of the clamped colors.  Diagonal, zero on clamped channels.
    def Jacobians(self, albedos):
        color, clamped = self.Colors(albedos)
        return JacobianMatrices(np.where(clamped, 0.0, self.__A) )

    ## The diagonals of Jacobians(), as N×3.
    def JacobianDiagonals(self, albedos):
        color, clamped = self.Colors(albedos)
        return np.where(clamped, 0.0, self.__A)

## N×3 diagonals to N×3×3 matrices.
def JacobianMatrices(diagonals):
    J = np.zeros( (diagonals.shape[0], 3, 3) )
    idx = np.arange(3)
    J[:, idx, idx] = diagonals
    return J

## Shading factors for arrays of primitive attributes.  Everything here is vectorized over
#  the N primitives and the K quadrature nodes.
def _shadeArrays(means, R, scales, roughness, metallic, eye, env, n_theta, n_phi):
    local, weights = LocalRule(n_theta, n_phi)

    view = _normalize(means - eye)
    wo = -view
    normals = SurfelNormals(R, scales, view)
    t, b = _tangentFrames(normals)

    # N×K×3 incident directions.
    wi = local[None, :, 0:1] * t[:, None, :] + local[None, :, 1:2] * b[:, None, :] + local[None, :, 2:3] * normals[:, None, :]
    NL = local[None, :, 2]
    NV = np.clip(np.einsum('ni,ni->n', normals, wo), 0.0, 1.0)[:, None]

    h = _normalize(wi + wo[:, None, :])
    NH = np.einsum('nki,ni->nk', h, normals)
    VH = np.einsum('nki,ni->nk', h, wo)
    s, sch = EvalBrdfLobes(roughness[:, None], NL, NV, NH, VH)

    L = SampleEnv(env, wi.reshape(-1, 3) ).reshape(wi.shape)
    cw = NL * weights[None, :]

    m = metallic[:, None]
    diffuse = np.einsum('nk,nkc->nc', np.broadcast_to(cw, s.shape), L)
    metal = np.einsum('nk,nkc->nc', s * (1.0 - sch) * cw, L)
    spec = np.einsum('nk,nkc->nc', s * cw, L)
    schlick = np.einsum('nk,nkc->nc', s * sch * cw, L)

    A = (1.0 - m) / math.pi * diffuse + m * metal + env.Ambient()[None, :]
    B = F0_DIELECTRIC * (1.0 - m) * (spec - schlick) + schlick
    return A, B, normals

## Shades every primitive of a cloud for one camera and environment.  Primitives behind the
#  camera are shaded anyway, the rasterizer culls them.
def ShadeCloud(cloud, camera, env, n_theta=QUAD_THETA, n_phi=QUAD_PHI):
    if int(n_theta) < 1 or int(n_phi) < 1:
        raise exceptions.rcValidationError("quadrature needs at least one node per dimension, got " + str(n_theta) + "x" + str(n_phi), "quadrature")
    A, B, normals = _shadeArrays(cloud.Means(), cloud.RotationMatrices(), cloud.Scales(),
                                 cloud.Roughnesses(), cloud.Metallics(), camera.Position(),
                                 env, int(n_theta), int(n_phi) )
    if not (np.all(np.isfinite(A) ) and np.all(np.isfinite(B) ) ):
        raise exceptions.rcNumericError("shading produced non-finite values")
    return ShadedCloud(A, B, normals)

## Shades one primitive.
#
#  @param quad a HemisphereQuadrature.  Only its resolution is used; the nodes are laid out
#              around the primitive's own surfel normal.
#  @return (color, jacobian): the unclamped RGB and the 3×3 ∂color/∂albedo.
def Shade(g, camera, env, quad=None):
    if camera.WorldToCamera(g.Mean()[None, :])[0, 2] <= 0.0:
        raise exceptions.rcRenderError("primitive is behind the camera", "gaussian.mean")
    n_theta, n_phi = quad.Resolution() if quad is not None else (QUAD_THETA, QUAD_PHI)
    A, B, normals = _shadeArrays(g.Mean()[None, :], g.RotationMatrix()[None, :, :], g.Scale()[None, :],
                                 np.array([g.Roughness()]), np.array([g.Metallic()]),
                                 camera.Position(), env, n_theta, n_phi)
    return A[0] * g.Albedo() + B[0], np.diag(A[0])

## Shade, the slow way: one BRDF evaluation and one environment lookup per node.  Nodes where
#  the viewer is exactly at grazing are skipped.
def ShadeReference(g, camera, env, quad=None):
    n_theta, n_phi = quad.Resolution() if quad is not None else (QUAD_THETA, QUAD_PHI)
    view = _normalize(g.Mean() - camera.Position() )
    n = SurfelNormal(g, view)
    quad = HemisphereQuadrature(n, n_theta, n_phi)

    color = g.Albedo() * env.Ambient()
    if not np.dot(n, -view) > 0.0:
        return color
    for wi, weight in quad.Nodes():
        sample = SampleBrdf(g.Albedo(), g.Roughness(), g.Metallic(), n, wi, -view)
        color = color + sample.value * SampleEnv(env, wi) * sample.cos_term * weight
    return color

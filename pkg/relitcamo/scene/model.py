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
#  The scene: gaussians with physically based attributes, environment maps, cameras, the ground
#  truth box and the discretized space of physical configurations the attack is run over.
#
#  Coordinates are right-handed with z up.  Azimuth is measured from +x toward +y and pitch is
#  the elevation above the horizontal plane, both in degrees.

import math

import numpy as np

from relitcamo import exceptions
from relitcamo import log

_log = log.GetLogger(__name__)

## Quaternions within this distance of unit norm are accepted.  Nine significant digits in a
#  scene file can't do much better.
ROTATION_TOLERANCE = 1e-8

## Scales below this are singular as far as the renderer is concerned.
MIN_SCALE = 1e-9

## World up, and the up used when the view direction is parallel to it.
WORLD_UP = (0.0, 0.0, 1.0)
FALLBACK_UP = (1.0, 0.0, 0.0)

## Checks that value is a finite vector of the given length and returns it as a float array.
def _vector(value, length, path):
    try:
        arr = np.array(value, dtype=np.float64).reshape(-1)
    except (TypeError, ValueError):
        raise exceptions.rcValidationError("expected " + str(length) + " numbers, got " + repr(value), path)
    if arr.shape[0] != length:
        raise exceptions.rcValidationError("expected " + str(length) + " numbers, got " + str(arr.shape[0]), path)
    for a in range(length):
        if not math.isfinite(arr[a]):
            raise exceptions.rcValidationError("value is not finite", path + "[" + str(a) + "]")
    return arr

def _scalar(value, path):
    try:
        val = float(value)
    except (TypeError, ValueError):
        raise exceptions.rcValidationError("expected a number, got " + repr(value), path)
    if not math.isfinite(val):
        raise exceptions.rcValidationError("value is not finite", path)
    return val

## Clamps to [0,1], refusing NaN.
def _unit(value, path):
    return min(1.0, max(0.0, _scalar(value, path) ) )

## Converts a [w,x,y,z] quaternion to a rotation matrix.  The quaternion is normalized on the
#  way in, so matrices are orthonormal to rounding even for quaternions read from a file.
def QuaternionToMatrix(q):
    w, x, y, z = np.asarray(q, dtype=np.float64) / np.linalg.norm(q)
    return np.array([
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ])

## Same as QuaternionToMatrix, for an N×4 array of quaternions.  Returns N×3×3.
def QuaternionsToMatrices(qs):
    qs = np.asarray(qs, dtype=np.float64)
    qs = qs / np.linalg.norm(qs, axis=1, keepdims=True)
    w, x, y, z = qs[:, 0], qs[:, 1], qs[:, 2], qs[:, 3]
    R = np.empty((qs.shape[0], 3, 3) )
    R[:, 0, 0] = 1.0 - 2.0 * (y * y + z * z)
    R[:, 0, 1] = 2.0 * (x * y - w * z)
    R[:, 0, 2] = 2.0 * (x * z + w * y)
    R[:, 1, 0] = 2.0 * (x * y + w * z)
    R[:, 1, 1] = 1.0 - 2.0 * (x * x + z * z)
    R[:, 1, 2] = 2.0 * (y * z - w * x)
    R[:, 2, 0] = 2.0 * (x * z - w * y)
    R[:, 2, 1] = 2.0 * (y * z + w * x)
    R[:, 2, 2] = 1.0 - 2.0 * (x * x + y * y)
    return R


## @class GaussianPrimitive
#
#  One splat.  Geometry is a mean, a per-axis scale, a rotation and an opacity; appearance is
#  albedo, roughness and metallic.  There is no view-dependent color here at all: the color of a
#  primitive in any view comes out of the shader, from these attributes and the light.
#
#  Opacity, albedo, roughness and metallic are clamped to [0,1] whenever they are set.  The camo
#  flag marks primitives inside the camouflage region.  Only their albedo is ever optimized.
class GaussianPrimitive(object):
    __mean = None
    __scale = None
    ## [w,x,y,z]
    __rotation = None
    __opacity = None
    __albedo = None
    __roughness = None
    __metallic = None
    __camo = None

    ## Create a primitive.  Keyword arguments: mean, scale, rotation (defaults to identity),
    #  opacity (1), albedo (0.5 gray), roughness (1), metallic (0), camo (False), and path, the
    #  field path used in error messages.
    def __init__(self, **args):
        path = args.get('path', 'gaussian')

        self.__mean = _vector(args['mean'], 3, path + ".mean")

        self.__scale = _vector(args['scale'], 3, path + ".scale")
        for a in range(3):
            if not self.__scale[a] > 0.0:
                raise exceptions.rcValidationError("scale must be strictly positive, got " + repr(self.__scale[a]), path + ".scale[" + str(a) + "]")

        self.__rotation = _vector(args.get('rotation', (1.0, 0.0, 0.0, 0.0) ), 4, path + ".rotation")
        norm = float(np.linalg.norm(self.__rotation) )
        if abs(norm - 1.0) > ROTATION_TOLERANCE:
            raise exceptions.rcValidationError("rotation must be a unit quaternion, norm is " + repr(norm), path + ".rotation")

        self.SetOpacity(args.get('opacity', 1.0), path)
        self.SetAlbedo(args.get('albedo', (0.5, 0.5, 0.5) ), path)
        self.SetRoughness(args.get('roughness', 1.0), path)
        self.SetMetallic(args.get('metallic', 0.0), path)

        camo = args.get('camo', False)
        if not isinstance(camo, (bool, np.bool_) ):
            raise exceptions.rcValidationError("camo must be a boolean, got " + repr(camo), path + ".camo")
        self.__camo = bool(camo)

    def Mean(self):
        return self.__mean.copy()

    def Scale(self):
        return self.__scale.copy()

    def Rotation(self):
        return self.__rotation.copy()

    def Opacity(self):
        return self.__opacity

    def Albedo(self):
        return self.__albedo.copy()

    def Roughness(self):
        return self.__roughness

    def Metallic(self):
        return self.__metallic

    def IsCamo(self):
        return self.__camo

    def SetOpacity(self, opacity, path='gaussian'):
        self.__opacity = _unit(opacity, path + ".opacity")

    def SetAlbedo(self, albedo, path='gaussian'):
        albedo = _vector(albedo, 3, path + ".albedo")
        self.__albedo = np.clip(albedo, 0.0, 1.0)

    def SetRoughness(self, roughness, path='gaussian'):
        self.__roughness = _unit(roughness, path + ".roughness")

    def SetMetallic(self, metallic, path='gaussian'):
        self.__metallic = _unit(metallic, path + ".metallic")

    def RotationMatrix(self):
        return QuaternionToMatrix(self.__rotation)

    ## Σ = R·diag(s²)·Rᵀ
    def Covariance(self):
        R = self.RotationMatrix()
        return (R * (self.__scale ** 2) ) @ R.T

    ## Returns a copy, with any of the keyword arguments of the constructor replaced.
    def Copy(self, **args):
        desc = {
            'mean' : self.__mean,
            'scale' : self.__scale,
            'rotation' : self.__rotation,
            'opacity' : self.__opacity,
            'albedo' : self.__albedo,
            'roughness' : self.__roughness,
            'metallic' : self.__metallic,
            'camo' : self.__camo,
        }
        desc.update(args)
        return GaussianPrimitive(**desc)


## @class GaussianCloud
#
#  An ordered list of primitives and the point the cameras look at.  The array accessors stack
#  the per-primitive values for the vectorized renderer; they are rebuilt on every call, so a
#  primitive mutated through SetAlbedo shows up immediately.
class GaussianCloud(object):
    __primitives = None
    __target_center = None

    def __init__(self, primitives, target_center=(0.0, 0.0, 0.0) ):
        self.__primitives = list(primitives)
        if len(self.__primitives) == 0:
            raise exceptions.rcValidationError("a gaussian cloud needs at least one primitive", "gaussians")
        for a in self.__primitives:
            if not isinstance(a, GaussianPrimitive):
                raise exceptions.rcValidationError("not a GaussianPrimitive: " + repr(a), "gaussians")
        self.__target_center = _vector(target_center, 3, "target_center")

    def __len__(self):
        return len(self.__primitives)

    def __getitem__(self, index):
        return self.__primitives[index]

    def Primitives(self):
        return list(self.__primitives)

    def TargetCenter(self):
        return self.__target_center.copy()

    def Means(self):
        return np.array([ a.Mean() for a in self.__primitives ])

    def Scales(self):
        return np.array([ a.Scale() for a in self.__primitives ])

    def Rotations(self):
        return np.array([ a.Rotation() for a in self.__primitives ])

    def RotationMatrices(self):
        return QuaternionsToMatrices(self.Rotations() )

    ## N×3×3 world-space covariances.
    def Covariances(self):
        R = self.RotationMatrices()
        S2 = self.Scales() ** 2
        return np.einsum('nij,nj,nkj->nik', R, S2, R)

    def Opacities(self):
        return np.array([ a.Opacity() for a in self.__primitives ])

    def Albedos(self):
        return np.array([ a.Albedo() for a in self.__primitives ])

    def Roughnesses(self):
        return np.array([ a.Roughness() for a in self.__primitives ])

    def Metallics(self):
        return np.array([ a.Metallic() for a in self.__primitives ])

    ## Boolean array, True for primitives in the camouflage region.
    def CamoMask(self):
        return np.array([ a.IsCamo() for a in self.__primitives ], dtype=bool)

    def CamoIndices(self):
        return np.flatnonzero(self.CamoMask() )

    ## Returns a new cloud whose primitives carry the given N×3 albedos.  Nothing else changes.
    def WithAlbedos(self, albedos):
        albedos = np.asarray(albedos, dtype=np.float64)
        if albedos.shape != (len(self), 3):
            raise exceptions.rcValidationError("expected " + str(len(self) ) + "x3 albedos, got " + str(albedos.shape), "gaussians")
        prims = [ a.Copy(albedo=albedos[i]) for i, a in enumerate(self.__primitives) ]
        return GaussianCloud(prims, self.__target_center)


## @class PhysicalConfiguration
#
#  One physical configuration: where the camera is and which environment lights the scene.
class PhysicalConfiguration(object):
    pitch = None
    azimuth = None
    distance = None
    env = None

    def __init__(self, pitch, azimuth, distance, env):
        self.pitch = _scalar(pitch, "pitch")
        self.azimuth = _scalar(azimuth, "azimuth")
        self.distance = _scalar(distance, "distance")
        self.env = str(env)

        if self.pitch < 0.0 or self.pitch > 90.0:
            raise exceptions.rcValidationError("pitch must be in [0, 90], got " + repr(self.pitch), "pitch")
        if self.azimuth < 0.0 or self.azimuth >= 360.0:
            raise exceptions.rcValidationError("azimuth must be in [0, 360), got " + repr(self.azimuth), "azimuth")
        if not self.distance > 0.0:
            raise exceptions.rcValidationError("distance must be positive, got " + repr(self.distance), "distance")

    def __eq__(self, other):
        return isinstance(other, PhysicalConfiguration) and self.Key() == other.Key()

    def __hash__(self):
        return hash(self.Key() )

    def __repr__(self):
        return "PhysicalConfiguration(pitch=%r, azimuth=%r, distance=%r, env=%r)" % self.Key()

    def Key(self):
        return (self.pitch, self.azimuth, self.distance, self.env)

    ## Makes sure env names one of the given environment ids.
    def Validate(self, envIds, path="config"):
        if self.env not in envIds:
            raise exceptions.rcValidationError("unknown environment '" + self.env + "'", path + ".env")


## @class ConfigurationSpace
#
#  The discretized configuration space.  Cell i and its configuration map onto each other in
#  row-major order over (pitch, azimuth, distance, env), so the mapping is the same on every run.
class ConfigurationSpace(object):
    __pitch = None
    __azimuth = None
    __distance = None
    __envs = None

    def __init__(self, pitch, azimuth, distance, envs):
        self.__pitch = self.__bins(pitch, "pitch")
        self.__azimuth = self.__bins(azimuth, "azimuth")
        self.__distance = self.__bins(distance, "distance")

        self.__envs = [ str(a) for a in envs ]
        if len(self.__envs) == 0:
            raise exceptions.rcValidationError("dimension has no bins", "config_space.envs")
        if len(set(self.__envs) ) != len(self.__envs):
            raise exceptions.rcValidationError("environment ids must be unique", "config_space.envs")

        # Range checks on every bin value.
        for p in self.__pitch:
            PhysicalConfiguration(p, self.__azimuth[0], self.__distance[0], self.__envs[0])
        for a in self.__azimuth:
            PhysicalConfiguration(self.__pitch[0], a, self.__distance[0], self.__envs[0])
        for d in self.__distance:
            PhysicalConfiguration(self.__pitch[0], self.__azimuth[0], d, self.__envs[0])

    @staticmethod
    def __bins(values, name):
        path = "config_space." + name
        values = [ _scalar(v, path + "[" + str(i) + "]") for i, v in enumerate(values) ]
        if len(values) == 0:
            raise exceptions.rcValidationError("dimension has no bins", path)
        for a in range(1, len(values) ):
            if not values[a] > values[a - 1]:
                raise exceptions.rcValidationError("bins must be strictly increasing", path + "[" + str(a) + "]")
        return values

    def PitchBins(self):
        return list(self.__pitch)

    def AzimuthBins(self):
        return list(self.__azimuth)

    def DistanceBins(self):
        return list(self.__distance)

    def EnvIds(self):
        return list(self.__envs)

    ## (|pitch|, |azimuth|, |distance|, |env|)
    def Shape(self):
        return (len(self.__pitch), len(self.__azimuth), len(self.__distance), len(self.__envs) )

    ## The number of cells.
    def Q(self):
        p, a, d, e = self.Shape()
        return p * a * d * e

    def __len__(self):
        return self.Q()

    ## Returns the bin indices (pitch, azimuth, distance, env) of cell i.
    def Unravel(self, index):
        index = int(index)
        if index < 0 or index >= self.Q():
            raise exceptions.rcValidationError("cell index " + str(index) + " out of range [0, " + str(self.Q() ) + ")", "cell")
        return tuple(int(a) for a in np.unravel_index(index, self.Shape() ) )

    def ConfigOf(self, index):
        ip, ia, idist, ie = self.Unravel(index)
        return PhysicalConfiguration(self.__pitch[ip], self.__azimuth[ia], self.__distance[idist], self.__envs[ie])

    ## Returns the cell index of cfg, which must sit exactly on the grid.
    def IndexOf(self, cfg):
        try:
            ip = self.__pitch.index(cfg.pitch)
            ia = self.__azimuth.index(cfg.azimuth)
            idist = self.__distance.index(cfg.distance)
            ie = self.__envs.index(cfg.env)
        except ValueError:
            raise exceptions.rcValidationError("configuration is not on the grid: " + repr(cfg), "config")
        return int(np.ravel_multi_index( (ip, ia, idist, ie), self.Shape() ) )

    def Configs(self):
        return [ self.ConfigOf(i) for i in range(self.Q() ) ]

    def Validate(self, envIds):
        for i, e in enumerate(self.__envs):
            if e not in envIds:
                raise exceptions.rcValidationError("unknown environment '" + e + "'", "config_space.envs[" + str(i) + "]")

    def __eq__(self, other):
        return isinstance(other, ConfigurationSpace) and \
            (self.__pitch, self.__azimuth, self.__distance, self.__envs) == \
            (other.PitchBins(), other.AzimuthBins(), other.DistanceBins(), other.EnvIds() )

## Discretizes the configuration space into a grid of cells.
def DiscretizeSpace(pitch_bins, azimuth_bins, distance_bins, env_ids):
    return ConfigurationSpace(pitch_bins, azimuth_bins, distance_bins, env_ids)

## The full evaluation grid: 10 pitches, 18 azimuths, 4 distances and 6 weathers, 4320 cells.
def ReferenceSpace():
    return DiscretizeSpace(
        [ 10.0 * a for a in range(10) ],
        [ 20.0 * a for a in range(18) ],
        [5.0, 10.0, 15.0, 20.0],
        ["dark", "foggy", "golden", "hardnoon", "normal", "overcast"] )


## @class EnvironmentMap
#
#  An equirectangular map of linear radiance.  Row v runs over the polar angle from the zenith
#  (top row) down, column u runs over the azimuth starting at +x.  The ambient term is the
#  constant stand-in for all indirect light.
class EnvironmentMap(object):
    __id = None
    __radiance = None
    __ambient = None
    ## Where the radiance lives on disk, relative to the scene file.  Kept so a saved scene
    #  points at the same file it was loaded from.
    __radiance_path = None

    def __init__(self, **args):
        self.__id = str(args['id'])
        path = args.get('path', "environments[" + self.__id + "]")

        radiance = np.array(args['radiance'], dtype=np.float64)
        if radiance.ndim != 3 or radiance.shape[2] != 3:
            raise exceptions.rcValidationError("radiance must be H×W×3, got shape " + str(radiance.shape), path + ".radiance")
        h, w = radiance.shape[0], radiance.shape[1]
        if h < 1 or w != 2 * h:
            raise exceptions.rcValidationError("width must be twice the height, got " + str(w) + "x" + str(h), path + ".width")
        if not np.all(np.isfinite(radiance) ):
            raise exceptions.rcValidationError("radiance has non-finite values", path + ".radiance")
        if np.any(radiance < 0.0):
            raise exceptions.rcValidationError("radiance must be nonnegative", path + ".radiance")
        self.__radiance = radiance
        self.__radiance.setflags(write=False)

        self.__ambient = _vector(args.get('ambient', (0.0, 0.0, 0.0) ), 3, path + ".ambient")
        if np.any(self.__ambient < 0.0):
            raise exceptions.rcValidationError("ambient must be nonnegative", path + ".ambient")

        self.__radiance_path = args.get('radiance_path', self.__id + ".bin")

    def id(self):
        return self.__id

    def Width(self):
        return self.__radiance.shape[1]

    def Height(self):
        return self.__radiance.shape[0]

    def Radiance(self):
        return self.__radiance

    def Ambient(self):
        return self.__ambient.copy()

    def RadiancePath(self):
        return self.__radiance_path

    ## Per-channel mean radiance over the pixels of the map.
    def MeanRadiance(self):
        return self.__radiance.reshape(-1, 3).mean(axis=0)

## Builds a constant environment map.  Mostly for tests and furnaces.
def ConstantEnvironment(envId, value, height=8, ambient=(0.0, 0.0, 0.0) ):
    radiance = np.empty( (height, 2 * height, 3) )
    radiance[...] = np.asarray(value, dtype=np.float64)
    return EnvironmentMap(id=envId, radiance=radiance, ambient=ambient)


## @class Camera
#
#  A pinhole camera.  Camera space has x to the right, y down the image and z along the view
#  direction, so depth is z.  Pixel centers sit at half-integer coordinates.
class Camera(object):
    __position = None
    __look_at = None
    __up = None
    __fov = None
    __width = None
    __height = None
    ## Rows are the camera axes (right, down, forward) in world coordinates.
    __rotation = None
    ## True when the requested up was parallel to the view direction and FALLBACK_UP was used.
    __fallback_up = None

    def __init__(self, **args):
        self.__position = _vector(args['position'], 3, "camera.position")
        self.__look_at = _vector(args['look_at'], 3, "camera.look_at")
        up = _vector(args.get('up', WORLD_UP), 3, "camera.up")
        self.__fov = _scalar(args.get('fov', 45.0), "camera.fov")
        self.__width = int(args['width'])
        self.__height = int(args['height'])
        self.__fallback_up = bool(args.get('fallback_up', False) )

        if not 0.0 < self.__fov < 180.0:
            raise exceptions.rcValidationError("vertical fov must be in (0, 180), got " + repr(self.__fov), "camera.fov")
        if self.__width < 1 or self.__height < 1:
            raise exceptions.rcValidationError("image must be at least 1x1", "camera.width")

        forward = self.__look_at - self.__position
        dist = np.linalg.norm(forward)
        if not dist > 0.0:
            raise exceptions.rcValidationError("position and look_at coincide", "camera.position")
        forward = forward / dist

        right = np.cross(forward, up)
        if np.linalg.norm(right) < 1e-9 * max(1.0, np.linalg.norm(up) ):
            raise exceptions.rcValidationError("up is parallel to the view direction", "camera.up")
        right = right / np.linalg.norm(right)
        down = np.cross(forward, right)

        self.__up = up
        self.__rotation = np.array([right, down, forward])

    def Position(self):
        return self.__position.copy()

    def LookAt(self):
        return self.__look_at.copy()

    def Up(self):
        return self.__up.copy()

    def Fov(self):
        return self.__fov

    def Width(self):
        return self.__width

    def Height(self):
        return self.__height

    def Forward(self):
        return self.__rotation[2].copy()

    ## World-to-camera rotation W.  Rows are right, down, forward.
    def Rotation(self):
        return self.__rotation.copy()

    ## Focal length in pixels.  Pixels are square, so it's the same for x and y.
    def Focal(self):
        return 0.5 * self.__height / math.tan(math.radians(0.5 * self.__fov) )

    ## The principal point, which is the center of the image.
    def Principal(self):
        return (0.5 * self.__width, 0.5 * self.__height)

    ## Transforms N×3 world points into camera space.
    def WorldToCamera(self, points):
        points = np.asarray(points, dtype=np.float64)
        return (points - self.__position) @ self.__rotation.T

    ## Anything worth reporting about how the camera was built.
    def Metadata(self):
        return { 'fallback_up' : self.__fallback_up }

## Builds the camera for a configuration: on the sphere of radius distance around
#  target_center, at the configuration's pitch and azimuth, looking at the center with z up.
#  Looking straight down makes z up useless, so FALLBACK_UP is used and the camera metadata
#  says so.
def CameraFromConfig(cfg, target_center, fov_deg, width, height):
    target_center = _vector(target_center, 3, "target_center")
    pitch = math.radians(cfg.pitch)
    azimuth = math.radians(cfg.azimuth)
    direction = np.array([
        math.cos(pitch) * math.cos(azimuth),
        math.cos(pitch) * math.sin(azimuth),
        math.sin(pitch) ])
    position = target_center + cfg.distance * direction

    up = np.array(WORLD_UP)
    fallback = False
    if np.linalg.norm(np.cross(-direction, up) ) < 1e-9:
        up = np.array(FALLBACK_UP)
        fallback = True
        _log.warning("camera at pitch %r azimuth %r looks along the up axis, using fallback up", cfg.pitch, cfg.azimuth)

    return Camera(position=position, look_at=target_center, up=up, fov=fov_deg,
                  width=width, height=height, fallback_up=fallback)


## @class GroundTruthBox
#
#  The box the detector is supposed to find, in pixels.
class GroundTruthBox(object):
    xmin = None
    ymin = None
    xmax = None
    ymax = None
    class_id = None

    def __init__(self, xmin, ymin, xmax, ymax, class_id=0, path="ground_truth"):
        self.xmin = _scalar(xmin, path + ".xmin")
        self.ymin = _scalar(ymin, path + ".ymin")
        self.xmax = _scalar(xmax, path + ".xmax")
        self.ymax = _scalar(ymax, path + ".ymax")
        if isinstance(class_id, bool) or int(class_id) != class_id:
            raise exceptions.rcValidationError("class_id must be an integer, got " + repr(class_id), path + ".class_id")
        self.class_id = int(class_id)

        if not self.xmin < self.xmax:
            raise exceptions.rcValidationError("xmin must be less than xmax", path + ".xmin")
        if not self.ymin < self.ymax:
            raise exceptions.rcValidationError("ymin must be less than ymax", path + ".ymin")

    def Box(self):
        return (self.xmin, self.ymin, self.xmax, self.ymax)

    ## Makes sure the box sits inside a width×height image.
    def Validate(self, width, height, path="ground_truth"):
        if self.xmin < 0.0 or self.ymin < 0.0:
            raise exceptions.rcValidationError("box starts outside the image", path)
        if self.xmax > width or self.ymax > height:
            raise exceptions.rcValidationError("box ends outside the " + str(width) + "x" + str(height) + " image", path)

    def __repr__(self):
        return "GroundTruthBox(%r, %r, %r, %r, class_id=%r)" % (self.xmin, self.ymin, self.xmax, self.ymax, self.class_id)


## @class Scene
#
#  Everything an attack needs to know about the world: the cloud, the environments by id, the
#  background photo (linear, H×W×3) with the environment it was taken under, the ground truth
#  and the configuration space.  The image size of every render is the background's size.
class Scene(object):
    __cloud = None
    __environments = None
    __background = None
    __background_env = None
    __background_path = None
    __ground_truth = None
    __ground_truth_from_mask = None
    __space = None
    __fov = None

    def __init__(self, **args):
        self.__cloud = args['cloud']
        envs = args['environments']
        if isinstance(envs, dict):
            envs = list(envs.values() )
        self.__environments = {}
        for e in envs:
            if e.id() in self.__environments:
                raise exceptions.rcValidationError("duplicate environment id '" + e.id() + "'", "environments")
            self.__environments[e.id()] = e
        if len(self.__environments) == 0:
            raise exceptions.rcValidationError("a scene needs at least one environment", "environments")

        background = np.array(args['background'], dtype=np.float64)
        if background.ndim != 3 or background.shape[2] != 3:
            raise exceptions.rcValidationError("background must be H×W×3", "background_path")
        if not np.all(np.isfinite(background) ) or background.min() < 0.0 or background.max() > 1.0:
            raise exceptions.rcValidationError("background values must be in [0,1]", "background_path")
        self.__background = background
        self.__background.setflags(write=False)
        self.__background_path = args.get('background_path', "background.ppm")

        self.__background_env = str(args.get('background_env', self.EnvIds()[0]) )
        if self.__background_env not in self.__environments:
            raise exceptions.rcValidationError("unknown environment '" + self.__background_env + "'", "background_env")

        self.__ground_truth = args['ground_truth']
        self.__ground_truth.Validate(self.Width(), self.Height() )
        self.__ground_truth_from_mask = bool(args.get('ground_truth_from_mask', False) )

        self.__space = args['space']
        self.__space.Validate(self.__environments)

        self.__fov = _scalar(args.get('fov', 45.0), "fov")
        if not 0.0 < self.__fov < 180.0:
            raise exceptions.rcValidationError("vertical fov must be in (0, 180), got " + repr(self.__fov), "fov")

    def Cloud(self):
        return self.__cloud

    def Environments(self):
        return dict(self.__environments)

    def EnvIds(self):
        return list(self.__environments.keys() )

    def Environment(self, envId):
        if envId not in self.__environments:
            raise exceptions.rcValidationError("unknown environment '" + str(envId) + "'", "env")
        return self.__environments[envId]

    def Background(self):
        return self.__background

    def BackgroundPath(self):
        return self.__background_path

    def BackgroundEnv(self):
        return self.__background_env

    def GroundTruth(self):
        return self.__ground_truth

    def GroundTruthFromMask(self):
        return self.__ground_truth_from_mask

    def Space(self):
        return self.__space

    def Fov(self):
        return self.__fov

    def Width(self):
        return self.__background.shape[1]

    def Height(self):
        return self.__background.shape[0]

    ## The camera for a configuration of this scene.
    def Camera(self, cfg):
        cfg.Validate(self.__environments)
        return CameraFromConfig(cfg, self.__cloud.TargetCenter(), self.__fov, self.Width(), self.Height() )

    ## Returns a new scene with another cloud.  Everything else is shared.
    def WithCloud(self, cloud):
        return Scene(cloud=cloud,
                     environments=list(self.__environments.values() ),
                     background=self.__background,
                     background_path=self.__background_path,
                     background_env=self.__background_env,
                     ground_truth=self.__ground_truth,
                     ground_truth_from_mask=self.__ground_truth_from_mask,
                     space=self.__space,
                     fov=self.__fov)

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
#  Scene files.  A scene is a UTF-8 JSON file with the gaussians, the environments (each
#  pointing at a raw radiance file), the background PPM, the ground truth box, the
#  configuration space and the target center.  Paths inside the file are relative to it.
#
#  Files are written canonically: keys sorted, floats with nine significant digits, a fixed
#  indentation.  Saving a scene that was just loaded reproduces the file byte for byte.

import json
import math

import numpy as np

from relitcamo import exceptions
from relitcamo import log
from relitcamo import paths
from relitcamo.scene import imageio
from relitcamo.scene import model

_log = log.GetLogger(__name__)

_GAUSSIAN_KEYS = ('mean', 'scale', 'rotation', 'opacity', 'albedo', 'roughness', 'metallic', 'camo')
_ENV_KEYS = ('id', 'width', 'height', 'radiance_path', 'ambient')
_BOX_KEYS = ('xmin', 'ymin', 'xmax', 'ymax', 'class_id')
_SPACE_KEYS = ('pitch', 'azimuth', 'distance', 'envs')
_REQUIRED = ('gaussians', 'environments', 'background_path', 'ground_truth', 'config_space', 'target_center')
_OPTIONAL = ('background_env', 'ground_truth_from_mask', 'fov')

## Formats a float the way every file written by this package does.
def FormatFloat(value, path="value"):
    value = float(value)
    if not math.isfinite(value):
        raise exceptions.rcValidationError("refusing to write a non-finite value", path)
    text = "%.9g" % value
    if text == "-0":
        text = "0"
    return text

## Serializes plain data canonically.  Dictionaries get sorted keys, lists of scalars stay on
#  one line, everything else is indented by two spaces per level.
def DumpCanonical(obj, path="", indent=0):
    pad = "  " * indent
    if isinstance(obj, dict):
        if len(obj) == 0:
            return "{}"
        items = []
        for key in sorted(obj.keys() ):
            sub = path + "." + key if path else key
            items.append(pad + "  " + json.dumps(str(key) ) + ": " + DumpCanonical(obj[key], sub, indent + 1) )
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray) ):
        obj = list(obj)
        if len(obj) == 0:
            return "[]"
        parts = [ DumpCanonical(v, path + "[" + str(i) + "]", indent + 1) for i, v in enumerate(obj) ]
        if all(not isinstance(v, (dict, list, tuple, np.ndarray) ) for v in obj):
            return "[" + ", ".join(parts) + "]"
        return "[\n" + ",\n".join(pad + "  " + p for p in parts) + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_) ):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer) ):
        return str(int(obj) )
    if isinstance(obj, (float, np.floating) ):
        return FormatFloat(obj, path or "value")
    if obj is None:
        return "null"
    return json.dumps(str(obj), ensure_ascii=False)

## Reads and parses a JSON file.  Returns the parsed object.
def ReadJson(path):
    with paths.OpenFile(path, 'rb') as f:
        raw = f.read()
    try:
        return json.loads(raw.decode('utf-8') )
    except UnicodeDecodeError as err:
        raise exceptions.rcParseError("'" + str(path) + "' is not UTF-8: " + str(err) )
    except json.JSONDecodeError as err:
        raise exceptions.rcParseError("'" + str(path) + "' line " + str(err.lineno) + " column " + str(err.colno) + ": " + err.msg)

## Writes text produced by DumpCanonical, with a trailing newline.
def WriteText(path, text):
    with paths.OpenFile(path, 'wb') as f:
        f.write( (text + "\n").encode('utf-8') )

def _object(value, keys, required, path):
    if not isinstance(value, dict):
        raise exceptions.rcValidationError("expected an object", path)
    for key in value:
        if key not in keys:
            raise exceptions.rcValidationError("unknown key '" + str(key) + "'", path + "." + str(key) if path else str(key) )
    for key in required:
        if key not in value:
            raise exceptions.rcValidationError("missing key '" + key + "'", path + "." + key if path else key)
    return value

def _list(value, path):
    if not isinstance(value, list):
        raise exceptions.rcValidationError("expected an array", path)
    return value

def _int(value, path):
    if isinstance(value, bool) or not isinstance(value, int):
        raise exceptions.rcValidationError("expected an integer, got " + repr(value), path)
    return value

## Number in [0,1].  Out of range values in a file are an error, not something to clamp.
def _unit(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float) ):
        raise exceptions.rcValidationError("expected a number, got " + repr(value), path)
    if not 0.0 <= value <= 1.0:
        raise exceptions.rcValidationError("must be in [0, 1], got " + repr(value), path)
    return value

def _gaussian(desc, index):
    path = "gaussians[" + str(index) + "]"
    _object(desc, _GAUSSIAN_KEYS, _GAUSSIAN_KEYS, path)
    _unit(desc['opacity'], path + ".opacity")
    _unit(desc['roughness'], path + ".roughness")
    _unit(desc['metallic'], path + ".metallic")
    albedo = _list(desc['albedo'], path + ".albedo")
    for a, v in enumerate(albedo):
        _unit(v, path + ".albedo[" + str(a) + "]")
    if not isinstance(desc['camo'], bool):
        raise exceptions.rcValidationError("expected true or false", path + ".camo")
    return model.GaussianPrimitive(path=path, **desc)

def _environment(desc, index, scenePath):
    path = "environments[" + str(index) + "]"
    _object(desc, _ENV_KEYS, _ENV_KEYS, path)
    width = _int(desc['width'], path + ".width")
    height = _int(desc['height'], path + ".height")
    if width < 2 or height < 1 or width != 2 * height:
        raise exceptions.rcValidationError("width must be twice the height, got " + str(width) + "x" + str(height), path + ".width")
    if not isinstance(desc['radiance_path'], str):
        raise exceptions.rcValidationError("expected a path", path + ".radiance_path")
    radiance = imageio.ReadRadiance(paths.Resolve(scenePath, desc['radiance_path']), width, height)
    return model.EnvironmentMap(id=desc['id'], radiance=radiance, ambient=desc['ambient'],
                                radiance_path=desc['radiance_path'], path=path)

## Loads a scene.  Every invariant of the model is checked; the first violation raises an
#  rcValidationError naming the offending field.
#
#  @param path the scene JSON file.
#  @return a model.Scene
def LoadScene(path):
    desc = ReadJson(path)
    _object(desc, _REQUIRED + _OPTIONAL, _REQUIRED, "")

    prims = [ _gaussian(g, i) for i, g in enumerate(_list(desc['gaussians'], "gaussians") ) ]
    if len(prims) == 0:
        raise exceptions.rcValidationError("a scene needs at least one gaussian", "gaussians")
    cloud = model.GaussianCloud(prims, desc['target_center'])

    envs = [ _environment(e, i, path) for i, e in enumerate(_list(desc['environments'], "environments") ) ]

    if not isinstance(desc['background_path'], str):
        raise exceptions.rcValidationError("expected a path", "background_path")
    background = imageio.ReadPpm(paths.Resolve(path, desc['background_path']) )

    box = _object(desc['ground_truth'], _BOX_KEYS, _BOX_KEYS, "ground_truth")
    gt = model.GroundTruthBox(box['xmin'], box['ymin'], box['xmax'], box['ymax'],
                              _int(box['class_id'], "ground_truth.class_id") )

    space = _object(desc['config_space'], _SPACE_KEYS, _SPACE_KEYS, "config_space")
    space = model.DiscretizeSpace(_list(space['pitch'], "config_space.pitch"),
                                  _list(space['azimuth'], "config_space.azimuth"),
                                  _list(space['distance'], "config_space.distance"),
                                  _list(space['envs'], "config_space.envs") )

    fromMask = desc.get('ground_truth_from_mask', False)
    if not isinstance(fromMask, bool):
        raise exceptions.rcValidationError("expected true or false", "ground_truth_from_mask")

    args = {
        'cloud' : cloud,
        'environments' : envs,
        'background' : background,
        'background_path' : desc['background_path'],
        'ground_truth' : gt,
        'ground_truth_from_mask' : fromMask,
        'space' : space,
    }
    if 'background_env' in desc:
        args['background_env'] = desc['background_env']
    if 'fov' in desc:
        args['fov'] = desc['fov']

    scene = model.Scene(**args)
    _log.debug("loaded scene '%s': %d gaussians, %d environments, q=%d", path, len(cloud), len(envs), space.Q() )
    return scene

## The plain-data form of a scene, as written to disk.
def SceneToDict(scene):
    gaussians = []
    for g in scene.Cloud().Primitives():
        gaussians.append({
            'mean' : g.Mean(),
            'scale' : g.Scale(),
            'rotation' : g.Rotation(),
            'opacity' : g.Opacity(),
            'albedo' : g.Albedo(),
            'roughness' : g.Roughness(),
            'metallic' : g.Metallic(),
            'camo' : g.IsCamo(),
        })

    envs = []
    for e in scene.Environments().values():
        envs.append({
            'id' : e.id(),
            'width' : e.Width(),
            'height' : e.Height(),
            'radiance_path' : e.RadiancePath(),
            'ambient' : e.Ambient(),
        })

    gt = scene.GroundTruth()
    space = scene.Space()
    return {
        'gaussians' : gaussians,
        'environments' : envs,
        'background_path' : scene.BackgroundPath(),
        'background_env' : scene.BackgroundEnv(),
        'ground_truth' : {
            'xmin' : gt.xmin, 'ymin' : gt.ymin, 'xmax' : gt.xmax, 'ymax' : gt.ymax,
            'class_id' : gt.class_id,
        },
        'ground_truth_from_mask' : scene.GroundTruthFromMask(),
        'config_space' : {
            'pitch' : space.PitchBins(),
            'azimuth' : space.AzimuthBins(),
            'distance' : space.DistanceBins(),
            'envs' : space.EnvIds(),
        },
        'target_center' : scene.Cloud().TargetCenter(),
        'fov' : scene.Fov(),
    }

## Saves a scene.  The whole file is formatted before anything is written, so a scene with a
#  non-finite value raises and leaves nothing behind.
#
#  @param scene the model.Scene
#  @param path where the JSON goes.
#  @param assets also write the radiance binaries and background PPM next to the file, at the
#                relative paths the scene names.  Absolute paths are never written to.
def SaveScene(scene, path, assets=True):
    text = DumpCanonical(SceneToDict(scene) )

    base = paths.GetDir(paths.UnHome(path) )
    if base:
        paths.MkDir(base)

    if assets:
        for e in scene.Environments().values():
            if not paths.IsAbsolute(e.RadiancePath() ):
                target = paths.Resolve(path, e.RadiancePath() )
                paths.MkDir(paths.GetDir(target) )
                imageio.WriteRadiance(target, e.Radiance() )
        if not paths.IsAbsolute(scene.BackgroundPath() ):
            target = paths.Resolve(path, scene.BackgroundPath() )
            paths.MkDir(paths.GetDir(target) )
            imageio.WritePpm(target, scene.Background() )
    WriteText(path, text)
    _log.debug("saved scene to '%s'", path)

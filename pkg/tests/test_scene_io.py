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

import json

import numpy as np
import pytest

from relitcamo import exceptions
from relitcamo.scene import imageio
from relitcamo.scene import io

from conftest import BuildSmallScene

def _saved(tmp_path, scene=None):
    path = str(tmp_path / "scene.json")
    io.SaveScene(scene if scene is not None else BuildSmallScene(), path)
    return path

def _rewrite(path, edit):
    with open(path) as f:
        desc = json.load(f)
    edit(desc)
    with open(path, 'w') as f:
        json.dump(desc, f)


@pytest.mark.parametrize("value,text", [ (0.1, "0.1"), (-0.0, "0"), (1.0, "1"), (1.0 / 3.0, "0.333333333"), (1e-12, "1e-12") ])
def test_format_float(value, text):
    assert io.FormatFloat(value) == text

def test_format_float_refuses_nan():
    with pytest.raises(exceptions.rcValidationError):
        io.FormatFloat(float('nan'), "x")

def test_dump_canonical_sorts_keys_and_keeps_scalar_lists_inline():
    text = io.DumpCanonical({ 'b' : [1, 2.5], 'a' : { 'c' : True } })
    assert text == '{\n  "a": {\n    "c": true\n  },\n  "b": [1, 2.5]\n}'

def test_save_load_save_is_byte_identical(tmp_path):
    path = _saved(tmp_path)
    with open(path, 'rb') as f:
        first = f.read()
    again = str(tmp_path / "again.json")
    io.SaveScene(io.LoadScene(path), again)
    with open(again, 'rb') as f:
        assert f.read() == first

def test_load_restores_scene(tmp_path):
    scene = BuildSmallScene()
    loaded = io.LoadScene(_saved(tmp_path, scene) )
    assert len(loaded.Cloud() ) == len(scene.Cloud() )
    assert np.allclose(loaded.Cloud().Albedos(), scene.Cloud().Albedos(), atol=1e-8)
    assert loaded.Cloud().CamoMask().tolist() == scene.Cloud().CamoMask().tolist()
    assert np.array_equal(loaded.Background(), scene.Background() )
    assert loaded.Space() == scene.Space()
    assert loaded.EnvIds() == scene.EnvIds()
    for e in scene.EnvIds():
        expected = scene.Environment(e).Radiance().astype(np.float32).astype(np.float64)
        assert np.array_equal(loaded.Environment(e).Radiance(), expected)

def test_out_of_range_value_names_the_field(tmp_path):
    path = _saved(tmp_path)
    _rewrite(path, lambda d: d['gaussians'][3]['albedo'].__setitem__(1, 1.5) )
    with pytest.raises(exceptions.rcValidationError) as err:
        io.LoadScene(path)
    assert err.value.path == "gaussians[3].albedo[1]"
    assert err.value.exitcode == 2

def test_unknown_key_is_rejected(tmp_path):
    path = _saved(tmp_path)
    _rewrite(path, lambda d: d.__setitem__('colour', 1) )
    with pytest.raises(exceptions.rcValidationError) as err:
        io.LoadScene(path)
    assert err.value.path == "colour"

def test_missing_key_is_rejected(tmp_path):
    path = _saved(tmp_path)
    _rewrite(path, lambda d: d.pop('target_center') )
    with pytest.raises(exceptions.rcValidationError):
        io.LoadScene(path)

def test_non_unit_quaternion_is_rejected(tmp_path):
    path = _saved(tmp_path)
    _rewrite(path, lambda d: d['gaussians'][0].__setitem__('rotation', [1.0, 0.5, 0.0, 0.0]) )
    with pytest.raises(exceptions.rcValidationError) as err:
        io.LoadScene(path)
    assert err.value.path == "gaussians[0].rotation"

def test_unknown_space_env_is_rejected(tmp_path):
    path = _saved(tmp_path)
    _rewrite(path, lambda d: d['config_space'].__setitem__('envs', ['bright', 'foggy']) )
    with pytest.raises(exceptions.rcValidationError):
        io.LoadScene(path)

def test_malformed_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{ "gaussians": [ }')
    with pytest.raises(exceptions.rcParseError) as err:
        io.LoadScene(str(path) )
    assert "line 1" in str(err.value)
    assert err.value.exitcode == 1

def test_missing_file():
    with pytest.raises(exceptions.rcIOError):
        io.LoadScene("/nonexistent/scene.json")

def test_wrong_radiance_size(tmp_path):
    path = _saved(tmp_path)
    _rewrite(path, lambda d: [ e.update(width=32, height=16) for e in d['environments'] ])
    with pytest.raises(exceptions.rcParseError):
        io.LoadScene(path)

def test_optional_keys_round_trip(tmp_path):
    path = _saved(tmp_path)
    _rewrite(path, lambda d: d.update(background_env='dim', ground_truth_from_mask=True, fov=30.0) )
    scene = io.LoadScene(path)
    assert scene.BackgroundEnv() == 'dim'
    assert scene.GroundTruthFromMask()
    assert scene.Fov() == 30.0

def test_dump_canonical_names_non_finite_values():
    with pytest.raises(exceptions.rcValidationError) as err:
        io.DumpCanonical({ 'target_center' : [0.0, float('inf')] })
    assert err.value.path == "target_center[1]"

def test_background_survives_the_gamma_round_trip(tmp_path):
    scene = BuildSmallScene()
    path = _saved(tmp_path, scene)
    raw = imageio.ReadPpm(str(tmp_path / "background.ppm"), decode=False)
    assert np.array_equal(imageio.DecodeGamma(raw), scene.Background() )

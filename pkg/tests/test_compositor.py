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

import numpy as np
import pytest

from relitcamo import exceptions
from relitcamo import verify
from relitcamo.render import compositor
from relitcamo.render import shading
from relitcamo.render import splat
from relitcamo.scene import model

from conftest import SMALL_QUAD

def test_same_environment_returns_a_copy():
    env = model.ConstantEnvironment('noon', 1.0)
    bg = np.full( (4, 4, 3), 0.3)
    out = compositor.ParametricRelighter().Relight(bg, env, env)
    assert np.array_equal(out, bg)
    assert out is not bg

def test_relight_scales_by_mean_radiance():
    src = model.ConstantEnvironment('noon', (1.0, 1.0, 2.0) )
    tgt = model.ConstantEnvironment('dusk', (0.5, 0.25, 1.0) )
    out = compositor.RelightBackgroundParametric(np.full( (2, 2, 3), 0.4), src, tgt)
    assert out[0, 0].tolist() == pytest.approx([0.2, 0.1, 0.2])

def test_relight_gains_are_clamped():
    black = model.ConstantEnvironment('black', 0.0)
    white = model.ConstantEnvironment('white', 1.0)
    assert compositor.RelightGains(black, white).tolist() == [compositor.MAX_GAIN] * 3
    assert compositor.RelightGains(white, black).tolist() == [compositor.MIN_GAIN] * 3
    out = compositor.RelightBackgroundParametric(np.full( (2, 2, 3), 0.5), black, white)
    assert np.all(out == 1.0)

def test_relight_checks_the_background():
    env = model.ConstantEnvironment('noon', 1.0)
    with pytest.raises(exceptions.rcRenderError):
        compositor.RelightBackgroundParametric(np.zeros( (4, 4) ), env, env)
    with pytest.raises(exceptions.rcRenderError):
        compositor.RelightBackgroundParametric(np.zeros( (4, 4, 3) ), env, env, shape=(4, 5) )

def test_base_relighter_is_abstract():
    env = model.ConstantEnvironment('noon', 1.0)
    with pytest.raises(exceptions.rcExceptionNotImplemented) as info:
        compositor.BackgroundRelighter().Relight(np.zeros( (2, 2, 3) ), env, env)
    assert info.value.exitcode == 1


def test_composite_respects_the_mask():
    rgb = np.full( (2, 2, 3), 0.8)
    bg = np.full( (2, 2, 3), 0.2)
    mask = np.array([ [0.0, 1.0], [0.5, 0.25] ])
    out = compositor.CompositeArrays(rgb, mask, bg)
    assert out[0, 0].tolist() == [0.2] * 3
    assert out[0, 1].tolist() == [0.8] * 3
    assert out[1, 0].tolist() == pytest.approx([0.5] * 3)
    assert out[1, 1].tolist() == pytest.approx([0.35] * 3)

def test_composite_shape_mismatch():
    with pytest.raises(exceptions.rcRenderError):
        compositor.CompositeArrays(np.zeros( (2, 2, 3) ), np.zeros( (2, 2) ), np.zeros( (2, 3, 3) ) )

def test_composite_backward_is_the_mask():
    mask = np.array([ [0.0, 1.0], [0.5, 0.25] ])
    g = np.ones( (2, 2, 3) )
    assert np.array_equal(compositor.CompositeBackward(mask, g), np.repeat(mask[:, :, None], 3, axis=2) )

def test_composite_of_empty_render_is_the_background():
    camera = model.Camera(position=(0.0, -4.0, 0.0), look_at=(0.0, 0.0, 0.0), width=16, height=16)
    fg = splat.Rasterize([], camera, np.zeros( (0, 3) ) )
    bg = np.full( (16, 16, 3), 0.4)
    assert np.array_equal(compositor.Composite(fg, bg), bg)


def test_mask_box():
    mask = np.zeros( (8, 10) )
    mask[2:5, 3:7] = 0.9
    mask[6, 0] = 0.4
    box = compositor.MaskBox(mask, class_id=2)
    assert box.Box() == (3.0, 2.0, 7.0, 5.0)
    assert box.class_id == 2
    assert compositor.MaskBox(np.zeros( (4, 4) ) ) is None
    assert compositor.MaskBox(mask, threshold=0.3).Box() == (0.0, 2.0, 7.0, 7.0)


def test_camo_flags_do_not_change_the_picture(gen):
    cloud = verify.RandomCloud(gen, 8)
    camera = verify.RandomCamera(gen)
    env = model.ConstantEnvironment('const', 0.6)
    frozen = model.GaussianCloud([ g.Copy(camo=False) for g in cloud.Primitives() ], cloud.TargetCenter() )
    everything = model.GaussianCloud([ g.Copy(camo=True) for g in cloud.Primitives() ], cloud.TargetCenter() )
    quad = (SMALL_QUAD['quad_theta'], SMALL_QUAD['quad_phi'])
    a = compositor.ForegroundWithFrozenRegions(frozen, camera, env, quad)
    b, shaded = compositor.ForegroundPass(everything, camera, env, quad)
    assert np.array_equal(a.Rgb(), b.Rgb() )
    plain = splat.Rasterize(everything, camera, shaded.Colors(everything.Albedos() )[0])
    assert np.array_equal(b.Rgb(), plain.Rgb() )

def test_foreground_pass_accepts_a_quadrature(gen):
    cloud = verify.RandomCloud(gen, 3)
    camera = verify.RandomCamera(gen)
    env = model.ConstantEnvironment('const', 0.6)
    quad = shading.HemisphereQuadrature( (0.0, 0.0, 1.0), 4, 8)
    a, sa = compositor.ForegroundPass(cloud, camera, env, (4, 8) )
    b, sb = compositor.ForegroundPass(cloud, camera, env, quad)
    assert np.array_equal(a.Rgb(), b.Rgb() )
    assert np.array_equal(sa.A(), sb.A() )

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

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from relitcamo import exceptions
from relitcamo import verify
from relitcamo.render import shading
from relitcamo.scene import model

def _camera():
    return model.Camera(position=(0.0, -4.0, 0.0), look_at=(0.0, 0.0, 0.0), width=32, height=32)

def _surfel(**args):
    desc = { 'mean' : (0.0, 0.0, 0.0), 'scale' : (0.5, 0.01, 0.5), 'albedo' : (0.2, 0.5, 0.8), 'roughness' : 0.6 }
    desc.update(args)
    return model.GaussianPrimitive(**desc)

_TILT = np.array( (0.9, 0.3, 0.1, 0.3) ) / np.linalg.norm( (0.9, 0.3, 0.1, 0.3) )

def _skyEnv():
    rows = np.linspace(1.5, 0.1, 8)
    radiance = np.empty( (8, 16, 3) )
    radiance[...] = rows[:, None, None]
    radiance[:, :, 2] *= 1.3
    radiance[:, 0:4, 0] += 0.4
    return model.EnvironmentMap(id='sky', radiance=radiance, ambient=(0.01, 0.02, 0.03) )


def test_quadrature_weights_cover_the_hemisphere():
    for n_theta, n_phi in ( (1, 1), (4, 8), (32, 64) ):
        quad = shading.HemisphereQuadrature( (0.0, 0.0, 1.0), n_theta, n_phi)
        assert len(quad) == n_theta * n_phi
        assert quad.Weights().sum() == pytest.approx(2.0 * math.pi)
        assert np.all(quad.Cosines() > 0.0)

def test_single_node_rule():
    local, weights = shading.LocalRule(1, 1)
    assert weights.tolist() == pytest.approx([2.0 * math.pi])
    assert math.acos(local[0, 2]) == pytest.approx(math.pi / 4.0)

def test_oriented_quadrature_stays_above_the_normal():
    n = np.array([0.3, -0.5, 0.8])
    quad = shading.BuildQuadrature(n, 4, 8).Oriented( (0.0, 1.0, 0.0) )
    assert np.all(quad.Directions()[:, 1] > 0.0)
    assert np.allclose(np.linalg.norm(quad.Directions(), axis=1), 1.0)
    assert quad.Resolution() == (4, 8)
    assert np.allclose(quad.Normal(), (0.0, 1.0, 0.0) )

def test_quadrature_needs_nodes():
    with pytest.raises(exceptions.rcValidationError):
        shading.HemisphereQuadrature( (0.0, 0.0, 1.0), 0, 8)


def test_sample_constant_env():
    env = model.ConstantEnvironment('c', (0.1, 0.2, 0.3) )
    dirs = np.array([ (0.0, 0.0, 1.0), (0.0, 0.0, -1.0), (1.0, 0.0, 0.0), (0.0, -1.0, 0.0) ])
    assert np.allclose(shading.SampleEnv(env, dirs), [ (0.1, 0.2, 0.3) ] * 4)
    assert shading.SampleEnv(env, dirs[0]).shape == (3,)

def test_sample_env_wraps_in_azimuth():
    radiance = np.zeros( (2, 4, 3) )
    radiance[:, 0] = 1.0
    radiance[:, 3] = 3.0
    env = model.EnvironmentMap(id='stripes', radiance=radiance)
    # +x sits on the seam between the last and the first column.
    assert shading.SampleEnv(env, (1.0, 0.0, 0.0) ).tolist() == pytest.approx([2.0, 2.0, 2.0])


@given(st.integers(0, 2 ** 32 - 1) )
def test_brdf_is_reciprocal_and_nonnegative(seed):
    gen = np.random.Generator(np.random.Philox(key=seed) )
    n = np.array([0.0, 0.0, 1.0])
    wi, wo = gen.normal(size=3), gen.normal(size=3)
    wi[2], wo[2] = abs(wi[2]) + 0.05, abs(wo[2]) + 0.05
    wi, wo = wi / np.linalg.norm(wi), wo / np.linalg.norm(wo)
    albedo = gen.uniform(size=3)
    roughness, metallic = gen.uniform(), gen.uniform()
    f = shading.EvalBrdf(albedo, roughness, metallic, n, wi, wo)
    assert np.all(f >= 0.0)
    assert np.allclose(f, shading.EvalBrdf(albedo, roughness, metallic, n, wo, wi), rtol=1e-12)

def test_brdf_below_the_surface():
    with pytest.raises(exceptions.rcRenderError):
        shading.SampleBrdf( (0.5, 0.5, 0.5), 0.5, 0.0, (0.0, 0.0, 1.0), (0.0, 0.6, -0.8), (0.0, 0.0, 1.0) )

def test_brdf_sample_carries_the_cosine():
    sample = shading.SampleBrdf( (0.5, 0.5, 0.5), 1.0, 0.0, (0.0, 0.0, 1.0), (0.6, 0.0, 0.8), (0.0, 0.0, 1.0) )
    assert sample.cos_term == pytest.approx(0.8)


def test_surfel_normal_faces_the_viewer():
    g = _surfel()
    assert shading.SurfelNormal(g, (0.0, 1.0, 0.0) ).tolist() == pytest.approx([0.0, -1.0, 0.0])
    assert shading.SurfelNormal(g, (0.0, -1.0, 0.0) ).tolist() == pytest.approx([0.0, 1.0, 0.0])

def test_furnace():
    env = model.ConstantEnvironment('white', 0.7)
    color, J = shading.Shade(_surfel(), _camera(), env)
    assert np.allclose(np.diag(J), 0.7, atol=verify.FURNACE_TOLERANCE)
    assert np.allclose(J, np.diag(np.diag(J) ) )

@pytest.mark.parametrize('metallic', [0.0, 0.5, 1.0])
@pytest.mark.parametrize('roughness', [0.2, 1.0])
def test_vectorized_shading_matches_reference(metallic, roughness):
    g = _surfel(metallic=metallic, roughness=roughness, rotation=_TILT)
    quad = shading.HemisphereQuadrature( (0.0, 0.0, 1.0), 6, 12)
    color, J = shading.Shade(g, _camera(), _skyEnv(), quad)
    assert np.allclose(color, shading.ShadeReference(g, _camera(), _skyEnv(), quad), rtol=1e-10, atol=1e-12)

def test_cloud_shading_matches_single_primitives(gen):
    cloud = verify.RandomCloud(gen, 5, metallic=0.3)
    camera = _camera()
    shaded = shading.ShadeCloud(cloud, camera, _skyEnv(), 4, 8)
    raw = shaded.RawColors(cloud.Albedos() )
    assert np.allclose(np.linalg.norm(shaded.Normals(), axis=1), 1.0)
    quad = shading.HemisphereQuadrature( (0.0, 0.0, 1.0), 4, 8)
    for a in range(len(cloud) ):
        color, J = shading.Shade(cloud[a], camera, _skyEnv(), quad)
        assert np.allclose(raw[a], color, rtol=1e-12, atol=1e-14)
        assert np.allclose(shaded.A()[a], np.diag(J), rtol=1e-12, atol=1e-14)

def test_shading_is_affine_in_albedo(gen):
    cloud = verify.RandomCloud(gen, 4)
    shaded = shading.ShadeCloud(cloud, _camera(), _skyEnv(), 4, 8)
    a1, a2 = gen.uniform(size=(4, 3) ), gen.uniform(size=(4, 3) )
    mid = shaded.RawColors(0.5 * (a1 + a2) )
    assert np.allclose(mid, 0.5 * (shaded.RawColors(a1) + shaded.RawColors(a2) ) )

def test_clamped_channels_have_no_jacobian():
    A = np.array([ (2.0, 0.5, 0.5) ])
    B = np.array([ (0.0, 0.0, -0.6) ])
    shaded = shading.ShadedCloud(A, B, np.array([ (0.0, 0.0, 1.0) ]) )
    colors, clamped = shaded.Colors(np.array([ (0.9, 0.5, 0.5) ]) )
    assert clamped.tolist() == [ [True, False, True] ]
    assert colors.tolist() == [ [1.0, 0.25, 0.0] ]
    assert shaded.JacobianDiagonals(np.array([ (0.9, 0.5, 0.5) ]) ).tolist() == [ [0.0, 0.5, 0.0] ]
    J = shaded.Jacobians(np.array([ (0.9, 0.5, 0.5) ]) )
    assert np.array_equal(J[0], np.diag( [0.0, 0.5, 0.0] ) )

def test_fully_metallic_surface_has_no_diffuse_lobe():
    g = _surfel(metallic=1.0, roughness=0.4)
    env = model.ConstantEnvironment('black', 0.0, ambient=(0.1, 0.1, 0.1) )
    color, J = shading.Shade(g, _camera(), env, shading.HemisphereQuadrature( (0.0, 0.0, 1.0), 4, 8) )
    assert np.allclose(np.diag(J), 0.1)
    assert np.allclose(color, 0.1 * g.Albedo() )

def test_shade_behind_camera():
    with pytest.raises(exceptions.rcRenderError):
        shading.Shade(_surfel(mean=(0.0, -6.0, 0.0) ), _camera(), model.ConstantEnvironment('c', 1.0) )

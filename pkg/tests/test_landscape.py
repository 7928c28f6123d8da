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

import csv

import numpy as np
import pytest

from relitcamo import exceptions
from relitcamo.analysis import landscape
from relitcamo.scene import imageio
from relitcamo.scene import model

@pytest.fixture
def grid():
    space = model.DiscretizeSpace( [10, 40], [0, 90, 180], [4, 6], ['noon', 'dusk'])
    return landscape.LandscapeGrid(space, np.arange(24) / 24.0)

def _grid(losses):
    return landscape.LandscapeGrid(model.DiscretizeSpace( [10, 40], [0, 90], [4], ['noon'] ), losses)


def test_single_cell_is_flat():
    grid = landscape.LandscapeGrid(model.DiscretizeSpace( [10], [0], [4], ['noon'] ), [0.7])
    m = landscape.FlatnessMetrics(grid)
    assert m == { 'mean' : 0.7, 'max' : 0.7, 'variance' : 0.0, 'max_minus_mean' : 0.0 }

def test_flatness_metrics():
    m = landscape.FlatnessMetrics(_grid( [0.1, 0.2, 0.3, 0.6] ) )
    assert m['mean'] == pytest.approx(0.3)
    assert m['max'] == 0.6
    assert m['max_minus_mean'] == pytest.approx(0.3)
    assert m['variance'] == pytest.approx(0.035)

def test_losses_are_checked():
    with pytest.raises(exceptions.rcValidationError):
        _grid( [0.1, 0.2, 0.3] )
    with pytest.raises(exceptions.rcNumericError):
        _grid( [0.1, 0.2, 0.3, float('nan') ] )

def test_reduction_averages_distance_and_environment(grid):
    red = grid.Reduced()
    assert red.shape == (3, 2)
    assert red[0, 0] == pytest.approx(1.5 / 24.0)
    assert red[2, 1] == pytest.approx(21.5 / 24.0)
    assert grid.Reductions()[(180.0, 40.0)] == pytest.approx(21.5 / 24.0)
    assert len(grid.Reductions() ) == 6

def test_breakdowns(grid):
    env = landscape.DimensionBreakdown(grid, 'env')
    assert [ b for b, m in env ] == ['noon', 'dusk']
    assert env[0][1] == pytest.approx(11.0 / 24.0)
    assert env[1][1] == pytest.approx(12.0 / 24.0)
    pitch = landscape.DimensionBreakdown(grid, 'pitch')
    assert pitch[0][1] == pytest.approx(5.5 / 24.0)
    with pytest.raises(exceptions.rcValidationError):
        landscape.DimensionBreakdown(grid, 'altitude')

def test_evasion_rate():
    assert landscape.EvasionRate(_grid( [0.1, 0.2, 0.3, 0.6] ), 0.25) == 0.5
    assert landscape.EvasionRate(_grid( [0.1, 0.2, 0.3, 0.6] ), 0.1) == 0.0

def test_colormap():
    colors = landscape.Colormap(np.array([ [0.0, 0.5, 1.0] ]), 0.0, 1.0)
    assert colors[0].tolist() == [ [0, 0, 255], [128, 0, 128], [255, 0, 0] ]
    assert landscape.Colormap(np.ones( (1, 2) ), 1.0, 1.0)[0, 0].tolist() == [0, 0, 255]


def test_heatmap_round_trip(grid, tmp_path):
    csvPath = str(tmp_path / "land.csv")
    ppmPath = str(tmp_path / "land.ppm")
    landscape.ExportHeatmap(grid, csvPath, ppmPath)
    assert landscape.ReadHeatmapCsv(csvPath) == grid.Reductions()
    image = imageio.ReadPpm(ppmPath, decode=False)
    assert image.shape == (2 * landscape.BLOCK, 3 * landscape.BLOCK, 3)
    # The lowest cell is pure blue, the highest pure red.
    assert image[0, 0].tolist() == [0, 0, 255]
    assert image[-1, -1].tolist() == [255, 0, 0]

def test_heatmap_threshold(grid, tmp_path):
    ppmPath = str(tmp_path / "land.ppm")
    landscape.ExportHeatmap(grid, str(tmp_path / "land.csv"), ppmPath, threshold=0.5, block=1)
    image = imageio.ReadPpm(ppmPath, decode=False)
    red = grid.Reduced().T >= 0.5
    assert np.array_equal(image[:, :, 0] == 255, red)
    assert np.array_equal(image[:, :, 2] == 255, ~red)

def test_read_heatmap_csv_rejects_other_files(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("cell_index,loss\n0,0.5\n")
    with pytest.raises(exceptions.rcParseError):
        landscape.ReadHeatmapCsv(str(path) )
    path.write_text("azimuth,pitch,mean_loss\n0,ten,0.5\n")
    with pytest.raises(exceptions.rcParseError):
        landscape.ReadHeatmapCsv(str(path) )

def test_surface_and_breakdown_files(grid, tmp_path):
    landscape.ExportSurface(grid, str(tmp_path / "land_surface.csv") )
    with open(tmp_path / "land_surface.csv") as f:
        rows = list(csv.reader(f) )
    assert len(rows) == 25
    assert float(rows[24][1]) == 23.0 / 24.0
    written = landscape.ExportBreakdowns(grid, str(tmp_path / "land") )
    assert [ p.rsplit('_', 1)[1] for p in written ] == ['pitch.csv', 'azimuth.csv', 'distance.csv', 'env.csv']
    with open(written[3]) as f:
        assert f.read().splitlines()[1].startswith("noon,")
    with open(written[1]) as f:
        assert f.read().splitlines()[1].startswith("0,")

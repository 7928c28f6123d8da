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
#  Loss landscapes.  A landscape is one detection loss per cell of a configuration space.  It
#  gets summarized by how flat it is (the gap between the worst cell and the average), reduced
#  to an azimuth by pitch map averaged over distance and environment, and exported as CSV and as
#  a blue (evaded) to red (detected) heatmap.

import csv

import numpy as np

from relitcamo import exceptions
from relitcamo import paths
from relitcamo.scene import imageio
from relitcamo.scene import io

## Pixels per cell side in the heatmap.
BLOCK = 8

DIMENSIONS = ('pitch', 'azimuth', 'distance', 'env')


## @class LandscapeGrid
class LandscapeGrid(object):
    __space = None
    __losses = None

    def __init__(self, space, losses):
        losses = np.array(losses, dtype=np.float64).reshape(-1)
        if losses.shape[0] != space.Q():
            raise exceptions.rcValidationError("expected " + str(space.Q() ) + " losses, got " + str(losses.shape[0]), "losses")
        if not np.all(np.isfinite(losses) ):
            raise exceptions.rcNumericError("landscape has non-finite losses")
        losses.setflags(write=False)
        self.__space = space
        self.__losses = losses

    def Space(self):
        return self.__space

    def Losses(self):
        return self.__losses

    ## The losses as a (pitch, azimuth, distance, env) array.
    def Cube(self):
        return self.__losses.reshape(self.__space.Shape() )

    ## Mean over distance and environment, as an |azimuth|×|pitch| array.
    def Reduced(self):
        return self.Cube().mean(axis=(2, 3) ).T

    ## The reductions keyed by (azimuth, pitch) bin values.
    def Reductions(self):
        red = self.Reduced()
        out = {}
        for ia, az in enumerate(self.__space.AzimuthBins() ):
            for ip, p in enumerate(self.__space.PitchBins() ):
                out[(az, p)] = float(red[ia, ip])
        return out

def FlatnessMetrics(grid):
    losses = grid.Losses()
    mean = float(losses.mean() )
    top = float(losses.max() )
    return {
        'mean' : mean,
        'max' : top,
        'variance' : float(losses.var() ),
        'max_minus_mean' : top - mean,
    }

## Mean loss per bin of one dimension, averaged over the others.
#  @return a list of (bin value, mean loss).
def DimensionBreakdown(grid, dim):
    if dim not in DIMENSIONS:
        raise exceptions.rcValidationError("unknown dimension " + repr(dim) + ", expected one of " + ", ".join(DIMENSIONS), "dim")
    axis = DIMENSIONS.index(dim)
    others = tuple(a for a in range(4) if a != axis)
    means = grid.Cube().mean(axis=others)
    space = grid.Space()
    bins = (space.PitchBins(), space.AzimuthBins(), space.DistanceBins(), space.EnvIds() )[axis]
    return [ (b, float(m) ) for b, m in zip(bins, means) ]

## The fraction of cells whose loss is below threshold.
def EvasionRate(grid, threshold):
    return float(np.mean(grid.Losses() < float(threshold) ) )

## Blue to red, linear over [low, high].  Returns bytes, H×W×3.
def Colormap(values, low, high):
    values = np.asarray(values, dtype=np.float64)
    if high > low:
        t = np.clip( (values - low) / (high - low), 0.0, 1.0)
    else:
        t = np.zeros_like(values)
    rgb = np.stack([255.0 * t, np.zeros_like(t), 255.0 * (1.0 - t)], axis=-1)
    return np.rint(rgb).astype(np.uint8)

## Writes the azimuth by pitch reduction as CSV (azimuth,pitch,mean_loss) and as a heatmap.
#  Azimuth runs left to right, pitch top to bottom.
#
#  @param threshold if given, cells are pure red at or above it (detected) and pure blue
#                   below (evaded) instead of the continuous map.
def ExportHeatmap(grid, path_csv, path_ppm, threshold=None, block=BLOCK):
    space = grid.Space()
    red = grid.Reduced()

    with paths.OpenFile(path_csv, 'w') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['azimuth', 'pitch', 'mean_loss'])
        for ia, az in enumerate(space.AzimuthBins() ):
            for ip, p in enumerate(space.PitchBins() ):
                writer.writerow([io.FormatFloat(az), io.FormatFloat(p), repr(float(red[ia, ip]) )])

    # Rows are pitch, columns azimuth.
    cells = red.T
    if threshold is None:
        colors = Colormap(cells, cells.min(), cells.max() )
    else:
        colors = Colormap( (cells >= float(threshold) ).astype(np.float64), 0.0, 1.0)
    image = np.repeat(np.repeat(colors, block, axis=0), block, axis=1)
    imageio.WritePpm(path_ppm, image, encode=False)

## Reads a heatmap CSV back.  Returns {(azimuth, pitch): mean_loss}.
def ReadHeatmapCsv(path):
    out = {}
    with paths.OpenFile(path, 'r') as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != ['azimuth', 'pitch', 'mean_loss']:
            raise exceptions.rcParseError("'" + str(path) + "' is not a heatmap CSV")
        for row in reader:
            try:
                out[(float(row[0]), float(row[1]) )] = float(row[2])
            except (IndexError, ValueError):
                raise exceptions.rcParseError("'" + str(path) + "' has a malformed row: " + repr(row) )
    return out

## Writes every cell's loss: cell_index,loss
def ExportSurface(grid, path):
    with paths.OpenFile(path, 'w') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['cell_index', 'loss'])
        for i, loss in enumerate(grid.Losses() ):
            writer.writerow([i, repr(float(loss) )])

## Writes one <prefix>_<dim>.csv per dimension with bin,mean_loss.  Returns the paths.
def ExportBreakdowns(grid, prefix):
    written = []
    for dim in DIMENSIONS:
        path = prefix + "_" + dim + ".csv"
        with paths.OpenFile(path, 'w') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(['bin', 'mean_loss'])
            for b, m in DimensionBreakdown(grid, dim):
                writer.writerow([b if dim == 'env' else io.FormatFloat(b), repr(m)])
        written.append(path)
    return written

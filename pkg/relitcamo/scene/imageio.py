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
#  Image formats: binary PPM (P6, maxval 255) for backgrounds, renders and heatmaps, and raw
#  little-endian f32 for environment radiance.  Everything in memory is linear; the sRGB-ish
#  gamma of 2.2 is applied on the way out of a PPM and undone on the way in.

import numpy as np

from relitcamo import exceptions
from relitcamo import paths

GAMMA = 2.2

## Linear [0,1] floats to gamma-encoded bytes.
def EncodeGamma(image):
    image = np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0)
    return np.rint(255.0 * image ** (1.0 / GAMMA) ).astype(np.uint8)

## Gamma-encoded bytes to linear [0,1] floats.
def DecodeGamma(data):
    return (np.asarray(data, dtype=np.float64) / 255.0) ** GAMMA

## Reads the next whitespace-delimited header token, skipping comments.
def _token(data, pos):
    while True:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos:pos + 1] == b'#':
            while pos < len(data) and data[pos:pos + 1] not in (b'\n', b'\r'):
                pos += 1
            continue
        break
    start = pos
    while pos < len(data) and not data[pos:pos + 1].isspace():
        pos += 1
    return data[start:pos], pos

## Reads a P6 PPM.
#  @param path the file to read.
#  @param decode if True (the default), returns linear floats; otherwise the raw H×W×3 bytes.
def ReadPpm(path, decode=True):
    with paths.OpenFile(path, 'rb') as f:
        data = f.read()

    header = []
    pos = 0
    for a in range(4):
        tok, pos = _token(data, pos)
        header.append(tok)
    if header[0] != b'P6':
        raise exceptions.rcParseError("'" + str(path) + "' is not a binary PPM (P6)")
    try:
        width, height, maxval = int(header[1]), int(header[2]), int(header[3])
    except ValueError:
        raise exceptions.rcParseError("'" + str(path) + "' has a malformed PPM header")
    if width < 1 or height < 1 or maxval != 255:
        raise exceptions.rcParseError("'" + str(path) + "' must be a P6 PPM with maxval 255")

    # Exactly one whitespace byte separates the header from the pixels.
    pos += 1
    need = width * height * 3
    if len(data) - pos < need:
        raise exceptions.rcParseError("'" + str(path) + "' is truncated")
    pixels = np.frombuffer(data, dtype=np.uint8, count=need, offset=pos).reshape(height, width, 3)

    if decode:
        return DecodeGamma(pixels)
    return pixels.copy()

## Writes a P6 PPM.
#  @param image H×W×3 linear floats, or bytes if encode is False.
#  @param encode apply the gamma and quantize.  Heatmaps turn this off, their colors are
#                already display values.
def WritePpm(path, image, encode=True):
    if encode:
        pixels = EncodeGamma(image)
    else:
        pixels = np.asarray(image)
        if pixels.dtype != np.uint8:
            pixels = np.rint(np.clip(pixels, 0.0, 255.0) ).astype(np.uint8)
    if pixels.ndim != 3 or pixels.shape[2] != 3:
        raise exceptions.rcValidationError("image must be H×W×3, got shape " + str(pixels.shape) )

    header = ("P6\n%d %d\n255\n" % (pixels.shape[1], pixels.shape[0]) ).encode('ascii')
    with paths.OpenFile(path, 'wb') as f:
        f.write(header)
        f.write(np.ascontiguousarray(pixels).tobytes() )

## Reads H×W×3 little-endian f32 radiance, top row first.
def ReadRadiance(path, width, height):
    with paths.OpenFile(path, 'rb') as f:
        data = f.read()
    need = int(width) * int(height) * 3
    if len(data) != 4 * need:
        raise exceptions.rcParseError("'" + str(path) + "' holds " + str(len(data) ) + " bytes, expected " + str(4 * need) + " for " + str(width) + "x" + str(height) + " radiance")
    return np.frombuffer(data, dtype='<f4').reshape(int(height), int(width), 3).astype(np.float64)

def WriteRadiance(path, radiance):
    radiance = np.asarray(radiance)
    if radiance.ndim != 3 or radiance.shape[2] != 3:
        raise exceptions.rcValidationError("radiance must be H×W×3, got shape " + str(radiance.shape) )
    with paths.OpenFile(path, 'wb') as f:
        f.write(np.ascontiguousarray(radiance, dtype='<f4').tobytes() )

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
#  Checkpoints.  A checkpoint is everything needed to pick an attack up exactly where it left
#  off, packed with struct, little-endian:
#
#      "RPGA"  u32 version  u64 iteration  u64 rng seed  u64 rng counter  u32 mode
#      u32 n   f32[n] albedo
#      u32 q   f64[q] difficulty scores
#      u32 h   f64[h] loss history
#      u32 k   f64[k] optimizer state
#
#  Writes go to a temporary file that is renamed over the target, so a crash never leaves half
#  a checkpoint behind.

import os
import struct

import numpy as np

from relitcamo import exceptions
from relitcamo import log
from relitcamo import paths

_log = log.GetLogger(__name__)

MAGIC = b'RPGA'
VERSION = 1

## Mode numbers as stored in the file.
MODE_IDS = { 'eot' : 0, 'hpcm' : 1 }
MODE_NAMES = { 0 : 'eot', 1 : 'hpcm' }

_HEADER = "<4sIQQQI"


## @class Checkpoint
#
#  The decoded contents of a checkpoint file.
class Checkpoint(object):
    iteration = None
    seed = None
    counter = None
    ## 'eot' or 'hpcm'
    mode = None
    ## float32
    albedo = None
    scores = None
    history = None
    optimizer_state = None

    def __init__(self, **args):
        self.iteration = int(args['iteration'])
        self.seed = int(args['seed'])
        self.counter = int(args['counter'])
        self.mode = args['mode']
        if self.mode not in MODE_IDS:
            raise exceptions.rcValidationError("unknown mode " + repr(self.mode), "checkpoint.mode")
        self.albedo = np.asarray(args['albedo'], dtype=np.float32).reshape(-1)
        self.scores = np.asarray(args.get('scores', []), dtype=np.float64).reshape(-1)
        self.history = np.asarray(args.get('history', []), dtype=np.float64).reshape(-1)
        self.optimizer_state = np.asarray(args.get('optimizer_state', []), dtype=np.float64).reshape(-1)

    def GetFormatString(self):
        return (_HEADER
                + "I" + str(self.albedo.shape[0]) + "f"
                + "I" + str(self.scores.shape[0]) + "d"
                + "I" + str(self.history.shape[0]) + "d"
                + "I" + str(self.optimizer_state.shape[0]) + "d")

    def Encode(self):
        values = [MAGIC, VERSION, self.iteration, self.seed, self.counter, MODE_IDS[self.mode]]
        for block in (self.albedo, self.scores, self.history, self.optimizer_state):
            values.append(block.shape[0])
            values.extend(block.tolist() )
        try:
            return struct.pack(self.GetFormatString(), *values)
        except struct.error as err:
            raise exceptions.rcValidationError("checkpoint can't be encoded: " + str(err), "checkpoint")

## Decodes checkpoint bytes.  name is only used in error messages.
def Decode(data, name="checkpoint"):
    def fail(why):
        raise exceptions.rcIOError("'" + str(name) + "' is not a valid checkpoint: " + why)

    size = struct.calcsize(_HEADER)
    if len(data) < size:
        fail("truncated header")
    magic, version, iteration, seed, counter, mode = struct.unpack_from(_HEADER, data, 0)
    if magic != MAGIC:
        fail("bad magic " + repr(magic) )
    if version != VERSION:
        fail("unsupported version " + str(version) )
    if mode not in MODE_NAMES:
        fail("unknown mode " + str(mode) )

    pos = size
    blocks = []
    for kind in ('f', 'd', 'd', 'd'):
        if len(data) < pos + 4:
            fail("truncated")
        count, = struct.unpack_from("<I", data, pos)
        pos += 4
        fmt = "<" + str(count) + kind
        if len(data) < pos + struct.calcsize(fmt):
            fail("truncated")
        blocks.append(np.array(struct.unpack_from(fmt, data, pos), dtype=np.float32 if kind == 'f' else np.float64) )
        pos += struct.calcsize(fmt)
    if pos != len(data):
        fail(str(len(data) - pos) + " trailing bytes")

    return Checkpoint(iteration=iteration, seed=seed, counter=counter, mode=MODE_NAMES[mode],
                      albedo=blocks[0], scores=blocks[1], history=blocks[2], optimizer_state=blocks[3])

def WriteCheckpoint(path, ckpt):
    data = ckpt.Encode()
    tmp = str(path) + ".tmp"
    with paths.OpenFile(tmp, 'wb') as f:
        f.write(data)
    try:
        os.replace(tmp, path)
    except OSError as err:
        raise exceptions.rcIOError("Error writing checkpoint '" + str(path) + "': " + str(err) )
    _log.info("checkpoint at iteration %d written to %s", ckpt.iteration, path)

def ReadCheckpoint(path):
    with paths.OpenFile(path, 'rb') as f:
        data = f.read()
    return Decode(data, path)

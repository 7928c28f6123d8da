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
#  The counter-based random stream behind configuration sampling.  The whole state is a seed
#  and a counter, draw n is a pure function of (seed, n), so a stream can be checkpointed as two
#  integers and split across batch lanes by handing each lane its own counter.

import numpy as np

from relitcamo import exceptions

_MAX = 2 ** 64

## @class RngState
#
#  An immutable (seed, counter) pair.  Drawing returns a new state.
class RngState(object):
    __seed = None
    __counter = None

    def __init__(self, seed, counter=0):
        seed = int(seed)
        counter = int(counter)
        if seed < 0 or seed >= _MAX:
            raise exceptions.rcConfigError("seed: must be a 64-bit unsigned integer, got " + str(seed) )
        if counter < 0 or counter >= _MAX:
            raise exceptions.rcValidationError("rng counter out of range: " + str(counter), "rng.counter")
        self.__seed = seed
        self.__counter = counter

    def Seed(self):
        return self.__seed

    def Counter(self):
        return self.__counter

    def __eq__(self, other):
        return isinstance(other, RngState) and (self.__seed, self.__counter) == (other.Seed(), other.Counter() )

    def __hash__(self):
        return hash( (self.__seed, self.__counter) )

    def __repr__(self):
        return "RngState(seed=%d, counter=%d)" % (self.__seed, self.__counter)

    ## The uniform in [0,1) of draw n of this seed.
    def At(self, n):
        raw = np.random.Philox(key=self.__seed, counter=int(n) ).random_raw()
        return float(int(raw) >> 11) * (1.0 / 9007199254740992.0)

    ## Returns (u, next state).
    def Uniform(self):
        return self.At(self.__counter), RngState(self.__seed, self.__counter + 1)

    ## Returns (k uniforms, state advanced by k).  The same numbers k calls to Uniform give.
    def Uniforms(self, k):
        u = np.array([ self.At(self.__counter + a) for a in range(int(k) ) ])
        return u, RngState(self.__seed, self.__counter + int(k) )

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
#  Run configuration.  A run config is a JSON object; anything it leaves out takes the default
#  below.  Unknown keys and bad values are errors that name the key.

import copy
import numbers

from relitcamo import exceptions
from relitcamo import pedia
from relitcamo.detect import surrogate
from relitcamo.scene import io

MODES = ('eot', 'hpcm')

DEFAULTS = {
    'mode' : 'hpcm',
    'iters' : 2000,
    'lr' : 0.01,
    'batch' : 8,
    'seed' : 0,
    'tau' : 1.0,
    'mu' : 0.5,
    'init_score' : 10.0,
    'quad_theta' : 32,
    'quad_phi' : 64,
    'optimizer' : 'sgd',
    'adam_beta1' : 0.9,
    'adam_beta2' : 0.999,
    'adam_eps' : 1e-8,
    'weight_decay' : 0.0,
    'checkpoint_every' : 100,
    'relighter' : 'parametric',
    'relight' : True,
    'hybrid' : True,
    'detector' : {
        'seed' : 0,
        'strides' : [8],
        'scales' : [16, 24, 32],
        'threshold' : 0.05,
    },
}

def _int(key, value, low):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise exceptions.rcConfigError(key + ": expected an integer, got " + repr(value) )
    if value < low:
        raise exceptions.rcConfigError(key + ": must be at least " + str(low) + ", got " + str(value) )
    return int(value)

def _float(key, value):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise exceptions.rcConfigError(key + ": expected a number, got " + repr(value) )
    value = float(value)
    if value != value or value in (float('inf'), float('-inf') ):
        raise exceptions.rcConfigError(key + ": must be finite")
    return value

def _bool(key, value):
    if not isinstance(value, bool):
        raise exceptions.rcConfigError(key + ": expected true or false, got " + repr(value) )
    return value

def _intList(key, value):
    if not isinstance(value, list) or len(value) == 0:
        raise exceptions.rcConfigError(key + ": expected a non-empty array")
    return [ _int(key + "[" + str(i) + "]", v, 1) for i, v in enumerate(value) ]


## @class RunConfig
#
#  Everything that determines an attack run besides the scene.  Values are read with Get() or
#  as attributes, i.e. config.lr.
class RunConfig(object):
    __values = None

    def __init__(self, **args):
        values = copy.deepcopy(DEFAULTS)
        for key, value in args.items():
            if key not in DEFAULTS:
                raise exceptions.rcConfigError(key + ": unknown run config key")
            if key == 'detector':
                if not isinstance(value, dict):
                    raise exceptions.rcConfigError("detector: expected an object")
                for k in value:
                    if k not in DEFAULTS['detector']:
                        raise exceptions.rcConfigError("detector." + k + ": unknown detector key")
                values['detector'].update(copy.deepcopy(value) )
            else:
                values[key] = value
        self.__values = self.__validate(values)

    @staticmethod
    def __validate(v):
        if v['mode'] not in MODES:
            raise exceptions.rcConfigError("mode: must be one of " + ", ".join(MODES) + ", got " + repr(v['mode']) )
        v['iters'] = _int('iters', v['iters'], 0)
        v['batch'] = _int('batch', v['batch'], 1)
        v['seed'] = _int('seed', v['seed'], 0)
        if v['seed'] >= 2 ** 64:
            raise exceptions.rcConfigError("seed: must fit in 64 bits")
        v['quad_theta'] = _int('quad_theta', v['quad_theta'], 1)
        v['quad_phi'] = _int('quad_phi', v['quad_phi'], 1)
        v['checkpoint_every'] = _int('checkpoint_every', v['checkpoint_every'], 0)

        v['lr'] = _float('lr', v['lr'])
        if v['lr'] < 0.0:
            raise exceptions.rcConfigError("lr: must not be negative, got " + repr(v['lr']) )
        v['tau'] = _float('tau', v['tau'])
        if not v['tau'] > 0.0:
            raise exceptions.rcConfigError("tau: must be positive, got " + repr(v['tau']) )
        v['mu'] = _float('mu', v['mu'])
        if not 0.0 <= v['mu'] < 1.0:
            raise exceptions.rcConfigError("mu: must be in [0, 1), got " + repr(v['mu']) )
        v['init_score'] = _float('init_score', v['init_score'])

        for key in ('adam_beta1', 'adam_beta2'):
            v[key] = _float(key, v[key])
            if not 0.0 <= v[key] < 1.0:
                raise exceptions.rcConfigError(key + ": must be in [0, 1), got " + repr(v[key]) )
        v['adam_eps'] = _float('adam_eps', v['adam_eps'])
        if not v['adam_eps'] > 0.0:
            raise exceptions.rcConfigError("adam_eps: must be positive")
        v['weight_decay'] = _float('weight_decay', v['weight_decay'])
        if v['weight_decay'] < 0.0:
            raise exceptions.rcConfigError("weight_decay: must not be negative")

        v['relight'] = _bool('relight', v['relight'])
        v['hybrid'] = _bool('hybrid', v['hybrid'])

        for key, kind in ( ('optimizer', 'optimizer'), ('relighter', 'relighter') ):
            if not isinstance(v[key], str) or not pedia.getPedia().HasComponent(kind, v[key]):
                raise exceptions.rcConfigError(key + ": unknown " + kind + " " + repr(v[key]) + ", expected one of " + ", ".join(pedia.getPedia().GetNames(kind) ) )
            v[key] = v[key].lower()

        d = v['detector']
        d['seed'] = _int('detector.seed', d['seed'], 0)
        d['strides'] = _intList('detector.strides', d['strides'])
        d['scales'] = _intList('detector.scales', d['scales'])
        d['threshold'] = _float('detector.threshold', d['threshold'])
        if not 0.0 <= d['threshold'] < 1.0:
            raise exceptions.rcConfigError("detector.threshold: must be in [0, 1), got " + repr(d['threshold']) )
        return v

    def __getattr__(self, key):
        values = self.__dict__.get('_RunConfig__values')
        if values is not None and key in values:
            return values[key]
        raise AttributeError(key)

    def Get(self, key):
        return self.__values[key]

    ## A plain dictionary of every value, defaults included.
    def ToDict(self):
        return copy.deepcopy(self.__values)

    ## A copy with some values replaced.
    def With(self, **args):
        values = self.ToDict()
        values.update(args)
        return RunConfig(**values)

    def Detector(self):
        return surrogate.SurrogateDetector(**self.__values['detector'])

    def Relighter(self):
        return pedia.getPedia().GetComponent('relighter', self.__values['relighter'])

    def Optimizer(self, size):
        return pedia.getPedia().GetComponent('optimizer', self.__values['optimizer'], size=size, config=self)

## Loads a run config from a JSON file.
def LoadRunConfig(path):
    desc = io.ReadJson(path)
    if not isinstance(desc, dict):
        raise exceptions.rcConfigError("'" + str(path) + "': a run config must be a JSON object")
    return RunConfig(**desc)

def SaveRunConfig(config, path):
    io.WriteText(path, io.DumpCanonical(config.ToDict() ) )

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

import importlib

from relitcamo import exceptions

## @file
#
#  This is the master list of pluggable components.  Some pieces of the pipeline are seams on
#  purpose: the background relighter is a cheap photometric stand-in for a learned model, and
#  the albedo update can be plain descent or AdamW.  Each implementation is registered here by
#  kind and name along with the module and class that implement it, and is imported the first
#  time somebody asks for it.  So, this is the Encyclopedia of Components.
#
#  It is implemented as a singleton, so you must use getPedia() to get it.

__pedia = None

## Built-in components, as (kind, name, module, classname).  Order doesn't matter.
_builtin = [
    ("relighter", "parametric", "relitcamo.render.compositor", "ParametricRelighter"),
    ("optimizer", "sgd", "relitcamo.attack.optimizer", "SgdOptimizer"),
    ("optimizer", "adamw", "relitcamo.attack.optimizer", "AdamWOptimizer"),
]

## This class contains all the components.  It maps (kind, name) to the class implementing it.
class Components(object):
    ## Stores the registrations, keyed by (kind, name).  Items are of the form
    #  (module name, class name)
    __components = None

    ## A dictionary, keyed by (kind, name), of classes that have already been imported.
    __types = None

    def __init__(self):
        self.__components = {}
        self.__types = {}

        for kind, name, module, classname in _builtin:
            self.AddComponentType(kind, name, module, classname)

    ## Adds a component type.  Nothing is imported until the component is asked for, so a
    #  registration can point at a module that drags in heavy dependencies.
    #
    #  @param kind "relighter" or "optimizer", or something new if you're adding a new seam.
    #  @param name the name used in config files, i.e. "adamw".
    #  @param module a string specifying the module, i.e. "relitcamo.attack.optimizer"
    #  @param classname the name of the class inside that module.
    def AddComponentType(self, kind, name, module, classname):
        key = (kind, name.lower() )
        self.__components[key] = (module, classname)
        if key in self.__types:
            del self.__types[key]

    ## Returns True if the component is known.
    def HasComponent(self, kind, name):
        return (kind, str(name).lower() ) in self.__components

    ## Returns the names registered for a kind, sorted.
    def GetNames(self, kind):
        return sorted([ n for k, n in self.__components if k == kind ])

    ## Gets the class for a component, importing it if need be.
    def GetComponentType(self, kind, name):
        key = (kind, str(name).lower() )
        if key not in self.__components:
            raise exceptions.rcConfigError("Unknown " + kind + " '" + str(name) + "', expected one of: " + ", ".join(self.GetNames(kind) ) )

        if key not in self.__types:
            module, classname = self.__components[key]
            mod = importlib.import_module(module)
            self.__types[key] = getattr(mod, classname)

        return self.__types[key]

    ## Gets an instantiated component.  Keyword arguments are passed to the constructor.
    def GetComponent(self, kind, name, **args):
        return self.GetComponentType(kind, name)(**args)

## Call this to get the existing pedia
def getPedia():
    global __pedia

    if __pedia is None:
        __pedia = Components()

    return __pedia

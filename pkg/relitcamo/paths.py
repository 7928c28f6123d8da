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
#  A number of convenience functions that simplify path issues.  Scene files refer to their
#  radiance maps and backgrounds by paths relative to the scene file, and attack runs drop a
#  pile of artifacts into an output directory, so all of that lives here.

import os

from relitcamo import exceptions

## Expands a path that may include the special "~/" sequence to an absolute path.
def UnHome(path):
    return os.path.expanduser(path)

## Joins the paths given in args.
def JoinPaths(*args):
    return os.path.normpath(os.path.expanduser(os.path.join(*args) ) )

## Returns the directory to a file.  It should be everything up to the file, e.g. /usr/bin/python would
#  return /usr/bin
def GetDir(path):
    base, tail = os.path.split(path)
    return base

## Resolves a path found inside a file against the directory of that file.  Absolute paths
#  are left alone.
#  @param owner the file that contains the reference, i.e. the scene file.
#  @param ref the path as written in the file.
def Resolve(owner, ref):
    if os.path.isabs(ref):
        return os.path.normpath(ref)
    return JoinPaths(GetDir(os.path.abspath(owner) ), ref)

## Returns true if the path is absolute.
def IsAbsolute(path):
    return os.path.isabs(path)

## Makes a directory, parents included.  An existing directory is fine.
def MkDir(path):
    path = os.path.expanduser(path)
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as err:
        raise exceptions.rcIOError("Error creating directory '" + path + "': " + str(err) )

## Opens the file requested, in the mode requested, turning failures into rcIOError.
def OpenFile(path, mode):
    try:
        return open(path, mode)
    except OSError as err:
        raise exceptions.rcIOError("Error opening file '" + str(path) + "' for mode '" + str(mode) + "': " + str(err) )

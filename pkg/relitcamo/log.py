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

import logging

## @file
#
#  Logging for the library.  Everything goes through the standard logging package under the
#  "relitcamo" logger, so a host application can grab it like any other.  The functions here
#  keep the old habit of a global log level and a pair of log files.

# Set the log level.  0 is no logging, while negative numbers are debug messages not useful
# for logging.
loglevel = 1

## Timestamp format used for every line that hits a file.
TIMESTAMP = '%Y.%m.%d.%H.%M.%S'

_root = logging.getLogger("relitcamo")
_root.addHandler(logging.NullHandler())

## Translates our loglevel into a logging threshold.
def _threshold(level):
    if level < 0:
        return logging.DEBUG
    elif level == 0:
        return logging.CRITICAL + 1
    return logging.INFO

## Changes the global log level.
def SetLogLevel(level):
    global loglevel

    loglevel = int(level)
    _root.setLevel(_threshold(loglevel) )

## Returns the logger for a module.  Pass __name__; anything outside the package gets hung
#  under relitcamo anyway.
def GetLogger(name):
    if name == "relitcamo" or name.startswith("relitcamo."):
        return logging.getLogger(name)
    return _root.getChild(name)

## Sends log lines to standard error, which is where the console wants them.  Results go to
#  standard output, so keep them apart.
def console():
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter('%(message)s') )
    _root.addHandler(handler)
    _root.setLevel(_threshold(loglevel) )
    return handler

## Attaches the two log files.  Errors go to errfile, everything else to logfile.  Returns the
#  handlers, for RemoveHandler.
def logger(errfile, logfile):
    fmt = logging.Formatter('%(asctime)s: %(message)s', datefmt=TIMESTAMP)

    errhandler = logging.FileHandler(errfile, mode='a')
    errhandler.setLevel(logging.ERROR)
    errhandler.setFormatter(fmt)

    loghandler = logging.FileHandler(logfile, mode='a')
    loghandler.setFormatter(fmt)

    _root.addHandler(errhandler)
    _root.addHandler(loghandler)
    _root.setLevel(_threshold(loglevel) )
    return [errhandler, loghandler]

## Detaches a handler returned by console() or logger().
def RemoveHandler(handler):
    _root.removeHandler(handler)
    handler.close()

def errwriter(message):
    _root.error(message)

def logwriter(message):
    _root.info(message)

SetLogLevel(loglevel)

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
#  This file contains the exceptions used by the library.  A few standard exceptions are mixed in,
#  with the hope that an app developer will only ever need to import this file for exceptions.
#
#  Every exception carries an exitcode, which is what the console returns when the exception
#  escapes a command.  0 is success, 1 is usage or I/O trouble, 2 is something that failed
#  validation, 3 is a numeric failure (a NaN or an infinity turned up in a pass).

## The base class for all library exceptions
class rcException(Exception):
    exitcode = 1

## Raise this exception when you haven't yet implemented a specific exception type, but need
#  to raise an exception anyway
class rcExceptionNotImplemented(rcException, NotImplementedError):
    pass

## Bad command line, bad config string, anything the user typed wrong.
class rcUsageError(rcException):
    exitcode = 1

## Thrown when a file or string can't be parsed at all.
class rcParseError(rcUsageError, ValueError):
    pass

## Thrown when reading or writing a file fails, including truncated or foreign checkpoints.
class rcIOError(rcUsageError, OSError):
    pass

## Thrown for unknown keys, wrong types or out of range values in a run config, and for
#  component names the pedia has never heard of.
class rcConfigError(rcUsageError, ValueError):
    pass

## Thrown when a value parses fine but breaks an invariant.  The message starts with the field
#  path, i.e. "gaussians[3].albedo[1]", so you can find the offending value.
class rcValidationError(rcException, ValueError):
    exitcode = 2

    ## The field path of the offending value, or None if it isn't tied to a field.
    path = None

    def __init__(self, message, path=None):
        if path is not None:
            message = path + ": " + message
        super().__init__(message)
        self.path = path

## Thrown by the renderer, e.g. a gaussian behind the camera handed to the shader.
class rcRenderError(rcValidationError):
    pass

## Thrown by the surrogate detector, e.g. an image that doesn't tile into the anchor stride.
class rcDetectorError(rcValidationError):
    pass

## Thrown when a NaN or an infinity shows up anywhere in a pass.  Adversarial optimization
#  that quietly absorbs NaNs is the worst kind of optimization, so we stop right there.
class rcNumericError(rcException, ArithmeticError):
    exitcode = 3

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
import os

import pytest

from relitcamo import exceptions
from relitcamo import log
from relitcamo import paths
from relitcamo import pedia

def test_join_and_split():
    assert paths.JoinPaths("a", "b/../c", "d.json") == os.path.join("a", "c", "d.json")
    assert paths.GetDir(os.path.join("x", "y", "z.ppm") ) == os.path.join("x", "y")

def test_resolve_is_relative_to_the_owner(tmp_path):
    owner = str(tmp_path / "scenes" / "scene.json")
    assert paths.Resolve(owner, "noon.bin") == str(tmp_path / "scenes" / "noon.bin")
    assert paths.Resolve(owner, "/abs/noon.bin") == "/abs/noon.bin"
    assert paths.IsAbsolute("/abs")
    assert not paths.IsAbsolute("rel")

def test_mkdir_and_open(tmp_path):
    target = str(tmp_path / "a" / "b")
    paths.MkDir(target)
    paths.MkDir(target)
    with paths.OpenFile(os.path.join(target, "f.txt"), 'w') as f:
        f.write("x")
    with pytest.raises(exceptions.rcIOError):
        paths.OpenFile(os.path.join(target, "missing.txt"), 'r')

def test_mkdir_over_a_file(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(exceptions.rcIOError):
        paths.MkDir(str(blocker / "sub") )


def test_loggers_hang_under_the_package():
    assert log.GetLogger("relitcamo.attack.optimizer").name == "relitcamo.attack.optimizer"
    assert log.GetLogger("plugin").name == "relitcamo.plugin"

def test_log_levels():
    before = log.loglevel
    try:
        log.SetLogLevel(0)
        assert not log.GetLogger("relitcamo").isEnabledFor(logging.CRITICAL)
        log.SetLogLevel(-1)
        assert log.GetLogger("relitcamo").isEnabledFor(logging.DEBUG)
        log.SetLogLevel(1)
        assert not log.GetLogger("relitcamo").isEnabledFor(logging.DEBUG)
        assert log.GetLogger("relitcamo").isEnabledFor(logging.INFO)
    finally:
        log.SetLogLevel(before)

def test_log_files(tmp_path):
    errfile = str(tmp_path / "error.log")
    logfile = str(tmp_path / "relitcamo.log")
    handlers = log.logger(errfile, logfile)
    try:
        log.logwriter("all is well")
        log.errwriter("all is lost")
    finally:
        for a in handlers:
            log.RemoveHandler(a)
    with open(logfile) as f:
        lines = f.read().splitlines()
    assert [ a.split(": ", 1)[1] for a in lines ] == ["all is well", "all is lost"]
    with open(errfile) as f:
        assert f.read().rstrip().endswith(": all is lost")


def test_exit_codes():
    assert exceptions.rcParseError("x").exitcode == 1
    assert exceptions.rcConfigError("x").exitcode == 1
    assert exceptions.rcIOError("x").exitcode == 1
    assert exceptions.rcRenderError("x").exitcode == 2
    assert exceptions.rcDetectorError("x").exitcode == 2
    assert exceptions.rcNumericError("x").exitcode == 3

def test_validation_error_carries_the_path():
    err = exceptions.rcValidationError("must be positive", "gaussians[3].scale[1]")
    assert str(err) == "gaussians[3].scale[1]: must be positive"
    assert err.path == "gaussians[3].scale[1]"
    assert exceptions.rcValidationError("plain").path is None
    assert isinstance(err, ValueError)


def test_pedia_is_a_singleton():
    assert pedia.getPedia() is pedia.getPedia()
    assert pedia.getPedia().GetNames('relighter') == ['parametric']

def test_added_components_are_imported_lazily():
    components = pedia.Components()
    components.AddComponentType('relighter', 'Broken', 'relitcamo.no_such_module', 'Nothing')
    assert components.HasComponent('relighter', 'broken')
    with pytest.raises(ImportError):
        components.GetComponentType('relighter', 'broken')

    components.AddComponentType('relighter', 'broken', 'relitcamo.render.compositor', 'ParametricRelighter')
    assert components.GetComponent('relighter', 'BROKEN').__class__.__name__ == 'ParametricRelighter'
    assert not pedia.getPedia().HasComponent('relighter', 'broken')

def test_unknown_component_lists_the_choices():
    with pytest.raises(exceptions.rcConfigError, match="expected one of: adamw, sgd"):
        pedia.getPedia().GetComponentType('optimizer', 'lbfgs')

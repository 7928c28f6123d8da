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

import threading

import pytest

from relitcamo import exceptions
from relitcamo import parallel

def test_results_keep_their_order():
    parallel.SetThreads(4)
    assert parallel.MapOrdered(lambda a: a * a, range(50) ) == [ a * a for a in range(50) ]

def test_single_thread_runs_inline():
    names = parallel.MapOrdered(lambda a: threading.current_thread().name, range(3) )
    assert names == [threading.current_thread().name] * 3

def test_workers_are_used():
    parallel.SetThreads(2)
    names = parallel.MapOrdered(lambda a: threading.current_thread().name, range(8) )
    assert all(n.startswith("relitcamo") for n in names)

def test_nested_maps_run_inline():
    parallel.SetThreads(2)
    out = parallel.MapOrdered(lambda a: parallel.MapOrdered(lambda b: a + b, range(3) ), range(4) )
    assert out == [ [a, a + 1, a + 2] for a in range(4) ]

def test_first_error_is_raised():
    parallel.SetThreads(3)
    def work(a):
        if a in (2, 5):
            raise exceptions.rcNumericError("item " + str(a) )
        return a
    with pytest.raises(exceptions.rcNumericError, match="item 2"):
        parallel.MapOrdered(work, range(8) )

def test_bad_thread_count():
    with pytest.raises(exceptions.rcConfigError):
        parallel.SetThreads(0)
    assert parallel.threads == 1

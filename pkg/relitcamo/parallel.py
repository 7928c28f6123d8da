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
#  Worker threads.  Tiles of a render and lanes of an attack batch are independent, so they can
#  be farmed out to a pool.  Results always come back in submission order and every reduction
#  is done by the caller in that order, which is why the thread count never changes a single bit
#  of output.  The pool size is a process-wide setting, like the log level.

import threading
from concurrent.futures import ThreadPoolExecutor

from relitcamo import exceptions

## The number of worker threads.  1 means everything runs inline in the calling thread.
threads = 1

__lock = threading.RLock()
__pool = None

## Changes the number of worker threads.  The old pool, if any, is shut down.
def SetThreads(count):
    global threads, __pool

    count = int(count)
    if count < 1:
        raise exceptions.rcConfigError("threads: must be at least 1, got " + str(count) )

    with __lock:
        if __pool is not None:
            __pool.shutdown(wait=True)
            __pool = None
        threads = count

def _getPool():
    global __pool

    with __lock:
        if __pool is None:
            __pool = ThreadPoolExecutor(max_workers=threads, thread_name_prefix="relitcamo")
        return __pool

## Calls func on every item and returns the results as a list, in the order of items.  The first
#  exception raised by any call is raised here, after all calls have finished.
def MapOrdered(func, items):
    items = list(items)
    if threads == 1 or len(items) < 2 or threading.current_thread().name.startswith("relitcamo"):
        return [ func(a) for a in items ]

    futures = [ _getPool().submit(func, a) for a in items ]
    results = []
    error = None
    for f in futures:
        try:
            results.append(f.result() )
        except Exception as err:
            if error is None:
                error = err
            results.append(None)
    if error is not None:
        raise error
    return results

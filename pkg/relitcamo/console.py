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
#  The command line.  Commands are registered with the Console the way they always were, a
#  name, a callback, and two pieces of help text, and argparse does the parsing.  Results are
#  JSON on standard output, log lines go to standard error, and the exit code comes from the
#  exception that stopped the command, if any.

import argparse
import json
import sys

import numpy as np
from tqdm import tqdm

from relitcamo import callback
from relitcamo import exceptions
from relitcamo import log
from relitcamo import parallel
from relitcamo import paths
from relitcamo.analysis import landscape
from relitcamo.attack import checkpoint
from relitcamo.attack import config as runconfig
from relitcamo.attack import frames
from relitcamo.attack import hpcm
from relitcamo.attack import optimizer
from relitcamo.detect import surrogate
from relitcamo.scene import imageio
from relitcamo.scene import io
from relitcamo.scene import model

_log = log.GetLogger(__name__)

CONFIG_KEYS = ('pitch', 'azimuth', 'distance', 'env')

## Prints a result as JSON on standard output.
def _emit(result):
    sys.stdout.write(json.dumps(result, sort_keys=True, indent=2) + "\n")
    sys.stdout.flush()

## Parses "pitch=..,azimuth=..,distance=..,env=..".
#
#  @param envIds if given, env has to be one of these.
#  @return a model.PhysicalConfiguration
def ParseConfigString(text, envIds=None):
    values = {}
    for part in str(text).split(','):
        key, sep, value = part.partition('=')
        key = key.strip()
        if not sep:
            raise exceptions.rcParseError("config string: expected key=value, got " + repr(part) )
        if key not in CONFIG_KEYS:
            raise exceptions.rcParseError("config string: unknown key " + repr(key) )
        if key in values:
            raise exceptions.rcParseError("config string: " + key + " given twice")
        values[key] = value.strip()

    missing = [a for a in CONFIG_KEYS if a not in values]
    if len(missing) > 0:
        raise exceptions.rcParseError("config string: missing " + ", ".join(missing) )

    numbers = {}
    for key in CONFIG_KEYS[:3]:
        try:
            numbers[key] = float(values[key])
        except ValueError:
            raise exceptions.rcParseError("config string: " + key + " is not a number: " + repr(values[key]) )

    if envIds is not None and values['env'] not in envIds:
        raise exceptions.rcParseError("config string: unknown environment '" + values['env'] + "', the scene has " + ", ".join(envIds) )
    return model.PhysicalConfiguration(numbers['pitch'], numbers['azimuth'], numbers['distance'], values['env'])

def _runConfig(path):
    if path is None:
        return runconfig.RunConfig()
    return runconfig.LoadRunConfig(path)

def _makeParent(path):
    parent = paths.GetDir(path)
    if parent:
        paths.MkDir(parent)

## Renders one frame of a scene, composited the way the attack sees it, and runs the detector
#  on it.
def CmdRender(scene_path, config_string, out_path, run_config_path=None):
    scene = io.LoadScene(scene_path)
    cfg = ParseConfigString(config_string, scene.EnvIds() )
    config = _runConfig(run_config_path)

    space = model.DiscretizeSpace([cfg.pitch], [cfg.azimuth], [cfg.distance], [cfg.env])
    frame = frames.FrameCache(scene, config, space).Get(0)
    image, rgb = frame.Render(scene.Cloud().Albedos() )
    if not np.all(np.isfinite(image) ):
        raise exceptions.rcNumericError("rendered frame has non-finite pixels")

    detector = config.Detector()
    dets = surrogate.Detect(detector, image)
    loss, index = surrogate.DetectionLoss(dets, frame.ground_truth)

    _makeParent(out_path)
    imageio.WritePpm(out_path, image)
    _log.info("frame written to %s", out_path)

    selected = dets[index] if index >= 0 else None
    _emit({
        'out' : out_path,
        'loss' : loss,
        'selected' : index,
        'box' : list(selected.box) if selected is not None else None,
        'confidence' : selected.confidence if selected is not None else None,
        'detections' : len(dets),
        'ground_truth' : list(frame.ground_truth.Box() ),
        'fallback_up' : frame.camera.Metadata()['fallback_up'],
    })
    return 0

def _progress(bar, state):
    bar.update(1)
    bar.set_postfix(loss="%.4f" % state.History()[-1])

def _reportCheckpoint(state, path):
    log.logwriter("iteration " + str(state.Iteration() ) + " checkpointed to " + path)

## Runs an attack and writes its artifacts to out_dir: run_config.json, the checkpoints,
#  history.csv, adversarial_scene.json with its assets, and table.csv for hpcm runs.
def CmdAttack(scene_path, run_config_path, out_dir, seed=None, mode=None, resume=None, progress=False):
    scene = io.LoadScene(scene_path)
    config = _runConfig(run_config_path)
    overrides = {}
    if seed is not None:
        overrides['seed'] = seed
    if mode is not None:
        overrides['mode'] = mode
    if len(overrides) > 0:
        config = config.With(**overrides)
    detector = config.Detector()

    state = None
    if resume is not None:
        state = optimizer.StateFromCheckpoint(checkpoint.ReadCheckpoint(resume), scene, config)
        _log.info("resuming from %s at iteration %d", resume, state.Iteration() )

    paths.MkDir(out_dir)
    runconfig.SaveRunConfig(config, paths.JoinPaths(out_dir, "run_config.json") )

    start = state.Iteration() if state is not None else 0
    with tqdm(total=config.iters, initial=min(start, config.iters), disable=not progress,
              file=sys.stderr, desc=config.mode) as bar:
        callbacks = callback.CallbackList()
        callbacks.RegisterCallback('step', lambda state: _progress(bar, state) )
        callbacks.RegisterCallback('checkpoint', _reportCheckpoint)
        state, artifacts = optimizer.RunAttack(scene, detector, config, state=state, out_dir=out_dir, callbacks=callbacks)
    log.logwriter(config.mode + " attack on " + scene_path + " written to " + out_dir)

    historyPath = paths.JoinPaths(out_dir, "history.csv")
    optimizer.ExportHistory(state.History(), historyPath)
    scenePath = paths.JoinPaths(out_dir, "adversarial_scene.json")
    io.SaveScene(optimizer.ApplyAlbedo(scene, state.Albedo() ), scenePath)

    result = {
        'mode' : config.mode,
        'seed' : config.seed,
        'iterations' : state.Iteration(),
        'final_loss' : state.History()[-1] if state.Iteration() > 0 else None,
        'checkpoints' : artifacts['checkpoints'],
        'history' : historyPath,
        'scene' : scenePath,
    }
    if state.Table() is not None:
        result['table'] = paths.JoinPaths(out_dir, "table.csv")
        hpcm.ExportTable(state.Table(), scene.Space(), result['table'])
    _emit(result)
    return 0

## Sweeps the scene's grid with the albedos of a checkpoint, or the scene's own albedos when
#  there's no checkpoint, and writes the heatmap, the surface and the breakdowns under
#  out_prefix.
def CmdLandscape(scene_path, albedo_ckpt, out_prefix, run_config_path=None, threshold=None):
    scene = io.LoadScene(scene_path)
    config = _runConfig(run_config_path)
    detector = config.Detector()

    cloud = scene.Cloud()
    if albedo_ckpt is None:
        params = cloud.Albedos()[cloud.CamoIndices()].reshape(-1)
    else:
        params = checkpoint.ReadCheckpoint(albedo_ckpt).albedo
        if params.shape[0] != 3 * len(cloud.CamoIndices() ):
            raise exceptions.rcValidationError("checkpoint has " + str(params.shape[0]) + " albedo values, the scene has "
                                               + str(3 * len(cloud.CamoIndices() ) ), "checkpoint.albedo")

    losses = optimizer.EvaluateGrid(scene, detector, params, config=config)
    grid = landscape.LandscapeGrid(scene.Space(), losses)

    _makeParent(out_prefix)
    landscape.ExportHeatmap(grid, out_prefix + ".csv", out_prefix + ".ppm", threshold=threshold)
    landscape.ExportSurface(grid, out_prefix + "_surface.csv")
    landscape.ExportBreakdowns(grid, out_prefix)

    metrics = landscape.FlatnessMetrics(grid)
    if threshold is not None:
        metrics['evasion_rate'] = landscape.EvasionRate(grid, threshold)
    metrics['cells'] = scene.Space().Q()
    _emit(metrics)
    return 0

## Runs the built-in property checks.  Exit 0 when they all pass, 2 otherwise.
def CmdVerify(quick=True, seed=0):
    from relitcamo import verify

    report = verify.RunVerify(quick=quick, seed=seed)
    _emit(report)
    if report['passed']:
        return 0
    return exceptions.rcValidationError.exitcode

## Writes the demo scene and its run config.
def CmdDemo(out_dir, seed=0):
    from relitcamo import demo

    _emit(demo.WriteDemo(out_dir, seed=seed) )
    return 0


## This class implements console commands.  To create a new console command, make an instance
#  of this class, giving all the keyword arguments in the constructor.
#      @param 'command' : the name of the command, what the user types to use it.
#      @param 'callback' : called with the parsed argparse namespace, returns the exit code.
#      @param 'helpshort' : short help text, one line.
#      @param 'helplong' : long help text, as long as needed.
#      @param 'arguments' : a function that adds the command's arguments to its parser.
class ConsoleCommand(object):
    __command = None
    __callback = None
    __helpshort = None
    __helplong = None
    __arguments = None

    def __init__(self, **args):
        # Ensure the command is always lowercase
        self.__command = args['command'].strip().lower()
        self.__callback = args['callback']
        self.__helpshort = args['helpshort']
        self.__helplong = args['helplong']
        self.__arguments = args.get('arguments')

    def callback(self, *args):
        return self.__callback(*args)

    def command(self):
        return self.__command

    def helpshort(self):
        return self.__helpshort

    def helplong(self):
        return self.__helplong

    def arguments(self, parser):
        if self.__arguments is not None:
            self.__arguments(parser)


## @class Console
#
#  Holds the registered commands and runs one of them per invocation.
class Console(object):
    __commands = None

    def __init__(self):
        self.__commands = []

        self.RegisterCommand('render', self.consoleRender, "render --scene S --config STR --out F.ppm",
                             "Renders one composited frame and prints the surrogate's loss and box.",
                             self.__renderArguments)
        self.RegisterCommand('attack', self.consoleAttack, "attack --scene S [--run-config C] --out DIR",
                             "Runs an eot or hpcm attack and writes checkpoints, history, the adversarial scene and the difficulty table.",
                             self.__attackArguments)
        self.RegisterCommand('landscape', self.consoleLandscape, "landscape --scene S [--checkpoint CKPT] --out PREFIX",
                             "Sweeps the configuration grid and writes the heatmap, surface and breakdowns.",
                             self.__landscapeArguments)
        self.RegisterCommand('verify', self.consoleVerify, "verify [--full]",
                             "Runs the built-in property checks and prints a JSON report.",
                             self.__verifyArguments)
        self.RegisterCommand('demo', self.consoleDemo, "demo --out DIR",
                             "Writes the demo scene, its assets and a run config.",
                             self.__demoArguments)
        self.RegisterCommand('help', self.consoleHelp, "help [command]",
                             "Lists the commands, or the help of one.",
                             lambda p: p.add_argument('topic', nargs='?') )

    ## Adds a command.
    def RegisterCommand(self, command, callback, helpshort, helplong, arguments=None):
        self.__commands.append(ConsoleCommand(
                command = command,
                callback = callback,
                helpshort = helpshort,
                helplong = helplong,
                arguments = arguments,
            )
        )

    def Commands(self):
        return list(self.__commands)

    def Parser(self):
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument('--threads', type=int, default=None, help="worker threads, results don't depend on it")
        common.add_argument('-v', '--verbose', action='store_true', help="debug logging")
        common.add_argument('-q', '--quiet', action='store_true', help="no logging")
        common.add_argument('--log-dir', dest='log_dir', default=None, help="also log to error.log and relitcamo.log in this directory")

        parser = argparse.ArgumentParser(prog='relitcamo', description="Relightable adversarial camouflage for gaussian splat scenes.")
        sub = parser.add_subparsers(dest='command', metavar='command')
        sub.required = True
        for a in self.__commands:
            p = sub.add_parser(a.command(), parents=[common], help=a.helplong(), description=a.helplong() )
            a.arguments(p)
            p.set_defaults(handler=a)
        return parser

    ## Runs a command line and returns the exit code.
    def Run(self, argv=None):
        parser = self.Parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as err:
            # argparse has already printed the problem.
            return 0 if err.code == 0 else exceptions.rcUsageError.exitcode

        level = log.loglevel
        threads = parallel.threads
        if args.quiet:
            log.SetLogLevel(0)
        elif args.verbose:
            log.SetLogLevel(-1)
        handlers = [log.console()]

        try:
            if args.log_dir is not None:
                paths.MkDir(args.log_dir)
                handlers += log.logger(paths.JoinPaths(args.log_dir, "error.log"), paths.JoinPaths(args.log_dir, "relitcamo.log") )
            if args.threads is not None:
                parallel.SetThreads(args.threads)
            return args.handler.callback(args)
        except exceptions.rcException as err:
            message = "relitcamo " + args.command + ": " + str(err)
            if log.loglevel == 0:
                sys.stderr.write(message + "\n")
            else:
                log.errwriter(message)
            return err.exitcode
        finally:
            for a in handlers:
                log.RemoveHandler(a)
            log.SetLogLevel(level)
            if parallel.threads != threads:
                parallel.SetThreads(threads)

    ## @name Console Commands
    #@{
    def consoleRender(self, args):
        return CmdRender(args.scene, args.config, args.out, args.run_config)

    def consoleAttack(self, args):
        return CmdAttack(args.scene, args.run_config, args.out, seed=args.seed, mode=args.mode,
                         resume=args.resume, progress=args.progress)

    def consoleLandscape(self, args):
        return CmdLandscape(args.scene, args.checkpoint, args.out, args.run_config, args.threshold)

    def consoleVerify(self, args):
        return CmdVerify(quick=not args.full, seed=args.seed)

    def consoleDemo(self, args):
        return CmdDemo(args.out, seed=args.seed)

    def consoleHelp(self, args):
        found = False
        for a in self.__commands:
            if args.topic is None or a.command() == args.topic:
                print("%10s : %s" % (a.command(), a.helplong() ))
                print("%13s %s" % (" ", a.helpshort() ))
                print()
                found = True
        if not found:
            print("Command not found.")
            return exceptions.rcUsageError.exitcode
        return 0
    #@}

    def __renderArguments(self, p):
        p.add_argument('--scene', required=True)
        p.add_argument('--config', required=True, help="pitch=..,azimuth=..,distance=..,env=..")
        p.add_argument('--out', required=True)
        p.add_argument('--run-config', dest='run_config', default=None)

    def __attackArguments(self, p):
        p.add_argument('--scene', required=True)
        p.add_argument('--run-config', dest='run_config', default=None)
        p.add_argument('--out', required=True)
        p.add_argument('--seed', type=int, default=None)
        p.add_argument('--mode', choices=runconfig.MODES, default=None)
        p.add_argument('--resume', default=None, help="checkpoint to continue from")
        p.add_argument('--progress', action='store_true', help="progress bar on standard error")

    def __landscapeArguments(self, p):
        p.add_argument('--scene', required=True)
        p.add_argument('--checkpoint', '--resume', dest='checkpoint', default=None,
                       help="checkpoint with the albedos to sweep, the scene's own if omitted")
        p.add_argument('--out', required=True, help="output prefix")
        p.add_argument('--run-config', dest='run_config', default=None)
        p.add_argument('--threshold', type=float, default=None, help="detected/evaded split of the heatmap")

    def __verifyArguments(self, p):
        p.add_argument('--full', action='store_true', help="acceptance-sized checks instead of the quick ones")
        p.add_argument('--seed', type=int, default=0)

    def __demoArguments(self, p):
        p.add_argument('--out', required=True)
        p.add_argument('--seed', type=int, default=0)


def main(argv=None):
    return Console().Run(argv)

if __name__ == '__main__':
    sys.exit(main() )

# -*- coding: utf-8 -*-
r"""
The ``expertac`` command line.

Verbs:

- ``validate`` -- check that the objective of a grid is reachable and print
  the reachability summary

- ``gen-expert`` -- write planned (optionally noisy) expert trajectories

- ``train`` -- train with the expert-augmented loss

- ``bc`` -- the behavioral cloning baseline

- ``eval`` -- evaluate a policy checkpoint

- ``sweep`` -- run a parameter sweep

- ``plot`` -- render learning curves

Training flags are the :class:`~expertac.learning.config.TrainConfig` field
names in dashed spelling (``--lambda-expert``); they override the values of a
``--config`` file. Output goes to ``--out`` or, by default, to
``$EXPERTAC_OUTPUT/<verb>`` (``runs/<verb>`` when the variable is unset).

The exit code is 0 on success, 1 on a usage error and 2 when the command
fails.

EXAMPLES::

    >>> import os, tempfile
    >>> from expertac.cli import dispatch
    >>> from expertac.environment import grid_environments, save_grid
    >>> work = tempfile.mkdtemp()
    >>> path = os.path.join(work, 'room.grid')
    >>> save_grid(grid_environments.open_room(1, 2), path)
    >>> dispatch(['validate', '--env', path, '--out', os.path.join(work, 'validate')])
    open-room-1x2: 1 reachable cells (4 search states); objective 'goal' reached in 1 actions
    0
"""
######################################################################
#  This file is part of expertac.
#
#        Copyright (C) 2026 The expertac developers
#
#  expertac is free software: you can redistribute it and/or modify
#  it under the terms of the GNU General Public License as published by
#  the Free Software Foundation, either version 2 of the License, or
#  (at your option) any later version.
#
#  expertac is distributed in the hope that it will be useful,
#  but WITHOUT ANY WARRANTY; without even the implied warranty of
#  MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#  GNU General Public License for more details.
#
#  You should have received a copy of the GNU General Public License
#  along with expertac. If not, see <https://www.gnu.org/licenses/>.
######################################################################
import argparse
import csv
import dataclasses
import logging
import os
import sys

from expertac.errors import ConfigError, ExpertACError

logger = logging.getLogger(__name__)

OUTPUT_VARIABLE = 'EXPERTAC_OUTPUT'

LOG_FORMAT = "%(asctime)s %(name)s %(levelname)s %(message)s"

EXIT_SUCCESS = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2


class UsageError(Exception):
    r"""
    The command line is invalid.
    """


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError("{}\n{}".format(self.format_usage().rstrip(), message))


def _add_config_flags(parser, exclude=()):
    from expertac.learning.config import TrainConfig
    parser.add_argument('--config', help='a key=value configuration file')
    for f in dataclasses.fields(TrainConfig):
        if f.name in exclude:
            continue
        flag = '--' + f.name.replace('_', '-')
        if isinstance(f.default, bool):
            parser.add_argument(flag, dest=f.name, action=argparse.BooleanOptionalAction, default=None,
                                help='(default: {})'.format(f.default))
        else:
            parser.add_argument(flag, dest=f.name, default=None, metavar=f.name.upper(),
                                help='(default: {})'.format(f.default))


def _config(args):
    r"""
    Return the configuration of ``--config`` with the flags given on the
    command line applied on top.
    """
    from expertac.learning.config import TrainConfig
    cfg = TrainConfig.from_file(args.config) if args.config else TrainConfig()
    overrides = {name: getattr(args, name) for name in TrainConfig.field_names()
                 if getattr(args, name, None) is not None}
    return cfg.with_overrides(overrides)


def _add_output_flag(parser):
    parser.add_argument('--out', help='output directory (default: ${}/<verb>)'.format(OUTPUT_VARIABLE))


def _output_directory(args, verb, reuse=False):
    r"""
    Return the output directory of this invocation, creating it.

    Unless ``reuse`` is set an existing non-empty directory is refused.
    """
    out = args.out or os.path.join(os.environ.get(OUTPUT_VARIABLE, 'runs'), verb)
    if not reuse and os.path.isdir(out) and os.listdir(out):
        raise UsageError("output directory {} exists and is not empty".format(out))
    os.makedirs(out, exist_ok=True)
    return out


def _write_command(out, args):
    r"""
    Write the options of this invocation to ``out/command.resolved``.
    """
    with open(os.path.join(out, 'command.resolved'), 'w') as f:
        for key, value in sorted(vars(args).items()):
            if key in ('handler', 'verbose'):
                continue
            if isinstance(value, (list, tuple)):
                value = ','.join(str(v) for v in value)
            f.write('{}={}\n'.format(key, '' if value is None else value))


def _write_rows(path, header, rows):
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(rows)


def validate(args):
    from expertac.environment import load_grid, validate_spec
    certificate = validate_spec(load_grid(args.env))
    out = _output_directory(args, 'validate', reuse=True)
    _write_command(out, args)
    with open(os.path.join(out, 'certificate.txt'), 'w') as f:
        f.write('{}\n'.format(certificate))
    print(certificate)
    return EXIT_SUCCESS


def gen_expert(args):
    from expertac.environment import load_grid
    from expertac.learning.expert import generate_dataset, save_dataset, dataset_score
    if args.trajectories < 1:
        raise UsageError("--trajectories must be at least 1, got {}".format(args.trajectories))
    if not 0.0 <= args.noise < 1.0:
        raise UsageError("--noise must lie in [0, 1), got {}".format(args.noise))
    spec = load_grid(args.env)
    out = _output_directory(args, 'gen-expert')
    _write_command(out, args)
    ds = generate_dataset(spec, trajectories=args.trajectories, noise=args.noise, seed=args.seed, gamma=args.gamma)
    path = os.path.join(out, 'expert.traj')
    save_dataset(ds, path)
    print("{}: {} trajectories, {} steps, mean score {}".format(path, ds.trajectory_count, len(ds),
                                                              dataset_score(ds)))
    return EXIT_SUCCESS


def train(args):
    from expertac.learning.trainer import Trainer
    cfg = _config(args)
    trainer = Trainer(cfg)
    trainer.out_dir = _output_directory(args, 'train')
    _write_command(trainer.out_dir, args)
    trainer.run()
    print("wrote {}".format(trainer.out_dir))
    return EXIT_SUCCESS


def _report_row(label, report):
    return [label, report.policy_mode, report.episodes, repr(report.mean), repr(report.median),
            repr(report.min), repr(report.max), repr(report.success_rate)]


REPORT_COLUMNS = ('starts', 'mode', 'episodes', 'mean', 'median', 'min', 'max', 'success_rate')


def _evaluation_rows(net, spec, modes, episodes, seed, perturbed):
    from expertac.harness.evaluation import evaluate, perturbed_starts
    rows = []
    for mode in modes:
        report = evaluate(net, spec, episodes, mode, seed=seed)
        rows.append(_report_row('fixed', report))
        print("{} policy, fixed start: mean {} median {} min {} max {} success rate {}".format(
            mode, report.mean, report.median, report.min, report.max, report.success_rate))
        if perturbed:
            starts = perturbed_starts(spec, perturbed, seed=seed)
            report = evaluate(net, spec, len(starts), mode, seed=seed, starts=starts)
            rows.append(_report_row('perturbed', report))
            print("{} policy, {} perturbed starts: mean {} success rate {}".format(
                mode, len(starts), report.mean, report.success_rate))
    return rows


def bc(args):
    from expertac.environment import load_grid
    from expertac.learning.expert import load_dataset, bc_train
    from expertac.learning.policy import save_checkpoint
    from expertac.learning.trainer import initial_network
    cfg = _config(args)
    if cfg.expert is None:
        raise UsageError("bc requires an expert trajectory file (--expert)")
    if args.bc_steps < 0:
        raise UsageError("--bc-steps must be non-negative, got {}".format(args.bc_steps))
    spec = load_grid(cfg.env)
    ds = load_dataset(cfg.expert, cfg.gamma, spec=spec)
    out = _output_directory(args, 'bc')
    cfg.save(os.path.join(out, 'config.resolved'))
    _write_command(out, args)

    history = []
    net = bc_train(initial_network(spec, cfg), ds, args.bc_steps, args.bc_lr,
                   on_step=lambda step, loss, accuracy: history.append((step, repr(loss), repr(accuracy))))
    _write_rows(os.path.join(out, 'metrics.csv'), ('step', 'loss', 'expert_accuracy'), history)
    save_checkpoint(net, os.path.join(out, 'final.ckpt'))
    rows = _evaluation_rows(net, spec, ('greedy', 'stochastic'), cfg.eval_episodes, cfg.seed, args.perturbed)
    _write_rows(os.path.join(out, 'evaluations.csv'), REPORT_COLUMNS, rows)
    return EXIT_SUCCESS


def evaluate(args):
    from expertac.environment import load_grid
    from expertac.learning.policy import load_checkpoint
    if args.episodes < 1:
        raise UsageError("--episodes must be at least 1, got {}".format(args.episodes))
    spec = load_grid(args.env)
    net = load_checkpoint(args.checkpoint)
    modes = ('stochastic', 'greedy') if args.mode == 'both' else (args.mode,)
    rows = _evaluation_rows(net, spec, modes, args.episodes, args.seed, args.perturbed)
    out = _output_directory(args, 'eval')
    _write_command(out, args)
    _write_rows(os.path.join(out, 'evaluations.csv'), REPORT_COLUMNS, rows)
    return EXIT_SUCCESS


def sweep(args):
    from expertac.harness.sweep import SweepSpec, run_sweep
    axis = args.axis.replace('-', '_')
    if axis in ('gamma', 'lambda_expert', 'advantage') and getattr(args, axis) is not None:
        raise UsageError("--{} conflicts with --axis {}".format(axis.replace('_', '-'), args.axis))
    if axis == 'curriculum_vs_expert' and args.respawn_curriculum is not None:
        raise UsageError("--respawn-curriculum conflicts with --axis {}".format(args.axis))
    try:
        seeds = [int(s) for s in args.seeds.split(',')]
    except ValueError:
        raise UsageError("--seeds takes comma separated integers, got {!r}".format(args.seeds))
    spec = SweepSpec(base=_config(args),
                     axis=axis,
                     values=SweepSpec.parse_values(axis, [v for v in args.values.split(',') if v.strip()]),
                     seeds=seeds,
                     expert_trajectories=args.expert_trajectories,
                     expert_noise=args.expert_noise,
                     eval_mode=args.eval_mode)
    out = _output_directory(args, 'sweep', reuse=True)
    _write_command(out, args)
    result = run_sweep(spec, out, workers=args.workers)
    for row in result.aggregates():
        print("{}={}: final mean {} median {} band [{}, {}], expert accuracy {}".format(*(row[:2] + row[3:8])))
    if result.failures:
        for value, seed, error in result.failures:
            print("failed: {}={} seed {}: {}".format(axis, value, seed, error), file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_SUCCESS


def plot(args):
    from expertac.graphical.curves import emit_plots
    if args.window < 1:
        raise UsageError("--window must be at least 1, got {}".format(args.window))
    sources = args.sources[0] if len(args.sources) == 1 and os.path.isdir(args.sources[0]) else args.sources
    out = _output_directory(args, 'plot', reuse=True)
    for path in emit_plots(sources, out, column=args.column, window=args.window):
        print(path)
    return EXIT_SUCCESS


def parser():
    r"""
    Return the argument parser of the command line.
    """
    from expertac.environment import shipped_environments
    from expertac.harness.sweep import SWEEP_AXES
    from expertac.version import version

    main = _Parser(prog='expertac', description='Expert-augmented actor-critic on sparse-reward grids.')
    main.add_argument('--version', action='version', version='%(prog)s ' + version)
    main.add_argument('-v', '--verbose', action='store_true', help='log debug messages')
    verbs = main.add_subparsers(dest='verb', metavar='VERB', parser_class=_Parser)
    verbs.required = True

    envs = ', '.join(shipped_environments())

    p = verbs.add_parser('validate', help='check the reachability of a grid')
    p.add_argument('--env', default='sparse-maze', help='one of {} or a grid file'.format(envs))
    _add_output_flag(p)
    p.set_defaults(handler=validate)

    p = verbs.add_parser('gen-expert', help='write planned expert trajectories')
    p.add_argument('--env', default='sparse-maze', help='one of {} or a grid file'.format(envs))
    p.add_argument('--trajectories', type=int, default=1)
    p.add_argument('--noise', type=float, default=0.0, help='probability of a random non-fatal action')
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--gamma', type=float, default=0.99)
    _add_output_flag(p)
    p.set_defaults(handler=gen_expert)

    p = verbs.add_parser('train', help='train with the expert-augmented loss')
    _add_config_flags(p)
    _add_output_flag(p)
    p.set_defaults(handler=train)

    p = verbs.add_parser('bc', help='train the behavioral cloning baseline')
    _add_config_flags(p)
    p.add_argument('--bc-steps', type=int, default=2000)
    p.add_argument('--bc-lr', type=float, default=0.5)
    p.add_argument('--perturbed', type=int, default=0, help='also evaluate from this many perturbed starts')
    _add_output_flag(p)
    p.set_defaults(handler=bc)

    p = verbs.add_parser('eval', help='evaluate a policy checkpoint')
    p.add_argument('--checkpoint', required=True)
    p.add_argument('--env', default='sparse-maze', help='one of {} or a grid file'.format(envs))
    p.add_argument('--episodes', type=int, default=10)
    p.add_argument('--mode', choices=('stochastic', 'greedy', 'both'), default='both')
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--perturbed', type=int, default=0, help='also evaluate from this many perturbed starts')
    _add_output_flag(p)
    p.set_defaults(handler=evaluate)

    p = verbs.add_parser('sweep', help='run a parameter sweep')
    _add_config_flags(p)
    p.add_argument('--axis', required=True, choices=SWEEP_AXES + tuple(a.replace('_', '-') for a in SWEEP_AXES))
    p.add_argument('--values', required=True, help='comma separated values of the axis')
    p.add_argument('--seeds', default='0,1,2', help='comma separated seeds')
    p.add_argument('--workers', type=int, default=1)
    p.add_argument('--expert-trajectories', type=int, default=1)
    p.add_argument('--expert-noise', type=float, default=0.0)
    p.add_argument('--eval-mode', choices=('stochastic', 'greedy'), default='greedy')
    _add_output_flag(p)
    p.set_defaults(handler=sweep)

    p = verbs.add_parser('plot', help='render learning curves')
    p.add_argument('sources', nargs='*', help='a sweep directory or metrics files')
    p.add_argument('--column', default='reward_mean')
    p.add_argument('--window', type=int, default=10)
    _add_output_flag(p)
    p.set_defaults(handler=plot)

    return main


def dispatch(argv=None):
    r"""
    Run the command line ``argv`` and return the exit code.
    """
    try:
        args = parser().parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        return EXIT_SUCCESS if e.code in (0, None) else EXIT_USAGE

    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    try:
        return args.handler(args)
    except (UsageError, ConfigError) as e:
        print("expertac {}: {}".format(args.verb, e), file=sys.stderr)
        return EXIT_USAGE
    except (ExpertACError, ValueError, OSError) as e:
        logger.debug("%s failed", args.verb, exc_info=True)
        print("expertac {}: {}".format(args.verb, e), file=sys.stderr)
        return EXIT_FAILURE


def main():
    logging.basicConfig(level=logging.INFO, format=LOG_FORMAT)
    sys.exit(dispatch())

"""pic_calibration module: cli
Classes:
    RunConfig - the echo of a command line run.
Functions:
    build_parser - the argument parser of every subcommand.
    cmd_generate - samples a chip and writes a synthetic dataset.
    cmd_calibrate - trains parameters on a dataset.
    cmd_validate - scores a calibration on a test set.
    cmd_qw - programs a walk on a calibrated chip.
    cmd_tomo - reconstructs output states with the measurement section.
    main - the console entry point.
"""
import argparse
import json
import logging
import os
import sys
import warnings

import numpy as np

from .analysis import (ScheduleConfig, TomographyConfig, TomographyReport, TrainConfig, DensityMatrix, build_effects,
                       evaluate, load_calibration, mle_reconstruct, parameter_recovery, run_schedule,
                       simulate_tomography, split_mesh, walk_report)
from .circuit import Parameters, build_qw_mesh
from .data import (TargetConfig, generate_synthetic_dataset, load_dataset, load_params, parse_index_list,
                   read_number_table, sample_target_params, save_dataset, save_params)
from .exc import (CalibrationError, ConfigError, DataFileError, DeficientDesignWarning, DimensionMismatchError,
                  InvalidArgumentError, NumericalError)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4

_VERSION = '1.0.0'


class RunConfig(object):
    """
    The subcommand and every resolved option of a run. Written as config.json
    next to the artifacts; rerunning with the same options reproduces them.
    """

    def __init__(self, command, options):
        self.command = command
        self.options = dict(options)

    @classmethod
    def from_args(cls, args):
        options = {k: v for k, v in sorted(vars(args).items()) if k not in ('func', 'command')}
        return cls(args.command, options)

    def as_dict(self):
        return {'command': self.command, 'version': _VERSION, 'options': self.options}

    def save(self, path):
        with open(path, 'w') as handle:
            json.dump(self.as_dict(), handle, sort_keys=True, indent=2)
            handle.write('\n')


def _out(args, name):
    return os.path.join(args.out_dir, name)


def _spec(args):
    """The mesh named by --steps, --exclude-ports and --input-mode."""
    mask = None
    if args.exclude_ports is not None:
        mask = np.ones(2 * args.steps, dtype=bool)
        excluded = parse_index_list(args.exclude_ports)
        if any(k >= len(mask) for k in excluded):
            raise InvalidArgumentError("excluded ports must lie below {}".format(len(mask)))
        mask[excluded] = False
    return build_qw_mesh(args.steps, mask, args.input_mode)


def _params(args, spec):
    """Parameters from --calibration, else --params, else the ideal chip."""
    if getattr(args, 'calibration', None):
        return load_calibration(args.calibration, spec).params
    if getattr(args, 'params', None):
        return load_params(args.params, spec)
    return Parameters.ideal(spec)


def cmd_generate(args):
    """Writes dataset.jsonl, an optional test.jsonl and truth.json."""
    spec = _spec(args)
    if args.truth:
        target = load_params(args.truth, spec)
    else:
        target = sample_target_params(spec, np.random.default_rng(args.seed), TargetConfig())
    current_range = (0.0, args.max_current)
    train = generate_synthetic_dataset(spec, target, args.n, args.noise, current_range, args.seed, name='train')
    save_dataset(train, _out(args, 'dataset.jsonl'))
    if args.test_n:
        test = generate_synthetic_dataset(spec, target, args.test_n, args.noise, current_range, args.seed,
                                          start_index=args.n, name='test')
        save_dataset(test, _out(args, 'test.jsonl'))
    save_params(target, _out(args, 'truth.json'), spec)
    logger.info("wrote %d training and %d test samples for %r", args.n, args.test_n, spec)


def cmd_calibrate(args):
    """Writes calibration.json, loss_history.csv and, with --truth, recovery.csv."""
    train = load_dataset(args.train)
    spec = train.spec if train.spec is not None else _spec(args)
    train.check(spec)
    schedule = ScheduleConfig(max_epochs=args.epochs, alternation_rounds=args.rounds,
                              cutoff_threshold=args.cutoff,
                              untrainable_shifters=parse_index_list(args.untrainable))
    training = TrainConfig(learning_rate=args.lr, decay=args.decay, loss=args.loss, reduction=args.reduction,
                           restart_per_phase=args.restart, threads=args.threads)
    init = load_params(args.init, spec) if args.init else None
    result = run_schedule(spec, train, schedule, training, init_params=init, seed=args.seed,
                          display=not args.quiet)
    result.save(_out(args, 'calibration.json'))
    result.save_loss_history(_out(args, 'loss_history.csv'))
    recovery = None
    if args.truth:
        recovery = parameter_recovery(spec, result.params, load_params(args.truth, spec))
        recovery.to_csv(_out(args, 'recovery.csv'), index=False)
    if args.plots:
        from .graphs import GraphLossHistory, GraphRecovery
        GraphLossHistory(result, save_to=_out(args, 'loss_history.png'))
        if recovery is not None:
            GraphRecovery(recovery, save_to=_out(args, 'recovery.png'))


def cmd_validate(args):
    """Writes metrics.csv and metrics_summary.json."""
    test = load_dataset(args.test)
    spec = test.spec if test.spec is not None else _spec(args)
    calibration = load_calibration(args.calibration, spec)
    truth = None
    if args.truth:
        truth = load_params(args.truth, spec)
    elif test.metadata.get('target_params') is not None:
        truth = Parameters.from_dict(test.metadata['target_params'])
    report = evaluate(spec, calibration.params, truth, dataset=test, bins=args.bins, threshold=args.threshold,
                      display=not args.quiet)
    report.save(_out(args, 'metrics.csv'), _out(args, 'metrics_summary.json'))
    if args.plots:
        from .graphs import GraphMetricHistogram
        for name in report.names:
            GraphMetricHistogram(report, name, save_to=_out(args, 'metrics_{}.png'.format(name)))


def cmd_qw(args):
    """Writes qw_distribution.csv with port, theory and model columns."""
    spec = _spec(args)
    params = _params(args, spec)
    phases = None
    if args.phases:
        phases = read_number_table(args.phases).ravel()
    report = walk_report(spec, params, phases, args.max_current, display=not args.quiet)
    report.save(_out(args, 'qw_distribution.csv'))
    if args.plots:
        from .graphs import GraphWalk
        GraphWalk(report, save_to=_out(args, 'qw_distribution.png'))


def _reference(path):
    try:
        with open(path) as handle:
            payload = json.load(handle)
        return DensityMatrix(np.array(payload['real']) + 1j * np.array(payload['imag']))
    except (KeyError, TypeError, ValueError) as err:
        raise DataFileError("malformed reference state {}: {}".format(path, err))


def cmd_tomo(args):
    """Writes tomography.csv and tomography_states.json."""
    spec = _spec(args)
    params = _params(args, spec)
    config = TomographyConfig(dynamics_depth=args.depth, settings=args.n_settings, dynamics=args.dynamics,
                              noise=args.noise, max_iterations=args.max_iterations,
                              current_range=[0.0, args.max_current])
    settings = read_number_table(args.settings) if args.settings else None
    if args.measured:
        if settings is None:
            raise InvalidArgumentError("--measured needs the --settings it was taken with")
        measured = read_number_table(args.measured)
        if len(measured) != len(settings):
            raise DimensionMismatchError("{} measured rows for {} settings".format(len(measured), len(settings)))
        _, measurement = split_mesh(spec, config.dynamics_depth)
        effects = build_effects(measurement, params, settings)
        reconstruction = mle_reconstruct(effects, measured, config=config)
        truths = [_reference(args.reference)] if args.reference else None
        report = TomographyReport([reconstruction], truths, settings=len(effects),
                                  dynamics_depth=config.dynamics_depth, display=not args.quiet)
    else:
        report = simulate_tomography(spec, params, config, seed=args.seed, settings=settings,
                                     display=not args.quiet)
    report.save(_out(args, 'tomography.csv'), _out(args, 'tomography_states.json'))


def build_parser():
    parser = argparse.ArgumentParser(prog='pic-calibration',
                                     description='Calibrates a photonic quantum-walk mesh and uses the calibration.')
    parser.add_argument('--seed', type=int, default=0, help='seed of every random draw')
    parser.add_argument('--threads', type=int, default=1, help='worker threads for loss evaluation')
    parser.add_argument('--out-dir', default='.', help='directory receiving the artifacts')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='-v for INFO, -vv for DEBUG')
    parser.add_argument('-q', '--quiet', action='store_true', help='do not print reports')
    subparsers = parser.add_subparsers(dest='command')
    subparsers.required = True

    mesh = argparse.ArgumentParser(add_help=False)
    mesh.add_argument('--steps', type=int, default=12, help='walk steps T')
    mesh.add_argument('--exclude-ports', default=None, help='comma separated masked output modes')
    mesh.add_argument('--input-mode', type=int, default=None, help='injection mode, T by default')

    p = subparsers.add_parser('generate', parents=[mesh], help='write a synthetic dataset')
    p.add_argument('--n', type=int, default=500, help='training samples')
    p.add_argument('--test-n', type=int, default=0, help='test samples continuing the index range')
    p.add_argument('--noise', type=float, default=0.01, help='Gaussian noise sigma')
    p.add_argument('--max-current', type=float, default=7.0, help='largest drawn current in mA')
    p.add_argument('--truth', default=None, help='parameter file to simulate instead of a random chip')
    p.set_defaults(func=cmd_generate)

    p = subparsers.add_parser('calibrate', parents=[mesh], help='train parameters on a dataset')
    p.add_argument('--train', required=True, help='dataset file')
    p.add_argument('--truth', default=None, help='parameter file for the recovery table')
    p.add_argument('--init', default=None, help='starting parameter file, the ideal chip by default')
    p.add_argument('--epochs', type=int, default=None, help='epoch limit per phase')
    p.add_argument('--rounds', type=int, default=None, help='a/b alternation rounds')
    p.add_argument('--cutoff', type=float, default=None, help='loss decrease cut-off')
    p.add_argument('--lr', type=float, default=None, help='initial learning rate')
    p.add_argument('--decay', type=float, default=None, help='learning rate decay per epoch')
    p.add_argument('--loss', choices=('l1', 'nll'), default=None)
    p.add_argument('--reduction', choices=('sum', 'mean'), default=None)
    p.add_argument('--restart', action='store_true', help='fresh Adam moments and learning rate for every phase')
    p.add_argument('--untrainable', default='', help='comma separated phase shifters kept at their start')
    p.add_argument('--plots', action='store_true', help='save figures next to the reports')
    p.set_defaults(func=cmd_calibrate)

    p = subparsers.add_parser('validate', parents=[mesh], help='score a calibration on a test set')
    p.add_argument('--calibration', required=True)
    p.add_argument('--test', required=True, help='dataset file')
    p.add_argument('--truth', default=None, help='parameter file enabling state metrics')
    p.add_argument('--threshold', type=float, default=0.05)
    p.add_argument('--bins', type=int, default=30)
    p.add_argument('--plots', action='store_true')
    p.set_defaults(func=cmd_validate)

    p = subparsers.add_parser('qw', parents=[mesh], help='program a walk and compare it with theory')
    p.add_argument('--calibration', default=None)
    p.add_argument('--params', default=None, help='parameter file used when no calibration is given')
    p.add_argument('--phases', default=None, help='file of target phases, the Hadamard walk by default')
    p.add_argument('--max-current', type=float, default=7.0)
    p.add_argument('--plots', action='store_true')
    p.set_defaults(func=cmd_qw)

    p = subparsers.add_parser('tomo', parents=[mesh], help='reconstruct output states')
    p.add_argument('--calibration', default=None)
    p.add_argument('--params', default=None, help='parameter file used when no calibration is given')
    p.add_argument('--depth', type=int, default=None, help='layers of the dynamics section')
    p.add_argument('--n-settings', type=int, default=None, help='random measurement settings')
    p.add_argument('--settings', default=None, help='file of measurement currents, one setting per row')
    p.add_argument('--measured', default=None, help='file of measured distributions, one row per setting')
    p.add_argument('--reference', default=None, help='JSON real/imag reference state for --measured')
    p.add_argument('--dynamics', type=int, default=None, help='simulated random dynamics')
    p.add_argument('--noise', type=float, default=None)
    p.add_argument('--max-iterations', type=int, default=None)
    p.add_argument('--max-current', type=float, default=7.0)
    p.add_argument('--strict', action='store_true', help='fail on a deficient measurement design')
    p.set_defaults(func=cmd_tomo)
    return parser


def main(argv=None):
    """Runs one subcommand and returns its exit code."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=max(logging.WARNING - 10 * args.verbose, logging.DEBUG),
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    try:
        if not os.path.isdir(args.out_dir):
            os.makedirs(args.out_dir)
        RunConfig.from_args(args).save(_out(args, 'config.json'))
        with warnings.catch_warnings():
            if getattr(args, 'strict', False):
                warnings.simplefilter('error', DeficientDesignWarning)
            args.func(args)
    except (ConfigError, DeficientDesignWarning) as err:
        logger.error("%s", err)
        return EXIT_CONFIG
    except NumericalError as err:
        logger.error("%s", err)
        return EXIT_NUMERICAL
    except (DataFileError, IOError, OSError) as err:
        logger.error("%s", err)
        return EXIT_IO
    except CalibrationError as err:
        logger.error("%s", err)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())

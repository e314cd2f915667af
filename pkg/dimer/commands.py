import logging

from .config import parse_config
from .model import DriveParams, validate_params
from .oracle import FockConfig, oracle_protocol
from .output import row, solution_row, write_results
from .protocols import (dark_state_demo, hierarchy_window,
                        optimal_curve, optimal_drive_frequency, sweep)
from .steadystate import solve_ness

log = logging.getLogger("dimer")


def add_common_arguments(subparser):
    subparser.add_argument("-c", "--config", metavar="PATH",
                           help="read settings from a key = value file")
    subparser.add_argument("-s", "--set", action="append", default=[],
                           metavar="KEY=VALUE", dest="overrides",
                           help="override one config setting")
    subparser.add_argument("--target", choices=("singlet", "triplet0"))
    subparser.add_argument("--lamb-shift", action="store_true",
                           help="apply Lamb shifts to the spectrum")


def add_output_arguments(subparser):
    subparser.add_argument("-o", "--out", metavar="PATH",
                           help="write results to PATH instead of stdout")
    subparser.add_argument("--format", choices=("csv", "json"))


def load_config(args, mode):
    """RunConfig from --config, with --set on top of it and the
    dedicated flags on top of both."""
    text = ""
    if args.config is not None:
        with open(args.config, encoding="utf-8") as fd:
            text = fd.read()

    flags = []
    for flag, key in (("target", "target"), ("out", "out"),
                      ("format", "format"), ("nmax", "n_max"),
                      ("threads", "threads")):
        value = getattr(args, flag, None)
        if value is not None:
            flags.append("%s = %s" % (key, value))
    if args.lamb_shift:
        flags.append("lamb_shift = true")

    cfg = parse_config(text, mode=mode, overrides=args.overrides,
                       flags=flags)
    validate_params(cfg.params)
    return cfg


class NessCommand:
    @classmethod
    def add_subparser(cls, parser):
        subparser = parser.add_parser(
            "ness", help="Steady state at one drive point")
        add_common_arguments(subparser)
        add_output_arguments(subparser)
        subparser.set_defaults(run=cls.run)

    @staticmethod
    def run(args):
        cfg = load_config(args, "ness")
        d = DriveParams(cfg.epsilon_d, cfg.omega_d)
        sol = solve_ness(cfg.params, d, target_state=cfg.target.state,
                         lamb_shift=cfg.lamb_shift,
                         self_consistent_lamb=cfg.self_consistent_lamb)
        write_results([solution_row(sol)], cfg.format, cfg.out)


class ProtocolCommand:
    @classmethod
    def add_subparser(cls, parser):
        subparser = parser.add_parser(
            "protocol", help="Steady state at the optimal drive frequency")
        add_common_arguments(subparser)
        add_output_arguments(subparser)
        subparser.set_defaults(run=cls.run)

    @staticmethod
    def run(args):
        cfg = load_config(args, "protocol")
        omega_d = optimal_drive_frequency(
            cfg.target, cfg.epsilon_d, cfg.params,
            lamb_shift=cfg.lamb_shift,
            self_consistent_lamb=cfg.self_consistent_lamb)
        log.info("optimal omega_d for %s: %r", cfg.target.value, omega_d)

        d = DriveParams(cfg.epsilon_d, omega_d)
        sol = solve_ness(cfg.params, d, target_state=cfg.target.state,
                         lamb_shift=cfg.lamb_shift,
                         self_consistent_lamb=cfg.self_consistent_lamb)
        write_results([solution_row(sol)], cfg.format, cfg.out)


class SweepCommand:
    @classmethod
    def add_subparser(cls, parser):
        subparser = parser.add_parser(
            "sweep", help="Steady states on an (omega_d, epsilon_d) grid")
        add_common_arguments(subparser)
        add_output_arguments(subparser)
        subparser.add_argument("--threads", type=int,
                               help="worker processes for the grid")
        subparser.set_defaults(run=cls.run)

    @staticmethod
    def run(args):
        cfg = load_config(args, "sweep")
        grid = sweep(cfg.omega_d_axis(), cfg.epsilon_d_axis(), cfg.params,
                     cfg.target, lamb_shift=cfg.lamb_shift,
                     workers=cfg.threads)
        write_results([row(cell) for cell in grid.rows()], cfg.format,
                      cfg.out)


class CurveCommand:
    @classmethod
    def add_subparser(cls, parser):
        subparser = parser.add_parser(
            "curve", help="Optimal drive frequency along the epsilon_d axis")
        add_common_arguments(subparser)
        add_output_arguments(subparser)
        subparser.set_defaults(run=cls.run)

    @staticmethod
    def run(args):
        cfg = load_config(args, "curve")
        cells = optimal_curve(cfg.target, cfg.epsilon_d_axis(), cfg.params,
                              lamb_shift=cfg.lamb_shift)
        write_results([row(cell) for cell in cells], cfg.format, cfg.out)


class WindowCommand:
    @classmethod
    def add_subparser(cls, parser):
        subparser = parser.add_parser(
            "window", help="Drive strengths that satisfy the rate hierarchy")
        add_common_arguments(subparser)
        subparser.set_defaults(run=cls.run)

    @staticmethod
    def run(args):
        cfg = load_config(args, "window")
        window = hierarchy_window(cfg.params, cfg.target, margin=cfg.margin)
        if window.empty:
            print("empty")
        else:
            print("epsilon_min = %r" % window.epsilon_min)
            print("epsilon_max = %r" % window.epsilon_max)


class DarkCommand:
    @classmethod
    def add_subparser(cls, parser):
        subparser = parser.add_parser(
            "dark", help="Steady state under the dark-state drive")
        add_common_arguments(subparser)
        add_output_arguments(subparser)
        subparser.set_defaults(run=cls.run)

    @staticmethod
    def run(args):
        cfg = load_config(args, "dark")
        sol = dark_state_demo(cfg.params, cfg.epsilon_d,
                              lamb_shift=cfg.lamb_shift)
        write_results([solution_row(sol)], cfg.format, cfg.out)


class OracleCommand:
    @classmethod
    def add_subparser(cls, parser):
        subparser = parser.add_parser(
            "oracle", help="Check the effective model against the full one")
        add_common_arguments(subparser)
        subparser.add_argument("--nmax", type=int,
                               help="photon cutoff per mode")
        subparser.set_defaults(run=cls.run)

    @staticmethod
    def run(args):
        cfg = load_config(args, "oracle")
        omega_d = cfg.omega_d
        if omega_d is None:
            omega_d = optimal_drive_frequency(cfg.target, cfg.epsilon_d,
                                              cfg.params)

        fc = FockConfig(n_max=cfg.n_max, frame=cfg.frame, solver=cfg.solver)
        eff, orep, result = oracle_protocol(
            cfg.params, DriveParams(cfg.epsilon_d, omega_d), fc,
            target_state=cfg.target.state, tolerance=cfg.tolerance,
            refine=cfg.refine_oracle)

        print("effective omega_d = %r" % omega_d)
        print("oracle omega_d = %r" % orep.drive.omega_d)
        for line in result.lines():
            print(line)
        print("photons = %.6g %.6g" % orep.photons)
        if orep.convergence_drive is not None:
            print("oracle omega_d at n_max %d = %r"
                  % (fc.n_max + 1, orep.convergence_drive.omega_d))
        print("truncation delta = %.3g" % orep.convergence_delta)

        if not result.ok:
            return 1
        return 0

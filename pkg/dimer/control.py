import argparse
import logging
import sys

from . import commands
from . import instatrace
from .model import DimerError

log = logging.getLogger("dimer")

parser = argparse.ArgumentParser(
    description="Driven-dissipative qubit dimer simulations")
parser.add_argument("--debug", action="store_true", help=argparse.SUPPRESS)
parser.add_argument("--instatrace", metavar="FILE",
                    help="log performance statistics to FILE")

subparsers = parser.add_subparsers(title="Commands")
commands.NessCommand.add_subparser(subparsers)
commands.ProtocolCommand.add_subparser(subparsers)
commands.SweepCommand.add_subparser(subparsers)
commands.CurveCommand.add_subparser(subparsers)
commands.WindowCommand.add_subparser(subparsers)
commands.DarkCommand.add_subparser(subparsers)
commands.OracleCommand.add_subparser(subparsers)


def main(argv=None):
    """Exit status: 0 on success, 1 when the physics is invalid at the
    requested point, 2 on usage errors."""
    args = parser.parse_args(argv)
    if not hasattr(args, "run"):
        parser.print_usage(sys.stderr)
        sys.exit(2)

    formatter = logging.Formatter("%(levelname)s: %(message)s")
    console = logging.StreamHandler(sys.stderr)
    console.setFormatter(formatter)
    logging.root.addHandler(console)

    if args.debug:
        logging.root.setLevel(logging.DEBUG)
    else:
        logging.root.setLevel(logging.INFO)

    if args.instatrace:
        instatrace.init_trace(args.instatrace)

    try:
        status = args.run(args)
    except DimerError as e:
        log.error("%s", e)
        sys.exit(e.exit_code)
    except OSError as e:
        log.error("%s", e)
        sys.exit(2)
    except KeyboardInterrupt:
        print()
        sys.exit(1)
    finally:
        logging.root.removeHandler(console)
        instatrace.close_trace()

    sys.exit(status or 0)

if __name__ == "__main__":
    main()

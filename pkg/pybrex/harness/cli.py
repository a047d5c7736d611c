import argparse
import logging
import sys

from pybrex.exceptions import (
    CertificateUnavailable, ConfigError, DomainError, GuardViolation, NumericalFailure,
    SupportNotIdentifiable, TheoryViolation,
)
from pybrex.harness.configmanager import ConfigManager
from pybrex.harness.experiments import cmd_certify, cmd_gen, cmd_solve, cmd_verify
from pybrex.harness.reports import SKIPPED
from pybrex.harness.sweep import cmd_sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_SKIPPED = 4

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

logger = logging.getLogger("pybrex")


def build_parser():
    parser = argparse.ArgumentParser(prog="pybrex", description="Exact l0 relaxations: certify, solve and verify.")
    parser.add_argument("--config", required=True, help="Path to the experiment config file")
    parser.add_argument("--seed", type=int, help="Root seed (overrides [instance] seed)")
    parser.add_argument("--out", default=".", help="Output directory")
    parser.add_argument("--threads", type=int, default=1, help="Worker threads for verify and sweep")
    parser.add_argument("--log-level", help="Logging level (overrides [logging] level)")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("gen", help="Generate an instance and write its CSV files")
    sub.add_parser("certify", help="Compute the BRSC constant, the lambda0 interval and the condition report")
    sub.add_parser("solve", help="Run forward-backward on J_Psi at [relaxation] lambda0")
    sub.add_parser("verify", help="Check the certified interval against brute force")
    sub.add_parser("sweep", help="Seeded sweep over noise, amplitude and lambda0 grids")
    return parser


def configure_logging(cm, level=None):
    level = (level or cm.get('logging', 'level', 'INFO')).upper()
    handlers = [logging.StreamHandler()]
    log_file = cm.resolve_path('logging', 'file')
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=LOG_FORMAT, handlers=handlers, force=True)


def run(args):
    cm = ConfigManager(args.config)
    configure_logging(cm, args.log_level)
    if not cm.config.sections():
        raise ConfigError(f"configuration '{args.config}' is missing or empty")
    logger.info(f"pybrex {args.command} with config {args.config}")
    if args.command == "gen":
        cmd_gen(cm, args.seed, args.out)
    elif args.command == "certify":
        cmd_certify(cm, args.seed, args.out)
    elif args.command == "solve":
        cmd_solve(cm, args.seed, args.out)
    elif args.command == "verify":
        report = cmd_verify(cm, args.seed, args.out, args.threads)
        if report.status == SKIPPED:
            logger.warning("verify skipped: the certified interval is empty")
            return EXIT_SKIPPED
    elif args.command == "sweep":
        cmd_sweep(cm, args.seed, args.out, args.threads)
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (ConfigError, DomainError) as e:
        logger.error(f"invalid configuration: {e}", exc_info=True)
        return EXIT_CONFIG
    except (NumericalFailure, SupportNotIdentifiable, GuardViolation, TheoryViolation) as e:
        logger.error(f"{args.command} aborted: {e}", exc_info=True)
        return EXIT_NUMERICAL
    except CertificateUnavailable as e:
        logger.warning(f"certificate not applicable: {e}")
        return EXIT_SKIPPED


if __name__ == "__main__":
    sys.exit(main())

"""
erdset command line.

    python -m erdset <command> key=value ...
    python -m erdset rerun <manifest.json> [output_dir=...]

Commands: seq, construct, detect, prop23, theorem21. Every run writes
manifest.json next to its artefacts.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from pydantic import ValidationError

from erdset import __version__
from erdset.commands import COMMANDS
from erdset.config import configure_settings, get_settings
from erdset.errors import ErdsetError, FormatError
from erdset.models.run_config import COMMAND_CONFIGS, RerunConfig, RunConfig
from erdset.models.schemas import RunManifest
from erdset.services.formats import write_model

logger = logging.getLogger("erdset")

USAGE_EXIT = 2

HELP = {
    "seq": "condition table -log(delta)/#A for a family",
    "construct": "sample one stage grid (grid, PBM for d=2, stage report)",
    "detect": "search a grid file for affine copies of a point set",
    "prop23": "find a stage grid with large measure and small copy set",
    "theorem21": "assemble a finite-stage avoiding set and re-verify it",
    "rerun": "repeat a run from its manifest",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="erdset", description="Random affine-copy-avoiding sets in [0,1]^d")
    parser.add_argument("--log-level", default=None, help="override ERDSET_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name, help=HELP[name])
        cmd.add_argument("params", nargs="*", metavar="key=value")
    rerun = sub.add_parser("rerun", help=HELP["rerun"])
    rerun.add_argument("manifest", type=Path)
    rerun.add_argument("params", nargs="*", metavar="key=value")
    return parser


def parse_pairs(pairs: Sequence[str]) -> Dict[str, str]:
    values = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ValueError(f"expected key=value, got {pair!r}")
        if key in values:
            raise ValueError(f"key {key!r} given twice")
        values[key] = value
    return values


def resolve(command: str, raw: Dict) -> RunConfig:
    """Validate the raw key=value mapping of one command."""
    if command not in COMMAND_CONFIGS:
        raise FormatError(f"unknown command {command!r} in manifest")
    return COMMAND_CONFIGS[command].model_validate(raw)


def execute(command: str, config: RunConfig) -> List[str]:
    """Run one command and write its manifest."""
    config.output_dir.mkdir(parents=True, exist_ok=True)
    artefacts = COMMANDS[command](config)

    manifest = RunManifest(
        command=command,
        config=config.model_dump(mode="json"),
        master_seed=config.master_seed,
        version=__version__,
        settings=get_settings().model_dump(mode="json"),
        artefacts=artefacts,
    )
    write_model(config.output_dir / "manifest.json", manifest)
    logger.info(f"{command}: wrote {', '.join(artefacts + ['manifest.json'])} to {config.output_dir}")
    return artefacts


def load_manifest(path: Path) -> RunManifest:
    try:
        return RunManifest.model_validate_json(path.read_text(encoding="utf-8"))
    except (OSError, ValidationError) as e:
        raise FormatError(f"cannot read manifest {path}: {e}") from e


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    settings = get_settings()
    logging.basicConfig(
        level=(args.log_level or settings.log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        command = args.command
        try:
            pairs = parse_pairs(args.params)
            if command == "rerun":
                manifest = load_manifest(args.manifest)
                override = RerunConfig.model_validate(pairs)
                command, raw = manifest.command, dict(manifest.config)
                if override.output_dir is not None:
                    raw["output_dir"] = str(override.output_dir)
                configure_settings(manifest.settings)
            else:
                raw = pairs
            config = resolve(command, raw)
        except ValueError as e:
            logger.error(f"usage: {e}")
            parser.print_usage(sys.stderr)
            return USAGE_EXIT
        execute(command, config)
    except ErdsetError as e:
        logger.error(f"{type(e).__name__}: {e.message}")
        return e.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command implementations; each run(config) writes artefacts and returns their names."""

from . import construct, detect, prop23, seq, theorem21

COMMANDS = {
    "seq": seq.run,
    "construct": construct.run,
    "detect": detect.run,
    "prop23": prop23.run,
    "theorem21": theorem21.run,
}

__all__ = ["COMMANDS"]

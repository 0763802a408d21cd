"""
Read instance files by format.
"""
import logging
from pathlib import Path
from typing import Optional, Union

from src.exceptions import InstanceError
from src.instance.dsl import parse_instance_dsl
from src.instance.model import Instance
from src.instance.orlib import parse_orlib

logger = logging.getLogger(__name__)

FORMATS = ("dsl", "orlib")
# suffix -> format
SUFFIXES = {".jsl": "dsl", ".orlib": "orlib"}


def detect_format(path: Path) -> str:
    fmt = SUFFIXES.get(path.suffix.lower())
    if fmt is None:
        raise InstanceError(f"cannot tell the format of {path.name}, pass --format dsl|orlib")
    return fmt


def load_instance(path: Union[str, Path], fmt: Optional[str] = None) -> Instance:
    """
    Load and validate an instance file.

    Args:
        path: Instance file
        fmt: "dsl" or "orlib"; guessed from the suffix when omitted

    Returns:
        Instance named after the file stem unless the document names itself
    """
    path = Path(path)
    if fmt is not None and fmt not in FORMATS:
        raise InstanceError(f"unknown instance format '{fmt}' (expected one of {', '.join(FORMATS)})")
    fmt = fmt or detect_format(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InstanceError(f"cannot read {path}: {e}")

    if fmt == "orlib":
        inst = parse_orlib(text, name=path.stem)
    else:
        inst = parse_instance_dsl(text)
        if not any(line.split()[:1] == ["instance"] for line in text.splitlines()):
            inst = inst.evolve(name=path.stem)
    logger.debug(f"✓ Loaded {inst.name} ({fmt}) from {path}")
    return inst


def load_instance_dir(directory: Union[str, Path]):
    """Every instance file in a directory with a known suffix, sorted by file name."""
    directory = Path(directory)
    if not directory.is_dir():
        raise InstanceError(f"{directory} is not a directory")
    files = sorted(p for p in directory.iterdir() if p.suffix.lower() in SUFFIXES)
    return [load_instance(p) for p in files]

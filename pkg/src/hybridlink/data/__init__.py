"""Bundled fixtures: the three-fund return table and its frontier script."""

from importlib import resources
from pathlib import Path


def path(name: str) -> Path:
    return Path(str(resources.files(__name__).joinpath(name)))


def figure6_workbook() -> Path:
    return path("figure6.csv")


def figure6_script() -> Path:
    return path("figure6_frontier.txt")

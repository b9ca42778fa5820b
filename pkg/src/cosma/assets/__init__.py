"""Bundled benchmark models and their requirement suite."""

from importlib import resources

NAMES = ("tlc.csm", "tlc_car.csm", "tlc_queries.tq")


def text(name: str) -> str:
    if name not in NAMES:
        raise KeyError(f"unknown asset {name!r}; available: {NAMES}")
    return resources.files(__name__).joinpath(name).read_text(encoding="utf-8")

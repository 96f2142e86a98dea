"""Bundled rule sets, loadable by name."""

from importlib import resources

from ..frontend.parser import parse_rules

NAMES = ("lt", "leq", "bounds")


def rule_text(name: str) -> str:
    if name not in NAMES:
        raise KeyError(f"unknown solver {name!r}; bundled: {', '.join(NAMES)}")
    return resources.files(__name__).joinpath(f"{name}.chr").read_text(encoding="utf-8")


def load_builtin(name: str):
    return parse_rules(rule_text(name))

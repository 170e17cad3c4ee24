import argparse
from typing import Any, Callable, Dict, List, Sequence, Tuple

from src.models.run_config import RunConfig

Argument = Tuple[Sequence[str], Dict[str, Any]]
Handler = Callable[[RunConfig, Dict[str, Any]], str]


class Router:
    """Collects subcommands and their flags; setup_routes mounts them on a parser."""

    def __init__(self):
        self.commands: List[Tuple[str, str, Sequence[Argument], Handler]] = []
        self.config: Dict[str, Any] = {}
        self.services: Dict[str, Any] = {}

    def command(self, name: str, help: str, arguments: Sequence[Argument] = ()):
        def decorator(fn: Handler) -> Handler:
            self.commands.append((name, help, arguments, fn))
            return fn

        return decorator

    def include(self, subparsers, common: Sequence[Argument]) -> None:
        for name, help, arguments, fn in self.commands:
            sub = subparsers.add_parser(name, help=help)
            for flags, kwargs in (*common, *arguments):
                sub.add_argument(*flags, **kwargs)
            sub.set_defaults(handler=fn, router=self)


def option(*flags: str, **kwargs) -> Argument:
    """An optional flag that stays None unless given, so file values survive."""
    kwargs.setdefault("default", None)
    return flags, kwargs


INPUT_ARGUMENTS: Sequence[Argument] = (
    option("--input", help="field dump (x,re,im CSV) replacing the preset input"),
    option("--preset", choices=["gaussian", "power_decay", "bandlimited"]),
    option("--width", type=float, help="gaussian width w in exp(-x^2/(2 w^2))"),
    option("--modulation", type=float, help="gaussian modulation frequency N"),
    option("--decay", type=float, help="alpha of (1+|x|)^(-alpha)"),
    option("--radius", type=float, help="spectral radius of the bandlimited preset"),
    option("--propagator", choices=["fourth", "schrodinger"]),
)


def overrides(args: argparse.Namespace) -> Dict[str, Any]:
    values = {
        k: v
        for k, v in vars(args).items()
        if k not in ("command", "config", "handler", "router", "range") and v is not None
    }
    if getattr(args, "range", None) is not None:
        values["range_lo"], values["range_hi"] = args.range
    return values

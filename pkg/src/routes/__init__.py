from src.routes.router import option

COMMON_ARGUMENTS = (
    option("--config", help="INI file with [common] and per-subcommand sections"),
    option("--output-dir", dest="output_dir"),
    option("--seed", type=int),
    option("--mu", type=float),
    option("--center", type=float),
    option("--length", type=float),
    option("--count", type=int),
    option("--t-max", dest="t_max", type=float),
    option("--steps", type=int),
    option("--tail-policy", dest="tail_policy", choices=["none", "dispersive", "extrapolate"]),
)


def setup_routes(parser, config, services):
    from . import bubbles, extremal, norms

    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in (norms, bubbles, extremal):
        module.router.config = config
        module.router.services = services
        module.router.include(subparsers, COMMON_ARGUMENTS)

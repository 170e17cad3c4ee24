from src.routes.router import INPUT_ARGUMENTS, Router, option

router = Router()


@router.command(
    "extract",
    help="two-stage bubble decomposition of one input",
    arguments=(
        *INPUT_ARGUMENTS,
        option("--delta", type=float),
        option("--p", type=float),
        option("--amplitude-constant", dest="amplitude_constant", type=float),
        option("--max-bubbles", dest="max_bubbles", type=int),
        option("--ortho-threshold", dest="ortho_threshold", type=float),
    ),
)
def extract(run, services):
    return services["experiment_service"].run(run)


@router.command(
    "decouple",
    help="norm decoupling of a planted two-bubble family",
    arguments=(
        option("--axis", choices=["space", "frequency", "scale"]),
        option("--separations", help="comma separated separations"),
    ),
)
def decouple(run, services):
    return services["experiment_service"].run(run)

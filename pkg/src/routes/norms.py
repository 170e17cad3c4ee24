from src.routes.router import INPUT_ARGUMENTS, Router, option

router = Router()


@router.command(
    "ratio",
    help="Strichartz quotient of one input",
    arguments=INPUT_ARGUMENTS,
)
def ratio(run, services):
    return services["experiment_service"].run(run)


@router.command(
    "propagate",
    help="free evolution of one input at a list of times",
    arguments=(
        *INPUT_ARGUMENTS,
        option("--times", help="comma separated evolution times"),
    ),
)
def propagate(run, services):
    return services["experiment_service"].run(run)


@router.command(
    "refined",
    help="dyadic refined functional of one input's spectrum",
    arguments=(*INPUT_ARGUMENTS, option("--p", type=float)),
)
def refined(run, services):
    return services["experiment_service"].run(run)


@router.command(
    "whitney",
    help="Monte Carlo check of the Whitney pairing",
    arguments=(
        option("--samples", type=int),
        option("--range", type=float, nargs=2, metavar=("LO", "HI")),
    ),
)
def whitney(run, services):
    return services["experiment_service"].run(run)

from src.routes.router import INPUT_ARGUMENTS, Router, option

router = Router()


@router.command(
    "converge",
    help="high-frequency quotient against the Schrodinger value",
    arguments=(*INPUT_ARGUMENTS, option("--Ns", help="comma separated increasing N")),
)
def converge(run, services):
    return services["experiment_service"].run(run)


@router.command("dichotomy", help="quotient table against the Schrodinger constant")
def dichotomy(run, services):
    return services["experiment_service"].run(run)


@router.command(
    "maximize",
    help="power iteration for a maximizing input",
    arguments=(
        *INPUT_ARGUMENTS,
        option("--iters", type=int),
        option("--step-tol", dest="step_tol", type=float),
    ),
)
def maximize(run, services):
    return services["experiment_service"].run(run)

"""Exception types raised across the package."""


class ParameterError(ValueError):
    """An argument is outside its admissible range or has the wrong shape."""


class DivergenceError(ArithmeticError):
    """A solver produced a non-finite iterate.

    Parameters
    ----------
    solver : str
        Name of the solver that diverged.
    iteration : int
        Iteration index at which the first non-finite value appeared.
    """

    def __init__(self, solver, iteration):
        self.solver = solver
        self.iteration = iteration
        super().__init__(f"{solver} diverged at iteration {iteration}")


class ConfigError(ValueError):
    """A configuration file is malformed."""


class ConvergenceWarning(UserWarning):
    """An inner solver stopped at its iteration cap before reaching tolerance."""

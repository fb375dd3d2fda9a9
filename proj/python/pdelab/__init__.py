"""Python bindings for the pdelab C++ core."""

from ._core import (
    __version__,
    InvalidGridError,
    ParameterError,
    ShapeError,
    SingularMatrixError,
    SingularSystemError,
    break_even,
    breakeven,
    check_gradients,
    fit,
    fit_least_squares,
    generate_synthetic,
    pseudoinverse,
    report,
    solve,
    solve_analytic,
    solve_fdm,
    solve_tridiagonal,
    surrogate,
    total_time,
    train_ann,
    train_line,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]

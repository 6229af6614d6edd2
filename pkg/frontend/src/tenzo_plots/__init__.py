from tenzo_plots.render import (
    FIGURE_IDS,
    FigureSpec,
    MissingColumnsError,
    render,
    verify_rank_bounds,
)

__all__ = [
    "FIGURE_IDS",
    "FigureSpec",
    "MissingColumnsError",
    "render",
    "verify_rank_bounds",
]

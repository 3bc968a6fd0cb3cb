"""Figure rendering for linear-covariance fidelity study output."""

__version__ = "0.1.0"

from .render import FIGURE_GROUPS, load_metrics, render_all, render_group, render_scatter

"""Figure generation for the benchmark harness's CSV outputs.

The numeric layer (``plotgen.tables``) turns CSV rows into the exact
tables a figure draws; the rendering layer (``plotgen.figures``) only
draws those tables.  Nothing here recomputes losses or predictions.
"""

from plotgen.figures import FigureSpec, plot_loss_vs_p, plot_prediction_curves
from plotgen.tables import SchemaError

__all__ = ["FigureSpec", "SchemaError", "plot_loss_vs_p",
           "plot_prediction_curves"]

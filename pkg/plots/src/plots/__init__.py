"""Figure rendering for orcidrec CSV outputs.

Five figure kinds, each bound to one of the pipeline's CSV tables by its
header set.  Rendering is read-only over the input and writes every
figure in both a vector and a raster encoding.
"""

from .figures import (
    FigureSpec,
    FigureSpecError,
    HeaderMismatchError,
    KINDS,
    RenderResult,
    render,
)

__all__ = [
    "FigureSpec",
    "FigureSpecError",
    "HeaderMismatchError",
    "KINDS",
    "RenderResult",
    "render",
]

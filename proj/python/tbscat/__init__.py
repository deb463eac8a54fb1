"""Three-body scattering: explicit approximate field and FEM correction.

The compiled core lives in ``tbscat._core``; ``read_csv`` loads the
artifacts written by the pipeline (comment lines start with ``#``).
"""

import numpy as np

from ._core import (
    ConfigInvalid,
    FieldModel,
    NumericalFailure,
    Pipeline,
    RunConfig,
    fresnel_phi,
    pair_coefficients,
    parse_number,
    set_thread_count,
)

__all__ = [
    "ConfigInvalid",
    "FieldModel",
    "NumericalFailure",
    "Pipeline",
    "RunConfig",
    "fresnel_phi",
    "pair_coefficients",
    "parse_number",
    "read_csv",
    "set_thread_count",
]


def read_csv(path):
    """Returns (comments, structured array) for a pipeline CSV artifact."""
    comments = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            comments.append(line[1:].strip())
    data = np.genfromtxt(path, delimiter=",", names=True, skip_header=len(comments))
    return comments, data

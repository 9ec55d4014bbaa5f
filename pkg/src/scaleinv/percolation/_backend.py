"""Kernel selection: the compiled module when it is importable, the pure-Python one otherwise.

Set SCALEINV_PURE_PYTHON=1 to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
kernels = _kernels_py

if os.environ.get("SCALEINV_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        kernels = _compiled
        BACKEND = "cython"

label_clusters = kernels.label_clusters
cluster_diameter = kernels.cluster_diameter

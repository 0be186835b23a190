"""Backend selection for the numerical kernels.

The compiled extension is used when it was built and imports cleanly.
Setting ``SSPDC_PURE_PYTHON=1`` forces the numpy fallback.
"""

import os

from . import _pykernels as python_backend

compiled_backend = None
if os.environ.get("SSPDC_PURE_PYTHON") != "1":
    try:
        from . import _ckernels as compiled_backend
    except ImportError:
        compiled_backend = None

_active = compiled_backend if compiled_backend is not None else python_backend

BACKEND = "compiled" if _active is compiled_backend else "python"

sellmeier_index = _active.sellmeier_index
condition_values = _active.condition_values
bisect_level = _active.bisect_level
pump_averaged_intensity = _active.pump_averaged_intensity

__all__ = [
    "BACKEND",
    "bisect_level",
    "compiled_backend",
    "condition_values",
    "pump_averaged_intensity",
    "python_backend",
    "sellmeier_index",
]

"""Select the compiled core when it is importable, else the numpy fallback.

Set ``NLSPREAD_BACKEND=python`` to force the fallback.
"""

import os

from . import _fallback

fallback = _fallback

if os.environ.get("NLSPREAD_BACKEND", "").lower() == "python":
    core = _fallback
else:
    try:
        from . import _core as core
    except ImportError:
        core = _fallback

NAME = core.NAME

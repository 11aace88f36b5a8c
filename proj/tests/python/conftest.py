import os
import sys

# ctest points this at the build tree; an installed wheel needs nothing.
_build = os.environ.get("ESCAPE_SIM_MODULE_DIR")
if _build:
    sys.path.insert(0, _build)

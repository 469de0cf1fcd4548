import os
import sys

# Under ctest the in-tree module must win over an editable install, whose
# import hook would otherwise take precedence over PYTHONPATH.
if os.environ.get("DLAB_EXPECT_MODULE_DIR"):
    sys.meta_path[:] = [f for f in sys.meta_path if not type(f).__module__.startswith("_editable_skbc_dlab")]

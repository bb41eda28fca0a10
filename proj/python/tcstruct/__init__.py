"""Tropical-cyclone structural forecasting toolkit.

Thin wrapper over the compiled ``_tcstruct`` extension: HURDAT2/IR ingest,
ORB structural summaries, PCA + VAR structural forecasting along both
pathways, GAM/lasso intensity models, trajectory analogs, and the batch
pipeline driver.
"""

try:
    from ._tcstruct import *  # noqa: F401,F403
    from ._tcstruct import __version__  # noqa: F401
except ImportError:  # in-tree builds put the extension on sys.path directly
    from _tcstruct import *  # noqa: F401,F403
    from _tcstruct import __version__  # noqa: F401

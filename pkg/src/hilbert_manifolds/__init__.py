"""Stiefel and Grassmann manifolds of Hilbert-space maps at finite truncation,
discrete isometric group actions on them, and constant-curvature space forms.

Submodules: :mod:`ambient`, :mod:`stiefel`, :mod:`grassmann`, :mod:`kaehler`,
:mod:`actions`, :mod:`spaceforms`, and the :mod:`verify` harness.
"""

from . import actions, ambient, grassmann, kaehler, spaceforms, stiefel

__version__ = "0.1.0"

__all__ = ["actions", "ambient", "grassmann", "kaehler", "spaceforms", "stiefel", "__version__"]

"""Minimum-cost transport of correlated sources over multi-sink networks.

Thin package wrapper around the compiled `_dirkit` extension module.
"""

try:
    from ._dirkit import *  # noqa: F401,F403  (installed layout)
    from ._dirkit import __doc__ as _ext_doc
except ImportError:
    from _dirkit import *  # noqa: F401,F403  (in-tree build on PYTHONPATH)
    from _dirkit import __doc__ as _ext_doc

if _ext_doc:
    __doc__ = _ext_doc

"""Attribute-based storage protocol: CP-ABE engines, policy language, and
the deterministic simulation harness."""

try:
    from ._abestore import *  # noqa: F401,F403  (installed wheel layout)
    from . import _abestore as _impl
except ImportError:
    from _abestore import *  # noqa: F401,F403  (in-tree build on PYTHONPATH)
    import _abestore as _impl

__all__ = [name for name in dir(_impl) if not name.startswith("_")]
__version__ = "0.1.0"

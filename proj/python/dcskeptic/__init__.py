"""Rank-driven dynamic correlation model: python face of the C++ core."""

try:
    from ._dcskeptic import *  # noqa: F401,F403  (wheel layout)
    from ._dcskeptic import __doc__ as _core_doc  # noqa: F401
except ImportError:  # pragma: no cover - dev tree: module sits next to the package
    from _dcskeptic import *  # noqa: F401,F403

"""Nilpotent class-3 groups with triality, their Moufang loops, and code loops."""

from .core import Element, GroupCtx, get_ctx

__all__ = ["Element", "GroupCtx", "get_ctx"]
__version__ = "0.1.0"

"""Memristance-domain analog arithmetic simulator."""

from memarith._memarith import *  # noqa: F401,F403

"""Bundled language frontends."""

"""Spectral Galerkin solver for fictitious-domain fluid-structure interaction.

The numerical core lives in `app.core`; `app.services` wraps it for the
command line (`app.cli`) and the HTTP API (`app.api`).
"""

"""Service layer shared by the CLI and the FastAPI application.

This package runs scenarios through the pipeline, writes their artifacts and
re-verifies stored run directories.
"""

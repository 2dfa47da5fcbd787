"""Shared store for the acceptance summary printed at the end of a run."""

RESULTS = {}

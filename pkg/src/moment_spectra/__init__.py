"""Exact spectra of second-moment operators of 1D structured random circuits.

Modules
-------
gate_algebra
    Two-qudit gates, entangling power / gate typicality, transfer blocks.
moment_builder
    Dense moment operators (local and brick-wall) and the positivity order.
spectra_analytic
    Free-fermion spectra, gaps, mode operators and eigenvectors.
spectra_numeric
    Dense eigensolver oracle, spectrum matching and gap scans.
frame_potential
    Frame potentials and the single-domain-wall model.
cli
    Command-line front end (``moment-spectra``).
"""

__version__ = "0.1.0"

"""Spectral propagators and closed-form solutions for 1+1 dimensional
relativistic wave equations (relativistic heat, Salpeter, Dirac and
Klein-Gordon), with and without a linear potential."""

from relwave.grid import (
    Grid,
    PacketSpec,
    ScalarField,
    SpinorField,
    forward_transform,
    inverse_transform,
    make_grid,
    make_packet,
)
from relwave.specfun import DomainError, bessel_k, levy_half, struve_l

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "Grid",
    "PacketSpec",
    "ScalarField",
    "SpinorField",
    "bessel_k",
    "forward_transform",
    "inverse_transform",
    "levy_half",
    "make_grid",
    "make_packet",
    "struve_l",
]

"""Spectral, time-dependent and traveling-front computations for KPP reaction-diffusion
fronts with heat loss in a shear flow through a cylinder.

Submodules: cross_section, eigen, dispersion, ivp, diagnostics, front, config, cli.
"""

__version__ = "0.1.0"

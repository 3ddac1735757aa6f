"""Numerics for the Newell long-wave/short-wave resonance equation.

Submodules: ``specfun`` (complex Gamma, logs, quadrature), ``pde`` (spectral
solver), ``scattering`` (Jost solutions and reflection data), ``asymptotics``
(leading-order long-time profile), ``cli`` (command line).
"""

__version__ = "0.1.0"

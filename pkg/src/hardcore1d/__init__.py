"""Two impenetrable hard-core particles in a one-dimensional box.

Closed-form pair states, spectra, expectation values and forces live in
:mod:`hardcore1d.analytic`; :mod:`hardcore1d.numeric` is an independent
finite-difference eigensolver used to check them.
"""

from hardcore1d.units import BoxGeometry, PhysicalUnits

__version__ = "0.1.0"

__all__ = ["BoxGeometry", "PhysicalUnits", "__version__"]

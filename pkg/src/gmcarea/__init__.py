"""Numerical laboratory for winding-number Levy areas against Gaussian
multiplicative chaos (GMC) measures.

The package is organised around a shared grid substrate:

- :mod:`gmcarea.grid`     grids, cell masks, polylines, triangles, rectangles
- :mod:`gmcarea.field`    log-correlated Gaussian field sampling
- :mod:`gmcarea.gmc`      GMC cell-mass samples, moment oracles, comparisons
- :mod:`gmcarea.curves`   Brownian paths, circle chains, subdivision
- :mod:`gmcarea.winding`  exact integer winding fields and level sets
- :mod:`gmcarea.area`     cutoff/level-sum area integrals, Chen defects, norms
- :mod:`gmcarea.harness`  experiment orchestration and reports
"""

__version__ = "0.1.0"

"""Exact p-adic machinery for pairs of non-ordinary eigenforms.

Layers, bottom to top: padics (field arithmetic), polys (dense polynomials
and packed convolution), piseries (the phi/psi/Gamma module of power series
in the cyclotomic variable), iwasawa (finite-level group rings, the Mellin
correspondence, factored Iwasawa data), wach (lattice matrices and the
logarithmic matrix bundle), solver (signed decomposition, splitting, image
ideals), cli (command line front end).
"""

__version__ = "0.1.0"

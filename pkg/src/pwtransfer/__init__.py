"""Perfect wave transfer in inhomogeneous Tomonaga-Luttinger liquids.

Sturm-Liouville spectra and modes, PWT classification, semiclassical checks,
correlators and one-particle overlaps, and the constructive inverse problem.
"""
__version__ = "0.1.0"

"""Partition numbers and Hilbert-scheme Hodge numbers, two independent ways.

The package computes the same quantities by exact integer series expansion
and by circle-method exact formulas (Kloosterman sums times Bessel
functions), and uses the analytic route to classify and demonstrate
equidistribution of Hodge numbers of Hilbert schemes of surfaces.
"""

__version__ = "0.1.0"

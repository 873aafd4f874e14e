"""Finite-dimensional combinatorics of subfactor inclusions.

Bipartite inclusion graphs and their square norms, Markov weight vectors,
Jones towers, Temperley-Lieb-Jones polynomials, concrete multimatrix
commuting squares, Folner certificates and the graph-norm atlas.
"""

__version__ = "0.1.0"

"""hlbench: a finite workbench for colorings of the binary tree.

Exact-arithmetic constructions and checks around level sets of subtree
embeddings, slowly branching trees, pairing and splitting-level colorings,
ideal-style density statistics, an evasion game, and finite morphism
checking between ideal presentations.  Everything is deterministic given
its seed, and every reported rational is exact.
"""

__version__ = "0.1.0"

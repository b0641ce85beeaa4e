"""Branched orbi-covers of a fixed two-dimensional orbihedron.

The package builds, for a finitely presented group, a finite branched
cover of a fixed base orbihedron whose underlying space has that group
as fundamental group, and verifies every step combinatorially.  A
separate module models the three-dimensional frame glued from
right-angled dodecahedra.
"""

__version__ = "0.1.0"

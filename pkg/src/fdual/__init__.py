"""Exact verification and symmetry-reduced search for formally dual sets
in finite abelian groups.

Modules by responsibility:

* ``abelian``     -- group arithmetic, subgroups, pairings, automorphisms
* ``cyclotomic``  -- exact root-of-unity arithmetic (the integer backbone)
* ``duality``     -- weight enumerators, character spectra, pair checking
* ``primitivity`` -- coset and stabilizer conditions for primitive sets
* ``search``      -- exhaustive tree search with symmetry reduction
* ``cli``         -- the ``fdual`` command line tool
"""

__version__ = "0.1.0"

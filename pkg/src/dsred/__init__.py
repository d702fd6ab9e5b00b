"""Classical W-algebras and integrable hierarchies by Drinfeld-Sokolov reduction.

Everything is computed in exact rational arithmetic.
"""

__version__ = "0.1.0"

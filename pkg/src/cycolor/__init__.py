"""Verification toolkit for discharging proofs of cyclic-coloring theorems.

Subpackages cover: combinatorial plane graphs with a brute-force cyclic
coloring oracle, the two-block reducible-configuration file format and its
checker, the exact discharging rule catalog, the final-charge audits, and an
exact rational LP engine for rule-weight synthesis.
"""

__version__ = "0.1.0"

"""horolab — a numerical laboratory for sparse horocycle orbits.

Arithmetic on the modular surface, oscillatory-sum evaluation with attached
theoretical envelopes, continued-fraction and periodic-orbit machinery, a
Jurkat–Richert linear sieve, and desk-scale replay experiments, all behind a
deterministic CLI.
"""

__version__ = "0.1.0"

"""Ray class groups of quadratic fields and capitulation experiments.

Everything is exact integer arithmetic; there are no floating point
tolerances anywhere in the library proper.
"""

__version__ = "0.1.0"

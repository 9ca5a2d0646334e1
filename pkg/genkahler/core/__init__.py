"""
Core package for genkahler: exact algebra, structures and the deformation solver.
"""

from .gcs import GCStructure
from .tensorcalc import Form, Polyvector

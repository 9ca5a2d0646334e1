"""
genkahler: exact symbolic toolkit for generalized complex and Kähler geometry on polynomial charts.
"""

__version__ = "0.1.0"

"""
Test package for genkahler.
"""

"""
Data package for genkahler: scenario loading and the shipped corpus.
"""

"""
Command-line layer: expression parser and scenario commands.
"""

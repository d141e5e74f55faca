"""High-dimensional influence diagnostics"""
__version__ = "1.0.0"

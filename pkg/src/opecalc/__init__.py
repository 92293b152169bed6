"""opecalc: exact-arithmetic engine for partition flag complexes,
colored poset filtrations, tower diagram categories, and Mellin finite parts."""

__version__ = "0.1.0"

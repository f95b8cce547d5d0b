"""Imitation-learning lab for the pre-cardplay and cardplay decisions of Skat."""
__version__ = "0.1.0"

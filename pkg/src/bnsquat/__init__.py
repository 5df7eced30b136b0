"""Typosquatting analytics and typo-guard defenses for blockchain naming systems."""

__version__ = "0.1.0"

"""Mean-field spin glass laboratory."""
__version__ = "0.1.0"

"""Self-stabilizing maximal independent sets in unidirectional networks."""

__version__ = "0.1.0"

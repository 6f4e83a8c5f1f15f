"""Series and asymptotic evaluation of the entire function F_{n,sigma}(x; mu)."""

__version__ = "0.1.0"

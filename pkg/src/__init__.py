"""
Lucas-Lehmer Polynomial Toolkit
"""

__version__ = "1.0.0"
__description__ = "Exact and high-precision tools for Lucas-Lehmer polynomials and their Chebyshev links"

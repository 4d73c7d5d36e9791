"""
Positive-part algebra

(c)+ := max(c, 0) and the two equivalent complementarity forms

    a = (a - b)+   <=>   a >= 0, b >= 0, a*b = 0
    a = (c)+       <=>   a >= 0, a >= c, a*(a - c) = 0

which carry the KKT structure of the crack-growth criterion.
"""

import math

import numpy as np


def positive_part(c):
    """Return max(c, 0); works elementwise on numpy arrays"""
    if isinstance(c, np.ndarray):
        return np.maximum(c, 0.0)
    if not math.isfinite(c):
        raise ValueError(f"positive_part expects a finite value, got {c}")
    return max(float(c), 0.0)


def check_complementarity(a: float, b: float, tol: float = 0.0) -> bool:
    """True iff |a - (a - b)+| <= tol, the closed form of the KKT triple"""
    return abs(a - positive_part(a - b)) <= tol


def complementarity_triple(a: float, b: float, tol: float = 0.0) -> bool:
    """The three-condition side: a >= 0, b >= 0, a*b = 0 (to tol)"""
    return a >= -tol and b >= -tol and abs(a * b) <= tol


def positive_part_triple(a: float, c: float, tol: float = 0.0) -> bool:
    """Alternate form with b = a - c: a >= 0, a >= c, a*(a - c) = 0"""
    return complementarity_triple(a, a - c, tol)

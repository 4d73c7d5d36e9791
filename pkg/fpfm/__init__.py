"""
fpfm - quasi-static brittle fracture toolkit

Griffith-type crack growth with velocity-dependent fracture energy, the
irreversible fracture phase-field model, and the energy identities tying
them together.
"""

__version__ = "0.1.0"

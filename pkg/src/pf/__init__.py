"""
Module de calcul des allocations proportionnellement équitables (PF).
"""

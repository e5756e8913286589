"""
Mécanisme Strong Demand Matching (prix ascendants et couplage capacitaire).
"""

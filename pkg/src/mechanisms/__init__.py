"""
Mécanismes d'allocation véridiques sans monnaie.
"""

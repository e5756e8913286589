"""
Bibliothèque fairdiv : allocation PF, mécanismes véridiques et vérification.
"""

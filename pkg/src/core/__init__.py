"""
Modèle de base : instances, allocations, rationnels exacts et erreurs.
"""

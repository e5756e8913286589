"""
Tests de fairdiv : unitaires, propriétés (hypothesis) et intégration.
"""

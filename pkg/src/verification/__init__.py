"""
Oracles brute-force et campagnes de vérification.
"""

"""
Interface en ligne de commande : lecture des instances, rapports, commandes.
"""

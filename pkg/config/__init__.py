"""
Configuration de fairdiv (valeurs par défaut surchargées par .env).
"""
from .settings import *

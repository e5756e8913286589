"""
=============================================================================
FICHIER DE CONFIGURATION CENTRALISÉ DU PROJET
=============================================================================
Ce fichier contient TOUTES les configurations du projet :
- Chemins des données (instances générées, témoins des campagnes)
- Tolérances numériques du solveur PF et des comparaisons de ratios
- Paramètres de l'oracle brute-force et de la recherche de déviations
- Paramètres des campagnes de vérification et du banc d'essai (bench)
- Constantes métier (bornes d'approximation garanties par les mécanismes)

Les valeurs peuvent être surchargées via des variables d'environnement
ou un fichier .env à la racine du projet.
=============================================================================
"""

import os
from fractions import Fraction
from pathlib import Path
from dotenv import load_dotenv  # Permet de charger les variables depuis un fichier .env

# Charge les variables d'environnement depuis le fichier .env (s'il existe)
load_dotenv()

# =============================================================================
# CHEMINS DE BASE DU PROJET
# =============================================================================
# BASE_DIR = Dossier racine du projet (parent du dossier config/)
# DATA_DIR = Dossier où sont stockées les instances et les rapports
# WITNESS_DIR = Instances "témoins" (pire cas trouvé) écrites par `verify`
BASE_DIR = Path(__file__).resolve().parent.parent
DATA_DIR = Path(os.getenv("FAIRDIV_DATA_DIR", BASE_DIR / "data"))
WITNESS_DIR = DATA_DIR / "witnesses"

# =============================================================================
# GRAINE ALÉATOIRE ET LOGS
# =============================================================================
# Toutes les campagnes sont reproductibles à partir de (graine, nombre d'essais).
# FAIRDIV_SEED sert de graine par défaut pour `gen`, `verify` et `bench`.
DEFAULT_SEED = int(os.getenv("FAIRDIV_SEED", 7))
# Niveau de log de loguru pour le script CLI (DEBUG affiche la trace SDM)
LOG_LEVEL = os.getenv("FAIRDIV_LOG_LEVEL", "INFO")

# =============================================================================
# SOLVEUR PF ITÉRATIF (programme d'Eisenberg-Gale)
# =============================================================================
# Le solveur général fonctionne en flottants (numpy) par réponse proportionnelle.
# Il s'arrête quand la part du budget dépensée hors objets MBB passe sous
# PF_TOLERANCE, ou lève SolverFailure après PF_MAX_ITERATIONS.
PF_TOLERANCE = float(os.getenv("FAIRDIV_PF_TOLERANCE", 1e-9))
PF_MAX_ITERATIONS = int(os.getenv("FAIRDIV_PF_MAX_ITERATIONS", 200_000))

# Tolérance par défaut sur les ratios calculés en flottants (ρ, q ≤ f·p*, ...)
# Les chemins exacts (Fraction) n'utilisent jamais de tolérance.
RATIO_TOLERANCE = float(os.getenv("FAIRDIV_RATIO_TOLERANCE", 1e-6))

# =============================================================================
# ORACLE BRUTE-FORCE (maximisation de Σ log v_i(x) sur une grille)
# =============================================================================
# Nombre de subdivisions de chaque objet
ORACLE_GRID = int(os.getenv("FAIRDIV_ORACLE_GRID", 200))
# Au-delà de ce nombre de points, on passe de l'énumération complète
# à la montée par coordonnées (transferts d'une unité de grille)
ORACLE_ENUMERATION_LIMIT = int(os.getenv("FAIRDIV_ORACLE_ENUMERATION_LIMIT", 100_000))
# Taille maximale n·m acceptée par l'oracle (au-delà : OracleIntractable)
ORACLE_MAX_CELLS = int(os.getenv("FAIRDIV_ORACLE_MAX_CELLS", 12))

# =============================================================================
# MÉCANISME SDM (Strong Demand Matching)
# =============================================================================
# Budget d'itérations : SDM_ITERATION_FACTOR · n · min(n, m).
# Un dépassement signale un bug d'implémentation, pas une entrée invalide.
SDM_ITERATION_FACTOR = int(os.getenv("FAIRDIV_SDM_ITERATION_FACTOR", 4))

# =============================================================================
# GÉNÉRATEURS D'INSTANCES ET DÉVIATIONS
# =============================================================================
# Les lignes aléatoires sont tirées par espacements exponentiels puis
# arrondies à des entiers sur cette résolution (valeurs rationnelles exactes)
GENERATOR_RESOLUTION = int(os.getenv("FAIRDIV_GENERATOR_RESOLUTION", 10_000))

# Perturbations multiplicatives appliquées à chaque coordonnée d'une offre
DEVIATION_FACTORS = [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4),
                     Fraction(4, 3), Fraction(2), Fraction(4)]

# Valeurs de ε pour la famille d'instances "epsilon" (exemple serré du
# mécanisme dictatorial à échange, 2 enchérisseurs et 4 objets)
EPSILON_VALUES = [Fraction(1, 100), Fraction(1, 1000)]

# =============================================================================
# CAMPAGNES DE VÉRIFICATION ET BANC D'ESSAI
# =============================================================================
# Nombre d'essais par mécanisme pour `bench` (tableau des bornes)
BENCH_TRIALS = int(os.getenv("FAIRDIV_BENCH_TRIALS", 300))
# Nombre d'essais par défaut pour `verify`
VERIFY_TRIALS = int(os.getenv("FAIRDIV_VERIFY_TRIALS", 1000))
# Nombre de processus pour les campagnes (1 = séquentiel)
VERIFY_WORKERS = int(os.getenv("FAIRDIV_VERIFY_WORKERS", 1))

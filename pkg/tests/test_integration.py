"""
=============================================================================
TESTS D'INTÉGRATION - CAMPAGNES ET LIGNE DE COMMANDE
=============================================================================
Tests des composants ensemble : générateurs + mécanismes + campagnes,
ligne de commande de bout en bout (fichiers d'instance, rapports, témoins).

Les campagnes longues (10^5 instances, SDM à 5000 enchérisseurs) sont
marquées `slow`.
=============================================================================
"""

import json
import pytest
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))


@pytest.fixture
def instance_file(tmp_path):
    """Écrit une instance dans un fichier temporaire et renvoie son chemin."""
    from src.cli.instance_io import write_instance

    def write(inst, name="instance.json"):
        return str(write_instance(inst, tmp_path / name))

    return write


# =============================================================================
# TESTS DES CAMPAGNES
# =============================================================================

@pytest.mark.integration
class TestCampaigns:
    """Recherche du pire cas sur de petites campagnes."""

    @pytest.mark.parametrize("mechanism", ["pf", "pa", "swap", "hybrid", "si", "two2", "three2"])
    def test_guarantees_hold(self, mechanism):
        """Les garanties du registre tiennent sur 40 instances tirées."""
        from src.verification.campaign import worst_case_search
        report = worst_case_search(mechanism, trials=40, seed=7)
        assert report.passed, [c for c in report.checks if not c.passed]
        assert len(report.records) == 40
        assert report.worst_rho is not None

    def test_sdm_campaign(self):
        """SDM sur 8 instances fortes demandes : garanties tenues, colonnes propres à SDM présentes."""
        from src.verification.campaign import worst_case_search
        report = worst_case_search("sdm", trials=8, seed=7)
        assert report.passed
        assert {"rho_margin", "price_margin", "below_unit_price", "raises"} <= set(report.records.columns)

    def test_same_seed_same_records(self):
        """Même graine : mêmes enregistrements, mêmes minima, même témoin."""
        import pandas as pd
        from src.verification.campaign import worst_case_search
        first = worst_case_search("two2", trials=25, seed=3)
        second = worst_case_search("two2", trials=25, seed=3)
        pd.testing.assert_frame_equal(first.records, second.records)
        assert first.minima == second.minima
        assert first.worst_rho == second.worst_rho

    def test_workers_match_sequential(self):
        """Le découpage de la graine rend les essais indépendants du nombre de processus."""
        import pandas as pd
        from src.verification.campaign import worst_case_search
        sequential = worst_case_search("pa", trials=16, seed=5, workers=1)
        parallel = worst_case_search("pa", trials=16, seed=5, workers=2)
        pd.testing.assert_frame_equal(sequential.records, parallel.records)
        assert sequential.minima == parallel.minima

    def test_custom_family_and_shape(self):
        """Famille et forme choisies : le plancher de SI suit n (6/7 pour n = 6)."""
        from src.verification.campaign import worst_case_search
        report = worst_case_search("si", family="near-ties", trials=20, seed=1, n=6)
        assert (report.n, report.m) == (6, 2)
        assert report.checks[0].bound == Fraction(6, 7)
        assert report.passed

    def test_shape_rejected(self):
        """Forme incompatible avec le mécanisme : ShapeError avant tout tirage."""
        from src.core.errors import ShapeError
        from src.verification.campaign import worst_case_search
        with pytest.raises(ShapeError):
            worst_case_search("three2", trials=5, n=4)

    def test_oracle_agrees_with_exact_solvers(self):
        """Utilités de l'oracle à 2/grille près des utilités exactes."""
        from src.pf.solver import reference_pf
        from src.verification.generators import generate_seeded
        from src.verification.oracle import brute_force_pf
        for seed in range(5):
            for n, m in ((2, 2), (2, 3), (3, 2)):
                inst = generate_seeded("simplex", n, m, seed)
                exact = [float(u) for u in reference_pf(inst).utilities]
                approx = brute_force_pf(inst).utilities
                assert approx == pytest.approx(exact, abs=2 / 200 + 1e-6)

    def test_oracle_agrees_with_iterative_solver(self):
        """Sans solveur exact (n ≥ 3, m ≥ 3), solve_pf et l'oracle concordent à 2/grille près."""
        from src.pf.solver import solve_pf
        from src.verification.generators import generate_seeded
        from src.verification.oracle import brute_force_pf
        cases = [("simplex", 3, 3, seed) for seed in range(5)] + [("near-ties", 3, 3, 1), ("simplex", 3, 4, 0)]
        for family, n, m, seed in cases:
            inst = generate_seeded(family, n, m, seed)
            solved = [float(u) for u in solve_pf(inst).utilities]
            approx = brute_force_pf(inst).utilities
            assert approx == pytest.approx(solved, abs=2 / 200 + 1e-6)


# =============================================================================
# TESTS DE LA LIGNE DE COMMANDE
# =============================================================================

@pytest.mark.integration
class TestCommandLine:
    """Sous-commandes appelées par main(argv)."""

    def test_pf_report(self, frontier_example, instance_file):
        """Rapport pf du 2×3 : prix (6/7, 3/7, 5/7), allocation exacte, contrôles réussis."""
        from src.cli.commands import EXIT_OK, main
        outcome = main(["pf", instance_file(frontier_example)])
        assert outcome.exit_code == EXIT_OK
        report = json.loads(outcome.text)
        assert report["prices"] == ["6/7", "3/7", "5/7"]
        assert report["allocation"][0] == ["1", "1/3", "0"]
        assert report["rho"] == "1"
        assert all(check["passed"] for check in report["checks"])

    def test_run_partial_allocation(self, frontier_example, instance_file):
        """run pa : ρ = 7/10 et SW = 49/50 en rationnels."""
        from src.cli.commands import EXIT_OK, main
        outcome = main(["run", "--mechanism", "pa", instance_file(frontier_example)])
        assert outcome.exit_code == EXIT_OK
        report = json.loads(outcome.text)
        assert report["mechanism"] == "pa"
        assert report["rho"] == "7/10"
        assert report["sw"] == "49/50"

    def test_run_decimal_output(self, frontier_example, instance_file):
        """--decimal 3 : nombres affichés avec trois décimales."""
        from src.cli.commands import main
        outcome = main(["--decimal", "3", "run", "--mechanism", "pa", instance_file(frontier_example)])
        report = json.loads(outcome.text)
        assert report["rho"] == "0.700"
        assert report["sw"] == "0.980"

    def test_run_sdm_flags_vacuous_bound(self, instance_file):
        """Prix PF < 1 : la garantie SDM est signalée comme vide."""
        from src.cli.commands import EXIT_OK, main
        from src.core.model import normalize
        outcome = main(["run", "--mechanism", "sdm", instance_file(normalize([[2, 1], [2, 1]]))])
        assert outcome.exit_code == EXIT_OK
        report = json.loads(outcome.text)
        assert report["prices"] == ["2", "1"]
        assert report["rho"] == "2/3"
        assert "sdm guarantee applicable" in [check["name"] for check in report["checks"]]

    def test_near_ties_instance_is_not_an_internal_error(self, instance_file):
        """pf et run sdm sur une instance near-ties 9×3 aboutissent sans erreur interne."""
        from src.cli.commands import EXIT_INTERNAL, EXIT_OK, main
        from src.verification.generators import generate_seeded
        path = instance_file(generate_seeded("near-ties", 9, 3, 5))
        assert main(["pf", path]).exit_code == EXIT_OK
        assert main(["run", "--mechanism", "sdm", path]).exit_code != EXIT_INTERNAL

    def test_run_wrong_shape(self, uniform_three, instance_file):
        """Forme refusée : code d'usage, aucune sortie."""
        from src.cli.commands import EXIT_USAGE, main
        outcome = main(["run", "--mechanism", "two2", instance_file(uniform_three)])
        assert outcome.exit_code == EXIT_USAGE
        assert outcome.text == ""

    def test_missing_file(self, tmp_path):
        """Fichier absent : code d'usage."""
        from src.cli.commands import EXIT_USAGE, main
        assert main(["pf", str(tmp_path / "absent.json")]).exit_code == EXIT_USAGE

    def test_malformed_file(self, tmp_path):
        """Lignes de longueurs différentes : code d'usage."""
        from src.cli.commands import EXIT_USAGE, main
        path = tmp_path / "broken.json"
        path.write_text('{"valuations": [[1, 2], [3]]}', encoding="utf-8")
        assert main(["pf", str(path)]).exit_code == EXIT_USAGE

    def test_unknown_mechanism_is_a_usage_error(self, frontier_example, instance_file):
        """Mécanisme inconnu : argparse sort avec le code 2."""
        from src.cli.commands import main
        with pytest.raises(SystemExit) as exc:
            main(["run", "--mechanism", "lottery", instance_file(frontier_example)])
        assert exc.value.code == 2

    def test_gen_is_reproducible(self):
        """gen : même graine, même texte, relu à l'identique."""
        from src.cli.commands import EXIT_OK, main
        from src.cli.instance_io import parse_instance_text
        from src.verification.generators import generate_seeded
        first = main(["gen", "--family", "simplex", "--n", "3", "--m", "2", "--seed", "7"])
        second = main(["gen", "--family", "simplex", "--n", "3", "--m", "2", "--seed", "7"])
        assert first.exit_code == EXIT_OK
        assert first.text == second.text
        assert parse_instance_text(first.text) == generate_seeded("simplex", 3, 2, 7)

    def test_out_writes_report(self, frontier_example, instance_file, tmp_path):
        """--out écrit le rapport affiché."""
        from src.cli.commands import main
        target = tmp_path / "reports" / "pf.json"
        outcome = main(["--out", str(target), "pf", instance_file(frontier_example)])
        assert target.read_text(encoding="utf-8") == outcome.text + "\n"

    def test_verify_writes_witnesses(self, tmp_path):
        """verify : témoins écrits et relisibles, lignes de contrôle et de véracité."""
        from src.cli.commands import EXIT_OK, main
        from src.cli.instance_io import parse_instance
        outcome = main([
            "verify", "--mechanism", "two2", "--trials", "30", "--seed", "7",
            "--witness-dir", str(tmp_path),
        ])
        assert outcome.exit_code == EXIT_OK
        lines = outcome.text.splitlines()
        witness_lines = [line for line in lines if line.startswith("mechanism=two2 seed=7")]
        assert witness_lines
        for line in witness_lines:
            path = line.split("witness=")[1]
            assert parse_instance(path).n == 2
        assert any(line.startswith("check=rho") and line.endswith("status=PASS") for line in lines)
        assert any(line.startswith("truthfulness") for line in lines)

    def test_verify_is_deterministic(self, tmp_path):
        """verify deux fois avec la même graine : même sortie."""
        from src.cli.commands import main
        argv = ["verify", "--mechanism", "hybrid", "--trials", "20", "--seed", "11",
                "--witness-dir", str(tmp_path), "--no-truthfulness"]
        assert main(argv).text == main(argv).text

    def test_bench_table(self):
        """bench : en-tête, lignes des instances serrées, sortie reproductible."""
        from src.cli.commands import EXIT_OK, main
        from src.cli.reports import BENCH_COLUMNS
        outcome = main(["bench", "--trials", "3", "--seed", "7"])
        assert outcome.exit_code == EXIT_OK
        lines = outcome.text.splitlines()
        assert lines[0].split() == BENCH_COLUMNS
        assert any("tight_sw_ratio" in line for line in lines)
        assert any("epsilon_sw_ratio" in line for line in lines)
        assert main(["bench", "--trials", "3", "--seed", "7"]).text == outcome.text


# =============================================================================
# CAMPAGNES LONGUES
# =============================================================================

@pytest.mark.slow
class TestLargeCampaigns:
    """Campagnes à grande échelle (à lancer avec -m slow)."""

    @pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
    def test_pf_social_welfare_bound(self, m):
        """SW(PF)/SW* ≥ 0.933 sur 20000 instances 2×m."""
        from src.verification.campaign import worst_case_search
        report = worst_case_search("pf", trials=20000, seed=m, m=m, workers=4)
        assert report.passed

    @pytest.mark.parametrize("mechanism", ["si", "two2", "three2", "hybrid"])
    def test_two_item_and_hybrid_bounds(self, mechanism):
        """Bornes de SI, 2×2, 3×2 et hybride sur les familles simplex et near-ties."""
        from src.verification.campaign import worst_case_search
        for family in ("simplex", "near-ties"):
            report = worst_case_search(mechanism, family=family, trials=5000, seed=7, workers=4)
            assert report.passed

    def test_sdm_large_instance(self):
        """n = 5000, m = 20 : état final, q ≤ f·p*, deux phases et budget d'itérations n·min(n, m)."""
        import time
        from config.settings import SDM_ITERATION_FACTOR
        from src.pf.solver import reference_pf
        from src.sdm.mechanism import price_rounding_factor, run_sdm, run_sdm_two_phase
        from src.verification.generators import generate_seeded

        inst = generate_seeded("strong-demand", 5000, 20, 7)
        start = time.time()
        outcome = run_sdm(inst, with_benchmark=False)
        duration = time.time() - start

        assert all(q >= 1 for q in outcome.prices)
        assert None not in outcome.assignment
        assert all(total <= 1 for total in outcome.allocation.column_sums())
        counts = outcome.statistics.matched_after_step1
        assert counts == sorted(counts) and counts[-1] == inst.n
        assert outcome.statistics.raises <= SDM_ITERATION_FACTOR * inst.n * min(inst.n, inst.m) + 4
        assert duration < 600, f"SDM trop lent : {duration:.0f}s"

        pf = reference_pf(inst)
        factor = price_rounding_factor(pf.prices)
        slack = 0 if pf.exact else 1e-6
        for q, p_star in zip(outcome.prices, pf.prices):
            if p_star > 0:
                assert q <= factor * p_star + slack

        for bidder in (0, inst.n // 2, inst.n - 1):
            two_phase = run_sdm_two_phase(inst, bidder, with_benchmark=False)
            assert two_phase.prices == outcome.prices

    def test_partial_allocation_campaign(self):
        """PA sur 10^4 instances : ρ ≥ 1/2, identités exactes et véracité sur un échantillon."""
        from src.core.model import max_envy
        from src.mechanisms.social_welfare import partial_allocation
        from src.verification.campaign import worst_case_search
        from src.verification.generators import generate_seeded
        from src.verification.truthfulness import check_truthfulness

        report = worst_case_search("pa", trials=10000, seed=7, workers=4)
        assert report.passed
        assert report.minima["rho"] >= Fraction(1, 2)

        for seed in range(10000):
            inst = generate_seeded("simplex", 2, 2 + seed % 5, seed)
            result = partial_allocation(inst)
            u_a, u_b = result.pf.utilities
            assert result.per_bidder_pf_fraction == (u_b, u_a)
            assert result.sw == 2 * u_a * u_b
            assert max_envy(inst, result.allocation) == 0
            if seed % 200 == 0:
                assert check_truthfulness(partial_allocation, inst).truthful_on_grid

    def test_two_bidder_worst_case_location(self):
        """2×2 : le pire témoin a son R_b en v ≈ 1 + √2."""
        from src.core.rational import TWO_BIDDER_MINIMIZER
        from src.verification.campaign import worst_case_search
        report = worst_case_search("two2", trials=20000, seed=7, workers=4)
        assert report.passed
        v = _ratio_bidder_value(report.worst_rho[1], lambda s: s.position == 1)
        assert float(v) == pytest.approx(float(TWO_BIDDER_MINIMIZER), abs=1e-2)

    def test_three_bidder_worst_case_location(self):
        """3×2 : le pire témoin a son R_b en bas, en v ≈ √12."""
        from src.core.rational import ROOT_TWELVE
        from src.verification.campaign import worst_case_search
        report = worst_case_search("three2", trials=20000, seed=7, workers=4)
        assert report.passed
        v = _ratio_bidder_value(report.worst_rho[1], lambda s: s.position == 1 or (s.position == 2 and s.v < 1))
        assert float(v) == pytest.approx(float(ROOT_TWELVE), abs=0.1)


def _ratio_bidder_value(inst, swap_when):
    """Valeur relative v de R_b, dans l'orientation choisie par le mécanisme."""
    from src.pf.two_item import solve_pf_two_item
    structure, _ = solve_pf_two_item(inst, 0)
    if structure.has_ratio_bidder and swap_when(structure):
        structure, _ = solve_pf_two_item(inst, 1)
    assert structure.has_ratio_bidder
    return structure.v

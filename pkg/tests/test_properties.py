"""
=============================================================================
TESTS DE PROPRIÉTÉS - GARANTIES SUR DES INSTANCES ALÉATOIRES
=============================================================================
Tests générés par hypothesis sur de petites matrices d'entiers : chaque
propriété (équilibre PF, bornes d'approximation, véracité, invariants de
SDM) est vérifiée en arithmétique exacte.
=============================================================================
"""

import sys
from fractions import Fraction
from pathlib import Path

from hypothesis import HealthCheck, assume, given, settings
import hypothesis.strategies as st

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.core.model import max_envy, normalize, optimal_social_welfare
from src.core.rational import HYBRID_SW_BOUND, PF_SW_BOUND, THREE_BIDDER_BOUND, TWO_BIDDER_BOUND

PROPERTY_SETTINGS = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def instances(draw, bidders=st.integers(2, 2), items=st.integers(1, 4), top=20):
    """Matrice d'entiers dans [0, top], sans ligne nulle, normalisée."""
    n = draw(bidders)
    m = draw(items)
    row = st.lists(st.integers(0, top), min_size=m, max_size=m).filter(lambda r: sum(r) > 0)
    return normalize(draw(st.lists(row, min_size=n, max_size=n)))


two_bidders = instances()
two_items = instances(bidders=st.integers(1, 6), items=st.just(2))


# =============================================================================
# PROPRIÉTÉS DE L'ALLOCATION PF
# =============================================================================

class TestPFProperties:
    """Équilibre exact, unicité des utilités, borne sur SW."""

    @PROPERTY_SETTINGS
    @given(two_bidders)
    def test_two_bidder_solution_is_an_equilibrium(self, inst):
        """La solution à deux enchérisseurs vérifie l'équilibre exact et est sans envie."""
        from src.pf.equilibrium import verify_equilibrium
        from src.pf.two_bidder import solve_pf_two_bidder
        solution = solve_pf_two_bidder(inst)
        assert verify_equilibrium(inst, solution).ok
        assert max_envy(inst, solution.allocation) == 0

    @PROPERTY_SETTINGS
    @given(two_items)
    def test_two_item_solution_is_an_equilibrium(self, inst):
        """La solution à deux objets vérifie l'équilibre exact."""
        from src.pf.equilibrium import verify_equilibrium
        from src.pf.two_item import solve_pf_two_item
        assert verify_equilibrium(inst, solve_pf_two_item(inst)[1]).ok

    @PROPERTY_SETTINGS
    @given(two_bidders, st.integers(1, 7))
    def test_pf_inequality_against_pure_allocations(self, inst, split):
        """Σ_i (v_i(x′) − v_i(x))/v_i(x) ≤ 0 pour des allocations x′ tirées sur une grille."""
        from src.core.model import Allocation, utilities
        from src.pf.two_bidder import solve_pf_two_bidder
        sol = solve_pf_two_bidder(inst)
        share = Fraction(split, 8)
        other = Allocation.from_rows([[share] * inst.m, [1 - share] * inst.m])
        gains = sum((mine - ref) / ref for mine, ref in zip(utilities(inst, other), sol.utilities))
        assert gains <= 0

    @PROPERTY_SETTINGS
    @given(two_items)
    def test_two_item_orientation_gives_same_utilities(self, inst):
        """Les deux orientations des objets donnent les mêmes utilités."""
        from src.pf.two_item import solve_pf_two_item
        assert solve_pf_two_item(inst, 0)[1].utilities == solve_pf_two_item(inst, 1)[1].utilities

    @PROPERTY_SETTINGS
    @given(two_bidders, st.randoms(use_true_random=False))
    def test_item_order_does_not_matter(self, inst, rng):
        """Renuméroter les objets ne change pas les utilités PF."""
        from src.pf.two_bidder import solve_pf_two_bidder
        order = list(range(inst.m))
        rng.shuffle(order)
        assert solve_pf_two_bidder(inst.permuted_items(order)).utilities == solve_pf_two_bidder(inst).utilities

    @PROPERTY_SETTINGS
    @given(instances(items=st.just(2)))
    def test_exact_solvers_agree(self, inst):
        """n = 2 et m = 2 : les deux solveurs exacts donnent les mêmes utilités."""
        from src.pf.two_bidder import solve_pf_two_bidder
        from src.pf.two_item import solve_pf_two_item
        assert solve_pf_two_bidder(inst).utilities == solve_pf_two_item(inst)[1].utilities

    @PROPERTY_SETTINGS
    @given(two_bidders)
    def test_pf_social_welfare_bound(self, inst):
        """SW(PF)/SW* ≥ (2√3+3)/(4√3)."""
        from src.pf.two_bidder import solve_pf_two_bidder
        ratio = sum(solve_pf_two_bidder(inst).utilities) / optimal_social_welfare(inst)
        assert ratio >= PF_SW_BOUND


# =============================================================================
# PROPRIÉTÉS DES MÉCANISMES À DEUX ENCHÉRISSEURS
# =============================================================================

class TestSocialWelfareProperties:
    """PA, dictateur à échange et hybride."""

    @PROPERTY_SETTINGS
    @given(two_bidders)
    def test_partial_allocation_identities(self, inst):
        """ρ_A = u_B, ρ_B = u_A, SW = 2·u_A·u_B et allocation sans envie."""
        from src.mechanisms.social_welfare import partial_allocation
        result = partial_allocation(inst)
        u_a, u_b = result.pf.utilities
        assert result.per_bidder_pf_fraction == (u_b, u_a)
        assert result.sw == 2 * u_a * u_b
        assert result.rho >= Fraction(1, 2)
        assert max_envy(inst, result.allocation) == 0

    @PROPERTY_SETTINGS
    @given(two_bidders)
    def test_swap_guarantees(self, inst):
        """Dictateur à échange : chaque utilité ≥ 1/2, SW ≥ SW*/2, sans envie."""
        from src.mechanisms.social_welfare import swap_dictatorial
        result = swap_dictatorial(inst)
        assert min(result.per_bidder_utility) >= Fraction(1, 2)
        assert 2 * result.sw >= optimal_social_welfare(inst)
        assert max_envy(inst, result.allocation) == 0

    @PROPERTY_SETTINGS
    @given(two_bidders)
    def test_hybrid_guarantees(self, inst):
        """Hybride : SW/SW(PF) ≥ plancher ≥ 2/3, SW/SW* ≥ 0.622, sans envie."""
        from src.mechanisms.social_welfare import hybrid, hybrid_pf_ratio_floor
        result = hybrid(inst)
        u_a, u_b = result.pf.utilities
        pf_ratio = result.sw / (u_a + u_b)
        assert pf_ratio >= hybrid_pf_ratio_floor(u_a, u_b) >= Fraction(2, 3)
        assert result.sw / optimal_social_welfare(inst) >= HYBRID_SW_BOUND
        assert max_envy(inst, result.allocation) == 0

    @settings(max_examples=15, deadline=None)
    @given(instances(items=st.integers(2, 3), top=6))
    def test_partial_allocation_truthful(self, inst):
        """PA : aucune déviation profitable sur la grille."""
        from src.mechanisms.social_welfare import partial_allocation
        from src.verification.truthfulness import check_truthfulness
        assert check_truthfulness(partial_allocation, inst).truthful_on_grid


# =============================================================================
# PROPRIÉTÉS DES MÉCANISMES À DEUX OBJETS
# =============================================================================

class TestTwoItemProperties:
    """SI, 2×2 et 3×2 : bornes de ρ et véracité."""

    @PROPERTY_SETTINGS
    @given(two_items)
    def test_single_item_bound(self, inst):
        """SI : ρ ≥ n/(n+1)."""
        from src.mechanisms.two_item import si_mechanism
        assert si_mechanism(inst).rho >= Fraction(inst.n, inst.n + 1)

    @PROPERTY_SETTINGS
    @given(instances(items=st.just(2)))
    def test_two_bidder_bound(self, inst):
        """2×2 : ρ ≥ 2(√2−1)."""
        from src.mechanisms.two_item import two_bidder_two_item
        assert two_bidder_two_item(inst).rho >= TWO_BIDDER_BOUND

    @PROPERTY_SETTINGS
    @given(instances(bidders=st.just(3), items=st.just(2)))
    def test_three_bidder_bound(self, inst):
        """3×2 : ρ ≥ (12−√12)/11."""
        from src.mechanisms.two_item import three_bidder_two_item
        assert three_bidder_two_item(inst).rho >= THREE_BIDDER_BOUND

    @settings(max_examples=20, deadline=None)
    @given(instances(bidders=st.integers(2, 4), items=st.just(2), top=8))
    def test_single_item_truthful(self, inst):
        """SI : aucune offre (v, 1) de la grille ne rapporte."""
        from src.mechanisms.two_item import si_mechanism
        from src.verification.truthfulness import check_truthfulness, two_item_bids
        grid = [Fraction(k, 4) for k in range(1, 25)]
        deviations = {i: two_item_bids(grid) for i in range(inst.n)}
        assert check_truthfulness(si_mechanism, inst, deviations).truthful_on_grid


# =============================================================================
# PROPRIÉTÉS DE SDM
# =============================================================================

class TestSDMProperties:
    """Invariants de SDM sur de petites instances."""

    @PROPERTY_SETTINGS
    @given(instances(bidders=st.integers(1, 6), items=st.integers(1, 3), top=9))
    def test_final_state(self, inst):
        """Tout le monde est apparié sur un objet MBB, prix ≥ 1, appariés croissants."""
        from src.sdm.graph import mbb_items
        from src.sdm.mechanism import run_sdm
        outcome = run_sdm(inst, with_benchmark=False)
        assert all(q >= 1 for q in outcome.prices)
        assert None not in outcome.assignment
        for i, j in enumerate(outcome.assignment):
            assert j in mbb_items(inst.row(i), outcome.prices)
        for j, total in enumerate(outcome.allocation.column_sums()):
            assert total <= 1
        counts = outcome.statistics.matched_after_step1
        assert counts == sorted(counts)
        assert outcome.statistics.longest_full_growth_run <= min(inst.n, inst.m)

    @PROPERTY_SETTINGS
    @given(instances(bidders=st.integers(1, 6), items=st.integers(1, 2), top=9))
    def test_price_rounding_and_guarantee(self, inst):
        """PF exact (m ≤ 2) : q ≤ f·p* et ρ ≥ min p*/⌈p*⌉, sans tolérance."""
        from src.sdm.mechanism import price_rounding_factor, run_sdm, sdm_guarantee
        outcome = run_sdm(inst)
        pf_prices = outcome.result.pf.prices
        factor = price_rounding_factor(pf_prices)
        for q, p_star in zip(outcome.prices, pf_prices):
            if p_star > 0:
                assert q <= factor * p_star
        assert outcome.result.rho >= sdm_guarantee(pf_prices)

    @PROPERTY_SETTINGS
    @given(instances(bidders=st.integers(2, 5), items=st.integers(1, 3), top=9), st.data())
    def test_two_phase_equivalence(self, inst, data):
        """Exécution en deux phases : mêmes prix et mêmes utilités que l'exécution directe."""
        from src.sdm.mechanism import run_sdm, run_sdm_two_phase
        bidder = data.draw(st.integers(0, inst.n - 1))
        direct = run_sdm(inst, with_benchmark=False)
        two_phase = run_sdm_two_phase(inst, bidder, with_benchmark=False)
        assert two_phase.prices == direct.prices
        for i in range(inst.n):
            assert inst.utility(i, two_phase.allocation.row(i)) == inst.utility(i, direct.allocation.row(i))

    @settings(max_examples=15, deadline=None)
    @given(instances(bidders=st.integers(2, 4), items=st.integers(2, 3), top=6))
    def test_truthful_on_grid(self, inst):
        """SDM : aucune déviation profitable sur la grille."""
        from src.sdm.mechanism import sdm_allocation
        from src.verification.truthfulness import check_truthfulness
        assume(inst.n * inst.m <= 9)
        assert check_truthfulness(sdm_allocation, inst).truthful_on_grid

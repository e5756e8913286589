"""
Sous-commandes de la ligne de commande fairdiv.

    pf <file>                               solution PF + contrôle d'équilibre
    run --mechanism M <file>                rapport JSON d'un mécanisme
    verify --mechanism M --trials T --seed S  campagne + témoins
    gen --family F --n N --m M --seed S     instance aléatoire (JSON)
    bench                                   tableau des bornes garanties

Codes de sortie : 0 succès, 1 contrôle en échec, 2 usage/forme/fichier,
3 erreur interne, 130 interruption.
"""

import argparse
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

from loguru import logger

import sys
sys.path.insert(0, str(__file__).rsplit("src", 1)[0])

from config.settings import (
    BENCH_TRIALS,
    DEFAULT_SEED,
    RATIO_TOLERANCE,
    VERIFY_TRIALS,
    VERIFY_WORKERS,
    WITNESS_DIR,
)
from src.cli.instance_io import parse_instance, serialize_instance, write_instance
from src.cli.reports import (
    Check,
    bench_table,
    build_report,
    equilibrium_checks,
    guarantee_checks,
    render_number,
    render_report,
)
from src.core.errors import FairDivisionError, InstanceParseError, ShapeError
from src.core.model import optimal_social_welfare
from src.core.rational import PF_SW_BOUND
from src.mechanisms.registry import MECHANISMS, get_mechanism, mechanism_names
from src.mechanisms.social_welfare import pf_mechanism, swap_dictatorial
from src.pf.equilibrium import verify_equilibrium
from src.pf.solver import reference_pf
from src.pf.two_bidder import tight_welfare_instance
from src.verification.campaign import check_guarantees, instance_metrics, worst_case_search
from src.verification.generators import epsilon_instance, family_names, generate_seeded
from src.verification.truthfulness import check_truthfulness

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3
EXIT_INTERRUPTED = 130


@dataclass(frozen=True)
class CommandOutcome:
    exit_code: int
    text: str = ""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairdiv", description="Mécanismes d'allocation véridiques sans monnaie")
    parser.add_argument("--decimal", type=int, default=None, metavar="K",
                        help="affiche les nombres avec K décimales au lieu de p/q")
    parser.add_argument("--out", type=str, default=None, help="écrit le rapport dans ce fichier")
    commands = parser.add_subparsers(dest="command", required=True)

    pf = commands.add_parser("pf", help="calcule l'allocation PF et vérifie l'équilibre")
    pf.add_argument("file")

    run = commands.add_parser("run", help="exécute un mécanisme sur une instance")
    run.add_argument("--mechanism", "-M", required=True, choices=mechanism_names())
    run.add_argument("file")

    verify = commands.add_parser("verify", help="campagne de pire cas pour un mécanisme")
    verify.add_argument("--mechanism", "-M", required=True, choices=mechanism_names())
    verify.add_argument("--trials", "-T", type=int, default=VERIFY_TRIALS)
    verify.add_argument("--seed", "-S", type=int, default=DEFAULT_SEED)
    verify.add_argument("--family", "-F", choices=family_names(), default=None)
    verify.add_argument("--n", type=int, default=None)
    verify.add_argument("--m", type=int, default=None)
    verify.add_argument("--workers", type=int, default=VERIFY_WORKERS)
    verify.add_argument("--witness-dir", type=str, default=str(WITNESS_DIR))
    verify.add_argument("--no-truthfulness", action="store_true",
                        help="ne cherche pas de déviation sur le pire témoin")
    verify.add_argument("--progress", action="store_true")

    gen = commands.add_parser("gen", help="génère une instance aléatoire")
    gen.add_argument("--family", "-F", required=True, choices=family_names())
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--m", type=int, required=True)
    gen.add_argument("--seed", "-S", type=int, default=DEFAULT_SEED)

    bench = commands.add_parser("bench", help="tableau des bornes garanties")
    bench.add_argument("--seed", "-S", type=int, default=DEFAULT_SEED)
    bench.add_argument("--trials", "-T", type=int, default=BENCH_TRIALS)
    bench.add_argument("--progress", action="store_true")
    return parser


# =============================================================================
# SOUS-COMMANDES
# =============================================================================

def _cmd_pf(args) -> CommandOutcome:
    inst = parse_instance(args.file)
    solution = reference_pf(inst)
    equilibrium = verify_equilibrium(inst, solution, tol=0 if solution.exact else RATIO_TOLERANCE)
    report = build_report(
        "pf", inst, solution.allocation, solution.prices, Fraction(1), sum(solution.utilities),
        equilibrium_checks(equilibrium), args.decimal,
    )
    return CommandOutcome(EXIT_OK if report.passed else EXIT_CHECK_FAILED, render_report(report))


def _cmd_run(args) -> CommandOutcome:
    inst = parse_instance(args.file)
    entry = get_mechanism(args.mechanism)
    entry.check_shape(inst.n, inst.m)
    measure = instance_metrics(args.mechanism, inst)
    checks = guarantee_checks(check_guarantees(entry.guarantees, measure.metrics, inst.n), args.decimal)
    if measure.extras.get("below_unit_price"):
        checks.append(Check(name="sdm guarantee applicable", passed=True,
                            detail="a PF price is below 1, the SDM bound is vacuous"))
    result = measure.result
    report = build_report(args.mechanism, inst, result.allocation, measure.prices,
                          result.rho, result.sw, checks, args.decimal)
    return CommandOutcome(EXIT_OK if report.passed else EXIT_CHECK_FAILED, render_report(report))


def _cmd_verify(args) -> CommandOutcome:
    report = worst_case_search(
        args.mechanism, family=args.family, trials=args.trials, seed=args.seed,
        n=args.n, m=args.m, workers=args.workers, progress=args.progress,
    )
    lines: List[str] = []
    witness_dir = Path(args.witness_dir)
    records = report.records.set_index("trial")
    written = {}
    for label, witness in (("rho", report.worst_rho), ("sw", report.worst_sw)):
        if witness is None:
            continue
        index, inst = witness
        if index not in written:
            name = f"{args.mechanism}-seed{args.seed}-trial{index}.json"
            written[index] = write_instance(inst, witness_dir / name)
        row = records.loc[index]
        lines.append(
            f"mechanism={args.mechanism} seed={args.seed} trial={index} worst={label} "
            f"rho={row['rho']:.9f} sw_ratio={row['sw_ratio']:.9f} witness={written[index]}"
        )
    failed = not report.passed
    for check in report.checks:
        measured = "n/a" if check.measured is None else render_number(check.measured, args.decimal or 9)
        lines.append(
            f"check={check.metric} bound={float(check.bound):.9f} measured={measured} "
            f"status={'PASS' if check.passed else 'FAIL'}"
        )

    entry = get_mechanism(args.mechanism)
    if entry.truthful and not args.no_truthfulness and report.worst_rho is not None:
        truth = check_truthfulness(entry.allocation, report.worst_rho[1])
        lines.append(
            f"truthfulness trial={report.worst_rho[0]} deviations={truth.deviations_checked} "
            f"max_gain={float(truth.max_gain):.3e} status={'PASS' if truth.truthful_on_grid else 'FAIL'}"
        )
        failed = failed or not truth.truthful_on_grid
    return CommandOutcome(EXIT_CHECK_FAILED if failed else EXIT_OK, "\n".join(lines))


def _cmd_gen(args) -> CommandOutcome:
    inst = generate_seeded(args.family, args.n, args.m, args.seed)
    return CommandOutcome(EXIT_OK, serialize_instance(inst))


def _tight_rows() -> List[dict]:
    """Instances construites où la borne est (presque) atteinte."""
    rows = []
    tight = tight_welfare_instance()
    ratio = pf_mechanism(tight).sw / optimal_social_welfare(tight)
    rows.append({
        "mechanism": "pf", "shape": "2x3", "trials": 1, "metric": "tight_sw_ratio",
        "bound": f"{float(PF_SW_BOUND):.6f}", "measured": f"{float(ratio):.6f}",
        "status": "PASS" if abs(float(ratio) - float(PF_SW_BOUND)) <= RATIO_TOLERANCE else "FAIL",
    })
    eps = Fraction(1, 1000)
    inst = epsilon_instance(eps)
    ratio = swap_dictatorial(inst).sw / optimal_social_welfare(inst)
    rows.append({
        "mechanism": "swap", "shape": "2x4", "trials": 1, "metric": "epsilon_sw_ratio",
        "bound": f"{0.5:.6f}", "measured": f"{float(ratio):.6f}",
        "status": "PASS" if Fraction(1, 2) <= ratio <= Fraction(1, 2) + 10 * eps else "FAIL",
    })
    return rows


def _cmd_bench(args) -> CommandOutcome:
    rows = []
    for name, entry in MECHANISMS.items():
        report = worst_case_search(name, trials=args.trials, seed=args.seed, progress=args.progress)
        for check in report.checks:
            rows.append({
                "mechanism": name,
                "shape": f"{report.n}x{report.m}",
                "trials": report.trials,
                "metric": check.metric,
                "bound": f"{float(check.bound):.6f}",
                "measured": "n/a" if check.measured is None else f"{float(check.measured):.6f}",
                "status": "PASS" if check.passed else "FAIL",
            })
    rows.extend(_tight_rows())
    failed = any(row["status"] != "PASS" for row in rows)
    return CommandOutcome(EXIT_CHECK_FAILED if failed else EXIT_OK, bench_table(rows))


COMMANDS = {
    "pf": _cmd_pf,
    "run": _cmd_run,
    "verify": _cmd_verify,
    "gen": _cmd_gen,
    "bench": _cmd_bench,
}


def run_command(args: argparse.Namespace) -> CommandOutcome:
    """
    Exécute une sous-commande et traduit les erreurs en codes de sortie.

    Le texte produit est écrit dans --out si demandé (il est alors aussi renvoyé).
    """
    try:
        outcome = COMMANDS[args.command](args)
    except KeyboardInterrupt:
        logger.warning("Interrompu")
        return CommandOutcome(EXIT_INTERRUPTED)
    except (ShapeError, InstanceParseError, KeyError, OSError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return CommandOutcome(EXIT_USAGE)
    except FairDivisionError as e:
        if isinstance(e, ValueError):
            logger.error(f"{type(e).__name__}: {e}")
            return CommandOutcome(EXIT_USAGE)
        logger.exception(f"Erreur interne : {e}")
        return CommandOutcome(EXIT_INTERNAL)
    except Exception as e:
        logger.exception(f"Erreur interne inattendue : {e}")
        return CommandOutcome(EXIT_INTERNAL)

    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(outcome.text + "\n", encoding="utf-8")
        logger.info(f"💾 Rapport écrit : {out}")
    return outcome


def main(argv: Optional[Sequence[str]] = None) -> CommandOutcome:
    args = build_parser().parse_args(argv)
    return run_command(args)

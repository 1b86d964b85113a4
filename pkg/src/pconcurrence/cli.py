"""Command-line frontend.

Subcommands: measure, sweep, path, simulate, reconstruct, witness, budget.
States, tomography records and witness reports travel as JSON; sweeps are
CSV. Every command is deterministic given its arguments (including the
seed), so re-runs produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .measures import (
    MEASURE_NAMES,
    eof_pure,
    evaluate_measure,
    fidelity_to_ket,
    i_concurrence,
    normalize_measure,
    purity,
    uhlmann_fidelity,
    wootters_concurrence,
)
from .states import (
    BipartiteKet,
    DensityMatrix,
    SpdcParams,
    as_density,
    density_from_ket,
    load_state,
    make_max_entangled,
    make_spdc_qutrit,
    save_state,
)
from .tomography import (
    TomographyRecord,
    budget,
    budget_to_dict,
    extract_sub_tomography,
    frequencies,
    joint_settings,
    load_record,
    mub_ket_labels,
    mub_kets,
    pairwise_ket_labels,
    pairwise_overcomplete_kets,
    qubit_setting_kets,
    reconstruct_linear,
    reconstruct_mle,
    save_record,
    simulate_counts,
)
from .witness import (
    SubspacePairing,
    SubspaceRow,
    WitnessReport,
    enumerate_pairs,
    identity_pairing,
    maximize_over_pairings,
    pconcurrence_known,
    pconcurrence_search,
    report_to_dict,
)

SWEEP_HEADER = "alpha,beta,pconcurrence,eof_norm,iconcurrence_norm"


def _fmt(x: float) -> str:
    """Shortest round-trip decimal form (lossless to re-parse)."""
    return repr(float(x))


def _write_text(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _load_input(path: str) -> BipartiteKet | DensityMatrix | TomographyRecord:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(obj, dict) and "settings" in obj:
        return load_record(path)
    return load_state(path)


def _sweep_row(alpha: float, beta: float) -> tuple[float, float, float]:
    ket = make_spdc_qutrit(SpdcParams(alpha, beta))
    report = pconcurrence_known(density_from_ket(ket), identity_pairing(3))
    eof_n = normalize_measure(eof_pure(ket), "eof", 3)
    iconc_n = normalize_measure(i_concurrence(ket), "i_concurrence", 3)
    return report.pconcurrence, eof_n, iconc_n


def _sweep_csv(rows: list[tuple[float, float, float, float, float]]) -> str:
    lines = [SWEEP_HEADER]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def cmd_measure(args: argparse.Namespace) -> int:
    state = _load_input(args.state_file)
    if isinstance(state, TomographyRecord):
        raise ValueError("measure expects a state file, not a tomography record")
    value = evaluate_measure(state, args.measure, args.normalize_dim)
    payload = {
        "measure": value.measure_name,
        "raw": value.raw,
        "normalized": value.normalized,
        "normalize_dim": args.normalize_dim or min(state.dim_a, state.dim_b),
    }
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(f"{value.measure_name}: raw = {value.raw:.12g}, normalized = {value.normalized:.12g}")
    if args.out:
        _write_text(args.out, json.dumps(payload, indent=2) + "\n")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.grid_n < 2:
        raise ValueError(f"grid-n must be >= 2, got {args.grid_n}")
    rows = []
    for i in range(args.grid_n + 1):
        for j in range(args.grid_n + 1):
            alpha = i / args.grid_n
            beta = j / args.grid_n
            p, e, c = _sweep_row(alpha, beta)
            rows.append((alpha, beta, p, e, c))
    _write_text(args.out, _sweep_csv(rows))
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def cmd_path(args: argparse.Namespace) -> int:
    if args.grid_n < 2:
        raise ValueError(f"grid-n must be >= 2, got {args.grid_n}")
    rows = []
    for i in range(args.grid_n + 1):
        alpha = i / args.grid_n
        p, e, c = _sweep_row(alpha, 1.0)
        rows.append((alpha, 1.0, p, e, c))
    _write_text(args.out, _sweep_csv(rows))
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _settings_for(choice: str, dim_a: int, dim_b: int):
    if choice == "qubit36":
        if (dim_a, dim_b) != (2, 2):
            raise ValueError("qubit36 settings need a 2x2 state")
        kets = qubit_setting_kets()
        labels = pairwise_ket_labels(2)
        return joint_settings(kets, kets, labels, labels)
    if choice == "pairwise":
        ka, kb = pairwise_overcomplete_kets(dim_a), pairwise_overcomplete_kets(dim_b)
        la, lb = pairwise_ket_labels(dim_a), pairwise_ket_labels(dim_b)
        return joint_settings(ka, kb, la, lb)
    if choice == "mub":
        ka, kb = mub_kets(dim_a), mub_kets(dim_b)
        la, lb = mub_ket_labels(dim_a), mub_ket_labels(dim_b)
        return joint_settings(ka, kb, la, lb)
    raise ValueError(f"unknown settings choice {choice!r}")


def cmd_simulate(args: argparse.Namespace) -> int:
    state = _load_input(args.state_file)
    if isinstance(state, TomographyRecord):
        raise ValueError("simulate expects a state file, not a tomography record")
    rho = as_density(state)
    settings = _settings_for(args.settings, rho.dim_a, rho.dim_b)
    record = simulate_counts(rho, settings, args.rate_hz, args.time_s, seed=args.seed)
    save_record(args.out, record)
    print(f"wrote {len(settings)} settings with counts to {args.out}")
    return 0


def cmd_reconstruct(args: argparse.Namespace) -> int:
    record = load_record(args.record_file)
    rho = reconstruct_linear(record) if args.method == "linear" else reconstruct_mle(record)
    save_state(args.out, rho)
    print(f"reconstructed ({args.method}) -> {args.out}")
    print(f"purity: {purity(rho):.6f}")
    if args.target:
        target = load_state(args.target)
        fid = uhlmann_fidelity(rho, as_density(target))
        print(f"fidelity to target: {fid:.6f}")
    return 0


def _print_report(report: WitnessReport) -> None:
    print(f"{'subspace':<26} {'concurrence':>11} {'fidelity':>9} {'weight':>8}")
    for row in report.subspace_rows:
        label = f"{{{row.a.lo},{row.a.hi}}}_A x {{{row.b.lo},{row.b.hi}}}_B"
        print(f"{label:<26} {row.concurrence:>11.2f} {row.fidelity:>9.2f} {row.weight:>8.3f}")
    print(f"{'pconcurrence (' + report.search_mode + ')':<26} {report.pconcurrence:>11.2f}")


def _score_sub_record(record: TomographyRecord, a, b) -> SubspaceRow:
    sub_record = extract_sub_tomography(record, a, b)
    rho2 = reconstruct_mle(sub_record)
    # Sector weight estimate: the 36 subspace projectors sum to 9 I, so the
    # total frequency is 9x the sector weight.
    weight = float(frequencies(sub_record).sum() / 9.0)
    return SubspaceRow(
        a,
        b,
        concurrence=wootters_concurrence(rho2),
        fidelity=fidelity_to_ket(rho2, make_max_entangled(2)),
        weight=weight,
    )


def _witness_from_record(record: TomographyRecord, mode: str) -> WitnessReport:
    """Per-subspace extraction + MLE reconstruction, then score and pair."""
    if record.dim_a != record.dim_b:
        raise ValueError("witness needs equal side dimensions")
    pairs = enumerate_pairs(record.dim_a)
    if mode == "known":
        rows = tuple(_score_sub_record(record, a, a) for a in pairs)
        prod = 1.0
        for r in rows:
            prod *= r.concurrence
        return WitnessReport(rows, prod, SubspacePairing(tuple((r.a, r.b) for r in rows)), "known")
    table = [[_score_sub_record(record, a, b) for b in pairs] for a in pairs]
    return maximize_over_pairings(table)


def cmd_witness(args: argparse.Namespace) -> int:
    source = _load_input(args.input_file)
    if isinstance(source, TomographyRecord):
        report = _witness_from_record(source, args.pairing)
    else:
        rho = as_density(source)
        if args.pairing == "known":
            report = pconcurrence_known(rho, identity_pairing(rho.dim_a))
        else:
            report = pconcurrence_search(rho, mode="auto")
    _print_report(report)
    if args.out:
        _write_text(args.out, json.dumps(report_to_dict(report), indent=2) + "\n")
    return 0


def cmd_budget(args: argparse.Namespace) -> int:
    b = budget(args.d, args.time_s)
    payload = budget_to_dict(b)
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(f"d = {b.d}, K = {b.k} qubit subspaces")
        print(
            f"subspace route: {b.pconc_measurements:>6} measurements, "
            f"{b.pconc_time_s / 3600:.1f} h at {args.time_s:g} s each"
        )
        print(
            f"full QST:       {b.qst_measurements:>6} measurements, "
            f"{b.qst_time_s / 3600:.1f} h at {args.time_s:g} s each"
        )
    if args.out:
        _write_text(args.out, json.dumps(payload, indent=2) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pconc",
        description="Subspace-concurrence entanglement witness toolkit for bipartite qudits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="evaluate an entanglement measure on a state file")
    p.add_argument("state_file")
    p.add_argument("--measure", choices=MEASURE_NAMES, required=True)
    p.add_argument("--normalize-dim", type=int, default=None, dest="normalize_dim")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("sweep", help="alpha-beta grid of the qutrit family measures (CSV)")
    p.add_argument("--grid-n", type=int, required=True, dest="grid_n")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("path", help="alpha path at beta = 1 (CSV)")
    p.add_argument("--grid-n", type=int, required=True, dest="grid_n")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("simulate", help="simulate coincidence counts for a state")
    p.add_argument("state_file")
    p.add_argument("--settings", choices=("qubit36", "pairwise", "mub"), default="pairwise")
    p.add_argument("--rate-hz", type=float, default=1000.0, dest="rate_hz")
    p.add_argument("--time-s", type=float, default=10.0, dest="time_s")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reconstruct", help="fit a density matrix to a tomography record")
    p.add_argument("record_file")
    p.add_argument("--method", choices=("linear", "mle"), default="mle")
    p.add_argument("--target", default=None, help="state file to report fidelity against")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("witness", help="per-subspace concurrence table and product")
    p.add_argument("input_file", help="state file, or tomography record for the full pipeline")
    p.add_argument("--pairing", choices=("known", "search"), default="known")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("budget", help="measurement budget: subspace route vs full QST")
    p.add_argument("d", type=int)
    p.add_argument("--time-s", type=float, default=10.0, dest="time_s")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_budget)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

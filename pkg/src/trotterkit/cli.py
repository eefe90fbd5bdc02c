"""Command-line front end.

Subcommands cover model construction, bound evaluation, trajectory runs,
worst-case state construction, shadow collection, the adaptive protocol, the
figure-style experiments, and the golden-file suite.  Exit codes: 0 success,
1 golden-data regression, 2 error.

Heavy imports happen after argument parsing so ``--threads`` can pin the
BLAS pool through the environment before the numerics load.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trotterkit",
        description="Product-formula simulation with entanglement-aware error bounds",
    )
    parser.add_argument("--threads", type=int, default=None,
                        help="BLAS thread count (set before numerics load)")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("model", "build a Hamiltonian split and write its parts as text"),
        ("bound", "evaluate the bound families on a trajectory state"),
        ("evolve", "run a product-formula trajectory and record errors"),
        ("worstcase", "construct the worst-case product state"),
        ("shadows", "collect randomized measurements and estimate the error"),
        ("adaptive", "run the measurement-assisted adaptive protocol"),
        ("fig1", "entropy / per-step error co-trajectory"),
        ("fig4", "theoretical bound curves and adaptive step sweep"),
        ("fig5", "minimal step counts across bound families"),
        ("suite", "run a directory of configs against golden data"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True,
                       help="JSON config file (directory for `suite`)")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--big-dense", action="store_true",
                       help="allow dense operator-norm work above 10 qubits")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.threads is not None:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(args.threads)
    try:
        return _dispatch(args)
    except BrokenPipeError:
        return 0
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    from . import harness
    from .harness import ExperimentConfig, output_dir

    if args.command == "suite":
        report = harness.run_suite(args.config, out=args.out)
        print(report.summary())
        return report.exit_code

    cfg = ExperimentConfig.from_file(args.config)
    if args.seed is not None:
        cfg.raw["seed"] = args.seed
    out = Path(args.out) if args.out else output_dir(cfg)
    out.mkdir(parents=True, exist_ok=True)

    if args.command in ("fig1", "fig4", "fig5"):
        if args.command == "fig1":
            paths = [harness.run_fig1(cfg, out=out)]
        elif args.command == "fig4":
            paths = harness.run_fig4(cfg, out=out)
        else:
            paths = [harness.run_fig5(cfg, out=out, big_dense=args.big_dense or None)]
        for p in paths:
            print(p)
        return 0

    return _run_single(args.command, cfg, out, big_dense=args.big_dense)


def _run_single(command: str, cfg, out: Path, big_dense: bool = False) -> int:
    import numpy as np

    from .adaptive import AdaptivePlan, run_adaptive
    from .bounds import (
        SplitBoundData,
        average_case_bound,
        distance_based_bound,
        entanglement_based_bound,
        leading_error_terms,
        pf1_concrete_bound,
        pf2_concrete_bound,
        purity_based_bound,
        qimf_counting_norms,
        refined_pauli_bound,
        worst_case_bound,
    )
    from .formulas import FormulaSpec, record_trajectory
    from .harness import TYPICAL_QIMF, build_model
    from .shadows import collect_shadows, estimate_trotter_error, save_shadows
    from .states import ExactEvolver, export_state, zero_state
    from .worstcase import (
        build_worst_case_state,
        check_worst_case_conditions,
        leading_error_operator,
    )

    split = build_model(cfg)
    n = cfg["n"]
    seed = cfg.get("seed", 0)

    if command == "model":
        for i, part in enumerate(split.parts):
            label = chr(ord("A") + i)
            path = out / f"hamiltonian_part_{label}.pauli"
            path.write_text(part.to_text())
            print(f"{path}  ({len(part)} terms, "
                  f"commuting={split.within_part_commuting[i]})")
        return 0

    if command == "worstcase":
        order = cfg.get("order", 1)
        e = leading_error_operator(split, order)
        sum_a, sum_b, ok = check_worst_case_conditions(e)
        built = build_worst_case_state(e)
        export_state(built.state(), out / "worst_case_state.c64",
                     seed_provenance=f"worstcase order={order} config={cfg.hash()}")
        descriptor = {
            "single_qubit_stabilizers": list(built.single_qubit_stabilizers),
            "stabilizer_strings": [
                {"coefficient": t.coefficient.real, "letters": dict(t.letters)}
                for t in built.stab_terms
            ],
            "positive_mass": sum_a,
            "negative_mass": sum_b,
            "conditions_satisfied": ok,
        }
        (out / "worst_case_state.json").write_text(json.dumps(descriptor, indent=1))
        print(f"conditions satisfied: {ok} (sum_a={sum_a:.4g}, sum_b={sum_b:.4g})")
        print(out / "worst_case_state.c64")
        return 0

    ev = ExactEvolver(split.hamiltonian())

    if command == "bound":
        order = cfg.get("order", 2)
        dt = cfg.get("dt", 1e-3)
        t = cfg.get("t", 0.0)
        psi = ev.evolve(zero_state(n), t) if t else zero_state(n)
        data = SplitBoundData(split)
        reports = []
        concrete = pf1_concrete_bound if order == 1 else pf2_concrete_bound
        rep = concrete(split, psi, dt, data)
        rep.state_descriptor, rep.time = "exact_trajectory", t
        reports.append(("concrete", rep))
        for ets in leading_error_terms(split, order):
            for fn in (distance_based_bound, entanglement_based_bound,
                       purity_based_bound):
                r = fn(ets, psi, dt)
                r.state_descriptor, r.time = f"exact_trajectory {ets.label}", t
                reports.append((f"{fn.__name__}:{ets.label}", r))
            r = refined_pauli_bound(ets, psi, dt)
            r.state_descriptor, r.time = f"exact_trajectory {ets.label}", t
            reports.append((f"refined:{ets.label}", r))
        doc = {
            "config_hash": cfg.hash(),
            "worst_case": worst_case_bound(split, order, dt, data),
            "average_case": average_case_bound(split, order, dt, data),
            "reports": {name: json.loads(rep.to_json()) for name, rep in reports},
        }
        if cfg.get("model", "qimf") == "qimf":
            p = {**TYPICAL_QIMF, **cfg.get("params", {})}
            doc["counting_surface"] = qimf_counting_norms(n, p["hx"], p["hy"], p["j"])
        path = out / "bounds.json"
        path.write_text(json.dumps(doc, indent=1))
        print(path)
        return 0

    if command == "evolve":
        order = cfg.get("order", 2)
        dt = cfg.get("dt", 0.05)
        steps = cfg.get("steps", int(round(cfg.get("t", 1.0) / dt)))
        rec = record_trajectory(FormulaSpec(order, split), zero_state(n), dt, steps, ev)
        rec.write_csv(out / "trajectory.csv")
        print(out / "trajectory.csv")
        return 0

    if command == "shadows":
        t = cfg.get("t", 1.0)
        m = cfg.get("m_shots", 64 * n * n)
        order = cfg.get("order", 2)
        dt = cfg.get("dt", 1e-3)
        psi = ev.evolve(zero_state(n), t)
        shadows = collect_shadows(psi, m, seed, source_descriptor=f"t={t:g}")
        save_shadows(shadows, out / "snapshots.shadows")
        from .shadows import exact_error_second_moment

        for ets in leading_error_terms(split, order):
            est = estimate_trotter_error(shadows, ets, dt)
            exact = dt ** (ets.order + 1) * np.sqrt(exact_error_second_moment(ets, psi))
            print(f"{ets.label}: estimate {est.value:.6g} exact {exact:.6g} "
                  f"(stderr {est.stderr:.3g})")
        print(out / "snapshots.shadows")
        return 0

    if command == "adaptive":
        t = cfg.get("t", float(n))
        epsilon = cfg.get("epsilon", 1e-5)
        if "checkpoints" in cfg.raw:
            plan = AdaptivePlan(t, epsilon, tuple(cfg["checkpoints"]),
                                shots_per_checkpoint=cfg.get("m_shots"),
                                exact_expectations=cfg.get("exact_expectations", False))
        else:
            n_cp = cfg.get("t_uniform", [2])[0]
            plan = AdaptivePlan.uniform(t, epsilon, n_cp,
                                        shots_per_checkpoint=cfg.get("m_shots"),
                                        exact_expectations=cfg.get("exact_expectations", False))
        res = run_adaptive(split, zero_state(n), plan, rng_seed=seed)
        res.write_audit(out / "adaptive_audit.jsonl")
        (out / "adaptive_plan.json").write_text(res.plan_json())
        line = f"total steps: {res.total_steps}"
        if n <= 12:
            err = ev.evolve(zero_state(n), t).distance(res.final_state)
            line += f"; end-state error {err:.3e} (budget {epsilon:g})"
        print(line)
        print(out / "adaptive_plan.json")
        return 0

    raise ValueError(f"unhandled command {command!r}")


if __name__ == "__main__":
    sys.exit(main())

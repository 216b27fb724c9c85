"""Command-line harness: vqe, adiabatic, estimate, and certify runs.

Configs are single JSON documents validated fail-closed (unknown keys are
rejected with their path).  All outputs are deterministic for a fixed
config and seed: JSON keys are sorted and floats are written with repr,
so reruns are byte-identical.

Exit codes: 0 success/converged, 1 config or IO error, 2 optimizer
budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import ansatz as _ansatz
from . import bounds as _bounds
from . import estimate as _estimate
from . import optimize as _optimize
from . import schedule as _schedule
from .errors import VqekitError
from .fermion import build_hamiltonian, jordan_wigner, load_integrals
from .pauli import PauliSum
from .rng import make_rng
from .simulator import StateVector, expectation_and_variance, ground_state

__all__ = ["main", "cmd_vqe", "cmd_adiabatic", "cmd_estimate", "cmd_certify"]


def _fail(msg: str):
    raise VqekitError(msg)


def _check_keys(d, where: str, required: set, optional: set = frozenset()):
    if not isinstance(d, dict):
        _fail(f"{where}: expected an object")
    unknown = set(d) - required - set(optional)
    if unknown:
        _fail(f"{where}: unknown keys {sorted(unknown)}")
    missing = required - set(d)
    if missing:
        _fail(f"{where}: missing keys {sorted(missing)}")


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _load_pauli_sum(source, base: Path, where: str) -> PauliSum:
    """A Hamiltonian is either a path to a JSON file or an inline object."""
    if isinstance(source, str):
        data = _load_json(str((base / source) if not Path(source).is_absolute() else source))
    elif isinstance(source, dict):
        data = source
    else:
        _fail(f"{where}: expected a path or an inline object")
    return PauliSum.from_json_dict(data)


def _load_state(spec, where: str) -> StateVector:
    _check_keys(spec, where, set(), {"label", "amplitudes"})
    if ("label" in spec) == ("amplitudes" in spec):
        _fail(f"{where}: give exactly one of label or amplitudes")
    if "label" in spec:
        return StateVector.from_label(spec["label"])
    amps = np.array([complex(re, im) for re, im in spec["amplitudes"]])
    return StateVector(amps)


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _csv_cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _out_dir(cfg: dict, override: str | None, base: Path) -> Path:
    out = override if override is not None else cfg.get("output_dir", ".")
    p = Path(out)
    if not p.is_absolute():
        p = base / p
    p.mkdir(parents=True, exist_ok=True)
    return p


def _seed_of(cfg: dict, override: int | None) -> int:
    if override is not None:
        return override
    if "seed" not in cfg:
        _fail("config: a seed is required")
    return int(cfg["seed"])


# ---------------------------------------------------------------- vqe


def _build_problem(cfg: dict, base: Path):
    _check_keys(cfg, "problem", set(), {"integrals", "hamiltonian"})
    if ("integrals" in cfg) == ("hamiltonian" in cfg):
        _fail("problem: give exactly one of integrals or hamiltonian")
    if "integrals" in cfg:
        path = Path(cfg["integrals"])
        if not path.is_absolute():
            path = base / path
        ints = load_integrals(str(path))
        h = jordan_wigner(build_hamiltonian(ints)).simplify()
        return h, ints
    return _load_pauli_sum(cfg["hamiltonian"], base, "problem.hamiltonian"), None


def _build_ansatz(cfg: dict, n_qubits: int):
    _check_keys(
        cfg,
        "ansatz",
        {"kind"},
        {"order", "occupied", "reference", "trotter_slices", "relaxed"},
    )
    kind = cfg["kind"]
    order = int(cfg.get("order", 2))
    if kind == "fermionic_ucc":
        if "occupied" not in cfg:
            _fail("ansatz: fermionic_ucc needs an occupied mode list")
        occ = [int(p) for p in cfg["occupied"]]
        virt = sorted(set(range(n_qubits)) - set(occ))
        gens = _ansatz.fermionic_ucc_generators(n_qubits, occ, virt, order)
        ref = _ansatz.ReferenceState.from_occupied(n_qubits, occ)
    elif kind == "spin_cluster":
        gens = _ansatz.spin_cluster_generators(n_qubits, order)
        ref = _reference_from_cfg(cfg, n_qubits)
    elif kind == "suquca":
        gens = _ansatz.suquca_generators(n_qubits, order)
        ref = _reference_from_cfg(cfg, n_qubits)
    else:
        _fail(f"ansatz: unknown kind {kind!r}")
    # Spin-cluster families lean on the repeated product for expressiveness;
    # the fermionic families do not need the extra depth at these sizes.
    default_slices = 2 if kind == "spin_cluster" else 1
    acfg = _ansatz.AnsatzConfig(
        generator_set=gens,
        trotter_slices=int(cfg.get("trotter_slices", default_slices)),
        relaxed=bool(cfg.get("relaxed", False)),
    )
    return ref, acfg


def _reference_from_cfg(cfg: dict, n_qubits: int) -> "_ansatz.ReferenceState":
    spec = cfg.get("reference")
    if spec is None:
        _fail("ansatz: this kind needs a reference")
    _check_keys(spec, "ansatz.reference", set(), {"label", "occupied"})
    if ("label" in spec) == ("occupied" in spec):
        _fail("ansatz.reference: give exactly one of label or occupied")
    if "label" in spec:
        label = spec["label"]
        if len(label) != n_qubits:
            _fail("ansatz.reference: label length does not match qubit count")
        return _ansatz.ReferenceState(n_qubits=n_qubits, basis_index=int(label, 2))
    return _ansatz.ReferenceState.from_occupied(n_qubits, spec["occupied"])


def _run_optimizer(cfg: dict, fn, x0, seed: int):
    _check_keys(
        cfg,
        "optimizer",
        set(),
        {"method", "tol", "max_evals", "restarts", "n_starts", "bounds"},
    )
    method = cfg.get("method", "nelder_mead")
    tol = float(cfg.get("tol", 1e-9))
    max_evals = int(cfg.get("max_evals", 400))
    restarts = int(cfg.get("restarts", 0))
    if method == "nelder_mead":
        return _optimize.nelder_mead(
            fn, x0, tol=tol, max_evals=max_evals, restarts=restarts
        )
    if method == "multistart":
        if "bounds" not in cfg:
            _fail("optimizer: multistart needs bounds")
        bounds = [(float(lo), float(hi)) for lo, hi in cfg["bounds"]]
        return _optimize.multistart(
            fn,
            bounds,
            n_starts=int(cfg.get("n_starts", 8)),
            rng=make_rng(seed),
            tol=tol,
            max_evals=max_evals,
            restarts=restarts,
        )
    _fail(f"optimizer: unknown method {method!r}")


def cmd_vqe(cfg: dict, out_override=None, seed_override=None, exact=False, base=Path(".")) -> int:
    _check_keys(
        cfg,
        "config",
        {"problem", "ansatz", "seed"},
        {"estimator", "optimizer", "output_dir", "gap"},
    )
    seed = _seed_of(cfg, seed_override)
    h, _ints = _build_problem(cfg["problem"], base)
    ref, acfg = _build_ansatz(cfg["ansatz"], h.n_qubits)

    est_cfg = cfg.get("estimator", {})
    _check_keys(
        est_cfg, "estimator", set(), {"mode", "epsilon", "truncation", "grouping"}
    )
    mode = "exact" if exact else est_cfg.get("mode", "exact")
    if mode not in ("exact", "frequentist", "bayesian"):
        _fail(f"estimator: unknown mode {mode!r}")
    epsilon = float(est_cfg.get("epsilon", 0.01))
    trunc_c = float(est_cfg.get("truncation", 0.0))
    grouping = est_cfg.get("grouping", "auto")

    preparations = 0
    if mode == "exact":
        h_meas = h

        def objective(theta):
            state = _ansatz.prepare_state(ref, acfg, theta)
            return expectation_and_variance(state, h)[0]

    else:
        h_meas, _kstar, per_term = _estimate.truncate_terms(h, epsilon, trunc_c)
        ref_state = ref.to_state()
        if grouping == "auto":
            plan = _estimate.build_groups(
                h_meas, _estimate.exact_covariances(h_meas, ref_state)
            )
        elif grouping == "singleton":
            plan = _estimate.MeasurementPlan(
                groups=tuple(
                    (i,)
                    for i, t in enumerate(h_meas.terms)
                    if not t.string.is_identity()
                )
            )
        else:
            _fail(f"estimator: unknown grouping {grouping!r}")
        n_groups = max(1, len(plan.groups))
        if math.isfinite(per_term):
            m_kept = sum(
                1 for t in h_meas.terms if not t.string.is_identity()
            )
            plan = plan.with_target(per_term * m_kept / n_groups)
        rng = make_rng(seed)

        def objective(theta):
            nonlocal preparations
            state = _ansatz.prepare_state(ref, acfg, theta)
            rep = _estimate.estimate_expectation(
                lambda: state, h_meas, plan, epsilon, mode=mode, rng=rng
            )
            preparations += rep.total_preparations
            return rep.value

    x0 = np.zeros(_ansatz.parameter_count(acfg))
    res = _run_optimizer(cfg.get("optimizer", {}), objective, x0, seed)

    final_state = _ansatz.prepare_state(ref, acfg, res.x)
    mean, var = expectation_and_variance(final_state, h)
    certs = {"mean": mean, "variance": var}
    lo, hi = _bounds.weinstein_interval(_bounds.BoundInputs(mean=mean, variance=var))
    certs["weinstein"] = [lo, hi]
    if "gap" in cfg:
        b = _bounds.BoundInputs(mean=mean, variance=var, gap=float(cfg["gap"]))
        try:
            certs["ground_overlap"] = _bounds.overlap_bound(b, "ground")
        except VqekitError as exc:
            certs["ground_overlap"] = None
            certs["ground_overlap_note"] = str(exc)

    out = _out_dir(cfg, out_override, base)
    result = {
        "final_energy": float(res.value),
        "parameters": [float(v) for v in res.x],
        "evaluations": res.evaluations,
        "converged": res.converged,
        "mode": mode,
        "epsilon": epsilon,
        "seed": seed,
        "total_preparations": preparations,
        "certificates": certs,
    }
    _write_json(out / "result.json", result)
    _write_csv(
        out / "trace.csv",
        ["evaluation", "value"],
        [(i, float(v)) for i, v in res.trace],
    )
    print(f"final energy {res.value!r} after {res.evaluations} evaluations")
    return 0 if res.converged else 2


# ---------------------------------------------------------- adiabatic


def cmd_adiabatic(cfg: dict, out_override=None, seed_override=None, base=Path(".")) -> int:
    _check_keys(
        cfg,
        "config",
        {"initial_hamiltonian", "problem_hamiltonian", "taus", "seed"},
        {
            "a_grid",
            "family",
            "objective",
            "steps",
            "n_switches",
            "output_dir",
        },
    )
    _seed_of(cfg, seed_override)
    h_i = _load_pauli_sum(cfg["initial_hamiltonian"], base, "initial_hamiltonian")
    h_p = _load_pauli_sum(cfg["problem_hamiltonian"], base, "problem_hamiltonian")
    grid_cfg = cfg.get("a_grid", {})
    _check_keys(grid_cfg, "a_grid", set(), {"start", "stop", "points"})
    a_grid = np.linspace(
        float(grid_cfg.get("start", 0.0)),
        float(grid_cfg.get("stop", 1.0)),
        int(grid_cfg.get("points", 1001)),
    )
    taus = [float(t) for t in cfg["taus"]]
    if not taus:
        _fail("config: taus must be nonempty")
    family = cfg.get("family", "spline")
    objective = cfg.get("objective", "energy")
    steps = cfg.get("steps")
    steps = int(steps) if steps is not None else None
    n_switches = int(cfg.get("n_switches", 2))

    levels = _schedule.spectrum_along_path(h_i, h_p, a_grid)
    spec_rows = [
        (float(a), *[float(v) for v in row]) for a, row in zip(a_grid, levels)
    ]
    spec_header = ["A"] + [f"level_{k}" for k in range(levels.shape[1])]

    path_rows = []
    traj_rows = []
    success_rows = []
    for tau in taus:
        base_rec = _schedule.baseline_record(h_i, h_p, tau, steps)
        opt_rec = _schedule.optimize_path(
            family,
            h_i,
            h_p,
            tau,
            steps=steps,
            objective=objective,
            n_switches=n_switches,
        )
        t_grid = np.linspace(0.0, tau, 201)
        lin_sched = _schedule.Schedule.linear(tau)
        opt_sched = _schedule.make_schedule(family, tau, np.asarray(opt_rec.params))
        for t, g in zip(t_grid, lin_sched.evaluate(t_grid)):
            path_rows.append((tau, "linear", float(t), float(g)))
        for t, g in zip(t_grid, opt_sched.evaluate(t_grid)):
            path_rows.append((tau, family, float(t), float(g)))
        for rec, name in ((base_rec, "linear"), (opt_rec, family)):
            for s, ov in zip(rec.trajectory_s, rec.trajectory_overlap):
                traj_rows.append((tau, name, float(s), float(ov)))
        success_rows.append(
            (
                tau,
                float(base_rec.success),
                float(opt_rec.success),
                " ".join(repr(p) for p in opt_rec.params),
            )
        )

    out = _out_dir(cfg, out_override, base)
    _write_csv(out / "spectrum.csv", spec_header, spec_rows)
    _write_csv(out / "path.csv", ["tau", "family", "t", "g"], path_rows)
    _write_csv(out / "trajectory.csv", ["tau", "family", "s", "overlap"], traj_rows)
    _write_csv(
        out / "success.csv",
        ["tau", "linear_success", "optimized_success", "optimized_params"],
        success_rows,
    )
    gaps = levels[:, 1] - levels[:, 0] if levels.shape[1] > 1 else None
    if gaps is not None:
        k = int(np.argmin(gaps))
        print(f"minimum spectral gap {float(gaps[k])!r} at A={float(a_grid[k])!r}")
    for row in success_rows:
        print(
            f"tau {row[0]!r}: linear success {row[1]!r}, "
            f"optimized ({family}) {row[2]!r}"
        )
    return 0


# ----------------------------------------------------------- estimate


def cmd_estimate(cfg: dict, out_override=None, seed_override=None, exact=False, base=Path(".")) -> int:
    _check_keys(
        cfg,
        "config",
        {"hamiltonian", "state", "seed"},
        {"epsilon", "mode", "plans", "truncation", "output_dir"},
    )
    seed = _seed_of(cfg, seed_override)
    h = _load_pauli_sum(cfg["hamiltonian"], base, "hamiltonian")
    state = _load_state(cfg["state"], "state")
    epsilon = float(cfg.get("epsilon", 0.1))
    mode = cfg.get("mode", "frequentist")
    trunc_c = float(cfg.get("truncation", 0.0))
    h_meas, k_star, _per_term = _estimate.truncate_terms(h, epsilon, trunc_c)

    plans_cfg = cfg.get("plans", "auto")
    plans: list[tuple[str, _estimate.MeasurementPlan]] = []
    if plans_cfg == "auto":
        cov = _estimate.exact_covariances(h_meas, state)
        plans.append(("auto", _estimate.build_groups(h_meas, cov)))
    else:
        for k, entry in enumerate(plans_cfg):
            _check_keys(entry, f"plans[{k}]", {"groups"}, {"name"})
            plan = _estimate.MeasurementPlan(
                groups=tuple(tuple(int(i) for i in g) for g in entry["groups"])
            )
            plans.append((entry.get("name", f"plan-{k + 1}"), plan))

    lines = []
    best = None
    for name, plan in plans:
        plan.validate_against(h_meas)
        n_exp = _estimate.expected_preparations(plan, state, h_meas, epsilon)
        coeff = n_exp * epsilon * epsilon
        lines.append(f"plan {name}: {len(plan.groups)} groups")
        dump = _estimate.format_plan(plan, h_meas)
        if dump:
            lines.append(dump)
        lines.append(
            f"plan {name}: expected preparations {coeff:g}/epsilon^2 = {n_exp:g}"
        )
        if best is None or n_exp < best[2]:
            best = (name, plan, n_exp)

    report_dict = None
    if not exact and best is not None:
        name, plan, _n = best
        rng = make_rng(seed)
        rep = _estimate.estimate_expectation(
            lambda: state,
            h_meas,
            plan,
            epsilon,
            mode=mode,
            rng=rng,
            credible_level=0.95 if mode == "bayesian" else None,
        )
        lines.append(
            f"sampled ({mode}, plan {name}): value {rep.value!r}, "
            f"estimator variance {rep.variance_of_estimator!r}, "
            f"{rep.total_preparations} preparations"
        )
        report_dict = rep.to_json_dict()
        report_dict["plan"] = name
        report_dict["epsilon"] = epsilon
        report_dict["seed"] = seed
        report_dict["truncated_terms"] = k_star

    out = _out_dir(cfg, out_override, base)
    plan_text = []
    for name, plan in plans:
        plan_text.append(f"# plan {name}")
        d = _estimate.format_plan(plan, h_meas)
        if d:
            plan_text.append(d)
    (out / "plan.txt").write_text("\n".join(plan_text) + "\n", encoding="utf-8")
    if report_dict is not None:
        _write_json(out / "report.json", report_dict)
    print("\n".join(lines))
    return 0


# ------------------------------------------------------------ certify


def cmd_certify(cfg: dict, out_override=None, base=Path(".")) -> int:
    _check_keys(
        cfg,
        "config",
        set(),
        {
            "mean",
            "variance",
            "hamiltonian",
            "state",
            "gap",
            "alpha",
            "output_dir",
            "seed",
        },
    )
    direct = "mean" in cfg or "variance" in cfg
    derived = "hamiltonian" in cfg or "state" in cfg
    if direct == derived:
        _fail("config: give mean/variance or hamiltonian/state, not both")
    if direct:
        if "mean" not in cfg or "variance" not in cfg:
            _fail("config: mean and variance go together")
        mean = float(cfg["mean"])
        var = float(cfg["variance"])
    else:
        if "hamiltonian" not in cfg or "state" not in cfg:
            _fail("config: hamiltonian and state go together")
        h = _load_pauli_sum(cfg["hamiltonian"], base, "hamiltonian")
        state = _load_state(cfg["state"], "state")
        mean, var = expectation_and_variance(state, h)

    gap = float(cfg["gap"]) if "gap" in cfg else None
    alpha = float(cfg["alpha"]) if "alpha" in cfg else None
    b = _bounds.BoundInputs(
        mean=mean,
        variance=var,
        gap=gap if gap is not None else math.inf,
        alpha=alpha,
    )
    lo, hi = _bounds.weinstein_interval(b)
    report = {"mean": mean, "variance": var, "weinstein": [lo, hi]}
    lines = [
        f"mean {mean!r}, variance {var!r}",
        f"weinstein interval [{lo!r}, {hi!r}]",
    ]
    if gap is not None:
        try:
            g = _bounds.overlap_bound(b, "ground")
            report["ground_overlap"] = g
            lines.append(f"ground overlap >= {g!r}")
        except VqekitError as exc:
            report["ground_overlap"] = None
            report["ground_overlap_note"] = str(exc)
            lines.append(f"ground overlap bound inapplicable: {exc}")
        e = _bounds.overlap_bound(b, "excited")
        report["excited_overlap"] = e
        lines.append(f"excited overlap >= {e!r} (premise-dependent)")
    if alpha is not None:
        db = _bounds.delos_blinder(b)
        dbs = _bounds.delos_blinder(b, sqrt_variance=True)
        report["delos_blinder"] = db
        report["delos_blinder_sqrt"] = dbs
        lines.append(f"eigenvalue >= {db!r} (variance form)")
        lines.append(f"eigenvalue >= {dbs!r} (deviation form)")

    out = _out_dir(cfg, out_override, base)
    _write_json(out / "certificates.json", report)
    print("\n".join(lines))
    return 0


# ----------------------------------------------------------------- main


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="vqekit",
        description="variational and adiabatic eigensolver toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_exact in (
        ("vqe", True),
        ("adiabatic", False),
        ("estimate", True),
        ("certify", False),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to a JSON config")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--out", default=None, help="override output directory")
        if needs_exact:
            p.add_argument(
                "--exact",
                action="store_true",
                help="bypass sampling (analytic expectations only)",
            )
    args = parser.parse_args(argv)

    try:
        cfg_path = Path(args.config)
        cfg = _load_json(str(cfg_path))
        base = cfg_path.resolve().parent
        if args.command == "vqe":
            return cmd_vqe(cfg, args.out, args.seed, args.exact, base)
        if args.command == "adiabatic":
            return cmd_adiabatic(cfg, args.out, args.seed, base)
        if args.command == "estimate":
            return cmd_estimate(cfg, args.out, args.seed, args.exact, base)
        return cmd_certify(cfg, args.out, base)
    except (VqekitError, OSError, json.JSONDecodeError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

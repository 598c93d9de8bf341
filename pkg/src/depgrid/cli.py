"""Command-line front end.

Subcommands: sample, run, predict, observe, compare, plot, reproduce.
Exit codes: 0 success, 2 configuration errors, 3 data errors, 4 uncovered
positive-mass regions (EmptyPartition).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import presets
from .domain import ConditionSet, PartitionGrid, sample
from .errors import ConfigError, DepgridError
from .estimator import compare, observed_rates, predict, tally
from .policies import ScriptedPolicy, ScriptedPolicyParams, evaluate_policy
from .records import (
    CampaignManifest,
    atomic_write_text,
    condition_document,
    dump_json,
    file_sha256,
    load_condition_file,
    read_manifest,
    read_records,
    read_report,
    read_scenarios,
    write_manifest,
    write_records,
    write_report,
    write_scenarios,
)
from .safety import SafetyFunction, wrap
from .simulator import EnvConfig
from .svgplots import comparison_bar_svg, failure_scatter_svg


def _resolve_condition(args) -> tuple[ConditionSet, PartitionGrid, dict | None]:
    """Target condition from --config (a condition document) or --condition
    (a built-in preset name)."""
    if getattr(args, "config", None):
        cond, grid, _, doc = load_condition_file(args.config)
        return cond, grid, doc
    if getattr(args, "condition", None):
        return presets.condition(args.condition), presets.default_grid(), None
    raise ConfigError("give either --config FILE or --condition NAME")


def _parse_grid(spec: str) -> PartitionGrid:
    try:
        bins = tuple(int(b) for b in spec.split(","))
    except ValueError:
        raise ConfigError(f"bad grid spec {spec!r}; expected e.g. 10,10,10") from None
    return PartitionGrid(bins)


def _env_and_policy(doc: dict | None) -> tuple[EnvConfig, ScriptedPolicyParams]:
    from .records import env_from_dict

    env = EnvConfig()
    params = presets.default_policy_params()
    if doc:
        if "env" in doc:
            env = env_from_dict(doc["env"])
        if "policy" in doc:
            raw = doc["policy"].get("params", {})
            params = ScriptedPolicyParams(**raw)
    return env, params


def _policy_factory(name: str, params: ScriptedPolicyParams, env: EnvConfig,
                    safety: SafetyFunction | None):
    if name != "scripted":
        raise ConfigError(f"unknown policy {name!r}; available: scripted")
    if safety is None:
        return lambda: ScriptedPolicy(params, env)
    return lambda: wrap(ScriptedPolicy(params, env), safety)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_sample(args) -> int:
    cond, _, _ = _resolve_condition(args)
    scenarios = sample(cond, args.n, args.seed)
    write_scenarios(args.out, scenarios)
    print(f"wrote {len(scenarios)} scenarios from {cond.name!r} to {args.out}")
    return 0


def cmd_run(args) -> int:
    if args.manifest:
        manifest = read_manifest(args.manifest)
        base = Path(args.manifest).parent
        scenarios_path = base / manifest.scenarios_path
        seed = manifest.master_seed
        policy_name = manifest.policy_name
        params = ScriptedPolicyParams(**manifest.policy_params)
        safety = (SafetyFunction(**manifest.safety)
                  if manifest.safety is not None else None)
        doc = None
        if manifest.config_path:
            _, _, _, doc = load_condition_file(base / manifest.config_path)
        env, _ = _env_and_policy(doc)
        condition_name = manifest.condition
        out = Path(args.out) if args.out else base / manifest.records_path
        config_path = manifest.config_path
        config_hash = manifest.config_sha256
    else:
        if not args.scenarios:
            raise ConfigError("give --scenarios FILE (or --manifest FILE)")
        scenarios_path = Path(args.scenarios)
        seed = args.seed
        policy_name = args.policy
        doc = None
        if args.config:
            _, _, _, doc = load_condition_file(args.config)
        env, params = _env_and_policy(doc)
        safety = None
        if args.safety:
            clip = args.clip_max
            if clip is None:
                clip = params.risk_goal_threshold - args.delta
            safety = SafetyFunction(goal_clip_max=clip, delta=args.delta)
        condition_name = args.condition or ""
        if not args.out:
            raise ConfigError("give --out FILE for the records")
        out = Path(args.out)
        config_path = args.config
        config_hash = file_sha256(args.config) if args.config else None

    scenarios = read_scenarios(scenarios_path)
    factory = _policy_factory(policy_name, params, env, safety)
    campaign = evaluate_policy(env, factory, scenarios, seed,
                               condition_name=condition_name,
                               workers=args.workers)
    write_records(out, campaign)
    manifest = CampaignManifest(
        condition=condition_name,
        policy_name=policy_name,
        policy_params=params.as_dict(),
        safety=safety.as_dict() if safety else None,
        master_seed=seed,
        n_records=len(campaign.records),
        scenarios_path=str(scenarios_path),
        records_path=out.name,
        config_path=config_path,
        config_sha256=config_hash,
    )
    manifest_path = out.with_suffix(".manifest.json")
    write_manifest(manifest_path, manifest)
    print(f"wrote {len(campaign.records)} records to {out} "
          f"(manifest: {manifest_path})")
    return 0


def cmd_predict(args) -> int:
    target, grid, doc = _resolve_condition(args)
    if args.grid:
        grid = _parse_grid(args.grid)
    campaign = read_records(args.records)
    tallies = tally(campaign, grid, target.space)
    report = predict(tallies, target, renormalize_empty=args.renormalize_empty)
    write_report(args.out, report)
    flag = " (renormalized)" if report.renormalized else ""
    print(f"predicted under {target.name!r}{flag}: "
          f"D={report.dependability:.4f} "
          f"UT={report.task_undependability:.4f} "
          f"UH={report.harmful_undependability:.4f} -> {args.out}")
    return 0


def cmd_observe(args) -> int:
    campaign = read_records(args.records)
    report = observed_rates(campaign)
    write_report(args.out, report)
    print(f"observed over {len(campaign.records)} records: "
          f"D={report.dependability:.4f} "
          f"UT={report.task_undependability:.4f} "
          f"UH={report.harmful_undependability:.4f} -> {args.out}")
    return 0


def cmd_compare(args) -> int:
    predicted = read_report(args.predicted)
    observed = read_report(args.observed)
    deltas = compare(predicted, observed)
    atomic_write_text(args.out, dump_json({
        "predicted": args.predicted,
        "observed": args.observed,
        "deltas_pts": deltas.as_dict(),
        "max_abs_pts": deltas.max_abs,
    }))
    svg_path = args.svg or str(Path(args.out).with_suffix(".svg"))
    label = predicted.condition_name or "condition"
    atomic_write_text(svg_path, comparison_bar_svg([(label, predicted, observed)]))
    print(f"deltas (pts): D={deltas.dependability_pts:+.2f} "
          f"UT={deltas.task_undependability_pts:+.2f} "
          f"UH={deltas.harmful_undependability_pts:+.2f} "
          f"-> {args.out}, {svg_path}")
    return 0


def cmd_plot(args) -> int:
    if args.config:
        cond, _, _, _ = load_condition_file(args.config)
        space = cond.space
    else:
        space = presets.domain_space()
    dims = [d.strip() for d in args.dims.split(",") if d.strip()]
    campaign = read_records(args.records)
    atomic_write_text(args.out, failure_scatter_svg(campaign, space, dims))
    n_fail = sum(1 for r in campaign.records
                 if r.mode.value != "success")
    print(f"plotted {n_fail} failures over dims {dims} -> {args.out}")
    return 0


# ---------------------------------------------------------------------------
# Full pipeline
# ---------------------------------------------------------------------------

# Fixed offsets applied to the master seed, one per derived stream.
_SEED_OFFSETS = {
    "scenarios_testing": 11,
    "scenarios_oc1": 12,
    "scenarios_oc2": 13,
    "scenarios_oc3": 14,
    "scenarios_oc4": 15,
    "campaign_testing": 21,
    "campaign_oc1": 22,
    "campaign_oc2": 23,
    "campaign_oc3": 24,
    "campaign_oc4": 25,
}


def reproduce(out_dir: str | Path, *, n: int = 20000, seed: int = 0,
              workers: int = 1, tolerance_pts: float = 2.0,
              grid: PartitionGrid | None = None) -> dict:
    """Run the whole pipeline into out_dir and return the summary dict.

    Steps: uniform testing campaign; per-region tallies; predictions for the
    four operating conditions; held-out observation campaigns for each;
    predicted-vs-observed comparison; a paired safety-function campaign on
    the same testing scenarios; summary table, reports, and charts. Output
    bytes are a pure function of (n, seed, grid, tolerance).

    The default 10x10x10 grid needs n large enough to populate every voxel
    (the uniform testing campaign covers all 1000 with n around 20000);
    scaled-down runs should pass a proportionally coarser grid.
    """
    out = Path(out_dir)
    env = presets.default_env()
    params = presets.default_policy_params()
    space = presets.domain_space()
    grid = grid or presets.default_grid()
    factory = _policy_factory("scripted", params, env, None)

    def campaign_for(cond_name: str, scen_key: str, camp_key: str, *,
                     safety: SafetyFunction | None = None,
                     scenarios=None, tag: str | None = None):
        cond = presets.condition(cond_name)
        if scenarios is None:
            scenarios = sample(cond, n, seed + _SEED_OFFSETS[scen_key])
            write_scenarios(out / "scenarios" / f"{tag or cond_name}.jsonl",
                            scenarios)
        f = (_policy_factory("scripted", params, env, safety)
             if safety else factory)
        campaign = evaluate_policy(
            env, f, scenarios, seed + _SEED_OFFSETS[camp_key],
            condition_name=cond_name, workers=workers)
        name = tag or cond_name
        write_records(out / "records" / f"{name}.jsonl", campaign)
        write_manifest(out / "records" / f"{name}.manifest.json", CampaignManifest(
            condition=cond_name,
            policy_name="scripted",
            policy_params=params.as_dict(),
            safety=safety.as_dict() if safety else None,
            master_seed=seed + _SEED_OFFSETS[camp_key],
            n_records=len(campaign.records),
            scenarios_path=f"../scenarios/{tag or cond_name}.jsonl",
            records_path=f"{name}.jsonl",
        ))
        return campaign, scenarios

    # condition documents, for the record
    for name in ("testing",) + presets.OPERATING_CONDITION_NAMES:
        doc = condition_document(presets.condition(name), grid,
                                 seed, env=env,
                                 policy={"name": "scripted",
                                         "params": params.as_dict()})
        atomic_write_text(out / "conditions" / f"{name}.json", dump_json(doc))

    # testing campaign and per-region tallies
    test_campaign, test_scenarios = campaign_for(
        "testing", "scenarios_testing", "campaign_testing")
    tallies = tally(test_campaign, grid, space)
    observed_test = observed_rates(test_campaign)
    write_report(out / "reports" / "observed_testing.json", observed_test)

    # re-weighting identity under the testing conditions themselves
    predicted_test = predict(tallies, presets.condition("testing"))
    write_report(out / "reports" / "predicted_testing.json", predicted_test)
    identity = compare(predicted_test, observed_test)

    # novel operating conditions: predict, then confirm with held-out runs
    oc_rows = []
    pairs = []
    for oc in presets.OPERATING_CONDITION_NAMES:
        predicted = predict(tallies, presets.condition(oc))
        write_report(out / "reports" / f"predicted_{oc}.json", predicted)
        heldout, _ = campaign_for(oc, f"scenarios_{oc}", f"campaign_{oc}")
        observed = observed_rates(heldout)
        write_report(out / "reports" / f"observed_{oc}.json", observed)
        deltas = compare(predicted, observed)
        oc_rows.append({
            "condition": oc,
            "predicted": predicted.metrics(),
            "observed": observed.metrics(),
            "deltas_pts": deltas.as_dict(),
            "max_abs_pts": deltas.max_abs,
            "within_tolerance": deltas.max_abs <= tolerance_pts,
        })
        pairs.append((oc, predicted, observed))

    # safety function on the very same testing scenarios and episode seeds
    sf = SafetyFunction.from_threshold(params.risk_goal_threshold)
    safety_campaign, _ = campaign_for(
        "testing", "scenarios_testing", "campaign_testing",
        safety=sf, scenarios=test_scenarios, tag="testing_safety")
    observed_safety = observed_rates(safety_campaign)
    write_report(out / "reports" / "observed_testing_safety.json",
                 observed_safety)

    atomic_write_text(out / "plots" / "comparison.svg",
                      comparison_bar_svg(pairs))
    atomic_write_text(out / "plots" / "failures_testing.svg",
                      failure_scatter_svg(test_campaign, space, ("v", "t", "y")))
    atomic_write_text(out / "plots" / "failures_testing_safety.svg",
                      failure_scatter_svg(safety_campaign, space, ("v", "t", "y")))

    harmful_base = observed_test.harmful_undependability
    harmful_safe = observed_safety.harmful_undependability
    summary = {
        "n": n,
        "seed": seed,
        "grid_bins": list(grid.bins),
        "tolerance_pts": tolerance_pts,
        "identity_check": {
            "deltas_pts": identity.as_dict(),
            "max_abs_pts": identity.max_abs,
        },
        "observed_testing": observed_test.metrics(),
        "operating_conditions": oc_rows,
        "all_within_tolerance": all(r["within_tolerance"] for r in oc_rows),
        "safety": {
            "goal_clip_max": sf.goal_clip_max,
            "delta": sf.delta,
            "harmful_without": harmful_base,
            "harmful_with": harmful_safe,
            "harmful_ratio": (harmful_safe / harmful_base
                              if harmful_base > 0 else 0.0),
            "dependability_without": observed_test.dependability,
            "dependability_with": observed_safety.dependability,
        },
    }
    atomic_write_text(out / "summary.json", dump_json(summary))
    atomic_write_text(out / "summary.txt", _summary_text(summary))
    return summary


def _summary_text(s: dict) -> str:
    lines = []
    lines.append(f"pipeline summary  (n={s['n']}, seed={s['seed']}, "
                 f"grid={'x'.join(str(b) for b in s['grid_bins'])})")
    lines.append("")
    obs = s["observed_testing"]
    lines.append("testing conditions (observed): "
                 f"D={obs['dependability']:.4f}  "
                 f"UT={obs['task_undependability']:.4f}  "
                 f"UH={obs['harmful_undependability']:.4f}")
    ident = s["identity_check"]
    lines.append(f"re-weighting identity check: max |delta| = "
                 f"{ident['max_abs_pts']:.3f} pts")
    lines.append("")
    header = (f"{'condition':<10} {'metric':<24} {'predicted':>10} "
              f"{'observed':>10} {'delta pts':>10}  check")
    lines.append(header)
    lines.append("-" * len(header))
    tol = s["tolerance_pts"]
    for row in s["operating_conditions"]:
        for metric in ("dependability", "task_undependability",
                       "harmful_undependability"):
            p = row["predicted"][metric]
            o = row["observed"][metric]
            d = 100.0 * (p - o)
            check = "ok" if abs(d) <= tol else "EXCEEDED"
            lines.append(f"{row['condition']:<10} {metric:<24} {p:>10.4f} "
                         f"{o:>10.4f} {d:>+10.2f}  {check}")
    lines.append("")
    verdict = "yes" if s["all_within_tolerance"] else "NO"
    lines.append(f"all predictions within {tol:.1f} pts of held-out "
                 f"observation: {verdict}")
    sf = s["safety"]
    lines.append("")
    lines.append(f"safety function (goal clipped to "
                 f"[0, {sf['goal_clip_max']}]):")
    lines.append(f"  harmful undependability: {sf['harmful_without']:.5f} -> "
                 f"{sf['harmful_with']:.5f} (ratio {sf['harmful_ratio']:.5f})")
    lines.append(f"  dependability:           {sf['dependability_without']:.4f} -> "
                 f"{sf['dependability_with']:.4f}")
    return "".join(line + "\n" for line in lines)


def cmd_reproduce(args) -> int:
    grid = _parse_grid(args.grid) if args.grid else None
    reproduce(args.out_dir, n=args.n, seed=args.seed,
              workers=args.workers, grid=grid)
    print((Path(args.out_dir) / "summary.txt").read_text(), end="")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="depgrid",
        description=("Predict a fixed policy's success and failure-mode "
                     "probabilities under shifted operating conditions."),
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add_target(sp):
        sp.add_argument("--config", help="condition document (JSON)")
        sp.add_argument("--condition",
                        help="built-in condition name "
                             "(testing, oc1, oc2, oc3, oc4)")

    sp = sub.add_parser("sample", help="draw scenarios from a condition")
    add_target(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("run", help="run one episode per scenario")
    sp.add_argument("--scenarios", help="scenario JSONL file")
    sp.add_argument("--config", help="condition document with env/policy")
    sp.add_argument("--condition", help="condition name for the manifest")
    sp.add_argument("--policy", default="scripted")
    sp.add_argument("--safety", action="store_true",
                    help="wrap the policy with the goal-clipping governor")
    sp.add_argument("--clip-max", type=float, default=None,
                    help="override the goal clip bound")
    sp.add_argument("--delta", type=float, default=0.5,
                    help="clip margin below the risk threshold")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--manifest", help="rerun a campaign from its manifest")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("predict", help="re-weight tallies to a new condition")
    add_target(sp)
    sp.add_argument("--records", required=True)
    sp.add_argument("--grid", help="bins per dimension, e.g. 10,10,10")
    sp.add_argument("--renormalize-empty", action="store_true",
                    help="drop uncovered positive-mass regions and renormalize")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_predict)

    sp = sub.add_parser("observe", help="raw outcome rates of a record file")
    sp.add_argument("--records", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_observe)

    sp = sub.add_parser("compare", help="predicted vs observed deltas + chart")
    sp.add_argument("--predicted", required=True)
    sp.add_argument("--observed", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--svg", help="chart path (default: --out with .svg)")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("plot", help="scatter failures over two or three dims")
    sp.add_argument("--records", required=True)
    sp.add_argument("--dims", required=True, help="e.g. v,y or v,t,y")
    sp.add_argument("--config", help="condition document for the domain")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_plot)

    sp = sub.add_parser("reproduce", help="run the full pipeline end to end")
    sp.add_argument("--out-dir", required=True)
    sp.add_argument("--n", type=int, default=20000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--grid", help="bins per dimension (default 10,10,10); "
                                   "scale down with --n")
    sp.set_defaults(func=cmd_reproduce)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DepgridError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: network, landscape, sample, analyze, protocol.

All commands take a JSON config file (--config) plus dotted-path overrides
(--set a.b.c=value); every output file embeds the hash of the physics subset
(network and sources) of the effective config, and `analyze` refuses inputs whose hashes disagree
unless forced.  Identical config and seed give byte-identical outputs, for
any --threads setting.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path


from tribeat import analysis, config, correlation, events as events_io, grids, network
from tribeat.permanent import perm_ryser
from tribeat.protocol import ProtocolConfig, protocol_report
from tribeat.sampler import sample_distinguishable, sample_events

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_INPUT = 2


def _fail(message: str, code: int = EXIT_BAD_INPUT) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file (defaults apply if omitted)")
    p.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="PATH=VALUE", help="override a config entry, e.g. network.phi=1.57")
    p.add_argument("--threads", type=int, default=1,
                   help="worker cap for grid evaluation (results are identical)")


def cmd_network(args) -> int:
    cfg = config.load_config(args.config, args.overrides)
    u = config.build_unitary(cfg)
    defect = network.unitarity_defect(u)
    perm = perm_ryser(u)
    print("network matrix:")
    for row in u:
        print("  " + "  ".join(f"{z.real:+.6f}{z.imag:+.6f}j" for z in row))
    print(f"unitarity defect: {defect:.3e}")
    print(f"|permanent|: {abs(perm):.6e}")
    ok = defect <= network.UNITARITY_TOL
    if cfg["network"].get("kind", "reference") == "reference":
        phi = float(cfg["network"].get("phi", 0.0))
        fam = network.reference_family()
        checks = {
            "anchor gauge_distance(U(0), u_zero)": network.gauge_distance(
                fam.unitary(0.0), network.u_zero()),
            "anchor gauge_distance(U(pi/2), tritter)": network.gauge_distance(
                fam.unitary(math.pi / 2), network.tritter()),
            f"row-swap anchor at phi={phi:.4g}": network.gauge_distance(
                fam.unitary(phi + math.pi), fam.unitary(phi)[[1, 0, 2], :]),
        }
        for name, val in checks.items():
            passed = val <= network.ANCHOR_TOL
            ok &= passed
            print(f"{name}: {val:.3e} [{'ok' if passed else 'FAIL'}]")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_landscape(args) -> int:
    cfg = config.load_config(args.config, args.overrides)
    u = config.build_unitary(cfg)
    sources = config.build_sources(cfg)
    spec = config.build_grid_spec(cfg)
    meta = {"config_hash": config.config_hash(cfg),
            "phi": f"{float(cfg['network'].get('phi', 0.0)):.17g}",
            "envelope": str(cfg["sources"]["envelope"])}
    grid = correlation.landscape_theory(u, sources, spec=spec, metadata=meta,
                                        workers=max(args.threads, 1))
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    grids.write_grid(grid, out)
    print(f"wrote {out} ({grid.spec.shape[0]}x{grid.spec.shape[1]} grid)")
    if args.verify:
        center = grid.value_at(0.0, 0.0)
        peak = float(grid.values.max())
        ratio = center / peak if peak > 0 else math.inf
        passed = ratio < 0.05
        print(f"center dip f(0,0)/max = {ratio:.4f} [{'ok' if passed else 'FAIL'}]")
        if not passed:
            return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_sample(args) -> int:
    cfg = config.load_config(args.config, args.overrides)
    sampler_cfg = cfg["sampler"]
    if sampler_cfg.get("seed") is None:
        return _fail("sampling requires sampler.seed to be set")
    u = config.build_unitary(cfg)
    sources = config.build_sources(cfg)
    noise = config.build_noise(cfg)
    n_events = int(sampler_cfg["n_events"])
    seed = int(sampler_cfg["seed"])
    post_select = bool(sampler_cfg.get("post_select", True))
    fn = sample_distinguishable if sampler_cfg.get("distinguishable") else sample_events
    evs = fn(u, sources, noise, n_events, seed, post_select=post_select)
    meta = {"config_hash": config.config_hash(cfg), "seed": str(seed),
            "n_trials": str(n_events),
            "sampler": "distinguishable" if sampler_cfg.get("distinguishable") else "quantum",
            "eta": f"{noise.eta:g}", "jitter_ns": f"{noise.jitter_ns:g}", "q": f"{noise.q:g}"}
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    events_io.write_events(evs, out, metadata=meta)
    print(f"wrote {out} ({len(evs)} events from {n_events} trials)")
    return EXIT_OK


def cmd_analyze(args) -> int:
    cfg = config.load_config(args.config, args.overrides)
    try:
        evs, ev_meta = events_io.read_events(args.events)
    except (OSError, events_io.EventFormatError) as exc:
        return _fail(str(exc))
    try:
        theory = grids.read_grid(args.theory)
    except (OSError, grids.GridFormatError) as exc:
        return _fail(str(exc))
    h_e = ev_meta.get("config_hash")
    h_t = theory.metadata.get("config_hash")
    if h_e and h_t and h_e != h_t and not args.force:
        return _fail(f"config hash mismatch between events ({h_e}) and theory ({h_t}); "
                     "use --force to analyse anyway")
    if not evs:
        return _fail("event file contains no events")
    r0 = float(cfg["analysis"].get("r0_ns", 3.0))
    try:
        report = analysis.analyze(evs, theory, r0_ns=r0)
    except analysis.AnalysisError as exc:
        return _fail(str(exc))
    print(report.to_text())
    if args.output:
        shared_hash = h_e or h_t or config.config_hash(cfg)
        out = Path(args.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(f"# config_hash: {shared_hash}\n" + report.to_text() + "\n",
                       encoding="utf-8")
        kv = out.with_suffix(out.suffix + ".kv") if out.suffix != ".kv" else out
        kv.write_text(f"config_hash={shared_hash}\n" + report.to_key_values(),
                      encoding="utf-8")
        print(f"wrote {out} and {kv}")
    if args.min_fidelity is not None and report.fidelity < args.min_fidelity:
        print(f"fidelity {report.fidelity:.4f} below threshold {args.min_fidelity}",
              file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_protocol(args) -> int:
    cfg = config.load_config(args.config, args.overrides)
    pc = ProtocolConfig(p_e=args.p_e, m=args.m, n=args.n)
    print(protocol_report(pc, n_batches=args.batches, seed=args.seed))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tribeat",
                                 description="time-resolved three-photon interference toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("network", help="print the network unitary and anchor checks")
    _add_common(p)
    p.set_defaults(fn=cmd_network)

    p = sub.add_parser("landscape", help="compute the theory landscape grid file")
    _add_common(p)
    p.add_argument("--output", required=True, help="grid file to write")
    p.add_argument("--verify", action="store_true",
                   help="check that the landscape is dim at the origin (phi=0 physics)")
    p.set_defaults(fn=cmd_landscape)

    p = sub.add_parser("sample", help="draw detection events into an event file")
    _add_common(p)
    p.add_argument("--output", required=True, help="event file to write")
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("analyze", help="compare an event file against a theory grid")
    _add_common(p)
    p.add_argument("--events", required=True)
    p.add_argument("--theory", required=True)
    p.add_argument("--output", help="write the report (plus a flat .kv file)")
    p.add_argument("--force", action="store_true", help="ignore config hash mismatches")
    p.add_argument("--min-fidelity", type=float, default=None,
                   help="exit nonzero when the fidelity falls below this value")
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("protocol", help="feedback preparation rate: closed form vs Monte Carlo")
    _add_common(p)
    p.add_argument("--p-e", dest="p_e", type=float, default=0.04)
    p.add_argument("--m", type=int, default=7)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--batches", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(fn=cmd_protocol)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (config.ConfigError, network.NetworkConfigError, grids.GridFormatError,
            events_io.EventFormatError, analysis.AnalysisError, ValueError) as exc:
        return _fail(str(exc))
    except OSError as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    raise SystemExit(main())

"""Command-line entry point: ``python -m privstream <command> ...``.

Exit codes: 0 success, 1 usage or configuration error, 2 infeasible or
degenerate plan from ``optimize``, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, ExperimentConfig, load_config
from .durations import optimize_durations
from .link import computing_rate, ensemble_rate, resources_rate, LinkBudget
from .predictors import LinearArModel, make_examples, loss_and_grad
from .sweep import rows_to_csv, run_sweep, train_federated
from .traces import TraceFormatError, TraceSet, load_dir, save_csv, split, synth_trace

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_IO = 0, 1, 2, 3


class _Fail(Exception):
    def __init__(self, code: int, msg: str):
        super().__init__(msg)
        self.code = code


def _config(path) -> ExperimentConfig:
    try:
        return load_config(path)
    except ConfigError as exc:
        raise _Fail(EXIT_USAGE, str(exc)) from None
    except (OSError, UnicodeDecodeError) as exc:
        raise _Fail(EXIT_IO, f"{path}: {exc}") from None


def _traces(directory, cfg: ExperimentConfig):
    try:
        traces = load_dir(directory, cfg.stream.tau, cfg.stream.T_seg)
    except (OSError, TraceFormatError) as exc:
        raise _Fail(EXIT_IO, str(exc)) from None
    if not traces:
        raise _Fail(EXIT_IO, f"{directory}: no trace files")
    return traces


def _write(path, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise _Fail(EXIT_IO, f"{path}: {exc}") from None


def cmd_optimize(args) -> int:
    cfg = _config(args.config)
    budget = cfg.budget()
    plan = optimize_durations(budget, cfg.privacy.rho_s, cfg.stream, cfg.fov.n_fov)
    print(f"status={plan.status}")
    print(f"n_p={plan.n_p}")
    print(f"t_com={plan.t_com!r}")
    print(f"t_cpt={plan.t_cpt!r}")
    print(f"t_cc={plan.t_cc!r}")
    print(f"r_cc_star={resources_rate(budget)!r}")
    print(f"obw_samples={plan.obw_samples}")
    print(f"t_obw={plan.t_obw!r}")
    if plan.status == "infeasible":
        print(f"error: infeasible, render+send exceeds T_ps by {plan.deficit:.6g} s", file=sys.stderr)
        return EXIT_INFEASIBLE
    if plan.status == "degenerate":
        print("error: degenerate, no observation sample fits before the deadline", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = _config(args.config)
    traces = _traces(args.traces, cfg)
    train = split(TraceSet(traces, cfg.split_seed, cfg.train_fraction))[0] if len(traces) > 1 else traces
    plan = optimize_durations(cfg.budget(), cfg.privacy.rho_s, cfg.stream, cfg.fov.n_fov)
    if plan.status != "ok":
        raise _Fail(EXIT_USAGE, f"plan is {plan.status}; nothing to train")
    X = Y = None

    def report(r, model):
        nonlocal X, Y
        if X is None:
            X, Y = make_examples(train, model.config)
        loss = loss_and_grad(model.weights, X, Y, model.ridge_lambda)[0]
        print(f"round={r} loss={loss!r}")

    model = train_federated(train, cfg, plan.obw_samples, plan.gap_samples, seed=args.seed, on_round=report)
    try:
        model.save(args.out)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"{args.out}: {exc}") from None
    print(f"wrote {args.out} (window={model.window_samples}, gap={model.gap_samples}, clients={len({t.user_id for t in train})})")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _config(args.config)
    traces = _traces(args.traces, cfg)
    if len(traces) > 1:
        train, test = split(TraceSet(traces, cfg.split_seed, cfg.train_fraction))
    else:
        train, test = [], traces
    model = None
    if args.model:
        try:
            model = LinearArModel.load(args.model)
        except (OSError, ValueError) as exc:
            raise _Fail(EXIT_IO, f"{args.model}: {exc}") from None
    try:
        rows = run_sweep(cfg, test, train, model, workers=args.workers)
    except ValueError as exc:
        raise _Fail(EXIT_USAGE, str(exc)) from None
    _write(args.out, rows_to_csv(rows))
    bad = sum(r.status != "ok" for r in rows)
    print(f"wrote {len(rows)} rows to {args.out} ({bad} not feasible)")
    return EXIT_OK


def cmd_rates(args) -> int:
    cfg = _config(args.config)
    if cfg.radio is None or cfg.compute is None:
        raise _Fail(EXIT_USAGE, f"{args.config}: [radio] and [compute] sections are required")
    c_com = ensemble_rate(cfg.radio, cfg.mc_samples, cfg.radio_seed)
    c_cpt = computing_rate(cfg.compute)
    r = resources_rate(LinkBudget.from_media(cfg.media, c_com, c_cpt, cfg.grid.M))
    print(f"C_com={c_com!r}")
    print(f"C_cpt={c_cpt!r}")
    print(f"r_cc_star={r!r}")
    return EXIT_OK


def cmd_gen_traces(args) -> int:
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        seeds = np.random.SeedSequence(args.seed).spawn(args.n)
        for i, ss in enumerate(seeds):
            user, video = f"u{i % args.users:02d}", f"v{i // args.users:02d}"
            t = synth_trace(
                int(ss.generate_state(1)[0]),
                args.duration,
                args.tau,
                args.T_seg,
                args.momentum,
                speed=args.speed,
                jitter=args.jitter,
                user_id=user,
                video_id=video,
            )
            save_csv(t, out / f"{user}__{video}.csv")
    except OSError as exc:
        raise _Fail(EXIT_IO, str(exc)) from None
    except ValueError as exc:
        raise _Fail(EXIT_USAGE, str(exc)) from None
    print(f"wrote {args.n} traces to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="privstream", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("optimize", help="print the optimal duration plan")
    s.add_argument("--config", required=True)
    s.set_defaults(func=cmd_optimize)

    s = sub.add_parser("train", help="federated training of the linear predictor")
    s.add_argument("--config", required=True)
    s.add_argument("--traces", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("sweep", help="QoE sweep over sDoP and resources rate, written as CSV")
    s.add_argument("--config", required=True)
    s.add_argument("--traces", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--model")
    s.add_argument("--workers", type=int, default=None)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("rates", help="Monte Carlo transmission rate and computing rate")
    s.add_argument("--config", required=True)
    s.set_defaults(func=cmd_rates)

    s = sub.add_parser("gen-traces", help="write seeded synthetic head-movement traces")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--users", type=int, default=30)
    s.add_argument("--duration", type=float, default=60.0)
    s.add_argument("--tau", type=float, default=0.1)
    s.add_argument("--T-seg", dest="T_seg", type=float, default=1.0)
    s.add_argument("--momentum", type=float, default=0.9)
    s.add_argument("--speed", type=float, default=15.0)
    s.add_argument("--jitter", type=float, default=0.0)
    s.set_defaults(func=cmd_gen_traces)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())

"""Unified command line: serve, simulate, eval, predict.

Environment fallbacks: STORE_PATH (store location), AUTH_TOKEN (bearer token
for serve), LOG_LEVEL (uvicorn log level).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone

from .config import EngineConfig
from .evaluation import MODEL_NAMES, evaluate, model_factory
from .factors import EnvSnapshot, FactorRegistry, default_registry, read_checkins, write_checkins
from .simulator import generate_dataset, load_scenario
from .store import Store


def _registry(args) -> FactorRegistry:
    path = getattr(args, "registry", None)
    return FactorRegistry.from_file(path) if path else default_registry()


def _engine_config(args) -> EngineConfig:
    kwargs = {}
    if getattr(args, "k", None) is not None:
        kwargs["k"] = args.k
    if getattr(args, "eps", None) is not None:
        kwargs["eps"] = args.eps
    if getattr(args, "theta", None) is not None:
        kwargs["theta"] = args.theta
    if getattr(args, "n_max", None) is not None:
        kwargs["n_max"] = args.n_max
    return EngineConfig(**kwargs)


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    store = Store(args.store, registry=_registry(args), config=_engine_config(args))
    if store.corruption is not None:
        print(
            f"warning: log truncated at byte {store.corruption.offset}: "
            f"{store.corruption.reason}",
            file=sys.stderr,
        )
    app = create_app(store, auth_token=args.token)
    host, _, port = args.addr.partition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000), log_level=args.log_level)
    return 0


def cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario)
    dataset = generate_dataset(scenario)
    checkins = [c for user_id in sorted(dataset) for c in dataset[user_id]]
    n = write_checkins(args.out, checkins)
    print(f"wrote {n} check-ins for {len(dataset)} users to {args.out}")
    return 0


def cmd_eval(args) -> int:
    dataset = read_checkins(args.dataset)
    config = _engine_config(args)
    report = evaluate(
        dataset,
        model_factory(args.model, _registry(args), config),
        eps=args.eps,
        segment=args.segment,
        model_name=args.model,
    )
    doc = json.dumps(report.to_dict(), indent=2)
    if args.out:
        with open(args.out, "w") as f:
            f.write(doc + "\n")
    print(doc)
    return 0


def cmd_predict(args) -> int:
    store = Store(args.store, registry=_registry(args), config=_engine_config(args))
    try:
        if args.snapshot_file:
            with open(args.snapshot_file) as f:
                values = json.load(f)
            snapshot = EnvSnapshot(values=values, captured_at=datetime.now(timezone.utc))
            pred = store.predict_for(args.user, snapshot)
        else:
            pred = store.predict_for(args.user, "auto")
    finally:
        store.close()
    print(json.dumps(pred.to_dict(), indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="moodgrid")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_engine_flags(p):
        p.add_argument("--registry", default=None, help="custom factor registry YAML")
        p.add_argument("--k", type=int, default=None, help="cluster size (default 5)")
        p.add_argument("--theta", type=float, default=None, help="candidate threshold (default 0.8)")
        p.add_argument("--n-max", type=int, default=None, help="max candidates (default 5)")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--addr", default="127.0.0.1:8000")
    p.add_argument("--store", default=os.environ.get("STORE_PATH", "moodgrid.log"))
    p.add_argument("--token", default=os.environ.get("AUTH_TOKEN"))
    p.add_argument("--log-level", default=os.environ.get("LOG_LEVEL", "info").lower())
    add_engine_flags(p)
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("simulate", help="generate a synthetic dataset from a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("eval", help="replay-evaluate a model on a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--model", choices=MODEL_NAMES, default="mspsc")
    p.add_argument("--eps", type=float, default=13.0)
    p.add_argument("--segment", choices=("all", "consistent", "inconsistent"), default="all")
    p.add_argument("--out", default=None)
    add_engine_flags(p)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("predict", help="predict for a stored user")
    p.add_argument("--user", required=True)
    p.add_argument("--snapshot-file", default=None, help="JSON factor map; omit for auto")
    p.add_argument("--store", default=os.environ.get("STORE_PATH", "moodgrid.log"))
    add_engine_flags(p)
    p.set_defaults(fn=cmd_predict)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())

"""Command line entry point: ``longcycle run|summarize|validate``."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .harness import (
    HOST_FAMILIES,
    ConfigError,
    HostSpec,
    TrialConfig,
    records_from_csv,
    records_to_csv,
    run_trials,
    summarize,
    validate_against_oracle,
)

# flag name -> (parser for config-file values, default)
_KEYS = {
    "host": (str, None),
    "n": (int, None),
    "d": (int, None),
    "dim": (int, None),
    "offsets": (str, None),
    "graph-file": (str, None),
    "fixed-host": (lambda s: s.strip().lower() in ("1", "true", "yes"), False),
    "p": (float, None),
    "c": (float, None),
    "eps": (float, 0.05),
    "trials": (int, 1),
    "seed": (int, 0),
    "workers": (int, 1),
    "height-C": (float, 1.0),
    "out": (str, None),
    "trace": (str, None),
}


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment line."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key = key.strip().lstrip("-")
            if not sep or key not in _KEYS:
                raise ConfigError(key or "config", f"{path}:{lineno}: unrecognised line {raw.rstrip()!r}")
            try:
                values[key] = _KEYS[key][0](value.strip())
            except ValueError:
                raise ConfigError(key, f"{path}:{lineno}: bad value {value.strip()!r}") from None
    return values


def _dest(key: str) -> str:
    return key.replace("-", "_")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="file of key = value lines; flags override it")
    p.add_argument("--host", choices=HOST_FAMILIES)
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int, help="degree for --host regular")
    p.add_argument("--dim", type=int, help="dimension for --host hypercube")
    p.add_argument("--offsets", help="comma-separated offsets for --host circulant")
    p.add_argument("--graph-file", help="edge-list file for --host file")
    p.add_argument("--fixed-host", action="store_true", default=None,
                   help="reuse one random host for all trials")
    p.add_argument("--p", type=float, help="edge retention probability")
    p.add_argument("--c", type=float, help="set p = c / k")
    p.add_argument("--eps", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--height-C", type=float, dest="height_C")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--trace", help="write PUSH/POP/TEST exploration events to this file")


def _merged(args: argparse.Namespace) -> dict:
    file_values = read_config_file(args.config) if args.config else {}
    merged = {}
    for key, (_, default) in _KEYS.items():
        cli = getattr(args, _dest(key), None)
        merged[key] = cli if cli is not None else file_values.get(key, default)
    return merged


def config_from_values(v: dict) -> TrialConfig:
    if v["host"] is None:
        raise ConfigError("host", "required")
    offsets = None
    if v["offsets"] is not None:
        try:
            offsets = tuple(int(x) for x in str(v["offsets"]).split(",") if x.strip())
        except ValueError:
            raise ConfigError("offsets", f"bad list {v['offsets']!r}") from None
    host = HostSpec(v["host"], n=v["n"], d=v["d"], dim=v["dim"], offsets=offsets,
                    graph_file=v["graph-file"], fixed=bool(v["fixed-host"]))
    return TrialConfig(host=host, p=v["p"], c=v["c"], eps=v["eps"], base_seed=v["seed"],
                       trials=v["trials"], height_C=v["height-C"], workers=v["workers"],
                       trace=v["trace"] is not None)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="ascii", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    values = _merged(args)
    config = config_from_values(values)
    records = run_trials(config)
    _emit(records_to_csv(records), values["out"])
    if values["trace"]:
        with open(values["trace"], "w", encoding="ascii", newline="") as fh:
            for r in records:
                fh.write(f"# trial {r.trial}\n")
                fh.writelines(line + "\n" for line in r.trace)
    s = summarize(records)
    print(s.to_text(), end="", file=sys.stderr)
    return 0


def cmd_summarize(args) -> int:
    with open(args.csv, encoding="ascii") as fh:
        records = records_from_csv(fh.read())
    _emit(summarize(records).to_text(), args.out)
    return 0


def cmd_validate(args) -> int:
    config = config_from_values(_merged(args))
    report = validate_against_oracle(config)
    _emit(report.to_text(), _merged(args)["out"])
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="longcycle", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run seeded trials and write CSV")
    _add_common(run)
    run.set_defaults(func=cmd_run)
    summ = sub.add_parser("summarize", help="aggregate a trial CSV")
    summ.add_argument("csv")
    summ.add_argument("--out")
    summ.set_defaults(func=cmd_summarize)
    val = sub.add_parser("validate", help="compare cycles with the exact optimum on small hosts")
    _add_common(val)
    val.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        parser.error(str(exc))
    return 2


if __name__ == "__main__":
    sys.exit(main())

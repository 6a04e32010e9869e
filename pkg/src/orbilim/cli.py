"""Command-line front end.

    orbilim <command> [--config run.json] [--set key=value ...]
                      [--format json|csv] [--out DIR] [--jobs N] [--tolerance X]

Commands: dims, orbits, sc, limit, borcherds, factorize, wick, char, decompose.
The config is a JSON object; ``--set`` overrides keys (dotted paths allowed,
values parsed as JSON when possible).  Output embeds the tool version and a
hash of the effective config and is byte-identical across runs.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import itertools
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any

from . import __version__
from .limit import (OrbifoldSystem, constant_seed_system, factorization_check, fk_character, free_decomposition,
                    limit_structure_constant, rescaled_virasoro_system, seed_generator_gram,
                    single_trace_generators, wick_correlator, wick_vs_modes, LimitTable)
from .orbifold import METHODS, OrbifoldVA, saturation, sc_finite
from .perm import function_orbit_reps, make_family
from .scalar import RadicalScalar, to_float
from .seed import borcherds_residual, borcherds_windows, make_seed
from .tensor import FockWord

COMMANDS = ("dims", "orbits", "sc", "limit", "borcherds", "factorize", "wick", "char", "decompose")

DEFAULTS: dict[str, Any] = {
    "seed": {"kind": "heisenberg", "cutoff": 4},
    "family": {"family": "symmetric"},
    "n_max": 3,
    "N_min": 1,
    "N_max": 6,
    "tolerance": 1e-8,
}


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------- config

def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_override(cfg: dict, assignment: str) -> None:
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} must look like key=value")
    key, val = assignment.split("=", 1)
    parts = key.strip().split(".")
    node = cfg
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot set {key}: {p} is not an object")
    node[parts[-1]] = _parse_value(val)


def load_config(path: str | None, overrides: list[str], args: argparse.Namespace) -> dict:
    cfg = json.loads(json.dumps(DEFAULTS))
    if path:
        try:
            user = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}")
        except json.JSONDecodeError as err:
            raise ConfigError(f"config is not valid JSON: {err}")
        if not isinstance(user, dict):
            raise ConfigError("config must be a JSON object")
        for k, v in user.items():
            if isinstance(v, dict) and isinstance(cfg.get(k), dict) and k != "family":
                cfg[k].update(v)
            else:
                cfg[k] = v
    for o in overrides:
        apply_override(cfg, o)
    if args.tolerance is not None:
        cfg["tolerance"] = args.tolerance
    validate(cfg)
    return cfg


def validate(cfg: dict) -> None:
    if int(cfg["seed"].get("cutoff", 0)) < 0:
        raise ConfigError("seed.cutoff must be >= 0")
    if int(cfg["N_min"]) > int(cfg["N_max"]):
        raise ConfigError("N range is empty")
    if "N_list" in cfg and not cfg["N_list"]:
        raise ConfigError("N_list is empty")
    if int(cfg["n_max"]) > int(cfg["seed"].get("cutoff", 0)):
        raise ConfigError(f"cutoff {cfg['seed'].get('cutoff')} below n_max {cfg['n_max']}")
    if float(cfg["tolerance"]) <= 0:
        raise ConfigError("tolerance must be positive")


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()).hexdigest()[:16]


def n_values(cfg: dict) -> list[int]:
    if "N_list" in cfg:
        return sorted(int(x) for x in cfg["N_list"])
    return list(range(int(cfg["N_min"]), int(cfg["N_max"]) + 1))


def exact_cell(v) -> dict:
    r = RadicalScalar.coerce(v)
    return {"exact": str(r), "float": to_float(r)}


# ---------------------------------------------------------------- commands

def cmd_dims(cfg, jobs):
    seed = make_seed(cfg["seed"])
    fam = make_family(cfg["family"])
    dims = {w: len(seed.basis(w)) for w in range(seed.cutoff + 1)}
    rows = []
    Ns = [N for N in n_values(cfg) if N >= fam.start]
    for n in range(int(cfg["n_max"]) + 1):
        for N in Ns:
            rows.append({"n": n, "N": N, "b_n": function_orbit_reps(fam.group(N), dims, n)[0]})
    sat = {str(n): saturation(fam, seed, n, Ns[-1], Ns[0]) for n in range(int(cfg["n_max"]) + 1)}
    return {"rows": rows, "saturation": sat}


def cmd_orbits(cfg, jobs):
    seed = make_seed(cfg["seed"])
    fam = make_family(cfg["family"])
    N = int(cfg.get("N", cfg["N_max"]))
    O = OrbifoldVA(fam, seed, N)
    rows = []
    for n in range(int(cfg["n_max"]) + 1):
        for rep in O.basis(n):
            rows.append({"n": n, "N": N, "rep": rep.label(seed), "orbit_length": O.orbit_length(rep)})
    return {"rows": rows}


def parse_fock(seed, degree: int, text: str) -> FockWord:
    text = text.strip()
    if text in ("|0>", "vac", ""):
        return FockWord.vacuum(degree)
    entries = []
    for tok in text.split():
        state, _, site = tok.partition("@")
        if not site:
            raise ConfigError(f"Fock label token {tok!r} needs state@site")
        entries.append((int(site), seed.parse(state)))
    return FockWord.make(degree, entries)


_CONTEXT: dict = {}


def _context(cfg: dict, what: str):
    """Per-process cache of seeds, families and limit systems keyed by config hash."""
    key = (config_hash(cfg), what)
    if key not in _CONTEXT:
        if what == "seed":
            _CONTEXT[key] = make_seed(cfg["seed"])
        elif what == "family":
            _CONTEXT[key] = make_family(cfg["family"])
        else:
            _CONTEXT[key] = make_system(cfg)
    return _CONTEXT[key]


def _sc_task(payload):
    cfg, M, N, labels, method = payload
    seed = _context(cfg, "seed")
    fam = _context(cfg, "family")
    deg = fam.degree(M)
    a, b, c = (parse_fock(seed, deg, t) for t in labels)
    return sc_finite(fam, seed, M, N, a, b, c, method=method)


def cmd_sc(cfg, jobs):
    seed = make_seed(cfg["seed"])
    fam = make_family(cfg["family"])
    N = int(cfg.get("N", cfg["N_max"]))
    M = int(cfg.get("M", N))
    methods = cfg.get("methods", list(METHODS))
    if methods == "all":
        methods = list(METHODS)
    O = OrbifoldVA(fam, seed, M)
    if "triples" in cfg:
        triples = [tuple(t) for t in cfg["triples"]]
    else:
        tw = int(cfg.get("max_total_weight", cfg["n_max"]))
        basis = [x for n in range(tw + 1) for x in O.basis(n)]
        triples = [tuple(x.label(seed) for x in t) for t in itertools.product(basis, repeat=3)
                   if sum(O.weight(x) for x in t) <= tw]
    tasks = [(cfg, M, N, t, m) for t in triples for m in methods]
    values = _run(_sc_task, tasks, jobs)
    rows = []
    agree = True
    for t in triples:
        vals = [v for (c_, M_, N_, tt, m), v in zip(tasks, values) if tt == t]
        same = all(RadicalScalar.coerce(v) == RadicalScalar.coerce(vals[0]) for v in vals)
        agree = agree and same
        for m, v in zip(methods, vals):
            rows.append({"a": t[0], "b": t[1], "c": t[2], "N": N, "M": M, "method": m,
                         "value_exact": str(RadicalScalar.coerce(v)), "value_float": to_float(v), "agree": same})
    return {"rows": rows, "all_agree": agree,
            "normalization": "group_sum and oligo divided by eta = |G_M|^2 |Ghat_M^Ka| |Stab_N(a)| / |Ghat_N^Ka|"}


def make_system(cfg):
    seed_spec = cfg["seed"]
    fam_name = cfg.get("family", {}).get("family")
    if seed_spec.get("kind") == "virasoro_rescaled" or fam_name == "rescaled_virasoro":
        return rescaled_virasoro_system(seed_spec.get("c", 1), int(seed_spec.get("cutoff", 6)))
    seed = make_seed(seed_spec)
    if fam_name == "trivial":
        return constant_seed_system(seed)
    return OrbifoldSystem(make_family(cfg["family"]), seed, probe=int(cfg.get("probe", 12)))


def _limit_task(payload):
    cfg, labels = payload
    system = _context(cfg, "system")
    xs = [_find(system, t) for t in labels]
    return limit_structure_constant(system, *xs, n_values(cfg), float(cfg["tolerance"])).to_json()


def _find(system, label: str):
    for n in range(system.cutoff + 1):
        for x in system.basis(n):
            if system.label(x) == label:
                return x
    raise ConfigError(f"unknown limit-basis label {label!r}")


def cmd_limit(cfg, jobs):
    system = make_system(cfg)
    if "triples" in cfg:
        triples = [tuple(t) for t in cfg["triples"]]
    else:
        tw = int(cfg.get("max_total_weight", cfg["n_max"]))
        basis = system.all_basis(min(tw, system.cutoff))
        triples = [tuple(system.label(x) for x in t) for t in itertools.product(basis, repeat=3)
                   if sum(system.weight(x) for x in t) <= tw]
    reports = _run(_limit_task, [(cfg, t) for t in triples], jobs)
    return {"system": system.name, "reports": reports}


def cmd_borcherds(cfg, jobs):
    target = cfg.get("target", "seed")
    tw = int(cfg.get("max_total_weight", cfg["n_max"]))
    lo, hi = cfg.get("window", [-2, 2])
    if target == "seed":
        V = make_seed(cfg["seed"])
    elif target == "orbifold":
        V = OrbifoldVA(make_family(cfg["family"]), make_seed(cfg["seed"]), int(cfg.get("N", 2)))
    elif target == "limit":
        system = make_system(cfg)
        V = LimitTable(system, system.cutoff)
    else:
        raise ConfigError(f"unknown borcherds target {target!r}")
    basis = [x for n in range(V.cutoff + 1) for x in V.basis(n)]
    checked = nonzero = 0
    worst = 0.0
    for a, b, c in itertools.product(basis, repeat=3):
        wabc = V.weight(a) + V.weight(b) + V.weight(c)
        if wabc > tw:
            continue
        for k, m, n in borcherds_windows(V, a, b, c, range(lo, hi + 1)):
            # one check per output basis vector e
            checked += len(V.basis(wabc - m - n - k - 2))
            for r in borcherds_residual(V, a, b, c, k, m, n).values():
                nonzero += 1
                worst = max(worst, abs(to_float(r)))
    return {"target": target, "checked": checked, "nonzero": nonzero, "max_abs_residual": worst}


def cmd_factorize(cfg, jobs):
    system = make_system(cfg)
    wmax = int(cfg.get("generator_weight", 2))
    if isinstance(system, OrbifoldSystem):
        gens = single_trace_generators(system, wmax)
    else:
        gens = [x for n in range(1, wmax + 1) for x in system.basis(n)]
    v = factorization_check(system, gens, n_values(cfg), float(cfg["tolerance"]))
    out = v.to_json()
    out["generators"] = [system.label(g) for g in gens]
    return json.loads(json.dumps(out, default=str))


def cmd_wick(cfg, jobs):
    n = int(cfg.get("points", 4))
    order = int(cfg.get("order", 8))
    ps = wick_correlator([1] * n, [[1] * n for _ in range(n)])
    checked, bad = wick_vs_modes(n, order) if n % 2 == 0 else (0, 0)
    return {"points": n, "pairings": len(ps), "latex": ps.latex(), "mode_checks": checked, "mismatches": bad}


def cmd_char(cfg, jobs):
    k = int(cfg.get("k", 1))
    order = int(cfg.get("order", 10))
    return {"k": k, "order": order, "coefficients": fk_character(k, order)}


def cmd_decompose(cfg, jobs):
    seed = make_seed(cfg["seed"])
    dims = seed.dims()
    probe = free_decomposition(dims)
    gram = {n: seed_generator_gram(seed, n) for n in probe.multiplicities}
    dec = free_decomposition(dims, gram)
    return dec.to_json()


HANDLERS = {"dims": cmd_dims, "orbits": cmd_orbits, "sc": cmd_sc, "limit": cmd_limit, "borcherds": cmd_borcherds,
            "factorize": cmd_factorize, "wick": cmd_wick, "char": cmd_char, "decompose": cmd_decompose}


def _run(fn, tasks, jobs: int):
    if jobs <= 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, tasks))


# ---------------------------------------------------------------- output

def _flatten(row: dict) -> dict:
    return {k: (json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v) for k, v in row.items()}


def render(command: str, cfg: dict, result: dict, fmt: str) -> str:
    meta = {"tool": "orbilim", "version": __version__, "command": command, "config_hash": config_hash(cfg)}
    if fmt == "json":
        return json.dumps({**meta, "config": cfg, "result": result}, sort_keys=True, indent=2) + "\n"
    rows = result.get("rows") or result.get("reports")
    if rows is None:
        rows = [{k: v for k, v in result.items()}]
    rows = [_flatten(r) for r in rows]
    buf = io.StringIO()
    buf.write(f"# tool=orbilim version={__version__} command={command} config_hash={meta['config_hash']}\n")
    fields = sorted({k for r in rows for k in r})
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow(r)
    return buf.getvalue()


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="orbilim", description="Large-N permutation orbifold computations")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config key (repeatable)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="output directory (default: stdout)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--version", action="version", version=f"orbilim {__version__}")
    return p


def _error(kind: str, message: str, code: int = 2) -> int:
    sys.stderr.write(json.dumps({"error": {"type": kind, "message": message}}, sort_keys=True) + "\n")
    return code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as err:
        return _error("usage", str(err), 2)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        cfg = load_config(args.config, args.overrides, args)
        result = HANDLERS[args.command](cfg, max(1, args.jobs))
    except (ValueError, KeyError, TypeError) as err:
        return _error(type(err).__name__, str(err))
    text = render(args.command, cfg, result, args.format)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.command}.{args.format}").write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())

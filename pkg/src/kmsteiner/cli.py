"""Pipeline orchestration: stage commands, plain-text configs, persisted
artifacts with parameter fingerprints, and report tables.

Stages (orbits -> km -> encode -> solve -> classify) are resumable and
idempotent; every stage validates the parameter fingerprint of its inputs
so artifacts from different configurations cannot be mixed.  Timing is
logged to stderr and kept out of the deterministic artifacts (a separate
timings sidecar feeds the report).
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import comb

from . import designs as designs_mod
from . import km as km_mod
from . import orbitgen, symbreak, xcc
from .perm import (
    PermutationGroup,
    group_order,
    read_group_file,
    verify_normalizes,
)

log = logging.getLogger("kmsteiner")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RESOURCE = 2


class ValidationError(Exception):
    pass


class ResourceCapHit(Exception):
    pass


def check_admissible(v: int, k: int, t: int) -> list:
    """Violated divisibility conditions for Steiner parameters, as messages.

    For t=2 these are the classical conditions (k-1) | (v-1) and
    k(k-1) | v(v-1); for general t each lambda_i = C(v-i,t-i)/C(k-i,t-i)
    must be an integer.
    """
    problems = []
    if not (0 < t < k < v):
        problems.append(f"need 0 < t < k < v, got t={t} k={k} v={v}")
        return problems
    for i in range(t - 1, -1, -1):
        den = comb(k - i, t - i)
        num = comb(v - i, t - i)
        if num % den != 0:
            if t == 2 and i == 1:
                problems.append(f"(k-1) does not divide (v-1): {k - 1} does not divide {v - 1}")
            elif t == 2 and i == 0:
                problems.append(
                    f"k(k-1) does not divide v(v-1): {k * (k - 1)} does not divide {v * (v - 1)}"
                )
            else:
                problems.append(
                    f"C(k-{i},{t - i})={den} does not divide C(v-{i},{t - i})={num}"
                )
    return problems


@dataclass
class JobConfig:
    v: int
    k: int
    t: int
    group_file: str
    output_dir: str
    normalizer_file: str | None = None
    encoding: str = "a"
    solve_mode: str = "enumerate"
    node_cap: int | None = None
    time_cap: float | None = None
    solution_limit: int | None = None
    label: str | None = None
    path: str = ""

    _KEYS = {
        "v",
        "k",
        "t",
        "group_file",
        "normalizer_file",
        "encoding",
        "solve_mode",
        "node_cap",
        "time_cap",
        "solution_limit",
        "output_dir",
        "label",
    }

    @classmethod
    def load(cls, path) -> "JobConfig":
        raw: dict = {}
        with open(path, "r", encoding="utf-8") as fh:
            for ln, line in enumerate(fh, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValidationError(f"{path}:{ln}: expected key = value")
                key, _, val = line.partition("=")
                key, val = key.strip(), val.strip()
                if key not in cls._KEYS:
                    raise ValidationError(f"{path}:{ln}: unknown key {key!r}")
                raw[key] = val
        for req in ("v", "k", "t", "group_file", "output_dir"):
            if req not in raw:
                raise ValidationError(f"{path}: missing required key {req!r}")
        base = os.path.dirname(os.path.abspath(path))

        def rel(p):
            return p if os.path.isabs(p) else os.path.join(base, p)

        cfg = cls(
            v=int(raw["v"]),
            k=int(raw["k"]),
            t=int(raw["t"]),
            group_file=rel(raw["group_file"]),
            output_dir=rel(raw["output_dir"]),
            normalizer_file=rel(raw["normalizer_file"]) if "normalizer_file" in raw else None,
            encoding=raw.get("encoding", "a"),
            solve_mode=raw.get("solve_mode", "enumerate"),
            node_cap=int(raw["node_cap"]) if "node_cap" in raw else None,
            time_cap=float(raw["time_cap"]) if "time_cap" in raw else None,
            solution_limit=int(raw["solution_limit"]) if "solution_limit" in raw else None,
            label=raw.get("label"),
            path=os.path.abspath(path),
        )
        cfg.validate()
        return cfg

    def validate(self) -> None:
        violations = check_admissible(self.v, self.k, self.t)
        if violations:
            raise ValidationError("inadmissible parameters: " + "; ".join(violations))
        if self.encoding not in ("a", "b", "c"):
            raise ValidationError(f"encoding must be a, b or c, not {self.encoding!r}")
        if self.solve_mode not in ("enumerate", "count", "first"):
            raise ValidationError(f"bad solve_mode {self.solve_mode!r}")
        if not os.path.exists(self.group_file):
            raise ValidationError(f"group file {self.group_file} does not exist")
        if self.encoding in ("b", "c") and not self.normalizer_file:
            raise ValidationError(f"encoding {self.encoding} requires normalizer_file")
        if self.normalizer_file and not os.path.exists(self.normalizer_file):
            raise ValidationError(f"normalizer file {self.normalizer_file} does not exist")
        try:
            read_group_file(self.group_file)
            if self.normalizer_file:
                read_group_file(self.normalizer_file)
        except ValueError as exc:
            raise ValidationError(str(exc)) from None

    def group(self) -> PermutationGroup:
        G = read_group_file(self.group_file)
        if G.degree != self.v:
            raise ValidationError(
                f"group degree {G.degree} does not match v={self.v}"
            )
        return G

    def normalizer(self) -> PermutationGroup:
        if not self.normalizer_file:
            raise ValidationError("no normalizer_file configured")
        N = read_group_file(self.normalizer_file)
        if N.degree != self.v:
            raise ValidationError("normalizer degree does not match v")
        return N

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.v}|{self.k}|{self.t}|{self.encoding}|".encode())
        with open(self.group_file, "rb") as fh:
            h.update(fh.read())
        h.update(b"|")
        if self.normalizer_file:
            with open(self.normalizer_file, "rb") as fh:
                h.update(fh.read())
        return h.hexdigest()[:16]

    def out(self, name: str) -> str:
        return os.path.join(self.output_dir, name)


# -- manifest ----------------------------------------------------------------


def _write_manifest_entry(cfg: JobConfig, artifact: str) -> None:
    path = cfg.out("manifest.txt")
    entries: dict = {}
    if os.path.exists(path):
        entries = dict(
            line.split()[0:2] for line in open(path, encoding="utf-8") if line.strip()
        )
    entries[artifact] = cfg.fingerprint()
    with open(path, "w", encoding="utf-8") as fh:
        for name in sorted(entries):
            fh.write(f"{name} {entries[name]}\n")


def _check_manifest(cfg: JobConfig, artifacts) -> None:
    path = cfg.out("manifest.txt")
    if not os.path.exists(path):
        raise ValidationError(f"missing manifest in {cfg.output_dir}; run earlier stages")
    entries = dict(
        line.split()[0:2] for line in open(path, encoding="utf-8") if line.strip()
    )
    fp = cfg.fingerprint()
    for art in artifacts:
        if art not in entries:
            raise ValidationError(f"artifact {art} not recorded; run its stage first")
        if entries[art] != fp:
            raise ValidationError(
                f"parameter hash mismatch for {art}: manifest {entries[art]}, config {fp}"
            )
        if not os.path.exists(cfg.out(art)):
            raise ValidationError(f"artifact {art} missing from {cfg.output_dir}")


def _log_timing(cfg: JobConfig, stage: str, seconds: float) -> None:
    entries: dict = {}
    path = cfg.out("timings.txt")
    if os.path.exists(path):
        for line in open(path, encoding="utf-8"):
            toks = line.split()
            if len(toks) == 2:
                entries[toks[0]] = toks[1]
    entries[stage] = f"{seconds:.3f}"
    with open(path, "w", encoding="utf-8") as fh:
        for name in sorted(entries):
            fh.write(f"{name} {entries[name]}\n")


# -- stages -------------------------------------------------------------------


def _orbit_shard(args):
    group_file, v, k, t, idx, njobs = args
    G = read_group_file(group_file)
    s = orbitgen.good_k_orbit_reps(G, v, k, t, shard=(idx, njobs))
    return [(r.rep, r.orbit_size) for r in s.reps]


def cmd_orbits(cfg: JobConfig, jobs: int = 1) -> None:
    os.makedirs(cfg.output_dir, exist_ok=True)
    G = cfg.group()
    t0 = time.perf_counter()
    tro = orbitgen.t_orbit_reps(G, cfg.v, cfg.t)
    log.info("t-orbits: %d", len(tro))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = pool.map(
                _orbit_shard,
                [(cfg.group_file, cfg.v, cfg.k, cfg.t, i, jobs) for i in range(jobs)],
            )
        merged = sorted(rep_size for part in parts for rep_size in part)
        reps = [
            orbitgen.OrbitRep(rep, size, i) for i, (rep, size) in enumerate(merged)
        ]
    else:
        reps = orbitgen.good_k_orbit_reps(G, cfg.v, cfg.k, cfg.t).reps
    log.info("good k-orbits: %d", len(reps))
    glabel = os.path.basename(cfg.group_file)
    orbitgen.write_orbit_file(cfg.out("torbits.txt"), cfg.v, cfg.k, cfg.t, tro, glabel)
    orbitgen.write_orbit_file(cfg.out("korbits.txt"), cfg.v, cfg.k, cfg.t, reps, glabel)
    _write_manifest_entry(cfg, "torbits.txt")
    _write_manifest_entry(cfg, "korbits.txt")
    _log_timing(cfg, "orbits", time.perf_counter() - t0)


def _load_orbits(cfg: JobConfig):
    _check_manifest(cfg, ["torbits.txt", "korbits.txt"])
    v, k, t, _, tro = orbitgen.read_orbit_file(cfg.out("torbits.txt"))
    v2, k2, t2, _, kreps = orbitgen.read_orbit_file(cfg.out("korbits.txt"))
    if (v, k, t) != (cfg.v, cfg.k, cfg.t) or (v2, k2, t2) != (cfg.v, cfg.k, cfg.t):
        raise ValidationError("orbit file parameters disagree with config")
    G = cfg.group()
    kset = orbitgen.GoodOrbitSet(
        v=cfg.v, k=cfg.k, t=cfg.t, reps=kreps, group_id=G.fingerprint()
    )
    return G, tro, kset


def cmd_km(cfg: JobConfig) -> None:
    G, tro, kset = _load_orbits(cfg)
    t0 = time.perf_counter()
    km = km_mod.build_km(G, tro, kset)
    km_mod.write_km_file(cfg.out("km.txt"), km)
    log.info("KM matrix: %d x %d", *km.shape)
    _write_manifest_entry(cfg, "km.txt")
    _log_timing(cfg, "km", time.perf_counter() - t0)


def cmd_encode(cfg: JobConfig) -> None:
    G, tro, kset = _load_orbits(cfg)
    _check_manifest(cfg, ["km.txt"])
    t0 = time.perf_counter()
    km = km_mod.build_km(G, tro, kset)
    classes = None
    if cfg.encoding in ("b", "c"):
        N = cfg.normalizer()
        if not verify_normalizes(N, G):
            raise ValidationError("normalizer_file does not normalize the group")
        classes = symbreak.normalizer_classes(N, kset, G)
        log.info("normalizer classes: %d", classes.n_classes)
    enc = symbreak.encode(km, classes, cfg.encoding)
    with open(cfg.out("xcc.txt"), "w", encoding="utf-8") as fh:
        fh.write(xcc.export_text(enc.problem))
    symbreak.write_copy_map(cfg.out("copymap.txt"), enc.copy_map)
    log.info(
        "encoding %s: %d+%d items, %d options",
        cfg.encoding,
        len(enc.problem.primary),
        len(enc.problem.secondary),
        enc.problem.n_options,
    )
    _write_manifest_entry(cfg, "xcc.txt")
    _write_manifest_entry(cfg, "copymap.txt")
    _log_timing(cfg, "encode", time.perf_counter() - t0)


def cmd_solve(cfg: JobConfig, limit: int | None = None) -> None:
    _check_manifest(cfg, ["xcc.txt"])
    t0 = time.perf_counter()
    with open(cfg.out("xcc.txt"), "r", encoding="utf-8") as fh:
        problem = xcc.import_text(fh.read())
    log.info("solving %s", problem)
    sols: list = []
    stats = xcc.solve(
        problem,
        mode=cfg.solve_mode,
        limit=limit if limit is not None else cfg.solution_limit,
        on_solution=sols.append,
        node_cap=cfg.node_cap,
        time_cap=cfg.time_cap,
    )
    with open(cfg.out("solutions.txt"), "w", encoding="utf-8") as fh:
        for s in sols:
            fh.write(" ".join(str(o) for o in s.option_ids) + "\n")
    with open(cfg.out("stats.txt"), "w", encoding="utf-8") as fh:
        fh.write(f"solutions={stats.solutions}\nnodes={stats.nodes}\n")
    log.info(
        "solutions=%d nodes=%d seconds=%.3f", stats.solutions, stats.nodes, stats.elapsed
    )
    _write_manifest_entry(cfg, "solutions.txt")
    _write_manifest_entry(cfg, "stats.txt")
    _log_timing(cfg, "solve", time.perf_counter() - t0)
    if stats.limit_hit:
        raise ResourceCapHit("solver stopped at a node, time or solution cap")


def cmd_classify(cfg: JobConfig, jobs: int = 1) -> None:
    G, tro, kset = _load_orbits(cfg)
    _check_manifest(cfg, ["solutions.txt", "copymap.txt"])
    t0 = time.perf_counter()
    copy_map = symbreak.read_copy_map(cfg.out("copymap.txt"))
    solutions = []
    with open(cfg.out("solutions.txt"), "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                solutions.append(tuple(int(x) for x in line.split()))
    all_designs = []
    for opt_ids in solutions:
        orbit_ids = {copy_map.get(o, o) for o in opt_ids}
        d = designs_mod.expand(orbit_ids, kset, G)
        rep = designs_mod.verify_steiner(d, cfg.t)
        if not rep.ok:
            raise ValidationError(f"solution {opt_ids} is not a Steiner design: {rep.violations[:3]}")
        all_designs.append(d)
    classes = designs_mod.classify(all_designs, known_autos=G.generators, jobs=jobs)
    os.makedirs(cfg.out("designs"), exist_ok=True)
    with open(cfg.out("classes.txt"), "w", encoding="utf-8") as fh:
        for i, cl in enumerate(classes, start=1):
            designs_mod.write_design_file(
                cfg.out(os.path.join("designs", f"design_{i:02d}.txt")),
                cl.representative,
            )
            cert = hashlib.sha256(cl.certificate).hexdigest()[:16]
            fh.write(
                f"class {i} aut_order={cl.aut_order} multiplicity={cl.multiplicity} "
                f"certificate={cert}\n"
            )
    designs_mod.write_gap_designs(
        cfg.out("designs.gap"), [cl.representative for cl in classes]
    )
    log.info("%d solutions -> %d isomorphism classes", len(solutions), len(classes))
    _write_manifest_entry(cfg, "classes.txt")
    _log_timing(cfg, "classify", time.perf_counter() - t0)


def _read_kv(path) -> dict:
    out: dict = {}
    if os.path.exists(path):
        for line in open(path, encoding="utf-8"):
            line = line.strip()
            if not line:
                continue
            if "=" in line:
                key, _, val = line.partition("=")
            else:
                parts = line.split()
                if len(parts) < 2:
                    continue
                key, val = parts[0], parts[1]
            out[key.strip()] = val.strip()
    return out


def cmd_report(cfg_paths, out_stream=None) -> str:
    """Summary and benchmark tables over one or more completed runs."""
    rows = []
    for path in cfg_paths:
        cfg = JobConfig.load(path)
        label = cfg.label or os.path.splitext(os.path.basename(cfg.group_file))[0]
        korb = "-"
        if os.path.exists(cfg.out("korbits.txt")):
            with open(cfg.out("korbits.txt"), encoding="utf-8") as fh:
                korb = fh.readline().split()[-1].split("=")[1]
        n_order = "-"
        ncal = "-"
        if cfg.normalizer_file and os.path.exists(cfg.normalizer_file):
            n_order = str(group_order(cfg.normalizer()))
        if os.path.exists(cfg.out("copymap.txt")):
            copies = symbreak.read_copy_map(cfg.out("copymap.txt"))
            if copies:
                ncal = str(len(copies))
        items = options = "-"
        if os.path.exists(cfg.out("xcc.txt")):
            with open(cfg.out("xcc.txt"), encoding="utf-8") as fh:
                head = fh.readline()
                prim, _, sec = head.partition("|")
                items = f"{len(prim.split())}+{len(sec.split())}"
                options = str(sum(1 for line in fh if line.strip()))
        stats = _read_kv(cfg.out("stats.txt"))
        timings = _read_kv(cfg.out("timings.txt"))
        n_designs = "-"
        if os.path.exists(cfg.out("classes.txt")):
            with open(cfg.out("classes.txt"), encoding="utf-8") as fh:
                n_designs = str(sum(1 for line in fh if line.strip()))
        rows.append(
            {
                "group": label,
                "method": cfg.encoding,
                "orbits": korb,
                "normalizer": n_order,
                "nreps": ncal,
                "designs": n_designs,
                "items": items,
                "options": options,
                "solutions": stats.get("solutions", "-"),
                "nodes": stats.get("nodes", "-"),
                "seconds": timings.get("solve", "-"),
            }
        )
    lines = ["group        orbits      |N|     |Ncal|  designs"]
    seen = set()
    for r in rows:
        if r["group"] in seen:
            continue
        seen.add(r["group"])
        lines.append(
            f"{r['group']:<12} {r['orbits']:>9} {r['normalizer']:>8} "
            f"{r['nreps']:>8} {r['designs']:>8}"
        )
    lines.append("")
    lines.append("group        method  items        options     sols      nodes    seconds")
    for r in rows:
        lines.append(
            f"{r['group']:<12} {r['method']:<7} {r['items']:<12} {r['options']:>9} "
            f"{r['solutions']:>8} {r['nodes']:>10} {r['seconds']:>10}"
        )
    text = "\n".join(lines) + "\n"
    if out_stream is not None:
        out_stream.write(text)
    return text


# -- entry points --------------------------------------------------------------


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="kmsteiner",
        description="Steiner design construction with prescribed automorphism groups",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("orbits", "km", "encode", "solve", "classify"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True)
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--limit", type=int, default=None)
    rp = sub.add_parser("report")
    rp.add_argument("--config", action="append", required=True,
                    help="config of a completed run; repeat for more rows")
    xp = sub.add_parser("xcc")
    xp.add_argument("action", choices=["solve"])
    xp.add_argument("file")
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="%(name)s: %(message)s"
    )
    try:
        if args.command == "report":
            cmd_report(args.config, sys.stdout)
            return EXIT_OK
        if args.command == "xcc":
            return _xcc_solve_file(args.file)
        cfg = JobConfig.load(args.config)
        if args.command == "orbits":
            cmd_orbits(cfg, jobs=args.jobs)
        elif args.command == "km":
            cmd_km(cfg)
        elif args.command == "encode":
            cmd_encode(cfg)
        elif args.command == "solve":
            cmd_solve(cfg, limit=args.limit)
        elif args.command == "classify":
            cmd_classify(cfg, jobs=args.jobs)
        return EXIT_OK
    except ResourceCapHit as exc:
        log.error("%s", exc)
        return EXIT_RESOURCE
    except designs_mod.BudgetExceeded as exc:
        log.error("%s", exc)
        return EXIT_RESOURCE
    except (ValidationError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_VALIDATION


def _xcc_solve_file(path) -> int:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            problem = xcc.import_text(fh.read())
    except (OSError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_VALIDATION
    stats = xcc.solve(problem, mode="count")
    print(f"solutions={stats.solutions} nodes={stats.nodes} seconds={stats.elapsed:.3f}")
    return EXIT_OK


def xcc_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="xcc", description="exact cover with colors: solve a problem file"
    )
    parser.add_argument("action", choices=["solve"])
    parser.add_argument("file")
    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.INFO)
    return _xcc_solve_file(args.file)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.

Subcommands::

    norm-eval        evaluate l0 / gauge / k-support norms on a vector
    norm-dual-check  verify the duality sandwich and the LMO equality
    lb-lsq           certified lower bound for sparse least squares
    lb-gso           certified lower bound over a group structure
    conj-caprac      closed-form conjugates at a dual vector
    exact-enumerate  exhaustive sparse least-squares oracle only
    selftest         embedded sanity battery

Exit codes: 0 success, 2 configuration error, 3 numeric guard tripped
(a certified bound or identity failed), 4 I/O failure.  Runs are
deterministic under a fixed ``--seed``; ``SPARSE_LB_THREADS`` caps the
batch worker pool.  Setting ``SPARSELB_FAULT_INJECT=corrupt-bound``
deliberately corrupts one dual value so CI can exercise the exit-3 guard.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from . import __version__
from .caprac import delta_levelset_conjugate, l0_conjugate
from .errors import BoundViolationError, ConfigError, SparseLBError
from .gso import GroupStructure, convolution_norm, dual_sup_norm, gso_lower_bound
from .io import (
    bound_report_payload,
    emit_report,
    instance_digest,
    load_group_structure,
    load_matrix_csv,
    load_vector_csv,
    validate_document,
)
from .lower_bound import (
    DualSearchConfig,
    LeastSquaresObjective,
    LsqInstance,
    dual_lower_bound_lsq,
    exact_sparse_lsq,
)
from .sparse_norms import gauge_norm, ksupport_norm, l0, level_set_membership, lmo_ksupport_ball

_COMMANDS = (
    "norm-eval",
    "norm-dual-check",
    "lb-lsq",
    "lb-gso",
    "conj-caprac",
    "exact-enumerate",
    "selftest",
)


@dataclass
class RunConfig:
    """Validated run configuration with defaults filled."""

    command: str
    matrix: str | None = None
    target: str | None = None
    vector: str | None = None
    groups: str | None = None
    k: int | None = None
    seed: int = 42
    tol: float = 1e-6
    starts: int = 16
    iters: int = 500
    samples: int = 4096
    out: str | None = None
    batch: int | None = None
    dim: int = 6
    pdim: int = 6
    trials: int = 200

    def __post_init__(self):
        if self.command not in _COMMANDS:
            raise ConfigError(f"command: unknown command {self.command!r}")
        if self.tol <= 0:
            raise ConfigError("tol: must be positive")
        if self.starts < 1:
            raise ConfigError("starts: must be >= 1")
        if self.iters < 1:
            raise ConfigError("iters: must be >= 1")
        if self.samples < 1:
            raise ConfigError("samples: must be >= 1")
        self.seed = int(self.seed)

    def require(self, *names: str) -> None:
        for name in names:
            if getattr(self, name) is None:
                raise ConfigError(f"{name}: required for {self.command}")

    def search_config(self, seed: int | None = None) -> DualSearchConfig:
        return DualSearchConfig(
            n_starts=self.starts,
            max_iters=self.iters,
            n_samples=self.samples,
            seed=self.seed if seed is None else seed,
        )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparselb",
        description="certified convex lower bounds for exact sparse optimization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("--config", help="JSON file with defaults for any flag")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--out", default=None, help="output JSON path")
        return p

    p = add("norm-eval", help="evaluate sparsity norms on a vector")
    p.add_argument("--vector", default=None, help="CSV vector path")
    p.add_argument("--k", type=int, default=None)

    p = add("norm-dual-check", help="duality sandwich and LMO checks")
    p.add_argument("--vector", default=None, help="CSV vector path")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)

    p = add("lb-lsq", help="certified sparse least-squares lower bound")
    p.add_argument("--matrix", default=None, help="CSV design matrix (p x d)")
    p.add_argument("--target", default=None, help="CSV target vector")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--batch", type=int, default=None,
                   help="solve a seeded random batch of this size instead")
    p.add_argument("--dim", type=int, default=None, help="batch d")
    p.add_argument("--pdim", type=int, default=None, help="batch p")
    p.add_argument("--starts", type=int, default=None)
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)

    p = add("lb-gso", help="certified group-structured lower bound")
    p.add_argument("--matrix", default=None)
    p.add_argument("--target", default=None)
    p.add_argument("--groups", default=None, help="group-structure JSON path")
    p.add_argument("--starts", type=int, default=None)
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)

    p = add("conj-caprac", help="closed-form conjugates at a dual vector")
    p.add_argument("--vector", default=None, help="CSV vector path")
    p.add_argument("--k", type=int, default=None)

    p = add("exact-enumerate", help="exhaustive sparse least-squares oracle")
    p.add_argument("--matrix", default=None)
    p.add_argument("--target", default=None)
    p.add_argument("--k", type=int, default=None)

    add("selftest", help="run the embedded sanity battery")
    return parser


def parse_config(argv: list[str]) -> RunConfig:
    """Parse CLI flags, merging defaults < JSON config < explicit flags."""
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code == 0:  # --help
            raise
        # argparse already printed a usage message; normalize the exit code
        raise ConfigError("invalid arguments") from exc
    values = {k: v for k, v in vars(ns).items() if k != "config"}
    config_path = getattr(ns, "config", None)
    merged: dict = {}
    if config_path:
        try:
            with open(config_path) as fh:
                doc = json.load(fh)
        except FileNotFoundError:
            raise
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON ({exc})") from exc
        known = {f.name for f in fields(RunConfig)}
        for key, val in doc.items():
            if key not in known:
                raise ConfigError(f"config: unknown field {key!r}")
            merged[key] = val
    for key, val in values.items():
        if val is not None:
            merged[key] = val
    merged["command"] = ns.command
    try:
        return RunConfig(**merged)
    except TypeError as exc:
        raise ConfigError(f"config: {exc}") from exc


def _envelope(cfg: RunConfig, digest: str) -> dict:
    return {
        "command": cfg.command,
        "seed": cfg.seed,
        "instance_digest": digest,
        "library_version": __version__,
    }


def _finish(cfg: RunConfig, document: dict) -> int:
    validate_document(document)
    if cfg.out:
        emit_report(document, cfg.out)
        print(f"wrote {cfg.out}")
    else:
        print(json.dumps(document, indent=2, sort_keys=True))
    return 0


def _pool_size() -> int:
    cap = os.environ.get("SPARSE_LB_THREADS")
    limit = min(4, os.cpu_count() or 1)
    if cap is not None:
        try:
            limit = max(1, int(cap))
        except ValueError:
            raise ConfigError("SPARSE_LB_THREADS: must be an integer") from None
    return limit


def _run_norm_eval(cfg: RunConfig) -> int:
    cfg.require("vector")
    x = load_vector_csv(cfg.vector)
    k = cfg.k if cfg.k is not None else min(2, x.size)
    doc = _envelope(cfg, instance_digest(cfg.command, x, k))
    doc["results"] = {
        "d": int(x.size),
        "k": int(k),
        "l0": l0(x),
        "gauge_norm": gauge_norm(x, k),
        "ksupport_norm": ksupport_norm(x, max(1, k)),
        "level_set_member": level_set_membership(x, k),
        "euclidean_norm": float(np.linalg.norm(x)),
    }
    return _finish(cfg, doc)


def _run_norm_dual_check(cfg: RunConfig) -> int:
    cfg.require("vector", "k")
    x = load_vector_csv(cfg.vector)
    k = int(cfg.k)
    rng = np.random.default_rng(cfg.seed)
    worst_sandwich = -math.inf
    for _ in range(cfg.trials):
        y = rng.standard_normal(x.size)
        slack = float(x @ y) - ksupport_norm(x, k) * gauge_norm(y, k)
        worst_sandwich = max(worst_sandwich, slack)
    xs = lmo_ksupport_ball(x, k) if np.any(x) else np.zeros_like(x)
    lmo_residual = abs(float(xs @ x) - gauge_norm(x, k)) if np.any(x) else 0.0
    doc = _envelope(cfg, instance_digest(cfg.command, x, k, cfg.seed))
    doc["results"] = {
        "worst_sandwich_slack": worst_sandwich,
        "lmo_residual": lmo_residual,
        "tolerance": cfg.tol,
    }
    code = _finish(cfg, doc)
    if worst_sandwich > cfg.tol or lmo_residual > cfg.tol:
        raise BoundViolationError("duality sandwich or LMO equality violated")
    return code


def _solve_one_lsq(inst: LsqInstance, cfg: RunConfig, seed: int) -> dict:
    report = dual_lower_bound_lsq(inst, cfg.search_config(seed))
    payload = bound_report_payload(report)
    payload["d"] = inst.d
    payload["p"] = inst.p
    return payload


def _run_lb_lsq(cfg: RunConfig) -> int:
    cfg.require("k")
    fault = os.environ.get("SPARSELB_FAULT_INJECT") == "corrupt-bound"
    if cfg.batch:
        ss = np.random.SeedSequence(cfg.seed)
        children = ss.spawn(cfg.batch)
        instances = []
        rngs = [np.random.default_rng(c) for c in children]
        for rng in rngs:
            A = rng.standard_normal((cfg.pdim, cfg.dim))
            z = rng.standard_normal(cfg.pdim)
            instances.append(LsqInstance(A, z, int(cfg.k)))
        seeds = [int(c.generate_state(1)[0] % (2**31)) for c in children]
        with ThreadPoolExecutor(max_workers=_pool_size()) as pool:
            payloads = list(
                pool.map(lambda iw: _solve_one_lsq(iw[0], cfg, iw[1]),
                         zip(instances, seeds))
            )
        for i, payload in enumerate(payloads):
            payload["index"] = i
        digest = instance_digest(cfg.command, cfg.seed, cfg.batch, cfg.dim,
                                 cfg.pdim, cfg.k)
        doc = _envelope(cfg, digest)
        if fault and payloads:
            payloads[0]["dual_value"] = payloads[0]["exact_value"] + 1.0
            payloads[0]["gap"] = -1.0
        doc["instances"] = payloads
        doc["n_instances"] = len(payloads)
        return _finish(cfg, doc)

    cfg.require("matrix", "target")
    A = load_matrix_csv(cfg.matrix)
    z = load_vector_csv(cfg.target)
    inst = LsqInstance(A, z, int(cfg.k))
    payload = _solve_one_lsq(inst, cfg, cfg.seed)
    payload["index"] = 0
    if fault:
        payload["dual_value"] = payload["exact_value"] + 1.0
        payload["gap"] = -1.0
    doc = _envelope(cfg, instance_digest(cfg.command, A, z, cfg.k, cfg.seed))
    doc.update({k: v for k, v in payload.items() if k != "index"})
    doc["instances"] = [payload]
    return _finish(cfg, doc)


def _run_lb_gso(cfg: RunConfig) -> int:
    cfg.require("matrix", "target", "groups")
    A = load_matrix_csv(cfg.matrix)
    z = load_vector_csv(cfg.target)
    gs = load_group_structure(cfg.groups)
    h = LeastSquaresObjective(A, z)
    report = gso_lower_bound(gs, "normalize", h, cfg.search_config())
    payload = bound_report_payload(report)
    payload["index"] = 0
    payload["d"] = gs.d
    payload["p"] = A.shape[0]
    doc = _envelope(cfg, instance_digest(cfg.command, A, z, repr(gs.groups),
                                         repr(gs.weights), cfg.seed))
    doc.update({k: v for k, v in payload.items() if k != "index"})
    doc["instances"] = [payload]
    doc["group_dual_norm_at_target"] = dual_sup_norm(gs, A.T @ z) if gs.d == A.shape[1] else None
    return _finish(cfg, doc)


def _run_conj_caprac(cfg: RunConfig) -> int:
    cfg.require("vector", "k")
    y = load_vector_csv(cfg.vector)
    k = int(cfg.k)
    closed = delta_levelset_conjugate(y, k)
    # enumeration cross-check: per-support closed-form suprema
    d = y.size
    if d <= 20:
        best = 0.0
        for support in itertools.combinations(range(d), min(k, d)):
            best = max(best, math.sqrt(math.fsum(float(y[i]) ** 2 for i in support)))
        enum_ok = best == closed
    else:
        best, enum_ok = None, None
    doc = _envelope(cfg, instance_digest(cfg.command, y, k))
    doc["results"] = {
        "levelset_conjugate": closed,
        "levelset_conjugate_enumerated": best,
        "enumeration_exact_match": enum_ok,
        "l0_conjugate": l0_conjugate(y),
    }
    code = _finish(cfg, doc)
    if enum_ok is False:
        raise BoundViolationError("level-set conjugate enumeration mismatch")
    return code


def _run_exact_enumerate(cfg: RunConfig) -> int:
    cfg.require("matrix", "target", "k")
    A = load_matrix_csv(cfg.matrix)
    z = load_vector_csv(cfg.target)
    inst = LsqInstance(A, z, int(cfg.k))
    t0 = time.perf_counter()
    value, support, x_star = exact_sparse_lsq(inst)
    doc = _envelope(cfg, instance_digest(cfg.command, A, z, cfg.k))
    doc["results"] = {
        "exact_value": value,
        "exact_support": support.as_one_based(),
        "x_star": [float(v) for v in x_star],
        "wallclock_s": time.perf_counter() - t0,
    }
    return _finish(cfg, doc)


def _selftest_checks() -> list[tuple[str, bool, str]]:
    from .extreal import lower_add, neg, upper_add

    checks: list[tuple[str, bool, str]] = []
    lattice = [-math.inf, -2.0, -1.0, 0.0, 1.0, 2.0, math.inf]
    ok = all(
        float(lower_add(u, v)) <= float(upper_add(u, v))
        and float(neg(lower_add(u, v))) == float(upper_add(neg(u), neg(v)))
        for u in lattice
        for v in lattice
    )
    checks.append(("moreau-additions", ok, "lattice identities"))

    x = np.array([3.0, -4.0, 0.0])
    ok = (
        gauge_norm(x, 1) == 4.0
        and ksupport_norm(x, 1) == 7.0
        and abs(ksupport_norm(x, 3) - 5.0) < 1e-12
    )
    checks.append(("norm-reductions", ok, "gauge/k-support closed forms"))

    inst = LsqInstance(np.eye(3), np.array([3.0, 1.0, 2.0]), 1)
    rep = dual_lower_bound_lsq(inst, DualSearchConfig(n_samples=512,
                                                      max_iters=120, seed=7))
    ok = rep.dual_value <= rep.exact_value + rep.inner_sup_tolerance
    checks.append(("certified-bound", ok,
                   f"dual {rep.dual_value:.6f} <= exact {rep.exact_value:.6f}"))

    gs = GroupStructure.with_unit_weights(3, [(0, 1), (1, 2)])
    val = convolution_norm(gs, np.array([3.0, 4.0, 0.0]))
    checks.append(("convolution-norm", abs(val - 5.0) < 1e-7,
                   f"value {val:.9f} (expect 5)"))
    return checks


def _run_selftest(cfg: RunConfig) -> int:
    failures = 0
    for name, ok, detail in _selftest_checks():
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        failures += 0 if ok else 1
    if failures:
        raise BoundViolationError(f"{failures} selftest check(s) failed")
    print("selftest: all checks passed")
    return 0


_DISPATCH = {
    "norm-eval": _run_norm_eval,
    "norm-dual-check": _run_norm_dual_check,
    "lb-lsq": _run_lb_lsq,
    "lb-gso": _run_lb_gso,
    "conj-caprac": _run_conj_caprac,
    "exact-enumerate": _run_exact_enumerate,
    "selftest": _run_selftest,
}


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        return _DISPATCH[cfg.command](cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # library-level validation of user-supplied data
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except BoundViolationError as exc:
        print(f"numeric guard tripped: {exc}", file=sys.stderr)
        return 3
    except SparseLBError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: run a worked scenario and print a checked report.

Exit status is 0 when every check passes, 1 when a check fails and 2 on
usage errors. Reports are byte-stable for identical arguments.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import settings
from .dynamics import FRC, UNITARY
from .errors import SpacetimeStateError
from .regions import CONTEXTUALITY, FULL_LOCALITY, NON_SEPARABILITY, classify_hierarchy
from .report import Check, ReportEnvelope, checks_csv, emit_csv, to_json, to_text
from .scenarios import (
    PRESETS,
    PRODUCT_CONTROL,
    ColemanHeppParams,
    EPRParams,
    coleman_hepp,
    epr_scenario,
    fock_check,
    hierarchy_dict,
    narratability_demo,
    preset,
)

COMMANDS = ("epr-unitary", "epr-collapse", "narratability", "coleman-hepp", "classify", "fock-check")
RENORMALIZE_LIMIT = 1e-6


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    alpha: complex = 1 / math.sqrt(2)
    beta: complex = 1 / math.sqrt(2)
    n: int = 5
    outcome: int | None = 0
    seed: int = 0
    tolerance: float = settings.DEFAULT_TOL
    format: str = "json"
    output: str | None = None
    preset: str = "epr-unitary"
    separation: int = 2
    n_layers: int = 2
    flip_layer: int = 1
    theta: float = 0.5
    max_dim: int = 200
    warnings: list[str] = field(default_factory=list)

    def parameters(self) -> dict:
        amp = lambda z: [z.real, z.imag]  # noqa: E731
        c = self.command
        params: dict = {"tolerance": self.tolerance}
        if c in ("epr-unitary", "epr-collapse", "classify"):
            params.update(alpha=amp(self.alpha), beta=amp(self.beta), separation=self.separation)
        if c in ("epr-collapse", "classify"):
            params["outcome"] = "sample" if self.outcome is None else self.outcome
            params["seed"] = self.seed
        if c == "classify":
            params.update(preset=self.preset, theta=self.theta)
        if c == "narratability":
            params.update(separation=self.separation, n_layers=self.n_layers, flip_layer=self.flip_layer)
        if c == "coleman-hepp":
            params.update(a=amp(self.alpha), b=amp(self.beta), n=self.n)
        if c == "fock-check":
            params["max_dim"] = self.max_dim
        return params


def parse_complex(text: str) -> complex:
    """``"re,im"`` or a bare real number."""
    parts = [p.strip() for p in text.split(",")]
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise UsageError(f"cannot parse complex amplitude {text!r}; expected 're,im'")


def normalize_pair(x: complex, y: complex, warnings: list[str]) -> tuple[complex, complex]:
    norm = math.sqrt(abs(x) ** 2 + abs(y) ** 2)
    off = abs(norm - 1.0)
    if off <= settings.DEFAULT_NORM_TOL:
        return x, y
    if off < RENORMALIZE_LIMIT:
        warnings.append(f"amplitudes renormalized (norm was {norm!r})")
        return x / norm, y / norm
    raise UsageError(f"amplitudes have norm {norm!r}; refusing to renormalize")


def _epr(cfg: RunConfig, mode: str) -> ReportEnvelope:
    p = EPRParams(cfg.alpha, cfg.beta, cfg.separation, mode, cfg.outcome if mode == FRC else 0)
    rep = epr_scenario(p, rng=np.random.default_rng(cfg.seed))
    section = "non-unitary-dynamics"
    return ReportEnvelope(cfg.command, cfg.parameters(), section, rep.to_results(), rep.checks)


def _narratability(cfg: RunConfig) -> tuple[ReportEnvelope, list[float]]:
    rep = narratability_demo(cfg.separation, cfg.n_layers, cfg.flip_layer)
    env = ReportEnvelope(cfg.command, cfg.parameters(), "relativity-narratability", rep.to_results(), rep.checks)
    return env, list(rep.staircase_distances)


def _coleman_hepp(cfg: RunConfig) -> ReportEnvelope:
    rep = coleman_hepp(ColemanHeppParams(cfg.n, cfg.alpha, cfg.beta))
    return ReportEnvelope(cfg.command, cfg.parameters(), "appearances-coleman-hepp", rep.to_results(), rep.checks)


def expected_level(name: str, alpha: complex, beta: complex) -> str:
    if name == PRODUCT_CONTROL or abs(alpha) < settings.tol() or abs(beta) < settings.tol():
        return FULL_LOCALITY
    return NON_SEPARABILITY if name == "epr-unitary" else CONTEXTUALITY


def _classify(cfg: RunConfig) -> ReportEnvelope:
    if cfg.preset not in PRESETS:
        raise UsageError(f"unknown preset {cfg.preset!r}; choose from {', '.join(PRESETS)}")
    outcome = 0 if cfg.outcome is None else cfg.outcome
    schedule, regions, foliations = preset(cfg.preset, cfg.alpha, cfg.beta, outcome)
    level = classify_hierarchy(schedule, regions, foliations, theta_nihil=cfg.theta)
    expected = expected_level(cfg.preset, cfg.alpha, cfg.beta)
    checks = [Check("level", expected, level.level, 0.0 if level.level == expected else 1.0, level.level == expected)]
    if cfg.preset == "epr-collapse" and expected == CONTEXTUALITY:
        site = regions[1].sites[0]
        found = any(
            w["kind"] == "inconsistent_region" and w["region"] == [site] and w["placement"] == [1]
            for w in level.witnesses
        )
        checks.append(Check("s2_witness", True, found, 0.0 if found else 1.0, found))
    results = hierarchy_dict(level)
    results["preset"] = cfg.preset
    return ReportEnvelope(cfg.command, cfg.parameters(), "non-unitary-dynamics-hierarchy", results, checks)


def _fock(cfg: RunConfig) -> ReportEnvelope:
    rep = fock_check(cfg.max_dim)
    return ReportEnvelope(cfg.command, cfg.parameters(), "spacetime-state-realism-fock", rep.to_results(), rep.checks)


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute one command; returns the exit status and the serialized report."""
    if cfg.command not in COMMANDS:
        raise UsageError(f"unknown command {cfg.command!r}")
    if not cfg.tolerance > 0:
        raise UsageError("tolerance must be positive")
    profile = None
    with settings.tolerances(tol=cfg.tolerance):
        if cfg.command == "epr-unitary":
            env = _epr(cfg, UNITARY)
        elif cfg.command == "epr-collapse":
            env = _epr(cfg, FRC)
        elif cfg.command == "narratability":
            env, profile = _narratability(cfg)
        elif cfg.command == "coleman-hepp":
            env = _coleman_hepp(cfg)
        elif cfg.command == "classify":
            env = _classify(cfg)
        else:
            env = _fock(cfg)
    if cfg.format == "json":
        text = to_json(env)
    elif cfg.format == "text":
        text = to_text(env)
    elif cfg.format == "csv":
        text = emit_csv(profile) if profile is not None else checks_csv(env.checks)
    else:
        raise UsageError(f"unknown format {cfg.format!r}")
    return (0 if env.overall_pass else 1), text


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=None, help="comparison tolerance (default 1e-10 or $%s)" % settings.ENV_TOL)
    common.add_argument("--format", choices=("json", "text", "csv"), default="json")
    common.add_argument("--output", "-o", default=None, help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=0)

    epr = argparse.ArgumentParser(add_help=False)
    epr.add_argument("--alpha", default=None, help="amplitude of |0>|1> as 're,im'")
    epr.add_argument("--beta", default=None, help="amplitude of |1>|0> as 're,im'")
    epr.add_argument("--separation", type=int, default=2)

    parser = argparse.ArgumentParser(prog="spacetime-states", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    sub.add_parser("epr-unitary", parents=[common, epr], help="spin flips at X1 and X2")
    p = sub.add_parser("epr-collapse", parents=[common, epr], help="measurements at X1 and X2")
    p.add_argument("--outcome", default="0", help="outcome for particle 1: 0, 1 or 'sample'")
    p = sub.add_parser("narratability", parents=[common], help="do-nothing vs double spin flip on the singlet")
    p.add_argument("--separation", type=int, default=2)
    p.add_argument("--n-layers", type=int, default=2)
    p.add_argument("--flip-layer", type=int, default=1)
    p = sub.add_parser("coleman-hepp", parents=[common], help="spin passing along a chain of qubits")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--a", default=None, help="spin-up amplitude as 're,im'")
    p.add_argument("--b", default=None, help="spin-down amplitude as 're,im'")
    p = sub.add_parser("classify", parents=[common, epr], help="place a preset on the locality hierarchy")
    p.add_argument("--preset", default="epr-unitary", help=f"one of {', '.join(PRESETS)}")
    p.add_argument("--outcome", default="0")
    p.add_argument("--theta", type=float, default=0.5, help="nihilism census threshold")
    p = sub.add_parser("fock-check", parents=[common], help="region factorization property suite")
    p.add_argument("--max-dim", type=int, default=200)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(ns.command, seed=ns.seed, format=ns.format, output=ns.output)
    cfg.tolerance = ns.tolerance if ns.tolerance is not None else settings.tol_from_env()
    first, second = ("a", "b") if ns.command == "coleman-hepp" else ("alpha", "beta")
    raw1, raw2 = getattr(ns, first, None), getattr(ns, second, None)
    if raw1 is not None or raw2 is not None:
        if raw1 is None or raw2 is None:
            raise UsageError(f"--{first} and --{second} must be given together")
        cfg.alpha, cfg.beta = normalize_pair(parse_complex(raw1), parse_complex(raw2), cfg.warnings)
    if hasattr(ns, "outcome"):
        if ns.outcome == "sample":
            cfg.outcome = None
        elif ns.outcome in ("0", "1"):
            cfg.outcome = int(ns.outcome)
        else:
            raise UsageError(f"outcome must be 0, 1 or 'sample', got {ns.outcome!r}")
    for name in ("n", "preset", "separation", "n_layers", "flip_layer", "theta", "max_dim"):
        if hasattr(ns, name):
            setattr(cfg, name, getattr(ns, name))
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        code, text = run(cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, SpacetimeStateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, ValueError) else 1
    for w in cfg.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Scenario configuration files.

INI syntax (``configparser``, no interpolation).  One optional ``[run]``
section holds defaults; each ``[scenario <id>]`` section describes one check::

    [run]
    seed = 20240601
    output = csv

    [scenario rademacher-poisson9]
    summand = rademacher
    law = poisson
    lambda = 9
    bound = poisson
    method = exact

Summand families and their keys:

    rademacher                  (none)
    two_point                   scale
    uniform                     halfwidth
    pareto                      alpha, scale (default 1)
    lattice                     atoms = "v:p, v:p, ..." or lattice_csv = path

Counting laws and their keys:

    deterministic               n
    binomial                    n, p
    poisson                     lambda
    poisson_binomial            p_vec = "p1, p2, ..."
    geometric                   n
    negative_binomial           r, n
    poisson_inverse_gamma       r, n

Other scenario keys: bound (selector or alias), growth (abs | log1p |
pow:<p> | min:<c>), eps, method (exact | montecarlo), replications,
confidence, seed, tail_tol, debug_constant.  ``debug_constant`` replaces the
bound's absolute constant and exists only for negative controls.  Keys that
do not apply to the chosen family or law are rejected.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field, replace
from pathlib import Path

from .dists import (
    FiniteLattice,
    Rademacher,
    SymmetricPareto,
    TwoPointSymmetric,
    UniformSymmetric,
    load_lattice_csv,
    parse_growth,
)
from .randomsums import BOUND_SELECTORS, DEFAULT_TAIL_TOL, CountingLaw, Scenario

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "RunConfig",
    "BOUND_ALIASES",
    "parse_config",
    "load_config",
    "serialize_config",
    "build_scenario",
    "resolve_bound",
]

DEFAULT_SEED = 20_240_601

SUMMAND_KEYS = {
    "rademacher": (),
    "two_point": ("scale",),
    "uniform": ("halfwidth",),
    "pareto": ("alpha", "scale"),
    "lattice": ("atoms", "lattice_csv"),
}
LAW_KEYS = {
    "deterministic": ("n",),
    "binomial": ("n", "p"),
    "poisson": ("lambda",),
    "poisson_binomial": ("p_vec",),
    "geometric": ("n",),
    "negative_binomial": ("r", "n"),
    "poisson_inverse_gamma": ("r", "n"),
}
COMMON_KEYS = ("summand", "law", "bound", "growth", "eps", "method", "replications", "confidence", "seed", "tail_tol", "debug_constant")
RUN_KEYS = ("seed", "output", "method", "replications", "confidence")

BOUND_ALIASES = {
    "theorem1": "fixed_general",
    "theorem2": "fixed_iid",
    "theorem3": "fixed_symmetric",
    "theorem4": "fixed_iid_symmetric",
    "corollary2": "truncated",
    "osipov": "truncated",
    "theorem5": "poisson_binomial",
    "corollary6": "binomial",
    "theorem7": "poisson",
    "theorem6": "poisson_binomial_growth",
    "corollary7": "binomial_growth",
    "theorem8": "poisson_growth",
    "remark2": "poisson_berry_esseen",
    "theorem9": "mixed_poisson",
    "corollary8": "geometric",
    "corollary9": "negative_binomial",
    "corollary10": "sichel",
}


class ConfigError(ValueError):
    """Invalid configuration; the message names the section and field."""


def resolve_bound(name: str) -> str:
    key = name.strip().lower().replace("-", "_")
    key = BOUND_ALIASES.get(key.replace("_", ""), key)
    if key not in BOUND_SELECTORS:
        raise ConfigError(f"unknown bound {name!r}; choose from {sorted(BOUND_SELECTORS)} or an alias {sorted(BOUND_ALIASES)}")
    return key


@dataclass(frozen=True)
class ScenarioConfig:
    """One scenario as written in the file; values stay strings until built."""

    id: str
    values: tuple[tuple[str, str], ...]

    def get(self, key: str, default: str | None = None) -> str | None:
        for k, v in self.values:
            if k == key:
                return v
        return default


@dataclass(frozen=True)
class RunConfig:
    run: tuple[tuple[str, str], ...] = ()
    scenarios: tuple[ScenarioConfig, ...] = ()
    base_dir: Path | None = field(default=None, compare=False)

    def run_value(self, key: str, default: str | None = None) -> str | None:
        return dict(self.run).get(key, default)

    @property
    def seed(self) -> int:
        return _int("run", "seed", self.run_value("seed", str(DEFAULT_SEED)), lo=0)

    @property
    def output(self) -> str:
        out = self.run_value("output", "csv")
        if out not in ("csv", "markdown"):
            raise ConfigError(f"[run] output: expected csv or markdown, got {out!r}")
        return out


def _norm(v: str) -> str:
    return " ".join(v.split())


def parse_config(text: str, base_dir: Path | None = None) -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None, default_section="__none__")
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    run: tuple[tuple[str, str], ...] = ()
    scenarios = []
    seen = set()
    for name in cp.sections():
        items = tuple((k, _norm(v)) for k, v in cp.items(name))
        if name == "run":
            bad = [k for k, _ in items if k not in RUN_KEYS]
            if bad:
                raise ConfigError(f"[run] unknown key(s) {bad}; allowed {list(RUN_KEYS)}")
            run = items
            continue
        head, _, sid = name.partition(" ")
        sid = sid.strip()
        if head != "scenario" or not sid:
            raise ConfigError(f"unknown section [{name}]; expected [run] or [scenario <id>]")
        if sid in seen:
            raise ConfigError(f"duplicate scenario id {sid!r}")
        seen.add(sid)
        sc = ScenarioConfig(sid, items)
        _validate_keys(sc)
        scenarios.append(sc)
    return RunConfig(run, tuple(scenarios), base_dir)


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, path.parent)


def serialize_config(cfg: RunConfig) -> str:
    cp = configparser.ConfigParser(interpolation=None, default_section="__none__")
    if cfg.run:
        cp["run"] = dict(cfg.run)
    for sc in cfg.scenarios:
        cp[f"scenario {sc.id}"] = dict(sc.values)
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def _validate_keys(sc: ScenarioConfig) -> None:
    where = f"[scenario {sc.id}]"
    keys = [k for k, _ in sc.values]
    for req in ("summand", "law", "bound"):
        if sc.get(req) is None:
            raise ConfigError(f"{where} missing required key {req!r}")
    fam, law = sc.get("summand"), sc.get("law")
    if fam not in SUMMAND_KEYS:
        raise ConfigError(f"{where} summand: unknown family {fam!r}; choose from {sorted(SUMMAND_KEYS)}")
    if law not in LAW_KEYS:
        raise ConfigError(f"{where} law: unknown counting law {law!r}; choose from {sorted(LAW_KEYS)}")
    allowed = set(COMMON_KEYS) | set(SUMMAND_KEYS[fam]) | set(LAW_KEYS[law])
    bad = [k for k in keys if k not in allowed]
    if bad:
        raise ConfigError(f"{where} unknown key(s) {bad} for summand {fam!r} and law {law!r}")


def _num(where, key, raw, *, lo=None, lo_open=False, hi=None):
    try:
        v = float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{where} {key}: expected a number, got {raw!r}") from None
    if v != v or v in (float("inf"), float("-inf")):
        raise ConfigError(f"{where} {key}: must be finite")
    if lo is not None and (v < lo or (lo_open and v == lo)):
        raise ConfigError(f"{where} {key}: must be {'>' if lo_open else '>='} {lo:g}, got {raw}")
    if hi is not None and v > hi:
        raise ConfigError(f"{where} {key}: must be <= {hi:g}, got {raw}")
    return v


def _int(where, key, raw, *, lo=None):
    try:
        v = int(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{where} {key}: expected an integer, got {raw!r}") from None
    if lo is not None and v < lo:
        raise ConfigError(f"{where} {key}: must be >= {lo}, got {raw}")
    return v


def _require(sc, where, key):
    v = sc.get(key)
    if v is None:
        raise ConfigError(f"{where} missing required key {key!r}")
    return v


def _summand(sc: ScenarioConfig, where: str, base_dir: Path | None):
    fam = sc.get("summand")
    try:
        if fam == "rademacher":
            return Rademacher()
        if fam == "two_point":
            return TwoPointSymmetric(_num(where, "scale", _require(sc, where, "scale"), lo=0, lo_open=True))
        if fam == "uniform":
            return UniformSymmetric(_num(where, "halfwidth", _require(sc, where, "halfwidth"), lo=0, lo_open=True))
        if fam == "pareto":
            alpha = _num(where, "alpha", _require(sc, where, "alpha"), lo=2, lo_open=True)
            return SymmetricPareto(alpha, _num(where, "scale", sc.get("scale", "1"), lo=0, lo_open=True))
        atoms, path = sc.get("atoms"), sc.get("lattice_csv")
        if (atoms is None) == (path is None):
            raise ConfigError(f"{where} lattice summand needs exactly one of 'atoms' or 'lattice_csv'")
        if path is not None:
            p = Path(path)
            if not p.is_absolute() and base_dir is not None:
                p = base_dir / p
            return load_lattice_csv(p)
        pairs = []
        for item in atoms.split(","):
            v, sep, pr = item.partition(":")
            if not sep:
                raise ConfigError(f"{where} atoms: expected 'value:prob' items, got {item.strip()!r}")
            pairs.append((_num(where, "atoms", v), _num(where, "atoms", pr, lo=0, hi=1)))
        return FiniteLattice(tuple(pairs))
    except ConfigError:
        raise
    except (ValueError, OSError) as exc:
        raise ConfigError(f"{where} summand: {exc}") from None


def _law(sc: ScenarioConfig, where: str) -> CountingLaw:
    kind = sc.get("law")
    g = lambda k: _require(sc, where, k)  # noqa: E731
    try:
        if kind == "deterministic":
            return CountingLaw.deterministic(_int(where, "n", g("n"), lo=1))
        if kind == "binomial":
            return CountingLaw.binomial(_int(where, "n", g("n"), lo=1), _num(where, "p", g("p"), lo=0, lo_open=True, hi=1))
        if kind == "poisson":
            return CountingLaw.poisson(_num(where, "lambda", g("lambda"), lo=0, lo_open=True))
        if kind == "poisson_binomial":
            ps = [_num(where, "p_vec", x, lo=0, lo_open=True, hi=1) for x in g("p_vec").split(",")]
            return CountingLaw.poisson_binomial(ps)
        r = _num(where, "r", g("r"), lo=0, lo_open=True) if kind != "geometric" else None
        n = _num(where, "n", g("n"), lo=0, lo_open=True)
        if kind == "geometric":
            return CountingLaw.geometric(n)
        if kind == "negative_binomial":
            return CountingLaw.negative_binomial(r, n)
        return CountingLaw.poisson_inverse_gamma(r, n)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{where} law: {exc}") from None


def build_scenario(sc: ScenarioConfig, cfg: RunConfig | None = None, *, seed: int | None = None) -> Scenario:
    """Turn a parsed section into a runnable :class:`Scenario`.

    Precedence for seed, method, replications and confidence: the scenario
    section, then ``[run]``, then built-in defaults.  ``seed`` (the CLI flag)
    overrides every file value.
    """
    cfg = cfg or RunConfig()
    where = f"[scenario {sc.id}]"
    pick = lambda k, d: sc.get(k, cfg.run_value(k, d))  # noqa: E731
    method = pick("method", "exact")
    if method not in ("exact", "montecarlo"):
        raise ConfigError(f"{where} method: expected exact or montecarlo, got {method!r}")
    try:
        bound = resolve_bound(sc.get("bound"))
    except ConfigError as exc:
        raise ConfigError(f"{where} bound: {exc}") from None
    growth = None
    if sc.get("growth") is not None:
        try:
            growth = parse_growth(sc.get("growth"))
        except ValueError as exc:
            raise ConfigError(f"{where} growth: {exc}") from None
    if bound.endswith("growth") and growth is None:
        raise ConfigError(f"{where} bound {bound!r} needs a 'growth' key")
    if seed is None:
        seed = _int(where, "seed", pick("seed", str(DEFAULT_SEED)), lo=0)
    debug = sc.get("debug_constant")
    try:
        return Scenario(
            id=sc.id,
            summand=_summand(sc, where, cfg.base_dir),
            law=_law(sc, where),
            bound=bound,
            method=method,
            replications=_int(where, "replications", pick("replications", "1000000"), lo=1),
            confidence=_num(where, "confidence", pick("confidence", "0.01"), lo=0, lo_open=True, hi=1),
            seed=seed,
            growth=growth,
            eps=_num(where, "eps", sc.get("eps", "1"), lo=0, lo_open=True),
            constant_override=None if debug is None else _num(where, "debug_constant", debug, lo=0, lo_open=True),
            tail_tol=_num(where, "tail_tol", sc.get("tail_tol", repr(DEFAULT_TAIL_TOL)), lo=0),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{where} {exc}") from None


def with_seed(cfg: RunConfig, seed: int) -> RunConfig:
    run = tuple((k, v) for k, v in cfg.run if k != "seed") + (("seed", str(seed)),)
    return replace(cfg, run=run)

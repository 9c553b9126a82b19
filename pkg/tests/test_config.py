from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clt_bounds.config import (
    BOUND_ALIASES,
    ConfigError,
    build_scenario,
    load_config,
    parse_config,
    resolve_bound,
    serialize_config,
)
from clt_bounds.dists import FiniteLattice, Rademacher, SymmetricPareto
from clt_bounds.randomsums import BOUND_SELECTORS

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

BASIC = """
[run]
seed = 11
output = markdown

[scenario a]
summand = rademacher
law = poisson
lambda = 9
bound = theorem7

[scenario b]
summand = lattice
atoms = -2:0.25, 0:0.5, 2:0.25
law = binomial
n = 5
p = 0.4
bound = corollary6
method = exact
"""


def test_parse_basic():
    cfg = parse_config(BASIC)
    assert cfg.seed == 11 and cfg.output == "markdown"
    a, b = (build_scenario(sc, cfg) for sc in cfg.scenarios)
    assert isinstance(a.summand, Rademacher) and a.law.lam == 9.0 and a.bound == "poisson" and a.seed == 11
    assert isinstance(b.summand, FiniteLattice) and b.law.n == 5 and b.bound == "binomial"
    assert build_scenario(cfg.scenarios[0], cfg, seed=5).seed == 5


def test_round_trip_examples():
    for text in [BASIC] + [p.read_text() for p in sorted(CONFIGS.glob("*.ini"))]:
        cfg = parse_config(text)
        assert parse_config(serialize_config(cfg)) == cfg


_key = st.sampled_from(["lambda", "n", "p", "r", "eps", "seed", "growth", "method"])
_val = st.text(st.characters(whitelist_categories=("L", "N"), whitelist_characters=".:,-_ "), min_size=1, max_size=12).map(
    lambda s: " ".join(s.split())
).filter(bool)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.text("abcxyz0123-", min_size=1, max_size=8), st.dictionaries(_key, _val, max_size=5)), max_size=4, unique_by=lambda t: t[0]))
def test_round_trip_property(sections):
    text = ""
    for sid, extra in sections:
        text += f"[scenario {sid}]\nsummand = rademacher\nlaw = poisson\nbound = poisson\n"
        text += "".join(f"{k} = {v}\n" for k, v in extra.items() if k in ("lambda", "eps", "seed", "growth", "method"))
    cfg = parse_config(text)
    assert parse_config(serialize_config(cfg)) == cfg


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("[scenario a]\nsummand = rademacher\nlaw = poisson\nlambda = 1\nbound = poisson\nalpha = 3\n", "unknown key(s) ['alpha']"),
        ("[scenario a]\nsummand = rademacher\nlaw = poisson\nlambda = 1\n", "missing required key 'bound'"),
        ("[scenario a]\nsummand = cauchy\nlaw = poisson\nbound = poisson\n", "summand: unknown family"),
        ("[scenario a]\nsummand = rademacher\nlaw = zeta\nbound = poisson\n", "law: unknown counting law"),
        ("[scenarios a]\nsummand = rademacher\n", "unknown section"),
        ("[run]\nverbose = 1\n", "[run] unknown key(s)"),
        ("[scenario a]\nsummand=rademacher\n[scenario a]\nsummand=rademacher\n", "malformed"),
        ("not an ini file", "malformed"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert fragment in str(exc.value)


@pytest.mark.parametrize(
    "body,fragment",
    [
        ("summand = rademacher\nlaw = poisson\nlambda = -1\nbound = poisson", "lambda: must be >"),
        ("summand = rademacher\nlaw = poisson\nlambda = many\nbound = poisson", "lambda: expected a number"),
        ("summand = rademacher\nlaw = poisson\nbound = poisson", "missing required key 'lambda'"),
        ("summand = rademacher\nlaw = binomial\nn = 2.5\np = 0.3\nbound = binomial", "n: expected an integer"),
        ("summand = pareto\nalpha = 1.5\nlaw = poisson\nlambda = 1\nbound = poisson", "alpha: must be > 2"),
        ("summand = lattice\natoms = 1:0.5, -1\nlaw = poisson\nlambda = 1\nbound = poisson", "atoms: expected 'value:prob'"),
        ("summand = lattice\natoms = 1:0.5, 2:0.5\nlaw = poisson\nlambda = 1\nbound = poisson", "summand:"),
        ("summand = rademacher\nlaw = poisson\nlambda = 1\nbound = theorem42", "unknown bound"),
        ("summand = rademacher\nlaw = poisson\nlambda = 1\nbound = geometric", "does not apply"),
        ("summand = rademacher\nlaw = poisson\nlambda = 1\nbound = theorem8", "needs a 'growth' key"),
        ("summand = rademacher\nlaw = poisson\nlambda = 1\nbound = theorem8\ngrowth = sqrt", "growth:"),
        ("summand = rademacher\nlaw = poisson\nlambda = 1\nbound = poisson\nmethod = bootstrap", "method: expected"),
        ("summand = rademacher\nlaw = poisson\nlambda = 1\nbound = poisson\nconfidence = 2", "confidence: must be <="),
    ],
)
def test_build_errors_name_the_field(body, fragment):
    cfg = parse_config(f"[scenario s1]\n{body}\n")
    with pytest.raises(ConfigError) as exc:
        build_scenario(cfg.scenarios[0], cfg)
    assert "[scenario s1]" in str(exc.value) and fragment in str(exc.value)


def test_aliases():
    assert set(BOUND_ALIASES.values()) <= set(BOUND_SELECTORS)
    assert resolve_bound("Theorem7") == "poisson"
    assert resolve_bound("corollary-10") == "sichel"
    assert resolve_bound("negative_binomial") == "negative_binomial"
    for name in BOUND_SELECTORS:
        assert resolve_bound(name) == name


def test_lattice_csv_relative_to_config():
    cfg = load_config(CONFIGS / "lattice_geometric.ini")
    sc = build_scenario(cfg.scenarios[0], cfg)
    assert sc.summand.atoms == ((-2.0, 0.25), (0.0, 0.5), (2.0, 0.25))
    assert sc.bound == "geometric" and sc.law.n == 50


def test_missing_file():
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(CONFIGS / "nope.ini")


def test_other_families(tmp_path):
    text = (
        "[scenario p]\nsummand = pareto\nalpha = 3.5\nscale = 2\nlaw = geometric\nn = 5\nbound = corollary8\nmethod = montecarlo\n"
        "[scenario d]\nsummand = rademacher\nlaw = deterministic\nn = 4\nbound = theorem4\ndebug_constant = 0.01\n"
        "[scenario g]\nsummand = uniform\nhalfwidth = 2\nlaw = poisson_binomial\np_vec = 0.5, 0.7\nbound = theorem6\ngrowth = min:1\n"
    )
    cfg = parse_config(text)
    p, d, g = (build_scenario(sc, cfg) for sc in cfg.scenarios)
    assert isinstance(p.summand, SymmetricPareto) and p.summand.scale == 2.0 and p.method == "montecarlo"
    assert d.constant_override == 0.01 and d.bound == "fixed_iid_symmetric"
    assert g.law.p_vec == (0.5, 0.7) and g.growth is not None

"""Configuration-driven experiment runner.

Every subcommand reads a plain-text config (``key = value`` lines, ``#``
comments), validates it against the documented key list, and writes CSV
artifacts whose header comments record the tool version and the hash of the
resolved configuration, so identical config + seed yields byte-identical
output on one platform.

Exit codes: 0 success, 1 invariant failure, 2 config error, 3 guard violation.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path

import numpy as np

from . import __version__, algebra as al, causalgeo as cg, dynamics as dyn
from . import field as fd, frontier as fr, pol, weylradial as wr
from .errors import ConfigError, GuardViolation, InvariantFailure

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_CONFIG = 2
EXIT_GUARD = 3


# --- config handling ----------------------------------------------------------

SCHEMAS = {
    "evolve": {
        "n": (int, 2048),
        "length": (float, 16.0),
        "system": (str, "dirac"),
        "mass": (float, 1.0),
        "chi": (int, 1),
        "bump_center": (float, 0.0),
        "bump_width": (float, 1.0),
        "times": (list, [0.5, 1.0, 2.0]),
        "edge_tau": (float, 1e-6),
    },
    "frontier": {
        "n": (int, 4096),
        "length": (float, 24.0),
        "system": (str, "dirac"),
        "mass": (float, 1.0),
        "chi": (int, 1),
        "bump_center": (float, 0.0),
        "bump_width": (float, 1.0),
        "n_times": (int, 17),
        "edge_tau": (float, 1e-6),
    },
    "boost": {
        "n": (int, 8192),
        "length": (float, 14.0),
        "mass": (float, 1.0),
        "rhos": (list, [0.5, 1.0, 2.0]),
        "target_t": (float, 1.5),
        "window": (float, 0.3),
        "edge_tau": (float, 1e-6),
    },
    "contract": {
        "n": (int, 8192),
        "length": (float, 14.0),
        "mass": (float, 1.0),
        "delta": (float, 0.1),
        "rhos": (list, [0.0, 1.0, 2.0, 3.0]),
        "target_t": (float, 1.5),
        "window": (float, 0.3),
    },
    "radial": {
        "nodes": (int, 4096),
        "r_max": (float, 2.0),
        "chi": (int, 1),
        "width": (float, 1.5),
        "times": (list, [0.5, 1.0, 2.0, 5.0, 10.0, 20.0]),
    },
    "pol": {
        "k_max": (float, 140.0),
        "k_nodes": (int, 8192),
        "mass": (float, 1.0),
        "shell_lo": (float, 1.0),
        "shell_hi": (float, 2.0),
        "ns": (list, [1, 2, 4, 8, 16, 32, 64]),
        "ball_radius": (float, 1.0),
    },
    "cascade": {
        "n": (int, 32),
        "length": (float, 8.0),
        "mass": (float, 1.0),
        "depth": (int, 8),
        "region": (str, "ball"),
        "ball_radius": (float, 1.0),
        "half_space_edge": (float, 0.0),
        "seed": (int, None),
    },
    "lattice": {},
    "lines": {
        "samples": (int, 10_000_000),
        "seed": (int, None),
        "target": (str, "4pi2over45"),
        "strata": (int, 16),
    },
    "selftest": {},
}

#: keys whose absence is a config error (stochastic experiments need a seed)
REQUIRED = {"cascade": ("seed",), "lines": ("seed",)}


def parse_config_text(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, val = (part.strip() for part in line.split("=", 1))
        out[key] = val
    return out


def _coerce(key: str, raw, typ):
    try:
        if typ is list:
            if isinstance(raw, list):
                return [float(v) for v in raw]
            return [float(v) for v in str(raw).replace(",", " ").split()]
        if typ is int:
            return int(str(raw))
        if typ is float:
            return float(str(raw))
        return str(raw)
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: cannot parse {raw!r}") from exc


def resolve_config(command: str, path: str | None, overrides) -> dict:
    schema = SCHEMAS[command]
    raw = {}
    if path:
        raw.update(parse_config_text(Path(path).read_text()))
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r}: expected key=value")
        key, val = item.split("=", 1)
        raw[key.strip()] = val.strip()
    cfg = {}
    for key, val in raw.items():
        if key not in schema:
            raise ConfigError(f"unknown key {key!r} for {command!r}")
        cfg[key] = _coerce(key, val, schema[key][0])
    for key, (typ, default) in schema.items():
        cfg.setdefault(key, default)
    for key in REQUIRED.get(command, ()):
        if cfg.get(key) is None:
            raise ConfigError(f"{command!r} requires key {key!r}")
    return cfg


def config_hash(cfg: dict) -> str:
    canon = "\n".join(f"{k} = {cfg[k]}" for k in sorted(cfg))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


class CsvWriter:
    """RFC-4180-style CSV with '#'-prefixed provenance comments, 17 digits."""

    def __init__(self, path: Path, cfg: dict, extra_comments=()):
        self.path = path
        self.lines = [f"# causalfermion {__version__}", f"# config {config_hash(cfg)}"]
        self.lines += [f"# {k} = {cfg[k]}" for k in sorted(cfg)]
        self.lines += [f"# {c}" for c in extra_comments]

    def header(self, *cols):
        self.lines.append(",".join(cols))

    def row(self, *vals):
        cells = []
        for v in vals:
            if isinstance(v, float):
                cells.append(f"{v:.17g}")
            else:
                cells.append(str(v))
        self.lines.append(",".join(cells))

    def write(self):
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text("\r\n".join(self.lines) + "\r\n")
        return self.path


def _require(cond: bool, message: str):
    if not cond:
        raise InvariantFailure(message)


def _system(cfg):
    if cfg.get("system", "dirac") == "dirac":
        return al.Dirac(cfg.get("mass", 1.0))
    return al.Weyl(int(cfg.get("chi", 1)))


def _spinor(system):
    if system.components == 4:
        return [1.0, 0.3, 1.0j, 0.0]
    return [1.0, 0.5j]


# --- subcommands ----------------------------------------------------------------


def run_evolve(cfg, out: Path) -> int:
    system = _system(cfg)
    grid = fd.Grid(1, cfg["n"], cfg["length"] / cfg["n"])
    horizon = max(abs(t) for t in cfg["times"])
    psi = fd.make_bump(grid, cfg["bump_center"], cfg["bump_width"], _spinor(system), system, guard=horizon)
    csv = CsvWriter(out / "evolve.csv", cfg)
    csv.header("t", "norm_dev", "causal_leak", "nw_leak", "edge_plus", "edge_minus")
    for t in cfg["times"]:
        causal_leak, nw_leak = dyn.newton_wigner_leak(psi, t)
        evolved = dyn.evolve_causal(psi, t)
        csv.row(
            t,
            abs(evolved.norm() - 1.0),
            causal_leak,
            nw_leak,
            fr.support_edge(evolved, +1, cfg["edge_tau"]),
            fr.support_edge(evolved, -1, cfg["edge_tau"]),
        )
        _require(abs(evolved.norm() - 1.0) <= 1e-12, "evolution norm drift")
        _require(causal_leak <= fd.EPS_LEAK, "causal leak above budget")
    print(csv.write())
    return EXIT_OK


def run_frontier(cfg, out: Path) -> int:
    system = _system(cfg)
    grid = fd.Grid(1, cfg["n"], cfg["length"] / cfg["n"])
    width = cfg["bump_width"]
    psi = fd.make_bump(grid, cfg["bump_center"], width, _spinor(system), system, guard=4.2 * width)
    times = np.linspace(-2.0 * (2 * width), 2.0 * (2 * width), cfg["n_times"])
    prof_p = fr.frontier_profile(psi, times, e=+1, tau=cfg["edge_tau"])
    prof_m = fr.frontier_profile(psi, times, e=-1, tau=cfg["edge_tau"])
    fit_p = fr.fit_tent(prof_p)
    fit_m = fr.fit_tent(prof_m)
    csv = CsvWriter(
        out / "frontier.csv",
        cfg,
        extra_comments=[
            f"tau = {cfg['edge_tau']}, dx = {grid.dx}, dt = {times[1]-times[0]}",
            f"fit_plus e0 = {fit_p.e0:.6g} t_e = {fit_p.t_e:.6g} residual = {fit_p.residual:.6g}",
            f"fit_minus e0 = {fit_m.e0:.6g} t_e = {fit_m.t_e:.6g} residual = {fit_m.residual:.6g}",
        ],
    )
    csv.header("t", "edge_plus_e3", "edge_minus_e3", "fit_value", "residual")
    for t, ep, em in zip(times, prof_p.edges, prof_m.edges):
        csv.row(float(t), float(ep), float(em), float(fit_p.value(t)), abs(float(fit_p.value(t)) - float(ep)))
    print(csv.write())
    _require(fit_p.residual <= 2 * grid.dx, f"tent residual {fit_p.residual} > 2 dx")
    _require(fit_m.residual <= 2 * grid.dx, f"tent residual {fit_m.residual} > 2 dx")
    return EXIT_OK


def _build_late_change(cfg):
    grid = fd.Grid(1, cfg["n"], cfg["length"] / cfg["n"])
    system = al.Dirac(cfg["mass"])
    psi0 = fd.make_bump(grid, 0.0, 0.7, _spinor(system), system, guard=3.3)
    eta = fr.make_seed_with_dates(psi0, cfg["target_t"], +1)
    psi = fr.make_late_change_state(eta, cfg["window"], +1)
    psi = fr.recenter_lower_edge(psi)
    alpha = (-fr.support_edge(psi, -1, 1e-6) - fr.support_edge(psi, +1, 1e-6)) / 2
    psi = fr.soften_lower_edge(psi, alpha)
    return grid, psi, alpha


def run_boost(cfg, out: Path) -> int:
    grid, psi, alpha = _build_late_change(cfg)
    csv = CsvWriter(out / "boost.csv", cfg, extra_comments=[f"alpha = {alpha}"])
    csv.header("rho", "strip_lo", "strip_hi", "p_inside")
    worst = 0.0
    for rho in cfg["rhos"]:
        hi = 2.0 * alpha * np.exp(-rho)
        p = fr.strip_probability_boosted(psi, rho, 0.0, hi)
        worst = max(worst, abs(1.0 - p))
        csv.row(float(rho), 0.0, float(hi), float(p))
    print(csv.write())
    _require(worst <= 1e-4, f"boosted strip leak {worst}")
    return EXIT_OK


def run_contract(cfg, out: Path) -> int:
    grid, psi, alpha = _build_late_change(cfg)
    table = fr.lorentz_contraction_scan(psi, cfg["delta"], cfg["rhos"])
    csv = CsvWriter(out / "contract.csv", cfg, extra_comments=[f"alpha = {alpha}"])
    csv.header("rho", "p_strip")
    for rho, p in table:
        csv.row(rho, p)
    print(csv.write())
    probs = [p for rho, p in table if rho >= 3.0]
    if probs:
        _require(min(probs) >= 0.999, f"contraction probability {min(probs)} < 0.999")
    return EXIT_OK


def run_radial(cfg, out: Path) -> int:
    w = cfg["width"]

    def gfun(r):
        prof = np.where(r < w, np.exp(-w * w / np.maximum(w * w - r * r, 1e-300)), 0.0)
        vals = np.zeros(r.shape + (2,), dtype=complex)
        vals[..., 0] = prof
        vals[..., 1] = 0.4j * prof * np.cos(2.1 * r)
        return vals

    profile = wr.RadialProfile.from_callable(gfun, cfg["r_max"], cfg["nodes"]).normalized()
    chi = cfg["chi"]
    csv = CsvWriter(out / "radial.csv", cfg)
    csv.header("t", "ball_prob", "slab_prob", "normA_plus", "normA_minus", "normR")
    for t in cfg["times"]:
        na, nb, nr = wr.splitting_norms(profile, t)
        csv.row(
            float(t),
            wr.ball_probability_evolved(profile, chi, float(t)),
            wr.slab_probability_evolved(profile, chi, float(t)),
            na,
            nb,
            nr,
        )
    print(csv.write())
    err = wr.crosscheck_against_spectral(profile, chi, 1.0)
    _require(err <= 1e-5, f"closed-form vs spectral discrepancy {err}")
    return EXIT_OK


def run_pol(cfg, out: Path) -> int:
    system = al.Dirac(cfg["mass"])
    k = np.linspace(0.0, cfg["k_max"], cfg["k_nodes"] + 1)
    shell = pol.shell_state(system, k, cfg["shell_lo"], cfg["shell_hi"])
    radii = np.linspace(0.0, 10.0, 4097)
    rows, target = pol.energy_growth(
        shell,
        cfg["ns"],
        factory=lambda n: pol.dilated_shell(system, k, cfg["shell_lo"], cfg["shell_hi"], n),
    )
    neg_fraction = dict(
        pol.truncation_negative_fraction(shell, cfg["ns"], cfg["ball_radius"], radii)
    )
    csv = CsvWriter(out / "pol.csv", cfg, extra_comments=[f"energy target = {target!r}"])
    csv.header("n", "ball_expectation", "energy_over_n", "negative_fraction")
    vals = []
    for n, en in rows:
        phi_n = pol.point_localized_sequence(shell, n)
        ball = pol.ball_expectation(phi_n, cfg["ball_radius"], radii)
        vals.append(ball)
        csv.row(n, ball, en, neg_fraction[n])
    print(csv.write())
    _require(vals[-1] >= 0.99, f"point localization stalled at {vals[-1]}")
    _require(abs(rows[-1][1] - target) <= 0.02 * target, "energy growth off target")
    return EXIT_OK


def run_cascade(cfg, out: Path) -> int:
    system = al.Dirac(cfg["mass"])
    grid = fd.Grid(3, cfg["n"], cfg["length"] / cfg["n"])
    phi = pol.random_positive_state(grid, system, seed=cfg["seed"])
    if cfg["region"] == "ball":
        mask = fd.RegionMask.ball(grid, (0.0, 0.0, 0.0), cfg["ball_radius"])
    elif cfg["region"] == "half_space":
        mask = fd.RegionMask.half_space(grid, cfg["half_space_edge"])
    else:
        raise ConfigError(f"unknown region {cfg['region']!r}")
    stats = pol.measurement_cascade(phi, mask, depth=cfg["depth"])
    g_csv = CsvWriter(out / "cascade_gamma.csv", cfg)
    g_csv.header("k", "gamma_k")
    for kk, gam in enumerate(stats.gamma):
        g_csv.row(kk, float(gam))
    print(g_csv.write())
    l_csv = CsvWriter(out / "cascade_levels.csv", cfg)
    l_csv.header("n", "omega_n", "sigma_n")
    for i, (om, sg) in enumerate(zip(stats.omega, stats.sigma), start=1):
        l_csv.row(i, float(om), float(sg))
    print(l_csv.write())
    s_csv = CsvWriter(out / "cascade_summary.csv", cfg)
    s_csv.header("sigma2", "sigma2_prime", "sigma2_bar", "sigma2_bar_prime", "omega_est")
    s_csv.row(
        stats.sigma2,
        stats.sigma2_prime,
        stats.sigma2_bar,
        stats.sigma2_bar_prime,
        float(stats.omega[-1]),
    )
    print(s_csv.write())
    _require(bool(np.all(np.diff(stats.omega) >= -1e-12)), "omega_n not monotone")
    _require(bool(np.all(np.diff(stats.sigma) <= 1e-12)), "sigma_n not monotone")
    s2 = stats.sigma2 + stats.sigma2_prime
    _require(0.5 - 1e-12 <= s2 < 1.0, f"sigma2 + sigma2' = {s2} outside [1/2, 1)")
    return EXIT_OK


def run_lattice(cfg, out: Path) -> int:
    I, R = cg.Interval, cg.LightconeRegion
    checks = []
    lhs = R.h(I.le(1.0)).intersect(R.k(I.gt(2.0))).perp()
    checks.append(("fhs_complement", lhs.equals(R.h(I.gt(1.0)).intersect(R.k(I.le(2.0))))))
    checks.append(("halfspace_perp_empty", R.h(I.le(0.0)).perp().is_empty))
    s = 2.0
    two = R.point(0, 0).union(R.point(s, s))
    checks.append(("two_point_completion", two.completion().equals(R.rect(I(0, s), I(0, s)))))
    L = R.h(I.lt(0.0)).intersect(R.k(I.gt(2.0)))
    M = R.h(I.lt(0.0)).intersect(R.k(I.gt(0.0)))
    wit = cg.join(L, M.perp()).intersect(M)
    checks.append(("orthomodularity_failure", wit.equals(M) and not wit.equals(L)))
    alpha, delta = 0.5, 2.0
    diamond = R.h(I.ge(alpha)).intersect(R.k(I.le(delta)))
    checks.append(
        ("diamond_flat_base", cg.spacelike_ray_perp(alpha, delta, -1, False).equals(diamond))
    )
    got = R.rect(I.ge(0.0), I.le(0.0)).perp_ntl()
    want = R.rect(I.le(0.0), I.ge(0.0)).subtract(R.point(0.0, 0.0))
    checks.append(("halfplane_ntl_completion", got.equals(want)))
    csv = CsvWriter(out / "lattice.csv", cfg)
    csv.header("check", "pass")
    ok = True
    for name, passed in checks:
        csv.row(name, int(passed))
        ok &= passed
    print(csv.write())
    _require(ok, "lattice identity failed")
    return EXIT_OK


def run_lines(cfg, out: Path) -> int:
    targets = {
        "4pi2over45": (cg.SHRINKING_BALL_MEASURE, cg.shrinking_ball_predicate,
                       "lines with |v| <= 1 - |x| (unit-speed budget family)"),
        "2pi2over9": (cg.DIAMOND_PAIR_MEASURE, cg.diamond_pair_predicate,
                      "lines meeting both unit diamonds at x0 = -1 and x0 = +1"),
    }
    if cfg["target"] not in targets:
        raise ConfigError(f"unknown target {cfg['target']!r}")
    target, predicate,描述 = targets[cfg["target"]]
    desc = 描述
    res = cg.monte_carlo_line_measure(
        predicate, (-1, -1, -1), (1, 1, 1), cfg["samples"], seed=cfg["seed"], strata=cfg["strata"]
    )
    z = res.z_score(target)
    csv = CsvWriter(out / "lines.csv", cfg, extra_comments=[f"region: {desc}"])
    csv.header("experiment", "N", "estimate", "stderr", "target", "z_score")
    csv.row(cfg["target"], res.samples, res.estimate, res.stderr, target, z)
    print(csv.write())
    _require(abs(z) <= 3.0, f"z-score {z} outside +-3")
    return EXIT_OK


def run_selftest(cfg, out: Path) -> int:
    failures = []

    def check(name, cond):
        print(f"{'pass' if cond else 'FAIL'}  {name}")
        if not cond:
            failures.append(name)

    rng = np.random.default_rng(0)
    for _ in range(100):
        p = rng.normal(size=3)
        m = abs(rng.normal()) + 0.1
        pp = al.dirac_projector(p, m, +1)
        pm = al.dirac_projector(p, m, -1)
        if max(
            np.max(np.abs(pp + pm - np.eye(4))),
            np.max(np.abs(pp @ pp - pp)),
            np.max(np.abs(pp @ pm)),
        ) > 1e-13:
            break
    else:
        check("projector_algebra", True)
    grid = fd.Grid(1, 1024, 12.0 / 1024)
    system = al.Dirac(1.0)
    psi = fd.make_bump(grid, 0.0, 1.0, [1, 0, 1j, 0], system, guard=2.2)
    phi = psi.to_momentum()
    check("parseval", abs(phi.norm_sq() - 1.0) <= 1e-12)
    check("roundtrip", (phi.to_position() - psi).norm() <= 1e-12)
    ev = dyn.evolve_causal(psi, 1.0)
    check("unitary_evolution", abs(ev.norm() - 1.0) <= 1e-12)
    both = dyn.evolve_causal(dyn.evolve_causal(psi, 0.6), 0.4)
    check("group_law", (both - ev).norm() <= 1e-12)
    cleak, nwleak = dyn.newton_wigner_leak(psi, 1.0)
    check("causal_leak_budget", cleak <= fd.EPS_LEAK)
    check("newton_wigner_leaks", nwleak >= 100 * fd.EPS_LEAK)
    tr = dyn.time_reverse(dyn.time_reverse(psi))
    check("time_reversal_square", (tr + psi).norm() <= 1e-12)
    prof = wr.RadialProfile.from_callable(
        lambda r: np.stack(
            [np.where(r < 1.5, np.exp(-2.25 / np.maximum(2.25 - r * r, 1e-300)), 0.0),
             np.zeros_like(r)], axis=-1
        ).astype(complex),
        2.0,
        2048,
    ).normalized()
    check("weyl_crosscheck", wr.crosscheck_against_spectral(prof, +1, 1.0) <= 1e-5)
    lhs = cg.LightconeRegion.h(cg.Interval.le(1.0)).intersect(
        cg.LightconeRegion.k(cg.Interval.gt(2.0))
    ).perp()
    rhs = cg.LightconeRegion.h(cg.Interval.gt(1.0)).intersect(
        cg.LightconeRegion.k(cg.Interval.le(2.0))
    )
    check("interval_algebra", lhs.equals(rhs))
    if failures:
        raise InvariantFailure(f"selftest failures: {failures}")
    print("selftest: all checks passed")
    return EXIT_OK


RUNNERS = {
    "evolve": run_evolve,
    "frontier": run_frontier,
    "boost": run_boost,
    "contract": run_contract,
    "radial": run_radial,
    "pol": run_pol,
    "cascade": run_cascade,
    "lattice": run_lattice,
    "lines": run_lines,
    "selftest": run_selftest,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="causalfermion", description=__doc__)
    parser.add_argument("command", choices=sorted(RUNNERS))
    parser.add_argument("--config", help="plain-text config file (key = value lines)")
    parser.add_argument("--out", default="out", help="artifact output directory")
    parser.add_argument(
        "--set", dest="overrides", action="append", metavar="KEY=VALUE",
        help="override a config key (repeatable)",
    )
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args.command, args.config, args.overrides)
        return RUNNERS[args.command](cfg, Path(args.out))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GuardViolation as exc:
        print(f"guard violation: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except InvariantFailure as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())

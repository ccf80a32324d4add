"""Command-line front end: describe, build, verify, bench."""
from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import os
import random
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from . import _kernels as kern
from .errors import ArtifactError, ConfigError
from .root_data import CATALOG, build_root_datum, weyl_group_order

DEFAULTS = {
    "class": {"group": "SL2", "p": "3", "characters": "2:1:6", "r": "1", "nu": "1"},
    "window": {"N": "6", "B": "1"},
    "run": {"verify": "type", "seed": "0", "threads": "0"},
}

VERIFICATIONS = ("type", "closed_form", "matching", "volume", "axiom_u", "descent", "e_rhoI",
                 "base_change", "relations", "support")


@dataclass
class RunConfig:
    group: str = "SL2"
    p: int = 3
    characters: str = "2:1:6"
    r: int = 1
    nu: tuple = (1,)
    N: int = 6
    B: int = 1
    verify: tuple = ()
    seed: int = 0
    threads: int = 0
    out: str | None = None
    source: dict = field(default_factory=dict)

    def canonical(self) -> dict:
        return {
            "group": self.group, "p": self.p, "characters": self.characters, "r": self.r,
            "nu": list(self.nu), "N": self.N, "B": self.B, "verify": list(self.verify), "seed": self.seed,
        }

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.canonical(), sort_keys=True).encode()).hexdigest()[:16]


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.replace(",", " ").split())


def load_config(path: str | None, overrides: dict | None = None) -> RunConfig:
    cp = configparser.ConfigParser()
    cp.optionxform = str
    cp.read_dict(DEFAULTS)
    if path:
        if not Path(path).exists():
            raise ConfigError(f"config file {path} not found")
        cp.read(path)
    cfg = RunConfig(
        group=cp["class"]["group"].strip(),
        p=cp.getint("class", "p"),
        characters=cp["class"]["characters"].strip(),
        r=cp.getint("class", "r"),
        nu=_ints(cp["class"]["nu"]),
        N=cp.getint("window", "N"),
        B=cp.getint("window", "B"),
        verify=tuple(v.strip() for v in cp["run"]["verify"].split(",") if v.strip()),
        seed=cp.getint("run", "seed"),
        threads=cp.getint("run", "threads"),
        source={s: dict(cp[s]) for s in cp.sections()},
    )
    for k, v in (overrides or {}).items():
        if v is not None:
            setattr(cfg, k, v)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    if cfg.group not in CATALOG:
        raise ConfigError(f"unknown group {cfg.group}; choose from {', '.join(CATALOG)}")
    d = build_root_datum(cfg.group)
    if weyl_group_order(d) % cfg.p == 0:
        raise ConfigError(f"p={cfg.p} divides |W_E|={weyl_group_order(d)} for {cfg.group}")
    if not 2 <= cfg.N <= 12:
        raise ConfigError("N must lie in [2, 12]")
    if cfg.r < 1:
        raise ConfigError("r must be positive")
    unknown = [v for v in cfg.verify if v not in VERIFICATIONS]
    if unknown:
        raise ConfigError(f"unknown verifications {unknown}; choose from {', '.join(VERIFICATIONS)}")


def parse_characters(cfg: RunConfig):
    """'cond:exp:order' per coordinate, or 'unit:level:order:i1/i2/...' for a character of O_E^x."""
    from .characters import SmoothCharacter, UnitCharacter, base_character

    d = build_root_datum(cfg.group)
    coords = []
    try:
        for item in cfg.characters.split(","):
            parts = item.strip().split(":")
            if parts[0] == "unit":
                e = d.splitting_degree if d.h is not None else 1
                level, order = int(parts[1]), int(parts[2])
                images = tuple(int(x) for x in parts[3].split("/"))
                coords.append(UnitCharacter(cfg.p, e, level, order, images))
            else:
                cond, exp, order = (int(x) for x in parts)
                coords.append(base_character(cfg.p, cond, exp, order))
        return SmoothCharacter(d, tuple(coords))
    except (ValueError, IndexError) as ex:
        raise ConfigError(f"bad character spec {cfg.characters!r}: {ex}") from ex


def principal_class(cfg: RunConfig):
    from .types_builder import PrincipalClass

    return PrincipalClass(build_root_datum(cfg.group), parse_characters(cfg))


# ---------------------------------------------------------------------------
# verifications
# ---------------------------------------------------------------------------

def _rec(x):
    if hasattr(x, "to_record"):
        return x.to_record()
    if isinstance(x, dict):
        return {str(k): _rec(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_rec(v) for v in x]
    if isinstance(x, (int, float, str, bool)) or x is None:
        return x
    return str(x)


def v_type(cfg, rng):
    from .characters import conductors
    from .types_builder import build_type, is_concave, twisted_levi_from_conductors

    cls = principal_class(cfg)
    tp = build_type(cls)
    cond = conductors(cls.chi)
    d = cls.datum
    sums = all(tp.f[i] + tp.f[d.neg(i)] == cond[i] for i in range(len(d.roots)))
    seq = twisted_levi_from_conductors(cls)
    depth_zero = all(c == 1 for c in cond.values())
    ok = sums and is_concave(d, tp.f) and (tp.is_iwahori() or not depth_zero)
    return ok, {"f": list(tp.f.values), "cond": cond, "levi_depths": list(seq.depths), "iwahori": tp.is_iwahori()}


def _window(cfg):
    from .integrals import EnumerationWindow

    return EnumerationWindow(cfg.N, cfg.B)


def v_closed_form(cfg, rng):
    from .characters import TorusPoint
    from .integrals import (ElementaryFunction, brute_twisted_orbital, closed_form_orbital, layer_type,
                            torus_units_mod)
    from .padic_arith import LocalRingSpec

    cls = principal_class(cfg)
    tp = layer_type(cls, cfg.r)
    phi = ElementaryFunction(tp, cfg.nu)
    spec = LocalRingSpec(cfg.p, cfg.r, cfg.N)
    rows, ok = [], True
    for m in torus_units_mod(cls.datum, spec, 2):
        rep = brute_twisted_orbital(phi, TorusPoint(m.units, phi.nu), window=_window(cfg), strict=False)
        good = rep.stable and rep.value == closed_form_orbital(phi, m)
        ok &= good
        rows.append({"m": [u.coeffs for u in m.units], "value": rep.value.to_record(), "ok": good})
    return ok, {"classes": len(rows), "failures": [r for r in rows if not r["ok"]][:5]}


def v_matching(cfg, rng):
    from .integrals import verify_matching

    rep = verify_matching(principal_class(cfg), cfg.nu, cfg.r, _window(cfg), seed=cfg.seed)
    return rep.ok, {"classes": len(rep.rows), "failures": len(rep.failures()), "theta_checks": len(rep.theta_checks)}


def v_volume(cfg, rng):
    from .integrals import volume_check

    rep = volume_check(principal_class(cfg), cfg.nu, cfg.r, seed=cfg.seed)
    return rep["ok"], {k: rep[k] for k in ("predicted", "count", "pairing")}


def v_axiom_u(cfg, rng):
    from .integrals import verify_axiom_u
    from .root_data import weyl_generate

    cls = principal_class(cfg)
    out, ok = {}, True
    for w in weyl_generate(cls.datum):
        c = verify_axiom_u(cls, w)
        ok &= c.ok
        out["".join(map(str, w.word)) or "1"] = {"cosets": c.cosets, "witnesses": len(c.witnesses),
                                                "missing": len(c.missing)}
    return ok, out


def v_descent(cfg, rng):
    from .errors import NotSemisimpleNorm
    from .integrals import torus_units_mod, verify_descent
    from .padic_arith import LocalRingSpec

    cls = principal_class(cfg)
    spec = LocalRingSpec(cfg.p, cfg.r, cfg.N)
    ms = torus_units_mod(cls.datum, spec, 1)
    rng.shuffle(ms)
    rows, ok = [], True
    for m in ms:
        try:
            res = verify_descent(cls, m, cfg.r, _window(cfg))
        except NotSemisimpleNorm:
            continue
        ok &= res["ok"]
        rows.append({"lhs": res["lhs"].value.to_record(), "rhs": res["rhs"].to_record(), "k": res["k"]})
        if len(rows) >= 4:
            break
    return ok and bool(rows), {"rows": rows}


def v_e_rhoI(cfg, rng):
    from .characters import TorusPoint
    from .integrals import compare_e_rhoI
    from .padic_arith import LocalRingSpec

    cls = principal_class(cfg)
    spec = LocalRingSpec(cfg.p, 1, cfg.N)
    out, ok = {}, True
    for name, delta in (("1", TorusPoint((spec.one(),))), ("m", TorusPoint((spec.element(2),)))):
        res = compare_e_rhoI(cls, delta, 1, _window(cfg))
        ok &= res["ok"]
        out[name] = {"I:J": res["I:J"], "lhs": res["lhs"].value.to_record(), "rhs": res["rhs"].value.to_record()}
    return ok, out


def v_base_change(cfg, rng):
    from .bernstein_center import (action_scalar, base_change_br, constant_term_cMG,
                                   norm_pullback_extended, random_center_element, random_extended)
    from .characters import pullback_norm

    chi = parse_characters(cfg)
    ok, n = True, 0
    for r in (2, 3):
        chi_r = pullback_norm(chi, r)
        for _ in range(20):
            z = random_center_element(chi_r, rng)
            xi = random_extended(chi, rng)
            ok &= action_scalar(base_change_br(z, r), xi) == action_scalar(z, norm_pullback_extended(xi, r))
            levi = () if rng.random() < 0.5 else (0,)
            ok &= base_change_br(constant_term_cMG(z, levi), r) == constant_term_cMG(base_change_br(z, r), levi)
            n += 1
    return ok, {"pairs": n}


def v_relations(cfg, rng):
    from .chevalley import verify_normal_form_roundtrip, verify_relations
    from .padic_arith import LocalRingSpec
    from .types_builder import build_type, commutator_closure

    d = build_root_datum(cfg.group)
    e = d.splitting_degree if d.h is not None else 1
    spec = LocalRingSpec(cfg.p, e, cfg.N)
    rel = verify_relations(cfg.group, spec, rng, 300)
    nf_bad = verify_normal_form_roundtrip(cfg.group, spec, rng, 50)
    clo = commutator_closure(build_type(principal_class(cfg)), rng, 60)
    return rel.ok and nf_bad == 0 and clo.ok, {"relations": rel.counts, "normal_form_failures": nf_bad,
                                               "closure": clo.counts}


def v_support(cfg, rng):
    from .types_builder import build_type, support_census

    c = support_census(build_type(principal_class(cfg)))
    return c.ok, c.summary()


IDENTITIES = {
    "type": "f(alpha) + f(-alpha) = cond(alpha) and concavity",
    "closed_form": "TO_{m u theta}(phi^{u,chi_r}) = chi_r(m)^-1",
    "matching": "SO_gamma(f^{t,chi}) = SO_{delta theta}(phi^{u,chi_r})",
    "volume": "Card(J_u \\ J) = q^{r <2 rho, nu>}",
    "axiom_u": "axiom for u: only the identity coset satisfies the triviality condition",
    "descent": "TO(e_rho) = |D(gamma)|^{-1/2} sum_w TO^T(e_{w rho_T})",
    "e_rhoI": "TO(e_{rho^I}) = [I:J] TO(e_rho)",
    "base_change": "action_scalar(b_r Z, xi) = action_scalar(Z, xi o N_r)",
    "relations": "commutator relations (1)-(3) and U_c/T_c closure",
    "support": "Hecke support = J W~_0chi J",
}

RUNNERS = {
    "type": v_type, "closed_form": v_closed_form, "matching": v_matching, "volume": v_volume,
    "axiom_u": v_axiom_u, "descent": v_descent, "e_rhoI": v_e_rhoI, "base_change": v_base_change,
    "relations": v_relations, "support": v_support,
}


def run(cfg: RunConfig) -> dict:
    """Execute the selected verifications in catalog order and return the report bundle."""
    import numpy

    order = [v for v in VERIFICATIONS if v in cfg.verify]
    reports, summary = {}, {}
    for name in order:
        rng = random.Random(f"{cfg.seed}:{name}")
        try:
            ok, details = RUNNERS[name](cfg, rng)
        except ArtifactError as ex:
            ok, details = False, {"error": f"{type(ex).__name__}: {ex}"}
        summary[name] = "pass" if ok else "fail"
        reports[name] = {"identity": IDENTITIES[name], "ok": bool(ok), "details": _rec(details)}
        if not ok:
            reports[name]["message"] = f"{name} failed: {IDENTITIES[name]}"
    return {
        "config": cfg.canonical(),
        "config_hash": cfg.digest(),
        "versions": {"artifact": __version__, "numpy": numpy.__version__},
        "reports": reports,
        "summary": summary,
        "all_pass": all(v == "pass" for v in summary.values()),
    }


# ---------------------------------------------------------------------------
# describe / build / bench
# ---------------------------------------------------------------------------

def describe(entity: str, cfg: RunConfig) -> str:
    from .characters import conductors, stabilizer_W0chi
    from .types_builder import build_type, twisted_levi_from_conductors

    d = build_root_datum(cfg.group)
    lines = []
    if entity == "group":
        lines.append(f"group {d.name}: rank {d.rank}, |W| = {weyl_group_order(d)}")
        lines.append(f"positive roots ({len(d.positive)}):")
        for i in d.positive:
            lines.append(f"  [{i}] {d.roots[i]}  coroot {d.coroots[i]}  height {d.height(i)}")
        lines.append(f"simple roots: {[d.roots[i] for i in d.simple]}")
        return "\n".join(lines)
    cls = principal_class(cfg)
    tp = build_type(cls)
    if entity == "type":
        cond = conductors(cls.chi)
        lines.append(f"type for {d.name}, p = {cfg.p}, character {cfg.characters}")
        lines.append("J = Iwahori" if tp.is_iwahori() else f"[I : J] = {tp.index_in_iwahori(cfg.p)}")
        lines.append(f"{'root':>16} {'cond':>5} {'f':>3}")
        for i, root in enumerate(d.roots):
            lines.append(f"{str(root):>16} {cond[i]:>5} {tp.f[i]:>3}")
        seq = twisted_levi_from_conductors(cls)
        for k, (sub, r) in enumerate(zip(seq.subsystems, seq.depths)):
            lines.append(f"G^{k + 1}: {len(sub)} roots, depth {r}")
        return "\n".join(lines)
    stab = stabilizer_W0chi(cls.chi)
    if entity == "center":
        lines.append(f"W_0chi has order {len(stab.finite)}; generators {[w.word for w in stab.generators]}")
        lines.append(f"center = W_0chi-invariant Laurent polynomials in {len(d.split_basis)} variables")
        return "\n".join(lines)
    if entity == "support":
        fin = [w.word for w in stab.finite]
        kind = "translation-only" if len(fin) == 1 else "translations and finite part"
        lines.append(f"W~_0chi: {kind}; finite part {fin}, translation rank {stab.translation_rank}")
        lines.append("support of H(G, rho) = J W~_0chi J")
        return "\n".join(lines)
    raise ConfigError(f"unknown entity {entity}; choose group, type, center or support")


def build(cfg: RunConfig) -> dict:
    from .characters import conductors
    from .types_builder import build_type

    cls = principal_class(cfg)
    tp = build_type(cls)
    d = cls.datum
    return {
        "group": d.name, "p": cfg.p, "characters": cfg.characters,
        "roots": [list(r) for r in d.roots],
        "cond": [conductors(cls.chi)[i] for i in range(len(d.roots))],
        "f": list(tp.f.values), "iwahori": tp.is_iwahori(),
    }


def bench(cfg: RunConfig, repeats: int = 3) -> dict:
    """Coset throughput of one brute orbital sum on both kernel paths (compile time excluded)."""
    from .characters import TorusPoint
    from .integrals import ElementaryFunction, _orbital_once, layer_type
    from .padic_arith import LocalRingSpec

    cls = principal_class(cfg)
    if cls.datum.name not in ("SL2", "GL2"):
        raise ConfigError("bench runs on SL2 or GL2")
    phi = ElementaryFunction(layer_type(cls, cfg.r), cfg.nu)
    spec = LocalRingSpec(cfg.p, cfg.r, cfg.N)
    units = tuple(spec.element([2] + [1] * (cfg.r - 1)) for _ in range(len(cls.chi.coords)))
    delta = TorusPoint(units, phi.nu)
    win = _window(cfg).bumped(dB=1)
    out = {}
    paths = ["numpy"] + (["numba"] if kern.HAVE_NUMBA else [])
    values = {}
    for which in paths:
        _orbital_once(phi, delta, win, which)  # warm-up / compile
        best = None
        for _ in range(repeats):
            t0 = time.perf_counter()
            v, n, _ = _orbital_once(phi, delta, win, which)
            dt = time.perf_counter() - t0
            best = dt if best is None else min(best, dt)
        values[which] = v
        out[which] = {"cosets": n, "seconds": round(best, 6), "cosets_per_second": int(n / best)}
    out["agree"] = len({repr(v) for v in values.values()}) == 1
    if "numba" in out:
        out["speedup"] = round(out["numpy"]["seconds"] / out["numba"]["seconds"], 2)
    return out


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _emit(payload, out: str | None) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2, sort_keys=True)
    if out:
        path = Path(out)
        base = os.environ.get("ARTIFACT_OUT_DIR")
        if base and not path.is_absolute():
            path = Path(base) / path
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n")
    else:
        print(text)


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int)
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--verify", metavar="LIST", help="comma-separated: " + ",".join(VERIFICATIONS))
    ap = argparse.ArgumentParser(prog="artifact", description="types, base change and orbital integrals")
    sub = ap.add_subparsers(dest="command", required=True)
    d = sub.add_parser("describe", parents=[common])
    d.add_argument("entity", choices=("group", "type", "center", "support"))
    sub.add_parser("build", parents=[common])
    sub.add_parser("verify", parents=[common])
    sub.add_parser("bench", parents=[common])
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    overrides = {"seed": args.seed, "threads": args.threads, "out": args.out}
    if args.verify is not None:
        overrides["verify"] = tuple(v.strip() for v in args.verify.split(",") if v.strip())
    try:
        cfg = load_config(args.config, overrides)
        kern.set_threads(cfg.threads or None)
        if args.command == "describe":
            _emit(describe(args.entity, cfg), cfg.out)
            return 0
        if args.command == "build":
            _emit(build(cfg), cfg.out)
            return 0
        if args.command == "bench":
            res = bench(cfg)
            _emit(res, cfg.out)
            return 0 if res["agree"] else 1
        bundle = run(cfg)
        _emit(bundle, cfg.out)
        for name, status in bundle["summary"].items():
            print(f"{name}: {status}", file=sys.stderr)
        return 0 if bundle["all_pass"] else 1
    except ConfigError as ex:
        print(f"config error: {ex}", file=sys.stderr)
        return 2
    except ArtifactError as ex:
        print(f"{type(ex).__name__}: {ex}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

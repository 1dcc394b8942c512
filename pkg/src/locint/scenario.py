"""Scenario files: named domains and operators plus an ordered task list.

A scenario is a JSON object::

    {"seed": 0,
     "domains":   {"D": <quantized domain> | <direct integral>},
     "operators": {"T": {"domain": "D", "top_matrix": ...} | {"rule": "diag_n", "depth": 32}},
     "tasks":     [{"task": "verify_dec_diag", "domain": "D"}, ...]}

Running one yields a :class:`~locint.report.Report` that is a pure function
of the scenario and the seed.
"""

import json
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import commutant as comm
from . import decomposable as dec
from . import direct_integral as di
from . import domain as qd
from . import instances
from . import operators as ops
from .errors import CapExceeded, LocintError, ParseError, UnresolvedReference
from .linalg import EQUALITY_TOL, RANK_RTOL, complex_from_json, operator_norm
from .report import FAIL, PASS, CheckReport, Report, status

DEFAULT_CAPS = {"ambient_dim": 64, "atoms": 16, "poset": 8}

TOLERANCES = {"rank_rtol": RANK_RTOL, "equality": EQUALITY_TOL,
              "reducing": ops.REDUCING_TOL, "inclusion": qd.INCLUSION_TOL,
              "norm_formula": 1e-10, "phi": 1e-12, "defect_monotone": 1e-12}

TASKS = ("validate", "seminorms", "norm_profile", "commutant", "verify_dec_diag",
         "verify_projective", "interchange", "density_profile", "random_suite")

SUITE_CHECKS = ("dec_diag", "containments", "projective", "norm_formula", "seminorm_laws",
                "phi", "density", "interchange")


def current_caps():
    """Size caps, overridable through ``LOCINT_CAPS`` (a JSON object)."""
    caps = dict(DEFAULT_CAPS)
    raw = os.environ.get("LOCINT_CAPS")
    if raw:
        try:
            override = json.loads(raw)
        except json.JSONDecodeError as e:
            raise ParseError(f"LOCINT_CAPS is not valid JSON: {e}") from None
        for k, v in override.items():
            if k not in caps:
                raise ParseError(f"LOCINT_CAPS: unknown cap {k!r}")
            caps[k] = int(v)
    return caps


@dataclass
class Scenario:
    seed: int
    domains: dict
    operators: dict
    tasks: list
    caps: dict = field(default_factory=current_caps)


def _check_caps(name, obj, caps):
    if isinstance(obj, di.DirectIntegralDomain):
        if len(obj.atoms) > caps["atoms"]:
            raise CapExceeded(f"domain {name!r}: {len(obj.atoms)} atoms > cap {caps['atoms']}")
        dims, poset = obj.ambient_dim, obj.poset
    else:
        dims, poset = obj.ambient_dim, obj.poset
    if dims > caps["ambient_dim"]:
        raise CapExceeded(f"domain {name!r}: ambient dimension {dims} > cap {caps['ambient_dim']}")
    if len(poset) > caps["poset"]:
        raise CapExceeded(f"domain {name!r}: {len(poset)} poset elements > cap {caps['poset']}")


def _precheck_domain(name, spec, caps):
    # reject oversized input before building anything
    try:
        if "measure" in spec:
            n_atoms = len(spec["measure"]["atoms"])
            if n_atoms > caps["atoms"]:
                raise CapExceeded(f"domain {name!r}: {n_atoms} atoms > cap {caps['atoms']}")
            total = sum(int(f["ambient_dim"]) for f in spec["fibers"].values())
            elements = [len(f["poset"]["elements"]) for f in spec["fibers"].values()]
        else:
            total = int(spec["ambient_dim"])
            elements = [len(spec["poset"]["elements"])]
    except (KeyError, TypeError) as e:
        raise ParseError(f"domain {name!r} is malformed: missing {e}") from None
    if total > caps["ambient_dim"]:
        raise CapExceeded(f"domain {name!r}: ambient dimension {total} > cap {caps['ambient_dim']}")
    if max(elements, default=0) > caps["poset"]:
        raise CapExceeded(f"domain {name!r}: poset has {max(elements)} elements > cap "
                          f"{caps['poset']}")


def load_domain(spec):
    if "measure" in spec:
        return di.DirectIntegralDomain.from_dict(spec)
    return qd.from_dict(spec)


def _domain_ref(spec):
    return spec.get("domain", spec.get("domain_ref"))


def load_operator(name, spec, domains, caps):
    if "rule" in spec:
        params = {k: v for k, v in spec.items() if k not in ("rule", "depth")}
        lazy = ops.lazy_rule(spec["rule"], spec.get("depth", 1), **params)
        top_dim = lazy.dim_rule(lazy.truncation_depth)
        if top_dim > caps["ambient_dim"]:
            raise CapExceeded(f"operator {name!r}: truncated dimension {top_dim} > cap "
                              f"{caps['ambient_dim']}")
        return lazy
    ref = _domain_ref(spec)
    if ref not in domains:
        raise UnresolvedReference(f"operator {name!r} refers to unknown domain {ref!r}")
    dom = domains[ref]
    if isinstance(dom, di.DirectIntegralDomain):
        if "fibers" in spec or "f" in spec:
            return dec.operator_from_dict(spec, dom)
        return ops.operator_from_dict(spec, dom.assembled)
    return ops.operator_from_dict(spec, dom)


def _task_refs(task):
    refs = []
    if "domain" in task:
        refs.append(("domain", task["domain"]))
    if "operator" in task:
        refs.append(("operator", task["operator"]))
    for g in task.get("generators", []):
        refs.append(("operator", g))
    return refs


def scenario_from_dict(data, caps=None):
    caps = caps or current_caps()
    if not isinstance(data, dict):
        raise ParseError("scenario must be a JSON object")
    seed = data.get("seed", 0)
    if not isinstance(seed, int):
        raise ParseError(f"seed must be an integer, got {seed!r}")
    domains = {}
    for name, spec in data.get("domains", {}).items():
        _precheck_domain(name, spec, caps)
        d = load_domain(spec)
        _check_caps(name, d, caps)
        domains[name] = d
    operators = {}
    for name, spec in data.get("operators", {}).items():
        operators[name] = load_operator(name, spec, domains, caps)
    tasks = list(data.get("tasks", []))
    for i, t in enumerate(tasks):
        kind = t.get("task")
        if kind not in TASKS:
            raise ParseError(f"task {i}: unknown task {kind!r}")
        for what, ref in _task_refs(t):
            table = domains if what == "domain" else operators
            if ref not in table:
                raise UnresolvedReference(f"task {i} ({kind}) refers to unknown {what} {ref!r}")
        if kind == "random_suite":
            if t.get("max_atoms", 4) > caps["atoms"]:
                raise CapExceeded(f"task {i}: max_atoms above cap {caps['atoms']}")
            if t.get("max_atoms", 4) * t.get("max_fiber_dim", 3) > caps["ambient_dim"]:
                raise CapExceeded(f"task {i}: instances may exceed ambient cap "
                                  f"{caps['ambient_dim']}")
    return Scenario(seed, domains, operators, tasks, caps)


def load_scenario(path):
    """Read and validate a scenario file.

    Raises
    ------
    ParseError
        Malformed JSON (with line and column) or an unknown task.
    UnresolvedReference
        A task or operator names something that is not defined.
    CapExceeded
        Some domain or suite exceeds the size caps.
    """
    with open(path) as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from None
    return scenario_from_dict(data)


# task runners; each returns a dict entry

def _as_local(op, level_hint=None):
    if isinstance(op, dec.DecomposableOperator):
        return op.assembled
    if isinstance(op, ops.LazyChainOperator):
        return ops.lazy_truncate(op, op.truncation_depth)
    return op


def seminorm_laws(t, s=None):
    """Residuals of the C*-seminorm laws at every level of ``t``."""
    star, adj, sub, mono = 0.0, 0.0, 0.0, 0.0
    tt = t.adjoint() @ t
    ts = t @ s if s is not None else None
    p = t.domain.poset
    for a in p:
        pa = ops.uniform_seminorm(t, a)
        star = max(star, abs(ops.uniform_seminorm(tt, a) - pa ** 2) / max(1.0, pa ** 2))
        adj = max(adj, abs(ops.uniform_seminorm(t.adjoint(), a) - pa))
        if s is not None:
            sub = max(sub, ops.uniform_seminorm(ts, a) - pa * ops.uniform_seminorm(s, a))
    for a, b in p.pairs():
        mono = max(mono, ops.uniform_seminorm(t, a) - ops.uniform_seminorm(t, b))
    return {"star": star, "adjoint": adj, "submultiplicative": sub, "monotone": mono}


def seminorm_laws_ok(r):
    return (r["star"] <= 1e-8 and r["adjoint"] <= 1e-10 and r["submultiplicative"] <= 1e-9
            and r["monotone"] <= 1e-12)


def _run_validate(task, sc, rng):
    d = sc.domains[task["domain"]]
    if isinstance(d, di.DirectIntegralDomain):
        reps = {str(p): qd.validate(d.fibers[p]) for p in d.atoms}
        reps["assembled"] = qd.validate(d.assembled)
        ok = all(r.ok for r in reps.values())
        return {"status": status(ok),
                "dimensions": {k: {str(a): v for a, v in r.dims.items()} for k, r in reps.items()},
                "residuals": {k: max(r.inclusion_residuals.values(), default=0.0)
                              for k, r in reps.items()},
                "details": {k: r.to_dict() for k, r in reps.items()}}
    r = qd.validate(d)
    return {"status": status(r.ok), "dimensions": {str(a): v for a, v in r.dims.items()},
            "residuals": {f"{a}<={b}": v for (a, b), v in r.inclusion_residuals.items()},
            "details": r.to_dict()}


def _run_seminorms(task, sc, rng):
    op = sc.operators[task["operator"]]
    t = _as_local(op)
    profile = {str(a): ops.uniform_seminorm(t, a) for a in t.domain.poset}
    res = seminorm_laws(t)
    out = {"status": status(seminorm_laws_ok(res)), "dimensions": {"levels": len(profile)},
           "residuals": res, "details": {"uniform": profile}}
    extra = {}
    for i, u in enumerate(task.get("vectors", [])):
        u = np.array([complex_from_json(z) for z in u])
        extra[f"strong[{i}]"] = ops.strong_seminorm(t, u)
    for i, (u, v) in enumerate(task.get("vector_pairs", [])):
        u = np.array([complex_from_json(z) for z in u])
        v = np.array([complex_from_json(z) for z in v])
        extra[f"weak[{i}]"] = ops.weak_seminorm(t, u, v)
    if extra:
        out["details"]["vector_seminorms"] = extra
    if isinstance(op, ops.LazyChainOperator) and op.name == "diag_n":
        scale = dict(op.params).get("scale", 1.0)
        dev = max(abs(profile[str(n)] - scale * n) for n in range(1, op.truncation_depth + 1))
        out["residuals"]["lazy_chain_profile"] = dev
        out["status"] = status(out["status"] == PASS and dev <= 1e-9)
    return out


def _run_norm_profile(task, sc, rng):
    op = sc.operators[task["operator"]]
    if isinstance(op, dec.DecomposableOperator):
        prof = dec.dec_norm_profile(op)
        worst = max(v["difference"] for v in prof.values())
        return {"status": status(worst <= TOLERANCES["norm_formula"]),
                "dimensions": {"levels": len(prof)}, "residuals": {"max_difference": worst},
                "details": {str(a): v for a, v in prof.items()}}
    t = _as_local(op)
    prof = {str(a): ops.uniform_seminorm(t, a) for a in t.domain.poset}
    mono = max((ops.uniform_seminorm(t, a) - ops.uniform_seminorm(t, b)
                for a, b in t.domain.poset.pairs()), default=0.0)
    return {"status": status(mono <= 1e-12), "dimensions": {"levels": len(prof)},
            "residuals": {"monotone": mono}, "details": prof}


def _run_commutant(task, sc, rng):
    d = sc.domains[task["domain"]]
    amb = comm.ambient_basis(d)
    gens = [_as_local(sc.operators[g]) for g in task.get("generators", [])]
    mprime = comm.commutant(gens, amb)
    res = {"commutator": comm.commutator_residual(mprime, gens)}
    dims = {"ambient": amb.dim, "generators": len(gens), "M'": mprime.dim}
    ok = res["commutator"] <= EQUALITY_TOL
    if task.get("double", False):
        mpp = comm.commutant(mprime, amb)
        dims["M''"] = mpp.dim
        m = comm.span(amb.n, gens)
        cmp = comm.subspace_compare(m.basis, mpp.basis)
        res["M_in_M''"] = cmp.a_in_b
        ok &= cmp.a_inside_b
    return {"status": status(ok), "dimensions": dims, "residuals": res}


def _report_entry(r):
    d = r.to_dict()
    d.pop("check", None)
    return d


def _run_verify_dec_diag(task, sc, rng):
    return _report_entry(comm.verify_dec_eq_diag_commutant(sc.domains[task["domain"]]))


def _run_verify_projective(task, sc, rng):
    return _report_entry(comm.verify_dec_projective_system(sc.domains[task["domain"]], rng=rng))


def _run_interchange(task, sc, rng):
    d = sc.domains[task["domain"]]
    r = di.interchange_check(d)
    out = _report_entry(r)
    if d.measure.is_counting:
        s = di.direct_sum_check(d)
        out["residuals"] = {"interchange": r.residuals, "direct_sum": s.residuals}
        out["status"] = status(r.passed and s.passed)
    return out


def density_check(dint, x, chain):
    prof = di.projection_defect_profile(dint, x, chain)
    cross = di.assembled_defect_profile(dint, x, chain)
    increase = max((b - a for a, b in zip(prof, prof[1:])), default=0.0)
    top = dint.poset.top
    own = [(v, all(dint.fibers[p].prefix_path(a, top) for p in dint.atoms))
           for a, v in zip(chain, prof) if dint.poset.leq(x.level, a)]
    res = {"nonincreasing": max(increase, 0.0),
           "own_level": max((v for v, _ in own), default=0.0),
           "assembled_vs_fiberwise": max(abs(a - b) for a, b in zip(prof, cross))}
    # off the canonical prefix path (diamond side branches) the zero is only up to rounding
    own_ok = all(v == 0.0 if exact else v <= 1e-24 for v, exact in own)
    ok = res["nonincreasing"] <= TOLERANCES["defect_monotone"] and own_ok \
        and res["assembled_vs_fiberwise"] <= 1e-12
    return CheckReport("density_profile", status(ok), {"chain": len(chain)}, res,
                       {"profile": prof})


def _run_density_profile(task, sc, rng):
    d = sc.domains[task["domain"]]
    if not isinstance(d, di.DirectIntegralDomain):
        d = di.DirectIntegralDomain(di.AtomicMeasureSpace.counting((0,)), {0: d})
    poset = d.poset
    chain = [poset.lookup(a) for a in task["chain"]] if "chain" in task \
        else poset.maximal_chains()[0]
    if "field" in task:
        f = task["field"]
        level = poset.lookup(f["level"])
        x = di.FiberField(level, {d.measure.lookup(k): np.array([complex_from_json(z) for z in v])
                                  for k, v in f["components"].items()})
    else:
        x = instances.random_field(rng, d, chain[-1])
    return _report_entry(density_check(d, x, chain))


def suite_instance(rng, task):
    return instances.random_dint(rng, max_atoms=task.get("max_atoms", 4),
                                 max_fiber_dim=task.get("max_fiber_dim", 3),
                                 poset=None, counting=task.get("counting", True))


def run_instance_checks(rng, dint, checks):
    """Every requested property check on one instance; returns CheckReports."""
    out = []
    if "dec_diag" in checks:
        out.append(comm.verify_dec_eq_diag_commutant(dint))
    if "containments" in checks:
        out.append(comm.verify_containments(dint))
    if "projective" in checks:
        out.append(comm.verify_dec_projective_system(dint, rng=rng))
    if "norm_formula" in checks:
        t = instances.random_decomposable(rng, dint)
        prof = dec.dec_norm_profile(t)
        worst = max(v["difference"] for v in prof.values())
        out.append(CheckReport("norm_formula", status(worst <= TOLERANCES["norm_formula"]),
                               {"levels": len(prof)}, {"max_difference": worst}))
    if "seminorm_laws" in checks:
        big = dint.assembled
        t = instances.random_local_operator(rng, big)
        s = instances.random_local_operator(rng, big)
        res = seminorm_laws(t, s)
        out.append(CheckReport("seminorm_laws", status(seminorm_laws_ok(res)), {}, res))
    if "phi" in checks:
        out.append(dec.verify_phi(dint, instances.random_function(rng, dint),
                                  instances.random_function(rng, dint)))
    if "density" in checks:
        ch = dint.poset.maximal_chains()[0]
        level = ch[int(rng.integers(len(ch)))]
        out.append(density_check(dint, instances.random_field(rng, dint, level), ch))
    if "interchange" in checks:
        out.append(di.interchange_check(dint))
        if dint.measure.is_counting:
            out.append(di.direct_sum_check(dint))
    return out


def _worst(residuals):
    vals = list(comm._flatten_values(residuals))
    return max(vals, default=0.0)


def _run_random_suite(task, sc, rng):
    count = int(task.get("count", 10))
    checks = tuple(task.get("checks", SUITE_CHECKS))
    unknown = set(checks) - set(SUITE_CHECKS)
    if unknown:
        raise ParseError(f"unknown suite checks {sorted(unknown)}")
    entries, failed = [], 0
    for i in range(count):
        dint = suite_instance(rng, task)
        reps = run_instance_checks(rng, dint, checks)
        ok = all(r.passed for r in reps)
        failed += not ok
        entries.append({
            "index": i, "status": status(ok),
            "instance": {"atoms": len(dint.atoms), "poset": dint.poset.to_dict(),
                         "fiber_dims": {str(p): {str(a): v for a, v in dint.fibers[p].dims.items()}
                                        for p in dint.atoms}},
            "checks": {r.check: {"status": r.status, "worst_residual": _worst(r.residuals)}
                       for r in reps}})
    worst = {}
    for e in entries:
        for name, c in e["checks"].items():
            worst[name] = max(worst.get(name, 0.0), c["worst_residual"])
    return {"status": status(failed == 0),
            "dimensions": {"count": count, "failed": failed},
            "residuals": worst, "instances": entries}


RUNNERS = {"validate": _run_validate, "seminorms": _run_seminorms,
           "norm_profile": _run_norm_profile, "commutant": _run_commutant,
           "verify_dec_diag": _run_verify_dec_diag, "verify_projective": _run_verify_projective,
           "interchange": _run_interchange, "density_profile": _run_density_profile,
           "random_suite": _run_random_suite}


def run_scenario(sc, seed=None, timings=False):
    """Execute the tasks in order.

    Check failures and library errors become FAIL entries; only
    infrastructure problems (caps, memory) propagate.  Each task draws from
    its own generator seeded with ``(seed, task index)`` so reordering or
    adding tasks does not perturb the others.  Timings are recorded only on
    request because they would break byte-identical reruns.
    """
    seed = sc.seed if seed is None else int(seed)
    entries = []
    for i, task in enumerate(sc.tasks):
        rng = np.random.default_rng([seed, i])
        start = time.perf_counter()
        try:
            entry = RUNNERS[task["task"]](task, sc, rng)
        except (CapExceeded, MemoryError):
            raise
        except LocintError as e:
            entry = {"status": FAIL, "error": f"{type(e).__name__}: {e}"}
        params = {k: v for k, v in task.items() if k != "task"}
        entry = {"task": task["task"], **({"params": params} if params else {}), **entry}
        if timings:
            entry["seconds"] = time.perf_counter() - start
        entries.append(_jsonable(entry))
    env = {"seed": seed, "prng": instances.PRNG_NAME, "caps": dict(sc.caps),
           "tolerances": dict(TOLERANCES), "version": __version__}
    return Report(entries, env)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def emit_report(report, fmt="json", path=None):
    """Render a report as ``json`` or ``text``; write it to ``path`` if given."""
    from .report import to_json, to_text
    if fmt == "json":
        out = to_json(report)
    elif fmt == "text":
        out = to_text(report)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        with open(path, "w") as fh:
            fh.write(out)
    return out


def load_report(path):
    with open(path) as fh:
        return Report.from_dict(json.load(fh))


def demo_scenario():
    """The built-in dim-8 instance and the diagonal lazy-chain example."""
    d8 = instances.dim8_instance()
    return {
        "seed": 0,
        "domains": {"dim8": d8.to_dict()},
        "operators": {"S": {"rule": "diag_n", "depth": 32},
                      "f": {"domain": "dim8", "f": {"1": [1.0, 0.0], "2": [0.0, 2.0]}}},
        "tasks": [{"task": "validate", "domain": "dim8"},
                  {"task": "verify_dec_diag", "domain": "dim8"},
                  {"task": "verify_projective", "domain": "dim8"},
                  {"task": "interchange", "domain": "dim8"},
                  {"task": "commutant", "domain": "dim8", "generators": ["f"], "double": True},
                  {"task": "density_profile", "domain": "dim8"},
                  {"task": "seminorms", "operator": "S"},
                  {"task": "norm_profile", "operator": "f"}],
    }


def operator_norm_of(op):
    return operator_norm(_as_local(op).top_matrix)

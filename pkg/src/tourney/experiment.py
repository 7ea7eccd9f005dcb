"""Seeded batch runs that produce one CSV row per (sweep point, seed)."""

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction

from . import rng
from .core import GeneratorSpec, InvalidParameter
from .embed import MODES, PipelineConfig, search_dk
from .ordering import analyze_ordering, local_search_ordering
from .triads import ALPHA_CAP, HypothesisViolated, as_fraction, count_directed_triangles, extract_triangle_rich

HEADER = ("n", "k", "eps", "mode", "seed", "found", "fail_stage", "alpha", "b_prime", "b_dprime", "triangles", "c_prime", "ms")


@dataclass
class ExperimentConfig:
    """A sweep of (n, k, eps) points crossed with a seed list.

    ``family`` is a GeneratorSpec template; n, and k or eps where the family
    takes them, are filled from each sweep point unless the template fixes
    them.  With ``search`` off the rows carry measurements only.  Wall time
    goes in the ``ms`` column only when ``timing`` is on, so that repeated
    runs stay byte-identical by default.
    """

    family: GeneratorSpec
    sweep: list
    seeds: list
    mode: str = "adaptive"
    output: str = None
    budget: float = 60.0
    search: bool = True
    timing: bool = False
    pipeline: dict = field(default_factory=dict)

    def validate(self):
        if not self.sweep:
            raise InvalidParameter("sweep must be nonempty")
        if len(set(self.seeds)) != len(self.seeds) or not self.seeds:
            raise InvalidParameter("seeds must be a nonempty list of distinct values")
        if self.budget is not None and self.budget <= 0:
            raise InvalidParameter("budget must be positive")
        if self.mode not in MODES:
            raise InvalidParameter(f"mode must be one of {MODES}")
        for point in self.sweep:
            if len(point) != 3:
                raise InvalidParameter(f"sweep point {point!r} is not (n, k, eps)")
        return self

    @classmethod
    def from_dict(cls, d):
        fam = d.get("family")
        if isinstance(fam, str):
            fam = {"family": fam}
        if not isinstance(fam, dict):
            raise InvalidParameter("family must be a name or a generator spec object")
        seeds = d.get("seeds", 1)
        seeds = list(range(seeds)) if isinstance(seeds, int) else [int(s) for s in seeds]
        sweep = [(int(n), int(k), as_fraction(e)) for n, k, e in d.get("sweep", [])]
        allowed = set(PipelineConfig.__dataclass_fields__) - {"mode", "seed", "time_budget"}
        pipeline = d.get("pipeline", {})
        if set(pipeline) - allowed:
            raise InvalidParameter(f"unknown pipeline keys {sorted(set(pipeline) - allowed)}")
        return cls(
            GeneratorSpec(**fam),
            sweep,
            seeds,
            d.get("mode", "adaptive"),
            d.get("output"),
            d.get("budget", 60.0),
            bool(d.get("search", True)),
            bool(d.get("timing", False)),
            pipeline,
        ).validate()

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def rows(self):
        for n, k, eps in self.sweep:
            for seed in self.seeds:
                yield n, k, as_fraction(eps), seed


def _fmt(x):
    return "" if x is None else f"{float(x):.10g}"


def instance_spec(template, n, k, eps, seed):
    spec = replace(template, seed=seed)
    if spec.n is None and spec.family != "dk":
        spec = replace(spec, n=n)
    if spec.k is None and spec.family in ("dk", "cyclic-blowup"):
        spec = replace(spec, k=k)
    if spec.eps is None and spec.family == "eps-random":
        spec = replace(spec, eps=float(eps))
    return spec


def run_row(cfg, n, k, eps, seed, keep=False):
    """Measure one instance and, if asked, search it.  Returns (csv fields, extras)."""
    t0 = time.perf_counter()
    T = instance_spec(cfg.family, n, k, eps, seed).generate()
    pseed = rng.derive(seed, "search")
    order = local_search_ordering(T, rng.derive(pseed, "order", 0))
    an = analyze_ordering(T, order)
    tri = count_directed_triangles(T)
    alpha = an.alpha
    c_prime = Fraction(tri) / (alpha * alpha * T.n**3) if alpha else None
    b_dprime = None
    if 0 < alpha <= ALPHA_CAP:
        try:
            b_dprime = len(extract_triangle_rich(T, an).edges)
        except HypothesisViolated:
            pass
    found, stage, report = "", "", None
    if cfg.search:
        budget = None if cfg.budget is None else max(cfg.budget - (time.perf_counter() - t0), 1e-3)
        pc = PipelineConfig(mode=cfg.mode, seed=pseed, time_budget=budget, **cfg.pipeline)
        report = search_dk(T, k, eps, pc)
        found = "1" if report.found else "0"
        stage = "" if report.found else report.fail_stage
    elapsed = time.perf_counter() - t0
    ms = round(1000 * elapsed) if cfg.timing else ""
    fields = (
        T.n, k, str(eps), cfg.mode, seed, found, stage, _fmt(alpha), an.num_long,
        "" if b_dprime is None else b_dprime, tri, _fmt(c_prime), ms,
    )
    extra = {"tournament": T, "report": report, "seconds": elapsed} if keep else None
    return fields, extra


def _row_job(args):
    return run_row(*args)


def run_experiment(cfg, jobs=1, keep=False):
    """Run every row; returns (csv text, list of per-row extras or None).

    Rows may run in parallel but are emitted in config order.  Writes the
    CSV to ``cfg.output`` when set.
    """
    cfg.validate()
    work = [(cfg, n, k, eps, seed, keep) for n, k, eps, seed in cfg.rows()]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_row_job, work))
    else:
        results = [_row_job(w) for w in work]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for fields, _ in results:
        writer.writerow(fields)
    text = buf.getvalue()
    if cfg.output:
        with open(cfg.output, "w", newline="") as fh:
            fh.write(text)
    return text, [extra for _, extra in results]


def read_rows(text):
    return list(csv.DictReader(io.StringIO(text)))

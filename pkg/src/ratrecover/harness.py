"""Monte Carlo campaigns, radius tables, config and instance files."""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import MISSING, dataclass, fields, replace
from typing import Optional

import numpy as np

from .field import FieldParams
from .keyeq import ObservationMatrix, build_matrix, candidate_from_fraction, solution_space
from .linalg import rank as matrix_rank
from .plswe import (
    GenerationError,
    N1,
    N2,
    PlsweParams,
    algorithm1,
    blackbox,
    gen_adversarial_instance,
    gen_system,
    min_length_n1,
    min_length_n2,
    oblivious_bounds,
    primed_radii,
    radius_glz2,
    radius_kps,
    rank_target,
)
from .poly import EvaluationGrid, error_locator
from .srfr import (
    DecodingFailure,
    RadiusReport,
    SrfrParams,
    d_fgE,
    gen_random_instance,
    radius_bk,
    radius_glz,
    random_error_positions,
    random_rational_vector,
    recover_from_space,
    verify_span_structure,
)

log = logging.getLogger(__name__)

MODES = ("srfr", "plswe", "oblivious", "adversarial")

RECOVERED, WRONG, EMPTY, EXCEEDED = "recovered", "wrong", "empty", "exceeded-detected"

CSV_COLUMNS = (
    "scenario_id", "q", "l", "n", "deg_f", "deg_g", "d_f", "d_g", "deg_A", "deg_b", "d_A", "d_b",
    "eps", "actual_errors", "radius_name", "radius_value", "trials", "recovered", "wrong", "empty",
    "exceeded_detected", "empirical_failure_rate", "theoretical_bound",
)


class ConfigError(ValueError):
    """Invalid campaign configuration; `field` names the offending key."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class CampaignConfig:
    q: int
    l: int
    n: int
    d_f: int
    d_g: int
    error_counts: tuple
    trials: int
    seed: int
    mode: str
    deg_f: Optional[int] = None
    deg_g: Optional[int] = None
    deg_A: int = 0
    deg_b: int = 0
    d_A: int = 0
    d_b: int = 0

    def __post_init__(self):
        object.__setattr__(self, "error_counts", tuple(int(c) for c in self.error_counts))
        if self.deg_f is None:
            object.__setattr__(self, "deg_f", self.d_f)
        if self.deg_g is None:
            object.__setattr__(self, "deg_g", self.d_g)
        self.validate()

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError("mode", f"must be one of {', '.join(MODES)}, got {self.mode!r}")
        try:
            FieldParams(self.q)
        except (ValueError, TypeError) as exc:
            raise ConfigError("q", str(exc)) from None
        if self.l < 1:
            raise ConfigError("l", "must be >= 1")
        if not 1 <= self.n <= self.q:
            raise ConfigError("n", f"must satisfy 1 <= n <= q, got {self.n}")
        if self.trials < 1:
            raise ConfigError("trials", "must be >= 1")
        if not 0 <= self.seed < 1 << 64:
            raise ConfigError("seed", "must be a 64-bit nonnegative integer")
        if not self.error_counts:
            raise ConfigError("error_counts", "at least one error count is required")
        for name in ("d_f", "d_g"):
            if not 0 <= getattr(self, name) < self.n:
                raise ConfigError(name, f"must satisfy 0 <= {name} < n")
        for c in self.error_counts:
            if not 0 <= c < self.n:
                raise ConfigError("error_counts", f"count {c} violates 0 <= eps < n")
        for deg, bound in (("deg_f", "d_f"), ("deg_g", "d_g"), ("deg_A", "d_A"), ("deg_b", "d_b")):
            d, b = getattr(self, deg), getattr(self, bound)
            if d < 0:
                raise ConfigError(deg, "must be >= 0")
            if d > b:
                raise ConfigError(deg, f"{deg}={d} exceeds {bound}={b}")

    @property
    def field(self) -> FieldParams:
        return FieldParams(self.q)


def parse_config(text: str) -> CampaignConfig:
    """Parse a key=value config; '#' starts a comment, unknown keys are rejected."""
    values: dict = {}
    known = {f.name for f in fields(CampaignConfig)}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ConfigError(key, "unknown key")
        if key in values:
            raise ConfigError(key, "given twice")
        try:
            if key == "mode":
                values[key] = value
            elif key == "error_counts":
                values[key] = tuple(int(t) for t in value.replace(",", " ").split())
            else:
                values[key] = int(value, 0)
        except ValueError:
            raise ConfigError(key, f"not an integer: {value!r}") from None
    required = [f.name for f in fields(CampaignConfig) if f.default is MISSING]
    for key in required:
        if key not in values:
            raise ConfigError(key, "missing")
    return CampaignConfig(**values)


def load_config(path) -> CampaignConfig:
    with open(path) as fh:
        return parse_config(fh.read())


def format_config(config: CampaignConfig) -> str:
    out = []
    for f in fields(CampaignConfig):
        v = getattr(config, f.name)
        out.append(f"{f.name} = {','.join(map(str, v)) if f.name == 'error_counts' else v}")
    return "\n".join(out) + "\n"


# Radii

def radius_report(config: CampaignConfig, eps: int) -> RadiusReport:
    """All radii for `config` with error bound and actual error count both equal to eps."""
    c = config
    primed = primed_radii(c.n, c.l, eps, c.d_f, c.d_g, c.d_A, c.d_b, c.deg_f, c.deg_g)
    bounds = SrfrParams(c.n, c.l, c.d_f, c.d_g, eps).bounds
    return RadiusReport(
        eps_bk=radius_bk(c.n, c.d_f, c.d_g),
        eps_glz=radius_glz(c.n, c.d_f, c.d_g, c.l),
        d_fgE=d_fgE(c.d_f, c.d_g, c.deg_f, c.deg_g, eps, eps),
        eps_kps=radius_kps(c.n, c.d_A, c.d_f, c.d_b, c.d_g),
        eps_glz2=radius_glz2(c.n, c.d_A, c.d_f, c.d_b, c.d_g, c.l),
        eps_bk_primed=primed.eps_bk,
        eps_kps_primed=primed.eps_kps,
        eps_glz_primed=primed.eps_glz,
        eps_glz2_primed=primed.eps_glz2,
        N1=min_length_n1(bounds, c.deg_f, c.deg_g, eps, c.l),
        N2=min_length_n2(bounds, c.deg_A, c.deg_b, eps, c.l),
        rho=rank_target(c.l, bounds, c.deg_f, c.deg_g, eps),
    )


def radius_table(config: CampaignConfig) -> list[tuple[int, RadiusReport]]:
    return [(eps, radius_report(config, eps)) for eps in config.error_counts]


def format_radius_table(config: CampaignConfig) -> str:
    table = radius_table(config)
    names = list(table[0][1].as_dict())
    header = ["eps"] + names
    rows = [[str(eps)] + [str(v) for v in r.as_dict().values()] for eps, r in table]
    widths = [max(len(h), *(len(row[k]) for row in rows)) for k, h in enumerate(header)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in rows]
    return "\n".join(lines)


# Trials

@dataclass(frozen=True)
class TrialRecord:
    trial: int
    radius_name: str
    radius_value: int
    actual_errors: int
    outcome: str
    dim_observed: int
    d_fgE_expected: int
    span_ok: Optional[bool] = None

    @property
    def success(self) -> bool:
        return self.outcome == RECOVERED

    def __post_init__(self):
        if self.outcome not in (RECOVERED, WRONG, EMPTY, EXCEEDED):
            raise ValueError(f"unknown outcome {self.outcome!r}")


def trial_rng(seed: int, scenario: int, trial: int) -> np.random.Generator:
    """Independent stream per (seed, scenario, trial); order of execution is irrelevant."""
    return np.random.default_rng(np.random.SeedSequence([seed, scenario, trial]))


def _system_with_degrees(c: CampaignConfig, grid, rng):
    for _ in range(100):
        sys, rv = gen_system(c.l, c.deg_A, c.deg_b, grid, rng, c.d_A, c.d_b)
        if rv.deg_f == c.deg_f and rv.deg_g == c.deg_g:
            return sys, rv
    raise GenerationError(
        f"systems with deg A={c.deg_A}, deg b={c.deg_b} did not produce deg f={c.deg_f}, "
        f"deg g={c.deg_g}; the generic degrees are {(c.l - 1) * c.deg_A + c.deg_b} and {c.l * c.deg_A}")


def _count_errors(obs: ObservationMatrix, truth: np.ndarray) -> int:
    return int(np.count_nonzero(np.any(obs.y != truth, axis=0)))


def run_trial(config: CampaignConfig, scenario: int, eps: int, trial: int) -> TrialRecord:
    c = config
    F = c.field
    rng = trial_rng(c.seed, scenario, trial)
    grid = EvaluationGrid.random(F, c.n, rng)
    if c.mode == "srfr":
        rv = random_rational_vector(F, c.l, c.deg_f, c.deg_g, grid, rng)
        sys = None
    else:
        sys, rv = _system_with_degrees(c, grid, rng)
    E = random_error_positions(c.n, eps, rng)
    locator = error_locator(grid, E)
    params = SrfrParams(c.n, c.l, c.d_f, c.d_g, eps)

    if c.mode == "srfr":
        obs = gen_random_instance(params, grid, rv, E, rng)
    elif c.mode in ("plswe", "oblivious"):
        obs = blackbox(sys, rv, grid, E, rng)
    actual = len(E)

    if c.mode in ("srfr", "plswe"):
        actual = _count_errors(obs, rv.evaluate_on(grid))
        expected = d_fgE(c.d_f, c.d_g, rv.deg_f, rv.deg_g, eps, actual)
        space = solution_space(obs, params.bounds)
        span_ok = verify_span_structure(space, rv, locator, expected + 1)
        try:
            out = recover_from_space(space, obs, params)
            outcome = RECOVERED if out == rv else WRONG
        except DecodingFailure:
            outcome = EMPTY
        if c.mode == "srfr":
            name, value = "eps_glz", radius_glz(c.n, c.d_f, c.d_g, c.l)
        else:
            name, value = "eps_glz2", radius_glz2(c.n, c.d_A, c.d_f, c.d_b, c.d_g, c.l)
        return TrialRecord(trial, name, value, actual, outcome, space.dim, expected, span_ok)

    if c.mode == "oblivious":
        actual = _count_errors(obs, rv.evaluate_on(grid))
        pp = PlsweParams(c.n, c.l, c.d_f, c.d_g, eps, c.d_A, c.d_b)
        primed = primed_radii(c.n, c.l, eps, c.d_f, c.d_g, c.d_A, c.d_b, rv.deg_f, rv.deg_g)
        threshold = max(primed.eps_glz, primed.eps_glz2)
        first, second = oblivious_bounds(pp)
        expect_solution = actual <= threshold
        delta1 = d_fgE(first.Df, first.Dg, rv.deg_f, rv.deg_g, 0, actual)
        delta2 = d_fgE(second.Df, second.Dg, rv.deg_f, rv.deg_g, 0, actual)
        expected = delta1 if delta1 >= 0 else delta2
        res = algorithm1(obs, pp)
        if res.exceeded:
            outcome = EXCEEDED if not expect_solution else EMPTY
        else:
            target = candidate_from_fraction(rv.f, rv.g, locator)
            outcome = RECOVERED if (expect_solution and res.solution == target) else WRONG
        dim = -1 if res.stage is None else solution_space(obs, first if res.stage == 1 else second).dim
        return TrialRecord(trial, "max_primed_glz", threshold, actual, outcome, dim, expected)

    # adversarial
    bounds = params.bounds
    n1 = min_length_n1(bounds, rv.deg_f, rv.deg_g, eps, c.l)
    n2 = min_length_n2(bounds, sys.deg_A, sys.deg_b, eps, c.l)
    if c.n < min(n1, n2):
        raise ConfigError("n", f"n={c.n} is below min(N1, N2)={min(n1, n2)} for eps={eps}")
    variant = N1 if n1 <= n2 else N2
    obs, _ = gen_adversarial_instance(sys, rv, grid, E, variant)
    target = rank_target(c.l, bounds, rv.deg_f, rv.deg_g, eps)
    m = build_matrix(obs, bounds)
    r = matrix_rank(m)
    expected = d_fgE(bounds.Df, bounds.Dg, rv.deg_f, rv.deg_g, 0, eps)
    return TrialRecord(trial, "rho", target, _count_errors(obs, rv.evaluate_on(grid)),
                       RECOVERED if r == target else WRONG, m.cols - r, expected)


def _is_success(config: CampaignConfig, rec: TrialRecord) -> bool:
    if config.mode == "oblivious":
        return rec.outcome in (RECOVERED, EXCEEDED)
    return rec.outcome == RECOVERED


def theoretical_bound(config: CampaignConfig, eps: int) -> float:
    if config.mode == "adversarial":
        return 0.0
    p = (config.d_g + eps) / config.q
    return 2 * p if config.mode == "oblivious" else p


def binomial_sigma(p: float, trials: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / trials)


@dataclass
class CampaignResult:
    config: CampaignConfig
    rows: list
    records: dict  # scenario id -> list[TrialRecord]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in self.rows:
            w.writerow(row)
        return buf.getvalue()


def _run_job(args):
    config, scenario, eps, trial = args
    return run_trial(config, scenario, eps, trial)


def run_campaign(config: CampaignConfig, csv_path=None, workers: int = 1) -> CampaignResult:
    """Run every (error count, trial) pair and aggregate one row per error count."""
    jobs = [(config, s, eps, t) for s, eps in enumerate(config.error_counts) for t in range(config.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_job, jobs, chunksize=max(1, len(jobs) // (8 * workers))))
    else:
        results = [_run_job(j) for j in jobs]
    records: dict = {}
    for (_, s, _, _), rec in zip(jobs, results):
        records.setdefault(s, []).append(rec)

    rows = []
    c = config
    for s, eps in enumerate(c.error_counts):
        recs = records[s]
        counts = {k: sum(r.outcome == k for r in recs) for k in (RECOVERED, WRONG, EMPTY, EXCEEDED)}
        successes = sum(_is_success(c, r) for r in recs)
        actual = sorted({r.actual_errors for r in recs})
        rows.append({
            "scenario_id": s, "q": c.q, "l": c.l, "n": c.n, "deg_f": c.deg_f, "deg_g": c.deg_g,
            "d_f": c.d_f, "d_g": c.d_g, "deg_A": c.deg_A, "deg_b": c.deg_b, "d_A": c.d_A, "d_b": c.d_b,
            "eps": eps,
            "actual_errors": actual[0] if len(actual) == 1 else f"{actual[0]}-{actual[-1]}",
            "radius_name": recs[0].radius_name, "radius_value": recs[0].radius_value,
            "trials": len(recs), "recovered": counts[RECOVERED], "wrong": counts[WRONG],
            "empty": counts[EMPTY], "exceeded_detected": counts[EXCEEDED],
            "empirical_failure_rate": f"{(len(recs) - successes) / len(recs):.6g}",
            "theoretical_bound": f"{theoretical_bound(c, eps):.6g}",
        })
        log.info("scenario %d eps=%d: %d/%d successes", s, eps, successes, len(recs))
    result = CampaignResult(config, rows, records)
    if csv_path is not None:
        with open(csv_path, "w", newline="") as fh:
            fh.write(result.to_csv())
    return result


# Instance files

@dataclass
class Instance:
    obs: ObservationMatrix
    params: object  # SrfrParams, or PlsweParams when d_A, d_b are present

    @property
    def oblivious(self) -> bool:
        return isinstance(self.params, PlsweParams)


class InstanceFormatError(ValueError):
    pass


def parse_instance(text: str) -> Instance:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if len(lines) < 2:
        raise InstanceFormatError("instance needs a header line and an evaluation-point line")
    try:
        header = [int(t) for t in lines[0].split()]
    except ValueError:
        raise InstanceFormatError(f"non-integer in header: {lines[0]!r}") from None
    if len(header) not in (6, 8):
        raise InstanceFormatError("header must be 'q n l d_f d_g eps [d_A d_b]'")
    q, n, l, d_f, d_g, eps = header[:6]
    if len(lines) != l + 2:
        raise InstanceFormatError(f"expected {l + 2} lines for l={l}, got {len(lines)}")
    try:
        field = FieldParams(q)
        rows = [[int(t) for t in ln.split()] for ln in lines[1:]]
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from None
    for k, row in enumerate(rows):
        if len(row) != n:
            raise InstanceFormatError(f"line {k + 2} has {len(row)} values, expected n={n}")
        if any(not 0 <= v < q for v in row):
            raise InstanceFormatError(f"line {k + 2} has a non-canonical residue")
    try:
        grid = EvaluationGrid(field, tuple(rows[0]))
        obs = ObservationMatrix(grid, np.array(rows[1:], dtype=field.dtype).reshape(l, n))
        if len(header) == 8:
            params = PlsweParams(n, l, d_f, d_g, eps, header[6], header[7])
        else:
            params = SrfrParams(n, l, d_f, d_g, eps)
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from None
    return Instance(obs, params)


def format_instance(obs: ObservationMatrix, params) -> str:
    p = params
    header = [obs.field.q, p.n, p.l, p.d_f, p.d_g, p.eps]
    if isinstance(p, PlsweParams):
        header += [p.d_A, p.d_b]
    lines = [" ".join(map(str, header)), " ".join(map(str, obs.grid.alphas))]
    lines += [" ".join(str(int(v)) for v in row) for row in obs.y]
    return "\n".join(lines) + "\n"


def generate_instance(config: CampaignConfig, eps: int, variant: Optional[str] = None,
                      scenario: int = 0, trial: int = 0):
    """One instance as the campaign would draw it; returns (obs, params, truth, E)."""
    c = config
    F = c.field
    rng = trial_rng(c.seed, scenario, trial)
    grid = EvaluationGrid.random(F, c.n, rng)
    if c.mode == "srfr":
        rv, sys = random_rational_vector(F, c.l, c.deg_f, c.deg_g, grid, rng), None
    else:
        sys, rv = _system_with_degrees(c, grid, rng)
    E = random_error_positions(c.n, eps, rng)
    srfr_params = SrfrParams(c.n, c.l, c.d_f, c.d_g, eps)
    if c.mode == "srfr":
        return gen_random_instance(srfr_params, grid, rv, E, rng), srfr_params, rv, E
    params = PlsweParams(c.n, c.l, c.d_f, c.d_g, eps, c.d_A, c.d_b)
    if c.mode == "adversarial":
        if variant is None:
            b = srfr_params.bounds
            n1 = min_length_n1(b, rv.deg_f, rv.deg_g, eps, c.l)
            n2 = min_length_n2(b, sys.deg_A, sys.deg_b, eps, c.l)
            variant = N1 if n1 <= n2 else N2
        obs, _ = gen_adversarial_instance(sys, rv, grid, E, variant)
        return obs, params, rv, E
    return blackbox(sys, rv, grid, E, rng), params, rv, E


def with_mode(config: CampaignConfig, mode: str) -> CampaignConfig:
    return replace(config, mode=mode)

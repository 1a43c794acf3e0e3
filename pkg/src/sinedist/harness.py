"""Randomised verification of the sine-distance inequalities and identities.

Each check draws random states, channels and POVMs, evaluates one or more
*margins* per trial (``bound - observed`` for inequalities, ``-|lhs - rhs|``
for identities) and counts a violation whenever a trial's smallest margin
falls below ``-tolerance``.  Every trial gets its own PCG64 stream derived
from ``(suite seed, check id, dimension, trial index)``, so a failing trial
can be replayed alone with :func:`replay_trial`.
"""
from __future__ import annotations

import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import channels as ch
from . import linalg as la
from . import metrics as mt
from . import states as st

DEFAULT_SEED = 20021001
DEFAULT_TOL = 1e-8
SINE_SUM_GRID_STEP = math.pi / 280  # 141 x 142 / 2 = 10011 grid points
MAX_REPORTED_FAILURES = 5


@dataclass(frozen=True)
class Failure:
    dim: int
    trial: int
    subcheck: str
    margin: float


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    trials: int
    violations: int
    worst_margin: float
    tolerance: float
    seed: int
    failures: tuple[Failure, ...] = ()
    subchecks: tuple["CheckResult", ...] = ()

    @property
    def passed(self) -> bool:
        return self.violations == 0


@dataclass(frozen=True)
class SuiteConfig:
    """``trials`` is per dimension; ``None`` keeps each check's own default."""

    seed: int = DEFAULT_SEED
    trials: int | None = None
    dims: tuple[int, int] = (2, 6)
    tolerances: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.trials is not None and self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        lo, hi = self.dims
        if lo < 2 or hi < lo:
            raise ValueError(f"dimension range must satisfy 2 <= lo <= hi, got {lo}..{hi}")


def trial_rng(seed: int, check_id: str, dim: int, trial: int) -> np.random.Generator:
    return st.rng_for((seed, zlib.crc32(check_id.encode()), dim, trial))


# -- per-trial bodies -----------------------------------------------------------
# Each takes (rng, dim, trial) and returns {subcheck: margin}.


def _rank(rng, dim: int) -> int:
    return int(rng.integers(1, dim + 1))


def _density(rng, dim: int) -> st.DensityMatrix:
    return st.random_density(dim, _rank(rng, dim), rng)


def _dim_out(rng, dim: int) -> int:
    return int(rng.integers(max(1, dim - 1), dim + 2))


def _pure_pair(rng, dim: int, trial: int):
    x = st.random_pure(dim, rng)
    y = x if trial % 7 == 0 else st.random_pure(dim, rng)
    return x, y


def _trial_pure_bound(rng, dim, trial):
    x, y = _pure_pair(rng, dim, trial)
    op = ch.random_channel(dim, rng, dim_out=_dim_out(rng, dim))
    diff = abs(ch.success_prob(op, x) - ch.success_prob(op, y))
    return {"bound": mt.sine_pure(x, y) - diff}


def _trial_pure_branch_sum(rng, dim, trial):
    x, y = _pure_pair(rng, dim, trial)
    n_ops = 1 if trial % 7 == 1 else None
    op = ch.random_channel(dim, rng, dim_out=_dim_out(rng, dim), n_ops=n_ops)
    total = float(np.sum(np.abs(ch.branch_probs(op, x) - ch.branch_probs(op, y))))
    return {"branch_sum": 2.0 * mt.sine_pure(x, y) - total}


def _trial_saturation(rng, dim, trial, n_trials):
    # theta sweeps the open interval (0, pi/4) evenly
    theta = (trial + 1) / (n_trials + 1) * math.pi / 4
    pair = st.make_pair(theta, dim)
    d = mt.sine_pure(pair.x, pair.y)
    one = ch.saturating_operation_single(pair)
    two = ch.saturating_operation_sum(pair)
    single = abs(ch.success_prob(one, pair.x) - ch.success_prob(one, pair.y))
    total = float(np.sum(np.abs(ch.branch_probs(two, pair.x) - ch.branch_probs(two, pair.y))))
    return {"single": -abs(single - d), "branch_sum": -abs(total - 2.0 * d)}


def _state_pair(rng, dim, trial):
    sigma = _density(rng, dim)
    if trial % 11 == 0:
        return sigma, sigma
    if trial % 11 == 1:
        return st.random_pure(dim, rng).density(), st.random_pure(dim, rng).density()
    return sigma, _density(rng, dim)


def _trial_mixed_bounds(rng, dim, trial):
    sigma, rho = _state_pair(rng, dim, trial)
    op = ch.random_channel(dim, rng, dim_out=_dim_out(rng, dim))
    d = mt.sine_distance(sigma, rho)
    single = abs(ch.success_prob(op, sigma) - ch.success_prob(op, rho))
    total = float(np.sum(np.abs(ch.branch_probs(op, sigma) - ch.branch_probs(op, rho))))
    return {"single": d - single, "branch_sum": 2.0 * d - total}


def _trial_povm_bounds(rng, dim, trial):
    if trial % 11 == 2:
        # pure pair measured in the eigenbasis of sigma - rho: the L1 bound is tight
        theta = rng.uniform(0.0, math.pi / 4)
        pair = st.make_pair(theta, dim)
        sigma, rho = pair.x.density(), pair.y.density()
        povm = ch.projective_povm(la.hermitian_eig(sigma.matrix - rho.matrix).eigenvectors)
    else:
        sigma, rho = _state_pair(rng, dim, trial)
        povm = ch.random_povm(dim, rng)
    d = mt.sine_distance(sigma, rho)
    diffs = np.abs(ch.povm_probs(povm, sigma) - ch.povm_probs(povm, rho))
    return {"per_outcome": d - float(diffs.max()), "l1": 2.0 * d - float(diffs.sum())}


def depolarizing_channel(dim: int) -> ch.KrausChannel:
    """Replaces every input by the maximally mixed state."""
    ops = []
    for i in range(dim):
        for j in range(dim):
            e = np.zeros((dim, dim), dtype=np.complex128)
            e[i, j] = 1.0 / math.sqrt(dim)
            ops.append(e)
    return ch.KrausChannel(ops, trace_preserving=True)


def _tp_channel(rng, dim, trial) -> ch.KrausChannel:
    if trial % 13 == 0:
        return depolarizing_channel(dim)
    if trial % 2:
        return ch.povm_to_channel(ch.random_povm(dim, rng))
    return ch.random_tp_channel(dim, rng, dim_out=_dim_out(rng, dim))


def _trial_monotonicity(rng, dim, trial):
    sigma, rho = _state_pair(rng, dim, trial)
    op = _tp_channel(rng, dim, trial)
    d = mt.sine_distance(sigma, rho)
    d_out = mt.sine_distance(ch.output_state(op, sigma), ch.output_state(op, rho))
    u = ch.unitary_channel(st.random_unitary(dim, rng))
    d_unitary = mt.sine_distance(ch.output_state(u, sigma), ch.output_state(u, rho))
    return {"contraction": d - d_out, "unitary_equality": -abs(d_unitary - d)}


def _trial_fidelity_diff(rng, dim, trial):
    if trial % 11 == 0:
        sigma = rho = omega = _density(rng, dim)
    elif trial % 11 == 1:
        # orthogonal pure states, reference equal to the first
        sigma = st.basis_state(dim, 0).density()
        rho = st.basis_state(dim, 1).density()
        omega = sigma
    else:
        sigma, rho, omega = (_density(rng, dim) for _ in range(3))
    d = mt.sine_distance(sigma, rho)
    op = _tp_channel(rng, dim, trial)
    omega_out = _density(rng, op.dim_out)
    state_gap = abs(mt.fidelity(sigma, omega) - mt.fidelity(rho, omega))
    out_s, out_r = ch.output_state(op, sigma), ch.output_state(op, rho)
    channel_gap = abs(mt.fidelity(out_s, omega_out) - mt.fidelity(out_r, omega_out))
    return {"state": d - state_gap, "channel": d - channel_gap}


def _trial_metric_axioms(rng, dim, trial):
    kind = trial % 17
    sigma, rho, omega = (_density(rng, dim) for _ in range(3))
    q = float(rng.uniform())
    if kind == 0:
        rho = omega = sigma
    elif kind == 1:
        # collinear: rho sits on the segment between sigma and omega
        rho = st.mixture(q, sigma, omega)
        q = float(rng.uniform())
    elif kind in (2, 3):
        q = float(kind - 2)
    r = 1.0 - q
    mix = st.mixture(q, rho, omega)
    pure = st.random_pure(dim, rng).density()

    d_sr, d_rs = mt.sine_distance(sigma, rho), mt.sine_distance(rho, sigma)
    d_so, d_ro = mt.sine_distance(sigma, omega), mt.sine_distance(rho, omega)
    f_sr, f_so, f_sm = mt.fidelity(sigma, rho), mt.fidelity(sigma, omega), mt.fidelity(sigma, mix)
    a_sr, a_so, a_ro = (math.asin(v) for v in (d_sr, d_so, d_ro))
    fp_r, fp_o, fp_m = mt.fidelity(pure, rho), mt.fidelity(pure, omega), mt.fidelity(pure, mix)
    dp = [math.sqrt(1.0 - f) for f in (fp_r, fp_o, fp_m)]
    values = (d_sr, d_rs, d_so, d_ro, f_sr, f_so, f_sm)
    return {
        "triangle": min(d_so + d_ro - d_sr, d_sr + d_ro - d_so, d_sr + d_so - d_ro),
        "angle_triangle": a_so + a_ro - a_sr,
        "sq_convexity": q * (1 - f_sr) + r * (1 - f_so) - (1 - f_sm),
        "fid_concavity": f_sm - q * f_sr - r * f_so,
        "pure_concavity": dp[2] - q * dp[0] - r * dp[1],
        "pure_linearity": -abs(fp_m - q * fp_r - r * fp_o),
        "symmetry": -abs(d_sr - d_rs),
        "range": min(min(values), min(1.0 - v for v in values)),
    }


def _trial_extension_identities(rng, dim, trial):
    if trial % 11 == 0:
        sigma = st.random_pure(dim, rng).density()
    elif trial % 11 == 1:
        sigma = st.maximally_mixed(dim)
    else:
        sigma = _density(rng, dim)
    if trial % 2:
        op = ch.random_tp_channel(dim, rng, dim_out=_dim_out(rng, dim))
    else:
        op = ch.random_channel(dim, rng, dim_out=_dim_out(rng, dim))
    pur = st.purify(sigma)
    big = ch.extend(op, pur.dim_q)
    purified = pur.state.density()
    total = abs(ch.success_prob(big, purified) - ch.success_prob(op, sigma))
    per_branch = np.abs(ch.branch_probs(big, purified) - ch.branch_probs(op, sigma))
    eig = sigma.eig()
    spectral = []
    for e_mu, t_mu in zip(op.operators, op.branch_effects()):
        lhs = ch.success_prob(ch.KrausChannel([e_mu]), sigma)
        rhs = sum(
            lam * np.vdot(a, t_mu @ a).real
            for lam, a in zip(eig.eigenvalues, eig.eigenvectors.T)
        )
        spectral.append(abs(lhs - rhs))
    out = {"total": -total, "branch": -float(per_branch.max()), "spectral": -max(spectral)}
    if trial % 11 == 1:
        out["maximally_mixed"] = -abs(ch.success_prob(op, sigma) - np.trace(op.effect()).real / dim)
    return out


def _trial_two_state_identity(rng, dim, trial):
    theta = float(rng.uniform(0.0, math.pi / 4))
    pair = st.make_pair(theta, dim)
    if trial % 11 == 0:
        op = la.identity(dim)
    elif trial % 11 == 1:
        op = np.zeros((dim, dim), dtype=np.complex128)
        op[0, 0] = 1.0
    else:
        op = st.random_hermitian(dim, rng)
    lhs = pair.x.expectation(op) - pair.y.expectation(op)
    rhs = (op[0, 0] - op[1, 1]) * mt.sine_pure(pair.x, pair.y)
    return {"identity": -abs(lhs - rhs)}


def _trial_oracle(rng, dim, trial):
    sigma, rho = _density(rng, dim), _density(rng, dim)
    f = mt.fidelity(sigma, rho)
    res = mt.purification_search(sigma, rho, seed=rng)
    return {"agreement": -abs(res.value - f), "lower_bound": f - max(res.history)}


# -- registry -------------------------------------------------------------------


@dataclass(frozen=True)
class CheckSpec:
    check_id: str
    body: Callable
    trials: int
    tolerance: float = DEFAULT_TOL
    max_dim: int = 64
    needs_count: bool = False


CHECKS: dict[str, CheckSpec] = {
    c.check_id: c
    for c in (
        CheckSpec("pure_bound", _trial_pure_bound, 1000),
        CheckSpec("pure_branch_sum", _trial_pure_branch_sum, 1000),
        CheckSpec("saturation", _trial_saturation, 50, 1e-10, needs_count=True),
        CheckSpec("two_state_identity", _trial_two_state_identity, 200, 1e-10),
        CheckSpec("mixed_bounds", _trial_mixed_bounds, 1000),
        CheckSpec("povm_bounds", _trial_povm_bounds, 1000),
        CheckSpec("monotonicity", _trial_monotonicity, 500, max_dim=4),
        CheckSpec("fidelity_diff_bounds", _trial_fidelity_diff, 500),
        CheckSpec("metric_axioms", _trial_metric_axioms, 1000),
        CheckSpec("extension_identities", _trial_extension_identities, 500, 1e-9, max_dim=4),
        CheckSpec("oracle_agreement", _trial_oracle, 20, 1e-6, max_dim=4),
    )
}

SUITE_ORDER = (
    "pure_bound",
    "pure_branch_sum",
    "saturation",
    "two_state_identity",
    "mixed_bounds",
    "povm_bounds",
    "monotonicity",
    "fidelity_diff_bounds",
    "metric_axioms",
    "sine_sum_lemma",
    "extension_identities",
    "oracle_agreement",
)


def _dims_for(spec: CheckSpec, config: SuiteConfig) -> range:
    lo, hi = config.dims
    return range(min(lo, spec.max_dim), min(hi, spec.max_dim) + 1)


def _tally(check_id, tol, seed, per_trial: list[tuple[int, int, dict]]) -> CheckResult:
    names: list[str] = []
    for _, _, margins in per_trial:
        for k in margins:
            if k not in names:
                names.append(k)
    subs = []
    for name in names:
        vals = [m[name] for _, _, m in per_trial if name in m]
        subs.append(
            CheckResult(
                f"{check_id}.{name}",
                len(vals),
                sum(v < -tol for v in vals),
                min(vals),
                tol,
                seed,
            )
        )
    failures = []
    worst = math.inf
    violations = 0
    for dim, trial, margins in per_trial:
        sub, m = min(margins.items(), key=lambda kv: kv[1])
        worst = min(worst, m)
        if m < -tol:
            violations += 1
            if len(failures) < MAX_REPORTED_FAILURES:
                failures.append(Failure(dim, trial, sub, m))
    return CheckResult(
        check_id, len(per_trial), violations, worst, tol, seed, tuple(failures), tuple(subs)
    )


def run_check(check_id: str, config: SuiteConfig = SuiteConfig()) -> CheckResult:
    if check_id == "sine_sum_lemma":
        return check_sine_sum_lemma(
            tolerance=config.tolerances.get("sine_sum_lemma", 1e-12), seed=config.seed
        )
    spec = CHECKS[check_id]
    tol = config.tolerances.get(check_id, spec.tolerance)
    n = spec.trials if config.trials is None else config.trials
    per_trial = []
    for dim in _dims_for(spec, config):
        for trial in range(n):
            margins = _run_body(spec, config.seed, dim, trial, n)
            per_trial.append((dim, trial, margins))
    return _tally(check_id, tol, config.seed, per_trial)


def _run_body(spec: CheckSpec, seed: int, dim: int, trial: int, n: int) -> dict:
    rng = trial_rng(seed, spec.check_id, dim, trial)
    if spec.needs_count:
        return spec.body(rng, dim, trial, n)
    return spec.body(rng, dim, trial)


def replay_trial(check_id: str, seed: int, dim: int, trial: int, n_trials: int | None = None) -> dict:
    """Recompute the margins of a single trial, e.g. one listed in ``failures``."""
    spec = CHECKS[check_id]
    return _run_body(spec, seed, dim, trial, spec.trials if n_trials is None else n_trials)


def check_pure_bound(config: SuiteConfig = SuiteConfig()) -> CheckResult:
    return run_check("pure_bound", config)


def check_pure_branch_sum(config: SuiteConfig = SuiteConfig()) -> CheckResult:
    return run_check("pure_branch_sum", config)


def check_saturation(config: SuiteConfig = SuiteConfig()) -> CheckResult:
    return run_check("saturation", config)


def check_mixed_bounds(config: SuiteConfig = SuiteConfig()) -> CheckResult:
    return run_check("mixed_bounds", config)


def check_povm_bounds(config: SuiteConfig = SuiteConfig()) -> CheckResult:
    return run_check("povm_bounds", config)


def check_monotonicity(config: SuiteConfig = SuiteConfig()) -> CheckResult:
    return run_check("monotonicity", config)


def check_fidelity_diff_bounds(config: SuiteConfig = SuiteConfig()) -> CheckResult:
    return run_check("fidelity_diff_bounds", config)


def check_metric_axioms(config: SuiteConfig = SuiteConfig()) -> CheckResult:
    return run_check("metric_axioms", config)


def check_extension_identities(config: SuiteConfig = SuiteConfig()) -> CheckResult:
    return run_check("extension_identities", config)


def check_two_state_identity(config: SuiteConfig = SuiteConfig()) -> CheckResult:
    return run_check("two_state_identity", config)


def check_oracle_agreement(config: SuiteConfig = SuiteConfig()) -> CheckResult:
    return run_check("oracle_agreement", config)


def check_sine_sum_lemma(
    grid_step: float = SINE_SUM_GRID_STEP, tolerance: float = 1e-12, seed: int = 0
) -> CheckResult:
    """``sin a + sin b >= 1`` on a grid over ``a, b in [0, pi/2]``, ``a + b >= pi/2``.

    Grid points are ``a = i*h``, ``b = j*h`` with ``h = (pi/2)/N`` and the
    constraint applied on the integer indices (``i + j >= N``), so the
    boundary line and both corners are hit exactly.
    """
    n = max(1, round((math.pi / 2) / grid_step))
    i, j = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
    keep = (i + j) >= n
    a = i[keep] * (math.pi / 2) / n
    b = j[keep] * (math.pi / 2) / n
    sa, sb = np.sin(a), np.sin(b)
    margins = {
        "sum_ge_one": sa + sb - 1.0,
        "sum_ge_squares": sa + sb - sa * sa - sb * sb,
    }
    worst_per_point = np.minimum(margins["sum_ge_one"], margins["sum_ge_squares"])
    subs = tuple(
        CheckResult(f"sine_sum_lemma.{k}", v.size, int(np.sum(v < -tolerance)), float(v.min()), tolerance, seed)
        for k, v in margins.items()
    )
    bad = np.flatnonzero(worst_per_point < -tolerance)
    return CheckResult(
        "sine_sum_lemma",
        int(a.size),
        int(bad.size),
        float(worst_per_point.min()),
        tolerance,
        seed,
        tuple(Failure(2, int(k), "grid", float(worst_per_point[k])) for k in bad[:MAX_REPORTED_FAILURES]),
        subs,
    )


def run_suite(config: SuiteConfig = SuiteConfig(), jobs: int = 1, checks=None) -> list[CheckResult]:
    """Run every check (or the named subset) in a fixed order.

    With ``jobs > 1`` checks run in worker processes; results do not depend
    on ``jobs`` because each trial owns its random stream.
    """
    ids = list(SUITE_ORDER if checks is None else checks)
    unknown = [c for c in ids if c != "sine_sum_lemma" and c not in CHECKS]
    if unknown:
        raise KeyError(f"unknown checks: {unknown}")
    if jobs <= 1:
        return [run_check(c, config) for c in ids]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_check, ids, [config] * len(ids)))


def flatten(results: list[CheckResult]) -> list[CheckResult]:
    """Each check followed by its sub-checks."""
    out = []
    for r in results:
        out.append(r)
        out.extend(r.subchecks)
    return out


def total_violations(results: list[CheckResult]) -> int:
    return sum(r.violations for r in results)


RECORD_FIELDS = ("check_id", "trials", "violations", "worst_margin", "tolerance", "seed")


def format_record(r: CheckResult) -> str:
    return "\t".join(
        (r.check_id, str(r.trials), str(r.violations), f"{r.worst_margin:.17g}", f"{r.tolerance:.17g}", str(r.seed))
    )


def to_records(results: list[CheckResult]) -> str:
    lines = ["#" + "\t".join(RECORD_FIELDS)]
    lines.extend(format_record(r) for r in flatten(results))
    return "\n".join(lines) + "\n"


def parse_records(text: str) -> list[CheckResult]:
    out = []
    for line in text.splitlines():
        if not line or line.startswith("#"):
            continue
        cid, trials, viol, worst, tol, seed = line.split("\t")
        out.append(CheckResult(cid, int(trials), int(viol), float(worst), float(tol), int(seed)))
    return out

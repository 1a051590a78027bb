"""Size-dependent distribution parameters and forward growth simulation.

The engagement growth rate is Laplace-distributed with location and
scale that are linear in ln(followers) and ln(engagement); the follower
gross growth rate is Burr-distributed with shapes linear in
ln(followers). ``regress_parameters`` estimates those linear maps from
per-bin distribution fits by ordinary least squares; ``simulate`` runs
the two multiplicative processes forward from a pair of starting values,
one independent substream per run.

A built-in coefficient set (PUBLISHED_COEFFICIENTS) covers the weekly,
monthly and quarterly timescales so simulations are runnable without any
data. Daily coefficients are deliberately not provided.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import t as t_dist

from .aggregate import Timescale
from .stats import BurrParams, LaplaceParams, burr_ppf, laplace_ppf

PARAMETERS = ("mu", "b", "c", "k")
SIM_TIMESCALES = (Timescale.W, Timescale.M, Timescale.Q)

B_FLOOR = 1e-6
CK_FLOOR = 1e-3

DEFAULT_STARTING_FOLLOWERS = (25_000, 250_000, 1_000_000)


class CollinearCovariatesError(ValueError):
    pass


@dataclass(frozen=True)
class ParamRegression:
    """Linear map for one distribution parameter at one timescale.

    beta2 (the ln-engagement term) exists only for the Laplace
    parameters mu and b; the Burr shapes c and k depend on followers
    alone. r_squared and std_errors are None for published coefficient
    sets, where only point estimates and p-values are reported.
    """

    parameter: str
    timescale: Timescale
    beta0: float
    beta1: float
    beta2: float | None
    p_values: tuple[float, ...]
    r_squared: float | None = None
    std_errors: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.parameter not in PARAMETERS:
            raise ValueError(f"unknown parameter {self.parameter!r}")
        two_cov = self.parameter in ("mu", "b")
        if two_cov != (self.beta2 is not None):
            raise ValueError(f"beta2 must be present iff parameter is mu or b")

    def evaluate(self, ln_followers: float, ln_engagement: float | None = None) -> float:
        value = self.beta0 + self.beta1 * ln_followers
        if self.beta2 is not None:
            if ln_engagement is None:
                raise ValueError(f"parameter {self.parameter} needs ln_engagement")
            value += self.beta2 * ln_engagement
        return value


@dataclass
class ModelCoefficients:
    """Complete (parameter, timescale) -> ParamRegression table."""

    entries: dict[tuple[str, str], ParamRegression] = field(default_factory=dict)

    def add(self, reg: ParamRegression) -> None:
        self.entries[(reg.parameter, reg.timescale.value)] = reg

    def get(self, parameter: str, timescale: Timescale) -> ParamRegression:
        try:
            return self.entries[(parameter, timescale.value)]
        except KeyError:
            raise KeyError(f"no coefficients for {parameter} at {timescale.value}")

    def has_timescale(self, timescale: Timescale) -> bool:
        return all((p, timescale.value) in self.entries for p in PARAMETERS)

    def validate_complete(self) -> None:
        missing = [
            (p, s.value)
            for s in SIM_TIMESCALES
            for p in PARAMETERS
            if (p, s.value) not in self.entries
        ]
        if missing:
            raise ValueError(f"coefficient table incomplete, missing {missing}")


def _published(parameter, scale, beta0, beta1, beta2, p_values) -> ParamRegression:
    return ParamRegression(
        parameter=parameter,
        timescale=scale,
        beta0=beta0,
        beta1=beta1,
        beta2=beta2,
        p_values=p_values,
    )


def published_coefficients() -> ModelCoefficients:
    """The built-in weekly/monthly/quarterly coefficient set.

    p-values reported only as "below 0.001" are stored as 0.001.
    """
    W, M, Q = Timescale.W, Timescale.M, Timescale.Q
    rows = [
        _published("mu", W, -0.109, 0.054, -0.062, (0.063, 0.001, 0.001)),
        _published("mu", M, 0.073, 0.037, -0.051, (0.248, 0.001, 0.001)),
        _published("mu", Q, 0.384, 0.031, -0.065, (0.001, 0.001, 0.001)),
        _published("b", W, 0.613, 0.027, -0.054, (0.001, 0.001, 0.001)),
        _published("b", M, 0.593, 0.041, -0.066, (0.001, 0.001, 0.001)),
        _published("b", Q, 0.844, 0.056, -0.094, (0.001, 0.001, 0.001)),
        _published("c", W, 8420.469, -372.77, None, (0.001, 0.025)),
        _published("c", M, 2550.01, -127.559, None, (0.001, 0.014)),
        _published("c", Q, 1053.905, -56.113, None, (0.002, 0.017)),
        _published("k", W, -0.778, 0.083, None, (0.001, 0.001)),
        _published("k", M, -0.751, 0.078, None, (0.001, 0.001)),
        _published("k", Q, -0.714, 0.073, None, (0.001, 0.001)),
    ]
    coeffs = ModelCoefficients()
    for row in rows:
        coeffs.add(row)
    coeffs.validate_complete()
    return coeffs


PUBLISHED_COEFFICIENTS = published_coefficients()


def regress_parameters(binned_fits, parameter: str, timescale: Timescale) -> ParamRegression:
    """OLS regression of one distribution parameter on log-size covariates.

    ``binned_fits`` is a list of (mean ln followers, mean ln engagement,
    params) tuples, one per bin, where params is LaplaceParams for
    mu/b and BurrParams for c/k. Two covariates (intercept, ln F, ln E)
    are used for mu and b; c and k regress on ln F alone. p-values come
    from two-sided t statistics on the coefficient standard errors.
    """
    if parameter not in PARAMETERS:
        raise ValueError(f"unknown parameter {parameter!r}")
    two_cov = parameter in ("mu", "b")
    y = np.array([getattr(params, parameter) for _, _, params in binned_fits], dtype=float)
    ln_f = np.array([f for f, _, _ in binned_fits], dtype=float)
    n = y.size
    min_bins = 3 if two_cov else 2
    if n < min_bins:
        raise ValueError(
            f"regress_parameters needs at least {min_bins} bins for {parameter}, got {n}"
        )
    if two_cov:
        ln_e = np.array([e for _, e, _ in binned_fits], dtype=float)
        X = np.column_stack([np.ones(n), ln_f, ln_e])
    else:
        X = np.column_stack([np.ones(n), ln_f])
    n_params = X.shape[1]
    if np.linalg.matrix_rank(X) < n_params:
        raise CollinearCovariatesError("collinear covariates")

    beta, _, _, _ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    rss = float(resid @ resid)
    tss = float(np.sum((y - y.mean()) ** 2))
    df = n - n_params
    if df > 0 and rss > 0:
        s2 = rss / df
        cov = s2 * np.linalg.inv(X.T @ X)
        se = np.sqrt(np.diag(cov))
        t_stats = beta / se
        p_values = tuple(float(2.0 * t_dist.sf(abs(t), df)) for t in t_stats)
        std_errors = tuple(float(v) for v in se)
    else:
        # exact interpolation: zero residuals pin the coefficients
        p_values = tuple(0.0 for _ in range(n_params))
        std_errors = tuple(0.0 for _ in range(n_params))
    r_squared = 1.0 - rss / tss if tss > 0 else 1.0

    return ParamRegression(
        parameter=parameter,
        timescale=timescale,
        beta0=float(beta[0]),
        beta1=float(beta[1]),
        beta2=float(beta[2]) if two_cov else None,
        p_values=p_values,
        r_squared=float(min(max(r_squared, 0.0), 1.0)),
        std_errors=std_errors,
    )


@dataclass
class ClampCounter:
    """Audit trail for parameter evaluations pushed back into range."""

    b_floored: int = 0
    c_floored: int = 0
    k_floored: int = 0

    @property
    def total(self) -> int:
        return self.b_floored + self.c_floored + self.k_floored


def eval_mu_b(
    coeffs: ModelCoefficients,
    timescale: Timescale,
    followers: float,
    engagement: float,
    clamps: ClampCounter | None = None,
) -> LaplaceParams:
    """Laplace parameters at a state; the scale is floored at B_FLOOR."""
    if followers <= 0 or engagement <= 0:
        raise ValueError("eval_mu_b domain error: followers and engagement must be positive")
    ln_f, ln_e = math.log(followers), math.log(engagement)
    mu = coeffs.get("mu", timescale).evaluate(ln_f, ln_e)
    b = coeffs.get("b", timescale).evaluate(ln_f, ln_e)
    if b < B_FLOOR:
        b = B_FLOOR
        if clamps is not None:
            clamps.b_floored += 1
    return LaplaceParams(mu=mu, b=b)


def eval_c_k(
    coeffs: ModelCoefficients,
    timescale: Timescale,
    followers: float,
    clamps: ClampCounter | None = None,
) -> BurrParams:
    """Burr parameters at a follower count; shapes are floored at CK_FLOOR."""
    if followers <= 0:
        raise ValueError("eval_c_k domain error: followers must be positive")
    ln_f = math.log(followers)
    c = coeffs.get("c", timescale).evaluate(ln_f)
    k = coeffs.get("k", timescale).evaluate(ln_f)
    if c < CK_FLOOR:
        c = CK_FLOOR
        if clamps is not None:
            clamps.c_floored += 1
    if k < CK_FLOOR:
        k = CK_FLOOR
        if clamps is not None:
            clamps.k_floored += 1
    return BurrParams(c=c, k=k)


def _uniform_open(rng: np.random.Generator) -> float:
    # uniform on (0,1): keep inverse-CDF transforms finite
    u = rng.random()
    while u == 0.0:
        u = rng.random()
    return u


def sample_laplace(p: LaplaceParams, rng: np.random.Generator) -> float:
    """Inverse-CDF draw: mu - b*sgn(u-1/2)*ln(1-2|u-1/2|)."""
    return float(laplace_ppf(_uniform_open(rng), p))


def sample_burr(p: BurrParams, rng: np.random.Generator) -> float:
    """Inverse-CDF draw: ((1-u)^(-1/k) - 1)^(1/c)."""
    return float(burr_ppf(_uniform_open(rng), p))


@dataclass(frozen=True)
class SimState:
    followers: float
    engagement: float
    step: int
    timescale: Timescale

    def __post_init__(self):
        if not (self.followers > 0 and self.engagement > 0):
            raise ValueError("simulation state must stay positive")


@dataclass
class Trajectory:
    states: list[SimState]
    seed: int
    run_index: int
    clamps: ClampCounter = field(default_factory=ClampCounter)

    def final(self) -> SimState:
        return self.states[-1]


def simulate(
    coeffs: ModelCoefficients,
    timescale: Timescale,
    f0: float,
    e0: float,
    steps: int,
    runs: int,
    seed: int,
) -> list[Trajectory]:
    """Iterate the two multiplicative processes forward.

    Per step, from the current state (F, E): the engagement log-rate g is
    drawn from Laplace(mu(F,E), b(F,E)) and E <- E*exp(g); the follower
    gross rate r is drawn from Burr(c(F), k(F)) and F <- F*r. Both
    parameter evaluations use the pre-update state. Run i consumes the
    substream seeded by (seed, i), so results are reproducible and runs
    are order-independent.
    """
    if steps < 1 or runs < 1:
        raise ValueError("steps and runs must both be at least 1")
    if timescale not in SIM_TIMESCALES:
        raise ValueError(f"simulation supports W, M, Q; got {timescale.value}")
    if not coeffs.has_timescale(timescale):
        raise KeyError(f"coefficient table lacks timescale {timescale.value}")
    trajectories = []
    for run in range(runs):
        rng = np.random.default_rng(np.random.SeedSequence((seed, run)))
        clamps = ClampCounter()
        f, e = float(f0), float(e0)
        states = [SimState(f, e, 0, timescale)]
        for step in range(1, steps + 1):
            lap = eval_mu_b(coeffs, timescale, f, e, clamps)
            burr = eval_c_k(coeffs, timescale, f, clamps)
            g = sample_laplace(lap, rng)
            r = sample_burr(burr, rng)
            e = e * math.exp(g)
            f = f * r
            states.append(SimState(f, e, step, timescale))
        trajectories.append(Trajectory(states=states, seed=seed, run_index=run, clamps=clamps))
    return trajectories


@dataclass
class StepSummary:
    step: int
    mean_followers: float
    se_followers: float
    mean_engagement: float
    se_engagement: float
    mean_norm_followers: float
    se_norm_followers: float
    mean_norm_engagement: float
    se_norm_engagement: float


def summarize_trajectories(trajectories: list[Trajectory]) -> list[StepSummary]:
    """Per-step cross-run means and standard errors.

    Alongside raw levels, each trajectory is also normalized to its own
    final value, giving the shape of the growth curve independent of the
    level it reaches.
    """
    if not trajectories:
        raise ValueError("no trajectories to summarize")
    steps = len(trajectories[0].states)
    runs = len(trajectories)
    f = np.array([[s.followers for s in t.states] for t in trajectories])
    e = np.array([[s.engagement for s in t.states] for t in trajectories])
    f_norm = f / f[:, -1][:, None]
    e_norm = e / e[:, -1][:, None]

    def _se(a):
        return a.std(axis=0, ddof=1) / math.sqrt(runs) if runs > 1 else np.zeros(steps)

    out = []
    for i in range(steps):
        out.append(
            StepSummary(
                step=i,
                mean_followers=float(f[:, i].mean()),
                se_followers=float(_se(f)[i]),
                mean_engagement=float(e[:, i].mean()),
                se_engagement=float(_se(e)[i]),
                mean_norm_followers=float(f_norm[:, i].mean()),
                se_norm_followers=float(_se(f_norm)[i]),
                mean_norm_engagement=float(e_norm[:, i].mean()),
                se_norm_engagement=float(_se(e_norm)[i]),
            )
        )
    return out


COEFFS_HEADER = ["parameter", "timescale", "beta0", "beta1", "beta2"]


def write_coefficients_csv(coeffs: ModelCoefficients, stream) -> None:
    """Coefficients file: beta2 stays empty for the Burr shapes."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(COEFFS_HEADER)
    for scale in SIM_TIMESCALES:
        for parameter in PARAMETERS:
            key = (parameter, scale.value)
            if key not in coeffs.entries:
                continue
            reg = coeffs.entries[key]
            writer.writerow(
                [
                    parameter,
                    scale.value,
                    format(reg.beta0, ".12g"),
                    format(reg.beta1, ".12g"),
                    "" if reg.beta2 is None else format(reg.beta2, ".12g"),
                ]
            )


def read_coefficients_csv(stream) -> ModelCoefficients:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != COEFFS_HEADER:
        raise ValueError(
            f"malformed coefficients header: expected {','.join(COEFFS_HEADER)}"
        )
    coeffs = ModelCoefficients()
    for row in reader:
        if not row:
            continue
        parameter, scale_text, b0, b1, b2 = (v.strip() for v in row)
        scale = Timescale.parse(scale_text)
        two_cov = parameter in ("mu", "b")
        coeffs.add(
            ParamRegression(
                parameter=parameter,
                timescale=scale,
                beta0=float(b0),
                beta1=float(b1),
                beta2=float(b2) if two_cov and b2 != "" else None,
                p_values=tuple(),
            )
        )
    return coeffs


TRAJECTORY_HEADER = ["run", "step", "followers", "engagement"]


def write_trajectories_csv(trajectories: list[Trajectory], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(TRAJECTORY_HEADER)
    for t in trajectories:
        for s in t.states:
            writer.writerow(
                [t.run_index, s.step, format(s.followers, ".12g"), format(s.engagement, ".12g")]
            )


SUMMARY_HEADER = [
    "step",
    "mean_followers",
    "se_followers",
    "mean_engagement",
    "se_engagement",
    "mean_norm_followers",
    "se_norm_followers",
    "mean_norm_engagement",
    "se_norm_engagement",
]


def write_summary_csv(summaries: list[StepSummary], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SUMMARY_HEADER)
    for s in summaries:
        writer.writerow(
            [
                s.step,
                format(s.mean_followers, ".12g"),
                format(s.se_followers, ".12g"),
                format(s.mean_engagement, ".12g"),
                format(s.se_engagement, ".12g"),
                format(s.mean_norm_followers, ".12g"),
                format(s.se_norm_followers, ".12g"),
                format(s.mean_norm_engagement, ".12g"),
                format(s.se_norm_engagement, ".12g"),
            ]
        )

"""Randomized initial data, Monte-Carlo tails of the good-data event and chaos combinatorics.

Random data are u0 = sum_n c_n g_n h_n with i.i.d. g_n, either standard complex
Gaussians (E|g|^2 = 1) or signs scaled by eps (g = +-eps).  Every trial draws
from its own counter-based stream keyed by (master seed, trial index), so
results never depend on how trials are split across workers.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
import itertools
import math

import numpy as np
from scipy import stats

from .estimates_lab import dyadic_multiplier, fmt
from .hermite_core import Basis, SpectralField, hermite_table, make_grid
from .rng import stream

GAUSSIAN = "gaussian"
BERNOULLI = "bernoulli"
LAWS = (GAUSSIAN, BERNOULLI)

# stream tags keep the different consumers of one master seed apart
_TAG_SAMPLE = 0
_TAG_CHAOS = 1


@dataclass
class RandomCoefficientModel:
    base: SpectralField
    law: str = GAUSSIAN
    eps: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.law not in LAWS:
            raise ValueError(f"unknown law {self.law!r}, expected one of {LAWS}")
        if self.law == BERNOULLI and not self.eps > 0:
            raise ValueError("Bernoulli scale eps must be positive")


def draw_coefficients(law, size, rng, eps=1.0):
    """i.i.d. g of the given law: (xi1 + i xi2)/sqrt 2, or +-eps with equal odds."""
    if law == GAUSSIAN:
        z = rng.standard_normal((2,) + tuple(np.atleast_1d(size)))
        return (z[0] + 1j * z[1]) / np.sqrt(2)
    if law == BERNOULLI:
        return eps * (2.0 * rng.integers(0, 2, size=size) - 1.0)
    raise ValueError(f"unknown law {law!r}")


def sample(model, trial):
    """The field sum_n c_n g_n(omega_trial) h_n."""
    rng = stream(model.seed, _TAG_SAMPLE, trial)
    g = draw_coefficients(model.law, model.base.basis.size, rng, model.eps)
    return SpectralField(model.base.basis, model.base.coeffs * g)


# -- the five conditions of the good-data event ------------------------------------------

@dataclass
class EventConfig:
    s: float = 0.6
    sigma: float = 0.0
    N_max: int = 8
    R: float = 8.0
    n_times: int = 65
    t_span: float = 2 * np.pi

    def dyadics(self):
        out, N = [], 1
        while N <= self.N_max:
            out.append(N)
            N *= 2
        return out


class EventEvaluator:
    """Measures the five event quantities for fields on a fixed basis.

    Pointwise squares and cubes are analyzed on the basis of three times the
    degree, sampled on that basis's grid, before their H^s norms are taken.
    """

    def __init__(self, basis, cfg=None, analysis_basis=None):
        self.basis = basis
        self.cfg = cfg or EventConfig()
        ab = analysis_basis or Basis(basis.dim, 3 * basis.n_max)
        if ab.dim != basis.dim or ab.n_max < 3 * basis.n_max:
            raise ValueError(f"analysis basis {ab} too small for cubes of {basis}: "
                             f"needs n_max >= {3 * basis.n_max}")
        self.abasis = ab
        self.grid = make_grid(ab)
        g = self.grid
        self.times = np.linspace(-self.cfg.t_span, self.cfg.t_span, self.cfg.n_times)
        wt = np.full(self.times.size, self.times[1] - self.times[0])
        wt[0] *= 0.5
        wt[-1] *= 0.5
        self.wt = wt
        self.H = hermite_table(basis.n_max, g.x)                      # synthesis
        self.W = (hermite_table(ab.n_max, g.x) * g.w).T.copy()        # analysis
        self.wx = g.weights(basis.dim)
        self.phase = np.exp(-1j * np.outer(self.times, basis.lam2))
        self.Ns = self.cfg.dyadics()
        self.mult = [dyadic_multiplier(basis.lam2, N) for N in self.Ns]

    # batched transforms over a leading time axis
    def _synth(self, coeffs):
        b = self.basis
        box = np.zeros((coeffs.shape[0],) + b.shape, dtype=complex)
        box[(slice(None),) + tuple(b.indices.T)] = coeffs
        for _ in range(b.dim):
            box = np.tensordot(box, self.H, axes=([1], [0]))
        return box

    def _analyze_hs(self, vals, s):
        ab = self.abasis
        out = vals
        for _ in range(ab.dim):
            out = np.tensordot(out, self.W, axes=([1], [0]))
        c = out[(slice(None),) + tuple(ab.indices.T)]
        return np.sqrt(np.sum(ab.lam2 ** s * np.abs(c) ** 2, axis=1))

    def _time_norm(self, a, q):
        a = np.abs(a)
        if q == np.inf:
            return float(a.max())
        return float(np.sum(self.wt * a ** q) ** (1.0 / q))

    def measure(self, f, conditions=(1, 2, 3, 4, 5)):
        """Measured quantities per condition (condition 4 and 5 as lists over N)."""
        if f.basis != self.basis:
            raise ValueError("field basis differs from the evaluator basis")
        cfg = self.cfg
        out = {}
        if 1 in conditions:
            out[1] = float(np.sqrt(np.sum(self.basis.lam2 ** cfg.sigma * np.abs(f.coeffs) ** 2)))
        need = set(conditions) - {1}
        if not need:
            return out
        ct = self.phase * f.coeffs                                    # e^{-itH} f per time
        axes = tuple(range(1, self.basis.dim + 1))
        if need & {2, 3}:
            u = self._synth(ct)
            if 2 in need:
                out[2] = self._time_norm(self._analyze_hs(u * u, cfg.s), 4)
            if 3 in need:
                out[3] = self._time_norm(self._analyze_hs(u * u * u, cfg.s), 4)
        if need & {4, 5}:
            v4, v5 = [], []
            for N, m in zip(self.Ns, self.mult):
                cN = ct * m
                if 4 in need:
                    uN = self._synth(cN)
                    v4.append(self._time_norm(np.abs(uN).max(axis=axes), 4))
                if 5 in need:
                    wN = self._synth(cN * self.basis.lam2 ** (cfg.s / 2))
                    l4 = np.sum(self.wx * np.abs(wN) ** 4, axis=axes) ** 0.25
                    v5.append(self._time_norm(l4, cfg.R))
            if 4 in need:
                out[4] = v4
            if 5 in need:
                out[5] = v5
        return out

    def critical(self, f, conditions=(1, 2, 3, 4, 5)):
        """Smallest t at which each condition holds; membership at t is crit <= t."""
        m = self.measure(f, conditions)
        s = self.cfg.s
        crit = {}
        if 1 in m:
            crit[1] = m[1]
        if 2 in m:
            crit[2] = np.sqrt(m[2])
        if 3 in m:
            crit[3] = np.cbrt(m[3])
        if 4 in m:
            crit[4] = max(v * N ** (1 / 6) for v, N in zip(m[4], self.Ns))
        if 5 in m:
            crit[5] = max(v * N ** (0.25 - s) for v, N in zip(m[5], self.Ns))
        return crit, m


def event_membership(f, t, s=0.6, sigma=0.0, N_max=8, R=8.0, evaluator=None):
    """Per-condition membership of f in the event at threshold t, with measured values."""
    ev = evaluator or EventEvaluator(f.basis, EventConfig(s=s, sigma=sigma, N_max=N_max, R=R))
    crit, measured = ev.critical(f)
    return {k: bool(c <= t) for k, c in crit.items()}, measured


# -- Monte-Carlo tails ---------------------------------------------------------------------

@dataclass
class TailEstimate:
    t: float
    trials: int
    hits: int
    p: float
    lo: float
    hi: float

    @property
    def stderr(self):
        return math.sqrt(max(self.p * (1 - self.p), 0.0) / self.trials)


def binomial_interval(hits, trials, level=0.95):
    """Clopper-Pearson interval; rule of three ([0, 3/n]) when there are no hits."""
    if hits == 0:
        return 0.0, min(1.0, 3.0 / trials)
    a = 1 - level
    lo = stats.beta.ppf(a / 2, hits, trials - hits + 1)
    hi = 1.0 if hits == trials else stats.beta.ppf(1 - a / 2, hits + 1, trials - hits)
    return float(lo), float(hi)


def _selector(condition):
    if condition in ("all", None):
        return (1, 2, 3, 4, 5)
    if isinstance(condition, (int, np.integer)):
        condition = (int(condition),)
    cond = tuple(sorted(set(int(c) for c in condition)))
    if not cond or any(c not in (1, 2, 3, 4, 5) for c in cond):
        raise ValueError(f"conditions must be drawn from 1..5, got {condition}")
    return cond


def critical_samples(model, trials, condition="all", cfg=None, evaluator=None, threads=1):
    """Array (trials, n_conditions) of per-trial critical thresholds.

    Each trial owns its random stream, so the result does not depend on threads.
    """
    cond = _selector(condition)
    ev = evaluator or EventEvaluator(model.base.basis, cfg)

    def one(i):
        crit, _ = ev.critical(sample(model, i), cond)
        return [crit[c] for c in cond]

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            rows = list(pool.map(one, range(trials)))
    else:
        rows = [one(i) for i in range(trials)]
    return np.array(rows, dtype=float).reshape(trials, len(cond)), cond


@dataclass
class TailReport:
    estimates: list
    conditions: tuple
    slope: float = float("nan")
    intercept: float = float("nan")
    r2: float = float("nan")
    fit_points: int = 0
    per_condition: dict = field(default_factory=dict)

    def csv_text(self):
        lines = ["t,trials,hits,p,lo,hi"]
        for e in self.estimates:
            lines.append(",".join([fmt(e.t), str(e.trials), str(e.hits), fmt(e.p), fmt(e.lo), fmt(e.hi)]))
        return "\n".join(lines) + "\n"

    def summary(self):
        return {"conditions": list(self.conditions),
                "fit": {"slope": self.slope, "intercept": self.intercept, "r2": self.r2,
                        "points": self.fit_points},
                "per_condition_hits": self.per_condition}


def tail_estimates(crit, ts):
    """Failure counts P(max_i crit_i > t) for each t."""
    worst = np.asarray(crit).max(axis=1) if np.ndim(crit) == 2 else np.asarray(crit)
    n = worst.size
    out = []
    for t in ts:
        hits = int(np.count_nonzero(worst > t))
        lo, hi = binomial_interval(hits, n)
        out.append(TailEstimate(float(t), n, hits, hits / n, lo, hi))
    return out


def fit_log_tail(estimates, min_hits=10):
    """Least squares of log p against t^2 over estimates with min_hits <= hits <= n - min_hits."""
    pts = [(e.t ** 2, np.log(e.p)) for e in estimates if min_hits <= e.hits <= e.trials - min_hits]
    if len(pts) < 3:
        return float("nan"), float("nan"), float("nan"), len(pts)
    x, y = np.array(pts).T
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid ** 2) / ss if ss > 0 else 1.0
    return float(slope), float(intercept), float(r2), len(pts)


def mc_tail(model, condition, ts, trials, cfg=None, evaluator=None):
    """Empirical P(failure at t) for each t, with the log P vs t^2 regression."""
    if trials < 1000:
        raise ValueError("mc_tail needs at least 1000 trials")
    crit, cond = critical_samples(model, trials, condition, cfg, evaluator)
    est = tail_estimates(crit, ts)
    slope, intercept, r2, k = fit_log_tail(est)
    per = {str(c): [int(np.count_nonzero(crit[:, j] > t)) for t in ts] for j, c in enumerate(cond)}
    return TailReport(est, cond, slope, intercept, r2, k, per)


def single_mode_tail(amplitude, lam2, sigma, t):
    """P(|A| lambda^sigma |g| > t) = exp(-t^2 / (A^2 lambda^{2 sigma})) for complex Gaussian g."""
    scale2 = abs(amplitude) ** 2 * lam2 ** sigma
    return float(np.exp(-t ** 2 / scale2)) if scale2 > 0 else 0.0


# -- Wiener chaos moments ------------------------------------------------------------------

def _chaos_values(c, G):
    """X = sum c_{n...} g_n ... for each row of G (trials, side)."""
    k = c.ndim
    if k == 1:
        return G @ c
    if k == 2:
        return np.einsum("tn,nm,tm->t", G, c, G)
    if k == 3:
        return np.einsum("tn,tm,tk,nmk->t", G, G, G, c, optimize=True)
    raise ValueError("order must be 1, 2 or 3")


def chaos_rhs(c, law):
    """Right-hand side of the chaos bound without the q power and constant."""
    c = np.asarray(c)
    L = 0.0 if law == GAUSSIAN else 1.0
    l2 = float(np.linalg.norm(c.ravel()))
    if c.ndim == 1:
        return l2
    if c.ndim == 2:
        return l2 + L * float(np.abs(np.diagonal(c)).sum())
    side = c.shape[0]
    idx = np.arange(side)
    traces = (np.linalg.norm(c[idx, idx, :], axis=1).sum()
              + np.linalg.norm(c[idx, :, idx], axis=1).sum()
              + np.linalg.norm(c[:, idx, idx].T, axis=1).sum())
    return l2 + L * float(traces)


def exact_second_moment(c, law, eps=1.0):
    """E|X|^2 in closed form.

    Complex Gaussian: Wick's formula, E|X|^2 = k! |sym c|^2.  Signs: products of
    +-1 reduce to the indices of odd multiplicity, E|X|^2 = eps^{2k} sum_S |sum_{odd(a)=S} c_a|^2.
    """
    c = np.asarray(c, dtype=complex)
    k = c.ndim
    if law == GAUSSIAN:
        sym = sum(np.transpose(c, p) for p in itertools.permutations(range(k))) / math.factorial(k)
        return float(math.factorial(k) * np.sum(np.abs(sym) ** 2))
    groups = {}
    for a in itertools.product(range(c.shape[0]), repeat=k):
        odd = tuple(sorted(n for n in set(a) if a.count(n) % 2))
        groups[odd] = groups.get(odd, 0) + c[a]
    return float(eps ** (2 * k) * sum(abs(v) ** 2 for v in groups.values()))


@dataclass
class ChaosMoments:
    order: int
    law: str
    qs: list
    moments: list
    rhs: float
    trials: int
    second_moment: float
    second_moment_se: float
    exact_second: float

    @property
    def ratios(self):
        return [m / (q ** (self.order / 2) * self.rhs) if self.rhs > 0 else 0.0
                for q, m in zip(self.qs, self.moments)]

    @property
    def constant(self):
        """q = 2 ratio from the exact second moment; hypercontractivity makes it the sup over q."""
        return np.sqrt(self.exact_second) / (2 ** (self.order / 2) * self.rhs) if self.rhs > 0 else 0.0

    def bounded(self, slack=0.05):
        """Every measured ratio lies below the a-priori constant, up to MC slack."""
        return bool(max(self.ratios) <= (1 + slack) * self.constant)

    def summary(self):
        return {"order": self.order, "law": self.law, "qs": list(self.qs),
                "moments": self.moments, "ratios": self.ratios, "rhs": self.rhs,
                "constant": self.constant, "bounded": self.bounded(),
                "trials": self.trials, "second_moment": self.second_moment,
                "second_moment_se": self.second_moment_se, "exact_second_moment": self.exact_second}


def chaos_moment_mc(order, c, law, qs, trials, seed=0, eps=1.0, block=4096):
    """Monte-Carlo ||X||_{L^q(Omega)} for the order-k chaos X built on c."""
    c = np.asarray(c, dtype=complex)
    if order not in (1, 2, 3) or c.ndim != order:
        raise ValueError("coefficient tensor rank must equal order in {1, 2, 3}")
    if len(set(c.shape)) != 1 or c.shape[0] > 8:
        raise ValueError("coefficient tensors must be cubic with side <= 8")
    qs = [int(q) for q in qs]
    if any(q % 2 or q < 2 or q > 16 for q in qs):
        raise ValueError("q must be even and in [2, 16]")
    side = c.shape[0]
    # per-block streams with fixed accumulation order
    absx = np.empty(trials)
    for b0 in range(0, trials, block):
        n = min(block, trials - b0)
        rng = stream(seed, _TAG_CHAOS, order, b0 // block)
        G = draw_coefficients(law, (n, side), rng, eps)
        absx[b0:b0 + n] = np.abs(_chaos_values(c, G))
    mom = [float(np.mean(absx ** q) ** (1.0 / q)) for q in qs]
    x2 = absx ** 2
    return ChaosMoments(order, law, qs, mom, chaos_rhs(c, law), trials, float(x2.mean()),
                        float(x2.std(ddof=1) / np.sqrt(trials)), exact_second_moment(c, law, eps))


# -- pairings and exact sign moments --------------------------------------------------------

@dataclass(frozen=True)
class Pairing:
    """Fixed-point-free involution of {1, ..., 2p}, stored 0-based: sigma[i] is the partner of i."""
    sigma: tuple

    @property
    def p(self):
        return len(self.sigma) // 2

    def is_valid(self):
        s = self.sigma
        return all(s[s[i]] == i and s[i] != i for i in range(len(s)))

    def fixed_pairs(self):
        """I(sigma, p): the i in 1..p whose positions 2i - 1 and 2i are paired together."""
        return {i for i in range(1, self.p + 1) if self.sigma[2 * i - 1] == 2 * i - 2}

    def pairs(self):
        return [(i, j) for i, j in enumerate(self.sigma) if i < j]


def enumerate_pairings(p):
    if not 0 <= p <= 6:
        raise ValueError("p must lie in 0..6")

    def rec(free):
        if not free:
            yield []
            return
        a = free[0]
        for j in range(1, len(free)):
            rest = free[1:j] + free[j + 1:]
            for tail in rec(rest):
                yield [(a, free[j])] + tail

    out = []
    for pairs in rec(list(range(2 * p))):
        s = [0] * (2 * p)
        for a, b in pairs:
            s[a], s[b] = b, a
        out.append(Pairing(tuple(s)))
    return out


def bernoulli_moment_exact(indices, k):
    """E(prod X_{n_i}) for i.i.d. fair signs X_0..X_{k-1}, averaged over all 2^k assignments."""
    indices = tuple(int(n) for n in indices)
    if len(indices) > 8 or k > 4 or k < 1:
        raise ValueError("need at most 8 factors and alphabet size 1..4")
    if any(n < 0 or n >= k for n in indices):
        raise ValueError("index outside the alphabet")
    total = 0
    for signs in itertools.product((-1, 1), repeat=k):
        total += math.prod(signs[n] for n in indices)
    return Fraction(total, 2 ** k)


def compatible_pairing(indices):
    """A pairing sigma with n_{sigma(i)} = n_i, or None."""
    m = len(indices)
    if m % 2:
        return None
    for s in enumerate_pairings(m // 2):
        if all(indices[s.sigma[i]] == indices[i] for i in range(m)):
            return s
    return None


def pairing_sum_bound_check(tensors, sigma):
    """Constrained sum over n_{sigma(i)} = n_i of prod |c^i_{n_{2i-1}, n_{2i}}| against its bounds.

    Returns (lhs, rhs, ok) with rhs = prod (||c||_{diag l1} + ||c||_{l2}); the
    sharper product over the fixed pairs is checked as well.
    """
    tensors = [np.abs(np.asarray(c)) for c in tensors]
    p = len(tensors)
    if p != sigma.p or not sigma.is_valid():
        raise ValueError("sigma must be a pairing of 2p points")
    if p > 4 or any(c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] > 6 for c in tensors):
        raise ValueError("need p <= 4 square tensors of side <= 6")
    side = tensors[0].shape[0]
    pairs = sigma.pairs()
    lhs = 0.0
    n = [0] * (2 * p)
    for vals in itertools.product(range(side), repeat=p):
        for (a, b), v in zip(pairs, vals):
            n[a] = n[b] = v
        lhs += math.prod(float(c[n[2 * i], n[2 * i + 1]]) for i, c in enumerate(tensors))
    diag = [float(np.trace(c)) for c in tensors]
    l2 = [float(np.linalg.norm(c)) for c in tensors]
    fixed = sigma.fixed_pairs()
    sharp = math.prod(diag[i - 1] if i in fixed else l2[i - 1] for i in range(1, p + 1))
    rhs = math.prod(d + e for d, e in zip(diag, l2))
    tol = 1e-12 * max(1.0, rhs)
    return lhs, rhs, bool(lhs <= sharp + tol and sharp <= rhs + tol)


def paley_zygmund_check(samples, lam):
    """Empirical P(X >= lam E X) against (1 - lam)^2 (E X)^2 / E X^2.

    ok allows three binomial standard errors on the empirical probability.
    """
    x = np.asarray(samples, dtype=float)
    if np.any(x < 0):
        raise ValueError("samples must be nonnegative")
    if not 0 <= lam <= 1:
        raise ValueError("lambda must lie in [0, 1]")
    m1, m2 = x.mean(), np.mean(x * x)
    lhs = float(np.mean(x >= lam * m1))
    rhs = float((1 - lam) ** 2 * m1 ** 2 / m2) if m2 > 0 else 0.0
    margin = 3 * np.sqrt(max(lhs * (1 - lhs), 1.0 / x.size) / x.size)
    return lhs, rhs, bool(lhs + margin >= rhs)

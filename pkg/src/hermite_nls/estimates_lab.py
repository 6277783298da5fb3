"""Dyadic projectors and numerical measurement of eigenfunction and bilinear estimates."""
from dataclasses import dataclass, field
import csv
import io
import json

import numpy as np
from scipy.integrate import simpson
from scipy.special import gammaln

from .hermite_core import Grid, SpectralField, hermite_table, make_grid
from .rng import stream


# -- cutoff profile and dyadic projectors -----------------------------------------

def _smooth_zero(y):
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    pos = y > 0
    out[pos] = np.exp(-1.0 / y[pos])
    return out


class CutoffProfile:
    """C-infinity step: 1 on [0, 1], 0 on [2, inf), monotone in between.

    eta(x) = f(2 - x) / (f(2 - x) + f(x - 1)) with f(y) = exp(-1/y) for y > 0.
    Values are rounded to multiples of 2^-52 so that differences of eta values,
    and hence sums of dyadic multipliers, are exact in floating point.
    """

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        a = _smooth_zero(2.0 - x)
        b = _smooth_zero(x - 1.0)
        out = np.where(x <= 1.0, 1.0, 0.0)
        mid = (x > 1.0) & (x < 2.0)
        out = np.where(mid, a / np.where(mid, a + b, 1.0), out)
        return np.round(out * 2.0 ** 52) / 2.0 ** 52


ETA = CutoffProfile()


def is_dyadic(N):
    try:
        N = int(N) if float(N) == int(N) else None
    except (TypeError, ValueError, OverflowError):
        return False
    return N is not None and N >= 1 and (N & (N - 1)) == 0


def dyadic_multiplier(lam2, N, profile=ETA):
    """eta(lambda^2 / N^2) - eta(4 lambda^2 / N^2)."""
    if not is_dyadic(N):
        raise ValueError(f"N={N} is not a power of two")
    lam2 = np.asarray(lam2, dtype=float)
    return profile(lam2 / N ** 2) - profile(4 * lam2 / N ** 2)


def dyadic_project(f, N, profile=ETA):
    return SpectralField(f.basis, f.coeffs * dyadic_multiplier(f.basis.lam2, N, profile))


# -- reports and fits ---------------------------------------------------------------

def fit_scaling_exponent(samples):
    """Least-squares fit of log y = slope log x + intercept; returns (slope, intercept, r2)."""
    xy = np.asarray(samples, dtype=float)
    if xy.ndim != 2 or xy.shape[0] < 3:
        raise ValueError("need at least 3 (x, y) samples")
    x, y = np.log(xy[:, 0]), np.log(xy[:, 1])
    if np.ptp(x) == 0 or np.unique(x).size < 2:
        raise ValueError("degenerate x values")
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    ss = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid ** 2) / ss if ss > 0 else 1.0
    return float(slope), float(intercept), float(r2)


def envelope(points):
    """Per-dyadic-scale maxima of (x, y) points, the x of each maximum kept."""
    pts = np.asarray(points, dtype=float)
    scale = np.floor(np.log2(pts[:, 0]) + 1e-12)
    out = []
    for s in np.unique(scale):
        blk = pts[scale == s]
        out.append(blk[np.argmax(blk[:, 1])])
    return np.array(out)


@dataclass
class EstimateReport:
    estimate_id: str
    rows: list                  # (param1, param2, value)
    slope: float = float("nan")
    intercept: float = float("nan")
    r2: float = float("nan")
    target: float = float("nan")
    band: tuple = (float("-inf"), float("inf"))
    passed: bool = False
    notes: dict = field(default_factory=dict)

    def csv_text(self, header=("estimate_id", "param1", "param2", "value")):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for p1, p2, v in self.rows:
            w.writerow([self.estimate_id, fmt(p1), fmt(p2), fmt(v)])
        return buf.getvalue()

    def summary(self):
        return {"estimate_id": self.estimate_id, "fit": {"slope": self.slope, "intercept": self.intercept,
                                                         "r2": self.r2},
                "target": self.target, "band": list(self.band), "pass": bool(self.passed),
                "notes": self.notes}

    def summary_json(self):
        return json.dumps(self.summary(), sort_keys=True, indent=1)


def fmt(v):
    """Shortest round-trip decimal for floats, plain str for ints."""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _finish(report, fit_points, lo, hi):
    slope, intercept, r2 = fit_scaling_exponent(fit_points)
    report.slope, report.intercept, report.r2 = slope, intercept, r2
    report.band = (lo, hi)
    report.passed = bool(lo <= slope <= hi)
    return report


# -- 1D integrals of products of Hermite functions ------------------------------------

def _grid_for_degree(n, oversample=1.0):
    return make_grid(np.sqrt(2 * n + 1), oversample)


def hermite_rows(degrees, xs):
    """{n: h_n(xs)} for the requested degrees only (recurrence without the full table)."""
    want = sorted(set(int(n) for n in degrees))
    xs = np.asarray(xs, dtype=float)
    out = {}
    top = want[-1]
    logscale = -0.5 * xs * xs
    prev = np.zeros_like(xs)
    cur = np.full_like(xs, np.pi ** -0.25)
    wanted = set(want)
    if 0 in wanted:
        out[0] = cur * np.exp(logscale)
    for k in range(top):
        nxt = np.sqrt(2.0 / (k + 1)) * xs * cur - np.sqrt(k / (k + 1.0)) * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > 1e150
        if big.any():
            cur[big] /= 1e150
            prev[big] /= 1e150
            logscale[big] += np.log(1e150)
        if k + 1 in wanted:
            out[k + 1] = cur * np.exp(logscale)
    return out


class AxisIntegrals:
    """Memoized 1D integrals int prod h_{n_i}^{p_i} sharing one grid and row set."""

    def __init__(self, degrees, oversample=1.0):
        top = max(int(n) for n in degrees)
        self.grid = _grid_for_degree(top, oversample)
        self.rows = hermite_rows(degrees, self.grid.x)
        self.memo = {}

    def __call__(self, degrees, powers):
        key = tuple(sorted(zip(degrees, powers)))
        if key not in self.memo:
            prod = np.ones(self.grid.m)
            for n, p in key:
                prod = prod * self.rows[n] ** p
            self.memo[key] = float(np.sum(self.grid.w * prod))
        return self.memo[key]


def hermite_product_integral(degrees, powers=None, oversample=1.0):
    """int prod_i h_{n_i}(x)^{p_i} dx on a uniform grid sized for the top degree.

    The default grid resolves products of up to six factors (2 pi / dx = 8 lambda).
    """
    degrees = [int(n) for n in degrees]
    powers = [1] * len(degrees) if powers is None else list(powers)
    return AxisIntegrals(degrees, oversample)(degrees, powers)


def _as_index(n, d=None):
    n = (int(n),) if np.isscalar(n) else tuple(int(k) for k in n)
    if d is not None and len(n) != d:
        raise ValueError("multi-indices of different dimensions")
    return n


def _product_norm(indices, oversample=1.0, ax=None):
    idx = [_as_index(indices[0])]
    idx += [_as_index(n, len(idx[0])) for n in indices[1:]]
    if ax is None:
        ax = AxisIntegrals([k for n in idx for k in n], oversample)
    val = 1.0
    for axis in range(len(idx[0])):
        val *= ax([n[axis] for n in idx], [2] * len(idx))
    return float(np.sqrt(val))


def product_l2(n, m, oversample=1.0, ax=None):
    """||h_n h_m||_{L^2(R^d)} = prod_i (int h_{n_i}^2 h_{m_i}^2)^{1/2}."""
    return _product_norm([n, m], oversample, ax)


def triple_product_l2(n, m, k, oversample=1.0, ax=None):
    """||h_n h_m h_k||_{L^2(R^d)} via the tensor factorization."""
    return _product_norm([n, m, k], oversample, ax)


def separated_frequency_integral(indices, oversample=1.0):
    """int_{R^d} prod_i h_{n_i} dx for l in {4, 5, 6} multi-indices."""
    idx = [_as_index(n) for n in indices]
    if len(idx) not in (4, 5, 6):
        raise ValueError("need 4, 5 or 6 multi-indices")
    d = len(idx[0])
    if any(len(n) != d for n in idx):
        raise ValueError("multi-indices of different dimensions")
    val = 1.0
    for axis in range(d):
        val *= hermite_product_integral([n[axis] for n in idx], None, oversample)
    return float(val)


def lam_of(n):
    n = _as_index(n)
    return float(np.sqrt(sum(2 * k + 1 for k in n)))


# -- scans ---------------------------------------------------------------------------

def eigenfunction_lp_scan(p, ns, dim=1):
    """L^p norms of h_n over a range of degrees, with a log-log envelope fit.

    dim=1 scans h_n; dim=3 scans balanced tensor indices (k, k, k) for k in ns.
    n = 0 is recorded but excluded from the fit.
    """
    ns = sorted(int(n) for n in ns)
    if not ns:
        raise ValueError("empty range")
    if p not in (4, np.inf, "inf"):
        raise ValueError("p must be 4 or inf")
    p = np.inf if p == "inf" else p
    top = max(ns)
    g = _grid_for_degree(top)
    H = hermite_table(top, g.x)
    rows, pts = [], []
    for n in ns:
        h = np.abs(H[n])
        one = h.max() if p == np.inf else np.sum(g.w * h ** 4) ** 0.25
        val = one ** dim
        lam = np.sqrt(dim * (2 * n + 1))
        rows.append((n, float(lam), float(val)))
        if n > 0:
            pts.append((lam, val))
    if p == 4:
        rep = EstimateReport("propre1" if dim == 1 else "propre1_3d", rows, target=-0.25)
        lo, hi = -0.30, -0.20
    else:
        rep = EstimateReport("propre2" if dim == 3 else "propre2_1d", rows, target=-1 / 6)
        lo, hi = -np.inf, -0.15
    if len(pts) >= 3:
        env = envelope(pts) if len(envelope(pts)) >= 3 else np.array(pts)
        _finish(rep, env, lo, hi)
    return rep


def _indices_at_scale(lam, dim):
    """A deterministic family of multi-indices with eigenvalue close to lam."""
    total = max(0, int(round((lam * lam - dim) / 2)))
    fams = []
    for share in ([1.0], [0.5, 0.5], [0.75, 0.25], [1 / 3, 1 / 3, 1 / 3], [0.6, 0.3, 0.1]):
        if len(share) > dim:
            continue
        parts = [int(round(total * s)) for s in share]
        parts[0] += total - sum(parts)
        fams.append(tuple(parts + [0] * (dim - len(parts))))
    return sorted(set(fams))


def product_envelope_scan(lams, dim=3, order=2):
    """max over sampled pairs (or triples) with top eigenvalue ~ lam of the product norm.

    For each scale the leading index n runs over a fixed family at that scale and
    the partners run over the ground state, a lower octave, and the same scale
    (including n itself), so diagonal products are part of the envelope.
    """
    rows, pts, args = [], [], []
    for lam in lams:
        lead = _indices_at_scale(lam, dim)
        partners = {tuple([0] * dim)}
        for sub in (lam / 4, lam / 2):
            if sub * sub >= dim:
                partners.update(_indices_at_scale(sub, dim))
        partners.update(lead)
        ax = AxisIntegrals([k for n in partners | set(lead) for k in n])
        best, arg = -1.0, None
        for n in lead:
            for m in sorted(partners):
                if order == 2:
                    v = product_l2(n, m, ax=ax)
                    cand = (n, m)
                    if v > best:
                        best, arg = v, cand
                else:
                    for k in sorted(partners):
                        v = triple_product_l2(n, m, k, ax=ax)
                        if v > best:
                            best, arg = v, (n, m, k)
        top = max(lam_of(i) for i in arg)
        rows.append((float(lam), top, best))
        pts.append((top, best))
        args.append([list(i) for i in arg])
    rid = "propre3" if order == 2 else "propre4"
    rep = EstimateReport(rid, rows, target=-0.5, notes={"argmax": args})
    return _finish(rep, pts, -np.inf, -0.45)


def ground_partner_scan(lams, dim=3):
    """||h_n h_0|| along axis-aligned n with lambda_n ~ lam."""
    rows, pts = [], []
    for lam in lams:
        k = max(0, int(round((lam * lam - dim) / 2)))
        n = (k,) + (0,) * (dim - 1)
        v = product_l2(n, (0,) * dim)
        rows.append((k, lam_of(n), v))
        pts.append((lam_of(n), v))
    rep = EstimateReport("propre3_ground", rows, target=-0.5)
    return _finish(rep, pts, -np.inf, -0.45)


def rapid_decay_scan(lams=(4, 8, 16), tail=(2, 1, 0), oversample=1.0):
    """int h_{n1} h_{tail...} with odd n1 (even n1 integrates to zero by parity).

    Each value is computed at two resolutions.  Decay faster than lam^-4 means
    |I(lam_{k+1})| <= |I(lam_k)| (lam_k / lam_{k+1})^4 for successive scales.
    """
    parity = sum(tail) % 2
    rows, vals = [], []
    for lam in lams:
        n1 = int(round((lam * lam - 1) / 2))
        if (n1 + parity) % 2:
            n1 += 1 if (n1 + 1 + parity) % 2 == 0 else -1
        a = separated_frequency_integral([(n1,)] + [(k,) for k in tail], oversample)
        b = separated_frequency_integral([(n1,)] + [(k,) for k in tail], 2 * oversample)
        rows.append((n1, lam_of(n1), a))
        vals.append((lam_of(n1), a, b))
    ok = True
    ratios = []
    for (l0, a0, _), (l1, a1, _) in zip(vals, vals[1:]):
        bound = abs(a0) * (l0 / l1) ** 4
        ratios.append(abs(a1) / abs(a0) if a0 else 0.0)
        ok &= abs(a1) <= bound
    rep = EstimateReport("rapidement", rows, target=-4.0, passed=bool(ok))
    rep.notes = {"successive_ratios": ratios,
                 "resolution_gap": max(abs(a - b) for _, a, b in vals)}
    return rep


# -- bilinear estimate -------------------------------------------------------------------
#
# Probe fields are separable, u = u_1(x_1) ... u_d(x_d), each factor a short
# window of 1D Hermite degrees.  Then ||e^{itH}v e^{itH}u||^2_{L^2(R^d)} is the
# product over axes of f_i(t) = int |v_i(t) u_i(t)|^2 dx, and since every 1D
# eigenvalue is odd each f_i is a trigonometric polynomial in e^{2it}.  The
# f_i are sampled over one period, turned into Fourier coefficients by FFT,
# multiplied, and integrated over [-1, 1] in closed form.


@dataclass
class SeparableField:
    """u(x) = prod_i sum_j a_i[j] h_{k_i + j}(x_i); windows given as (k_i, a_i)."""
    factors: list

    @property
    def dim(self):
        return len(self.factors)

    def lam2_range(self):
        lo = sum(2 * k + 1 for k, _ in self.factors)
        hi = sum(2 * (k + len(a) - 1) + 1 for k, a in self.factors)
        return lo, hi

    def norm(self):
        return float(np.prod([np.linalg.norm(a) for _, a in self.factors]))

    def to_spectral(self, basis):
        c = np.zeros(basis.size, dtype=complex)
        for i, n in enumerate(basis.indices):
            val = 1.0 + 0j
            for (k, a), nk in zip(self.factors, n):
                j = nk - k
                if j < 0 or j >= len(a):
                    val = 0.0
                    break
                val *= a[j]
            c[i] = val
        return SpectralField(basis, c)


def _plateau(N):
    """lambda^2 range where the multiplier of Delta_N is identically 1."""
    return N * N / 2.0, float(N * N)


def _window(rng, kind, kmin, kmax):
    """Random coefficient window inside degrees [kmin, kmax]."""
    span = kmax - kmin + 1
    if kind == "packet" and span > 1:
        # coherent state sum alpha^k / sqrt(k!) restricted to the window
        mean = rng.uniform(kmin, kmax)
        phase = rng.uniform(0, 2 * np.pi)
        ks = np.arange(kmin, kmax + 1)
        logamp = 0.5 * (ks * np.log(max(mean, 1e-300)) - gammaln(ks + 1)) - 0.5 * mean
        amp = np.exp(logamp - logamp.max())
        keep = amp > 1e-12
        ks, amp = ks[keep], amp[keep]
        return int(ks[0]), amp * np.exp(1j * phase * ks)
    w = int(rng.integers(1, min(span, 8) + 1))
    k0 = int(rng.integers(kmin, kmax - w + 2))
    a = (rng.standard_normal(w) + 1j * rng.standard_normal(w)) / np.sqrt(2)
    return k0, a


def random_block_probe(N, dim, rng, kinds=("window", "packet"), low_width=1):
    """Random separable field whose whole spectrum lies in the plateau of Delta_N.

    One randomly chosen axis carries the block energy; the other axes get
    low-degree Gaussian windows.  Returns None if the plateau holds no separable
    field of this shape.
    """
    lo, hi = _plateau(N)
    axis = int(rng.integers(dim))
    factors = [None] * dim
    low_hi = 0
    for i in range(dim):
        if i == axis:
            continue
        w = int(rng.integers(1, low_width + 1))
        # keep room for the dominant axis: the low windows may use at most a
        # quarter of the plateau energy
        while w > 1 and (dim - 1) * (2 * (w - 1) + 1) > hi / 4:
            w -= 1
        a = (rng.standard_normal(w) + 1j * rng.standard_normal(w)) / np.sqrt(2)
        factors[i] = (0, a)
        low_hi += 2 * (w - 1) + 1
    low_lo = dim - 1
    # dominant degrees k with lo <= 2k + 1 + low <= hi for every low combination
    kmin = int(np.ceil((lo - low_lo - 1) / 2))
    kmax = int(np.floor((hi - low_hi - 1) / 2))
    kmin = max(kmin, 0)
    if kmax < kmin:
        return None
    kind = kinds[int(rng.integers(len(kinds)))]
    factors[axis] = _window(rng, kind, kmin, kmax)
    return SeparableField(factors)


def _factor_profile(va, ua, P):
    """Fourier coefficients (index j <-> e^{2ijt}) of int |v(t) u(t)|^2 dx in 1D."""
    (kv, av), (ku, au) = va, ua
    top_v, top_u = kv + len(av) - 1, ku + len(au) - 1
    # restrict x to the support of the lower-energy factor
    lam_low = np.sqrt(2 * min(top_v, top_u) + 1)
    lam_high = np.sqrt(2 * max(top_v, top_u) + 1)
    L = 1.5 * lam_low + 5.0
    dx = np.pi / (4.0 * max(lam_high, 3.0))
    m = int(np.ceil(2 * L / dx)) + 1
    m += (m % 2 == 0)
    g = Grid(L, m)
    rows = hermite_rows(list(range(kv, top_v + 1)) + list(range(ku, top_u + 1)), g.x)
    Hv = np.array([rows[k] for k in range(kv, top_v + 1)])
    Hu = np.array([rows[k] for k in range(ku, top_u + 1)])
    ts = np.pi * np.arange(P) / P
    # e^{itH} on degree k gives e^{it(2k+1)}; the common e^{it} drops out of |.|^2
    Ev = np.exp(2j * np.outer(ts, np.arange(len(av)))) * av
    Eu = np.exp(2j * np.outer(ts, np.arange(len(au)))) * au
    V = Ev @ Hv
    U = Eu @ Hu
    f = (np.abs(V * U) ** 2) @ g.w
    return np.fft.fft(f) / P


def _trig_product_integral(coefs, J, a=-1.0, b=1.0):
    """int_a^b prod_i f_i(t) dt for f_i(t) = sum_j F_i[j] e^{2ijt}, |j| <= J_i."""
    total = np.array([1.0 + 0j])
    for F, Ji in zip(coefs, J):
        P = F.size
        c = np.concatenate([F[P - Ji:], F[:Ji + 1]]) if Ji > 0 else F[:1]
        total = np.convolve(total, c)
    Jt = (total.size - 1) // 2
    j = np.arange(-Jt, Jt + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(j == 0, b - a, (np.exp(2j * j * b) - np.exp(2j * j * a)) / (2j * np.where(j == 0, 1, j)))
    return float(np.real(np.sum(total * w)))


def bilinear_ratio(v, u, t_window=(-1.0, 1.0), rule="exact", nodes=41):
    """||e^{itH}v e^{itH}u||_{L^2(window x R^d)} / (||v|| ||u||) for separable fields.

    rule="exact" integrates the trigonometric polynomial in closed form;
    rule="simpson" uses composite Simpson on `nodes` uniform time nodes.
    """
    coefs, J = [], []
    for va, ua in zip(v.factors, u.factors):
        Ji = (len(va[1]) - 1) + (len(ua[1]) - 1)
        P = 2 * Ji + 1
        coefs.append(_factor_profile(va, ua, P))
        J.append(Ji)
    a, b = t_window
    if rule == "exact":
        sq = _trig_product_integral(coefs, J, a, b)
    elif rule == "simpson":
        ts = np.linspace(a, b, nodes)
        vals = np.ones(nodes)
        for F, Ji in zip(coefs, J):
            j = np.arange(-Ji, Ji + 1)
            c = np.concatenate([F[F.size - Ji:], F[:Ji + 1]]) if Ji > 0 else F[:1]
            vals = vals * np.real(np.exp(2j * np.outer(ts, j)) @ c)
        sq = simpson(vals, x=ts)
    else:
        raise ValueError(f"unknown rule {rule!r}")
    return float(np.sqrt(max(sq, 0.0))) / (v.norm() * u.norm())


def bilinear_constant(N, M, trials, seed, dim=3, lam_max=None, rule="exact", nodes=41,
                      kinds=("window", "packet"), low_width=1, return_all=False):
    """max over random block probes of the bilinear ratio B(N, M) on t in [-1, 1].

    Trial j draws its two probes from the stream (seed, N, M, dim, j), so the
    result does not depend on evaluation order.
    """
    if not (is_dyadic(N) and is_dyadic(M)):
        raise ValueError("N and M must be powers of two")
    if lam_max is not None and max(N, M) > lam_max / 2:
        raise ValueError(f"N, M must be <= lambda_max / 2 = {lam_max / 2}")
    vals = []
    for trial in range(trials):
        rng = stream(seed, N, M, dim, trial)
        v = random_block_probe(N, dim, rng, kinds, low_width)
        u = random_block_probe(M, dim, rng, kinds, low_width)
        if v is None or u is None:
            raise ValueError(f"dyadic block N={N} or M={M} holds no probe field in d={dim}")
        if v.norm() == 0 or u.norm() == 0:
            continue
        vals.append(bilinear_ratio(v, u, rule=rule, nodes=nodes))
    if not vals:
        raise ValueError("no nonzero draws")
    return (max(vals), vals) if return_all else max(vals)


def bilinear_ratio_bruteforce(v, u, g, basis, nodes=2001, t_window=(-1.0, 1.0), t0=0.0):
    """Same ratio by synthesis on the full d-dimensional grid and Simpson in time.

    Independent of the separable/trigonometric route; only for small cases.
    t0 shifts both flows by e^{-i t0 H} first.
    """
    from .propagator_lens import propagate_harmonic
    from .hermite_core import synthesize
    fv, fu = v.to_spectral(basis), u.to_spectral(basis)
    w = g.weights(basis.dim)
    ts = np.linspace(t_window[0], t_window[1], nodes)
    vals = np.empty(nodes)
    for j, t in enumerate(ts):
        a = synthesize(propagate_harmonic(fv, -(t - t0)), g)
        b = synthesize(propagate_harmonic(fu, -(t - t0)), g)
        vals[j] = np.sum(w * np.abs(a * b) ** 2)
    return float(np.sqrt(simpson(vals, x=ts))) / (fv.norm() * fu.norm())


def bilinear_scan(N, Ms, trials, seed, dim=3, rule="exact", nodes=41, lo=-0.6, hi=-0.3):
    rows, pts = [], []
    for M in Ms:
        B = bilinear_constant(N, M, trials, seed, dim, rule=rule, nodes=nodes)
        rows.append((N, M, B))
        pts.append((M, B))
    rep = EstimateReport("bilis", rows, target=-0.5)
    return _finish(rep, pts, lo, hi)


def bilinear_equal_scale(Ns, trials, seed, dim=2, factor=2.0):
    rows = [(N, N, bilinear_constant(N, N, trials, seed, dim)) for N in Ns]
    vals = [b for _, _, b in rows]
    spread = max(vals) / min(vals)
    rep = EstimateReport("bilis_equal", rows, target=0.0, passed=bool(spread <= factor))
    rep.notes = {"max_over_min": spread, "factor": factor}
    return rep

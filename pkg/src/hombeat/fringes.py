"""Closed-form fringe model, synthetic counting data, and parameter recovery.

The beating pattern of the second interferometer stage is modelled as a sum
of cosine components, one per frequency-bin pair, under a shared triangular
coherence envelope on a flat 1/2 baseline. Fitting works on an internal
unconstrained parameterization (log coherence time, logistic component
amplitudes) so the damped least-squares core never sees bounds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lm import LMOptions, LMResult, levenberg_marquardt

__all__ = [
    "FringePairParams",
    "FringeModelParams",
    "FringeScan",
    "FitResult",
    "fringe_model_eval",
    "fringe_theta_model",
    "synth_scan",
    "seed_guess",
    "lm_fit",
    "fit_fringe_scan",
]


@dataclass(frozen=True)
class FringePairParams:
    """One oscillating component of the fringe model."""

    weight: float
    detuning_thz: float
    visibility: float
    phase_deg: float

    def __post_init__(self):
        if not all(np.isfinite(v) for v in
                   (self.weight, self.detuning_thz, self.visibility, self.phase_deg)):
            raise ValueError("fringe pair parameters must be finite")
        if self.weight < 0:
            raise ValueError("weight must be non-negative")
        if self.detuning_thz <= 0:
            raise ValueError("detuning must be positive")
        if not 0.0 <= self.visibility <= 1.0:
            raise ValueError("visibility must lie in [0, 1]")

    @property
    def amplitude(self) -> float:
        """Product weight * visibility; the directly identifiable quantity."""
        return self.weight * self.visibility


@dataclass(frozen=True)
class FringeModelParams:
    """Full fringe model: shared envelope plus per-pair components.

    The baseline outside the triangular envelope is the uncorrelated-photon
    value 1/2. Weights are normalized to sum to 1.
    """

    coherence_time_ps: float
    pairs: tuple[FringePairParams, ...]

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        if not np.isfinite(self.coherence_time_ps) or self.coherence_time_ps <= 0:
            raise ValueError("coherence time must be positive")
        if len(self.pairs) == 0:
            raise ValueError("need at least one pair")
        total = sum(p.weight for p in self.pairs)
        if abs(total - 1.0) > 1e-3:
            raise ValueError(f"pair weights must sum to 1 within 1e-3, got {total:.6f}")

    @property
    def dimension_m(self) -> int:
        return 2 * len(self.pairs)


def fringe_model_eval(params: FringeModelParams, tau2_ps):
    """Evaluate the fringe probability model at tau2 (scalar or array).

    P(tau2) = 1/2 - sum_j (A_j V_j / 2) cos(2 pi mu_j tau2 + phi_j) * env,
    with env the triangle 1 - |2 tau2 / tau_c| inside |tau2| <= tau_c / 2
    and zero outside. Continuous everywhere.
    """
    t = np.asarray(tau2_ps, dtype=float)
    env = np.clip(1.0 - np.abs(2.0 * t / params.coherence_time_ps), 0.0, None)
    out = np.full_like(t, 0.5)
    for p in params.pairs:
        phi = np.deg2rad(p.phase_deg)
        out = out - 0.5 * p.amplitude * np.cos(
            2.0 * np.pi * p.detuning_thz * t + phi) * env
    return float(out) if np.isscalar(tau2_ps) else out


@dataclass(frozen=True)
class FringeScan:
    """Sampled fringe data, either noiseless probabilities or counts.

    In counts mode ``values`` holds Poisson-distributed coincidence counts
    and ``uncertainties`` their square roots with a floor of one count, so
    empty bins never produce zero weights downstream.
    """

    tau2_ps: np.ndarray
    values: np.ndarray
    uncertainties: np.ndarray
    counts_mode: bool
    counts_per_point: int | None

    def __post_init__(self):
        t = np.asarray(self.tau2_ps, dtype=float)
        v = np.asarray(self.values, dtype=float)
        u = np.asarray(self.uncertainties, dtype=float)
        object.__setattr__(self, "tau2_ps", t)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "uncertainties", u)
        if not (t.size == v.size == u.size):
            raise ValueError("scan arrays must have equal lengths")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v)) and np.all(np.isfinite(u))):
            raise ValueError("scan arrays must be finite")
        if np.any(u < 0):
            raise ValueError("uncertainties must be non-negative")
        if self.counts_mode:
            if self.counts_per_point is None or self.counts_per_point < 1:
                raise ValueError("counts mode requires counts_per_point >= 1")
            expected = np.sqrt(np.maximum(v, 1.0))
            if not np.allclose(u, expected, rtol=0, atol=1e-9):
                raise ValueError("counts-mode uncertainties must be sqrt(count) "
                                 "with a one-count floor")

    @property
    def n_points(self) -> int:
        return self.tau2_ps.size

    def probabilities(self) -> np.ndarray:
        if self.counts_mode:
            return self.values / self.counts_per_point
        return self.values

    def probability_sigmas(self) -> np.ndarray:
        if self.counts_mode:
            return self.uncertainties / self.counts_per_point
        return self.uncertainties


def synth_scan(params: FringeModelParams, tau2_min_ps: float, tau2_max_ps: float,
               n_points: int, counts_per_point: int, seed: int = 0) -> FringeScan:
    """Synthetic delay scan of the fringe model.

    With counts_per_point >= 1 each sample draws from a Poisson law with
    mean counts_per_point times the model probability (reproducible for a
    fixed seed). counts_per_point = 0 returns the noiseless probability
    curve instead; the seed is ignored.
    """
    if n_points < 3:
        raise ValueError("scan needs at least 3 points")
    if not (np.isfinite(tau2_min_ps) and np.isfinite(tau2_max_ps)) \
            or tau2_max_ps <= tau2_min_ps:
        raise ValueError("invalid scan range")
    if counts_per_point < 0:
        raise ValueError("counts_per_point must not be negative")
    tau2 = np.linspace(tau2_min_ps, tau2_max_ps, n_points)
    probs = fringe_model_eval(params, tau2)
    if counts_per_point == 0:
        return FringeScan(tau2_ps=tau2, values=probs,
                          uncertainties=np.zeros_like(tau2),
                          counts_mode=False, counts_per_point=None)
    rng = np.random.default_rng(seed)
    counts = rng.poisson(counts_per_point * probs).astype(float)
    sigma = np.sqrt(np.maximum(counts, 1.0))
    return FringeScan(tau2_ps=tau2, values=counts, uncertainties=sigma,
                      counts_mode=True, counts_per_point=int(counts_per_point))


def _significant_dft_peaks(scan: FringeScan) -> tuple[np.ndarray, np.ndarray]:
    """Local maxima of the oscillation spectrum that clear the noise floor.

    Returns (frequencies, magnitudes) sorted by descending magnitude with
    ties broken toward lower frequency.
    """
    y = scan.probabilities() - 0.5
    n = y.size
    dt = scan.tau2_ps[1] - scan.tau2_ps[0]
    steps = np.diff(scan.tau2_ps)
    if np.max(np.abs(steps - dt)) > 1e-9 * max(abs(dt), 1.0):
        raise ValueError("spectral seeding needs a uniform tau2 grid")
    mag = np.abs(np.fft.rfft(y))
    freqs = np.fft.rfftfreq(n, dt)
    # Two floors: the median term rejects the shot-noise background of a
    # counted scan, the relative term rejects spectral-leakage sidelobes of
    # a noiseless one (the first triangle-window sidelobe sits near 5% of
    # its line, genuine comb lines well above 10% of the strongest).
    floor = max(4.0 * np.median(mag[1:]), 0.1 * np.max(mag[1:]))
    idx = [k for k in range(1, mag.size - 1)
           if mag[k] >= mag[k - 1] and mag[k] >= mag[k + 1]
           and mag[k] >= floor and mag[k] > 1e-12]
    idx.sort(key=lambda k: (-mag[k], k))
    idx = np.asarray(idx, dtype=int)
    return freqs[idx], mag[idx]


def seed_guess(scan: FringeScan, m: int) -> FringeModelParams:
    """Starting parameters for a fringe fit with m frequency bins.

    Detuning seeds come from the m/2 strongest non-DC peaks of the discrete
    Fourier transform of (data - 1/2); the coherence-time seed from the base
    width of the oscillation envelope; weights are uniform, visibilities 0.5
    and phases 180 degrees.
    """
    if m < 2 or m % 2:
        raise ValueError("m must be a positive even integer")
    n_pairs = m // 2
    if scan.n_points < 2 * m + 2:
        raise ValueError(f"scan too short: need at least {2 * m + 2} samples "
                         f"for m={m}, got {scan.n_points}")
    freqs, _ = _significant_dft_peaks(scan)
    if freqs.size < n_pairs:
        raise ValueError(f"found {freqs.size} significant spectral peaks, "
                         f"need {n_pairs}")
    mus = np.sort(freqs[:n_pairs])

    y = np.abs(scan.probabilities() - 0.5)
    win = max(3, scan.n_points // 50)
    kernel = np.ones(win) / win
    env = np.convolve(y, kernel, mode="same")
    active = env >= 0.1 * env.max()
    base = 2.0 * float(np.max(np.abs(scan.tau2_ps[active])))
    dt = scan.tau2_ps[1] - scan.tau2_ps[0]
    tau_c = max(base, 4.0 * dt)

    pairs = tuple(
        FringePairParams(weight=1.0 / n_pairs, detuning_thz=float(mu),
                         visibility=0.5, phase_deg=180.0)
        for mu in mus
    )
    return FringeModelParams(coherence_time_ps=tau_c, pairs=pairs)


@dataclass
class FitResult:
    """Outcome of a fringe-model fit.

    ``covariance`` is over the free external parameters in the order listed
    by ``param_names``: the coherence time, then per pair (sorted by
    detuning) the detuning, the component amplitude A*V and the phase in
    degrees. The split of an amplitude into weight and visibility adds no
    information beyond the supplied weights or the shared-visibility
    convention, so it carries no separate covariance entries.
    """

    params: FringeModelParams
    covariance: np.ndarray
    param_names: tuple[str, ...]
    residual_norm: float
    n_iterations: int
    converged: bool
    message: str
    seed_params: FringeModelParams
    weights_supplied: bool


def _sigmoid(z):
    """Logistic function, stable against overflow for large |z|."""
    return np.exp(-np.logaddexp(0.0, -z))


def _pack(params: FringeModelParams) -> np.ndarray:
    theta = [np.log(params.coherence_time_ps)]
    for p in params.pairs:
        c = np.clip(p.amplitude, 1e-6, 1.0 - 1e-6)
        theta += [p.detuning_thz, np.log(c / (1.0 - c)), np.deg2rad(p.phase_deg)]
    return np.asarray(theta, dtype=float)


def _unpack(theta: np.ndarray, n_pairs: int):
    tau_c = float(np.exp(theta[0]))
    comps = []
    for j in range(n_pairs):
        mu, z, phi = theta[1 + 3 * j: 4 + 3 * j]
        c = _sigmoid(z)
        comps.append((abs(float(mu)), float(c), float(np.rad2deg(phi) % 360.0)))
    return tau_c, comps


def fringe_theta_model(tau2_ps: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Fringe model evaluated on the internal parameter vector.

    Layout: theta[0] is the log coherence time, followed by one triple
    (detuning_thz, logit amplitude, phase_rad) per pair, where amplitude
    is the weight-visibility product. This is the default residual model
    for lm_fit; a replacement must accept the same layout.
    """
    theta = np.asarray(theta, dtype=float)
    n_pairs = (theta.size - 1) // 3
    tau_c = np.exp(theta[0])
    env = np.clip(1.0 - np.abs(2.0 * tau2_ps / tau_c), 0.0, None)
    out = np.full_like(tau2_ps, 0.5)
    for j in range(n_pairs):
        mu, z, phi = theta[1 + 3 * j: 4 + 3 * j]
        c = _sigmoid(z)
        out = out - 0.5 * c * np.cos(2.0 * np.pi * mu * tau2_ps + phi) * env
    return out


def lm_fit(residual_model, initial_guess, scan: FringeScan,
           options: LMOptions | None = None,
           known_weights=None) -> FitResult:
    """Weighted least-squares fit of a fringe model to a scan.

    Parameters
    ----------
    residual_model:
        Callable (tau2_array, theta) -> model probabilities on the
        internal layout of ``fringe_theta_model`` (pass that function for
        the standard model).
    initial_guess:
        FringeModelParams or a raw internal parameter vector.
    scan:
        The data; counts are fitted as probabilities with Poisson weights,
        noiseless scans unweighted.
    known_weights:
        Per-pair weights in ascending-detuning order, when an independent
        spectral measurement provides them. The fit itself determines only
        the product A*V per pair; with weights given, visibilities follow
        as V = (A*V)/A, otherwise every pair is assigned the shared
        visibility V = sum(A*V) and weights proportional to the amplitudes.
    """
    if isinstance(initial_guess, FringeModelParams):
        seed = initial_guess
        theta0 = _pack(seed)
    else:
        theta0 = np.asarray(initial_guess, dtype=float)
        if theta0.ndim != 1 or (theta0.size - 1) % 3:
            raise ValueError("raw initial guess must be 1D with length 1+3k")
        tau_c0, comps0 = _unpack(theta0, (theta0.size - 1) // 3)
        total0 = sum(c for _, c, _ in comps0)
        seed = FringeModelParams(
            coherence_time_ps=tau_c0,
            pairs=tuple(FringePairParams(weight=c / total0, detuning_thz=mu,
                                         visibility=min(total0, 1.0),
                                         phase_deg=phi)
                        for mu, c, phi in comps0))
    n_pairs = (theta0.size - 1) // 3
    if scan.n_points <= theta0.size:
        raise ValueError("scan shorter than the free parameter count")

    y = scan.probabilities()
    sig = scan.probability_sigmas()
    if np.all(sig == 0):
        sig = np.ones_like(y)
    t = scan.tau2_ps

    def residual(theta):
        return (residual_model(t, theta) - y) / sig

    lm_res: LMResult = levenberg_marquardt(residual, theta0, options)

    tau_c, comps = _unpack(lm_res.params, n_pairs)
    order = np.argsort([c[0] for c in comps])
    comps = [comps[k] for k in order]
    amps = np.array([c[1] for c in comps])

    if known_weights is not None:
        weights = np.asarray(known_weights, dtype=float)
        if weights.size != n_pairs:
            raise ValueError("known_weights length must match the pair count")
        if abs(weights.sum() - 1.0) > 1e-3:
            raise ValueError("known_weights must sum to 1")
        if np.any(weights <= 0):
            raise ValueError("known_weights must be positive")
        vis = np.minimum(amps / weights, 1.0)
    else:
        total = float(amps.sum())
        if total <= 0:
            raise ValueError("fit collapsed to zero amplitude everywhere")
        weights = amps / total
        vis = np.full(n_pairs, min(total, 1.0))

    pairs = tuple(
        FringePairParams(weight=float(weights[j]), detuning_thz=comps[j][0],
                         visibility=float(vis[j]), phase_deg=comps[j][2])
        for j in range(n_pairs)
    )
    fitted = FringeModelParams(coherence_time_ps=tau_c, pairs=pairs)

    # Delta-method transform of the internal covariance to external units,
    # with rows permuted into ascending-detuning order.
    n_free = 1 + 3 * n_pairs
    dmat = np.zeros((n_free, n_free))
    dmat[0, 0] = tau_c
    names = ["coherence_time_ps"]
    for new_j, old_j in enumerate(order):
        mu, c, _ = comps[new_j]
        base_new, base_old = 1 + 3 * new_j, 1 + 3 * old_j
        dmat[base_new + 0, base_old + 0] = 1.0
        dmat[base_new + 1, base_old + 1] = c * (1.0 - c)
        dmat[base_new + 2, base_old + 2] = 180.0 / np.pi
        names += [f"detuning_thz_{new_j}", f"amplitude_{new_j}", f"phase_deg_{new_j}"]
    covariance = dmat @ lm_res.covariance @ dmat.T

    return FitResult(
        params=fitted,
        covariance=covariance,
        param_names=tuple(names),
        residual_norm=lm_res.residual_norm,
        n_iterations=lm_res.n_iterations,
        converged=lm_res.converged,
        message=lm_res.message,
        seed_params=seed,
        weights_supplied=known_weights is not None,
    )


def fit_fringe_scan(scan: FringeScan, m: int | None = None,
                    known_weights=None, initial: FringeModelParams | None = None,
                    options: LMOptions | None = None) -> FitResult:
    """Fit the standard fringe model, seeding automatically.

    When ``initial`` is omitted the starting point comes from seed_guess;
    when ``m`` is also omitted the pair count is taken from the number of
    significant spectral peaks in the scan.
    """
    if initial is not None:
        if m is not None and m != 2 * len(initial.pairs):
            raise ValueError("m disagrees with the initial parameter count")
        seed = initial
    else:
        if m is None:
            freqs, _ = _significant_dft_peaks(scan)
            if freqs.size == 0:
                raise ValueError("no significant spectral peaks; cannot "
                                 "auto-detect the bin count")
            m = 2 * int(freqs.size)
        seed = seed_guess(scan, m)
    return lm_fit(fringe_theta_model, seed, scan, options,
                  known_weights=known_weights)

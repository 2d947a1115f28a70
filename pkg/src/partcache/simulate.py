"""Stochastic-geometry Monte Carlo oracle for the closed-form analysis.

Each trial builds a fresh Poisson field of base stations in a disc around
the user, draws Rayleigh fading per station, draws the requested file, and
replays the successive decoding procedure literally: stage i treats the
i nearest stations' already-decoded signals as removed and everything
farther out as interference.  Nothing here reuses the analysis module's
approximations, so agreement between the two is evidence, not tautology.

Reproducibility contract: trial t of a run with seed s draws from two
dedicated substreams derived as SeedSequence(s, spawn_key=(t, lane)).
Lane 0 carries the request draw followed by any design-specific draws
(piece placement, per-station cache membership); lane 1 carries the
network, one exponential spacing and one fading value interleaved per
station.  Trials therefore commute: results depend on (inputs, seed) only,
never on execution order, and per-station draws stay aligned when the same
seed is replayed with a larger disc.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    AllocationError,
    Popularity,
    RlncAllocation,
    SystemConfig,
    UcAllocation,
    validate_rlnc,
    validate_uc,
)

__all__ = [
    "DEFAULT_DISC_SCALE",
    "McEstimate",
    "NetworkRealization",
    "SimulationError",
    "SimulationResult",
    "SubfilePlacement",
    "sample_network",
    "sic_decode_chain",
    "simulate_baseline",
    "simulate_rlnc",
    "simulate_uc",
    "subfile_cover_index",
    "water_fill_mu",
]

# The disc radius is DEFAULT_DISC_SCALE / sqrt(pi * density), so the
# expected station count is the square of the scale.  10^4 stations keep
# the truncated far-field interference orders of magnitude below the
# in-disc interference; the doubling check in the test suite certifies it.
DEFAULT_DISC_SCALE = 100.0


class SimulationError(RuntimeError):
    """A realization could not support the requested measurement."""


@dataclass(frozen=True)
class NetworkRealization:
    """Base stations visible to one trial, nearest first.

    bs_distances are in meters, ascending; fading_powers holds the
    unit-mean exponential power gain of each station's channel to the
    user.
    """

    bs_distances: np.ndarray
    fading_powers: np.ndarray


@dataclass(frozen=True)
class McEstimate:
    """Success frequency with a 95% normal-approximation confidence radius."""

    mean: float
    ci_half_width: float
    trials: int
    seed: int


@dataclass(frozen=True)
class SimulationResult:
    """Overall estimate plus conditional per-file estimates.

    per_file[n] is conditioned on file n being the one requested; its
    trial count is the number of such requests.
    """

    overall: McEstimate
    per_file: tuple[McEstimate, ...]


# --------------------------------------------------------------------------
# randomness plumbing
# --------------------------------------------------------------------------


def _check_seed(seed: int) -> None:
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ValueError(f"seed must be an integer, got {seed!r}")
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")


def _stream(seed: int, trial: int, lane: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(trial, lane))
    return np.random.Generator(np.random.PCG64(ss))


# --------------------------------------------------------------------------
# network construction
# --------------------------------------------------------------------------


def sample_network(
    cfg: SystemConfig,
    rng: np.random.Generator,
    disc_scale: float = DEFAULT_DISC_SCALE,
) -> NetworkRealization:
    """Sample the Poisson field inside the truncation disc, nearest first.

    Ordered squared distances of a planar Poisson field are the arrival
    times of a unit-rate process on the squared-radius axis, so the field
    is generated already sorted from cumulative exponential spacings; the
    station count inside the disc is then Poisson with mean disc_scale**2
    by construction.  A realization too small to carry a full decode chain
    plus one interferer is redrawn from the same stream rather than
    silently accepted; persistent failure raises.
    """
    if not disc_scale > 0.0:
        raise ValueError(f"disc_scale must be positive, got {disc_scale}")
    target = disc_scale * disc_scale
    need = cfg.sic_capability + 1
    block = max(int(target + 8.0 * disc_scale) + 16, 2 * need + 16)
    for _attempt in range(16):
        raw = rng.standard_exponential(2 * block)
        spacings = raw[0::2]
        fading = raw[1::2]
        arrivals = np.cumsum(spacings)
        while arrivals[-1] < target:
            raw = rng.standard_exponential(2 * block)
            arrivals = np.concatenate(
                [arrivals, arrivals[-1] + np.cumsum(raw[0::2])]
            )
            fading = np.concatenate([fading, raw[1::2]])
        count = int(np.searchsorted(arrivals, target, side="right"))
        if count >= need:
            distances = np.sqrt(arrivals[:count] / (math.pi * cfg.bs_density))
            return NetworkRealization(distances, fading[:count])
    raise SimulationError(
        f"disc with {target:.3g} expected stations kept yielding fewer than "
        f"{need}; enlarge disc_scale"
    )


def _received_powers(realization: NetworkRealization, alpha: float) -> np.ndarray:
    x = realization.bs_distances * realization.bs_distances
    if alpha == 4.0:
        gain = 1.0 / (x * x)
    else:
        gain = x ** (-0.5 * alpha)
    return gain * realization.fading_powers


def sic_decode_chain(
    realization: NetworkRealization, s_code: int, depth: int, cfg: SystemConfig
) -> bool:
    """Replay successive decoding of the ``depth`` nearest stations.

    Stage i succeeds when its instantaneous rate clears the per-piece bit
    budget of a file split ``s_code`` ways.  Interference sums are built from
    the far tail inward, avoiding the cancellation that total-minus-prefix
    subtraction would suffer when the nearest station dominates.
    """
    if s_code < 1:
        raise AllocationError(f"split count must be at least 1, got {s_code}")
    if not 1 <= depth <= cfg.sic_capability:
        raise ValueError(
            f"depth {depth} outside [1, {cfg.sic_capability}]"
        )
    powers = _received_powers(realization, cfg.path_loss_exp)
    if powers.size <= depth:
        raise SimulationError(
            f"realization holds {powers.size} stations, need more than {depth}"
        )
    threshold = 2.0 ** (cfg.rate_ratio / s_code) - 1.0
    interference = float(powers[depth:].sum())
    for stage in range(depth, 0, -1):
        signal = float(powers[stage - 1])
        if not signal > threshold * interference:
            return False
        interference += signal
    return True


# --------------------------------------------------------------------------
# trial driver
# --------------------------------------------------------------------------


def _estimate(successes: int, trials: int, seed: int) -> McEstimate:
    mean = successes / trials if trials > 0 else 0.0
    half = (
        1.96 * math.sqrt(mean * (1.0 - mean) / trials) if trials > 0 else 0.0
    )
    return McEstimate(mean, half, trials, seed)


def _run_trials(pop, cfg, trials, seed, outcome) -> SimulationResult:
    _check_seed(seed)
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    if len(pop) != cfg.n_files:
        raise ValueError(
            f"popularity covers {len(pop)} files, config declares {cfg.n_files}"
        )
    cum = np.cumsum(np.asarray(pop.probs, dtype=np.float64))
    successes = np.zeros(cfg.n_files, dtype=np.int64)
    requests = np.zeros(cfg.n_files, dtype=np.int64)
    for trial in range(trials):
        aux = _stream(seed, trial, 0)
        net = _stream(seed, trial, 1)
        n = int(np.searchsorted(cum, aux.random(), side="right"))
        if n >= cfg.n_files:  # cumulative rounding can leave a sliver above the top
            n = cfg.n_files - 1
        requests[n] += 1
        if outcome(n, aux, net):
            successes[n] += 1
    overall = _estimate(int(successes.sum()), trials, seed)
    per_file = tuple(
        _estimate(int(successes[n]), int(requests[n]), seed)
        for n in range(cfg.n_files)
    )
    return SimulationResult(overall, per_file)


# --------------------------------------------------------------------------
# cached designs
# --------------------------------------------------------------------------


def simulate_rlnc(
    alloc: RlncAllocation,
    pop: Popularity,
    cfg: SystemConfig,
    trials: int,
    seed: int,
    disc_scale: float = DEFAULT_DISC_SCALE,
) -> SimulationResult:
    """Monte Carlo success frequency of a coded allocation.

    A request succeeds when the file is cached and the decode chain clears
    exactly its split count of nearest stations.
    """
    violations = validate_rlnc(alloc, cfg)
    if violations:
        raise AllocationError("; ".join(violations))
    codes = alloc.codes

    def outcome(n, aux, net):
        c = codes[n]
        if c == 0:
            return False
        realization = sample_network(cfg, net, disc_scale)
        return sic_decode_chain(realization, c, c, cfg)

    return _run_trials(pop, cfg, trials, seed, outcome)


def subfile_cover_index(piece_ids, s_code: int) -> int:
    """First position whose prefix holds all distinct pieces; 0 when none does."""
    want = (1 << s_code) - 1
    seen = 0
    for pos, piece in enumerate(piece_ids, start=1):
        seen |= 1 << int(piece)
        if seen == want:
            return pos
    return 0


@dataclass(frozen=True)
class SubfilePlacement:
    """Which piece each serving station holds, nearest first, plus the
    first station count whose prefix covers every piece (0 when the listed
    stations never cover the file)."""

    piece_ids: tuple[int, ...]
    first_cover: int

    @classmethod
    def from_draws(cls, piece_ids, s_code: int) -> "SubfilePlacement":
        ids = tuple(int(p) for p in piece_ids)
        if any(not 0 <= p < s_code for p in ids):
            raise ValueError(f"piece ids must lie in 0..{s_code - 1}")
        return cls(ids, subfile_cover_index(ids, s_code))


def simulate_uc(
    alloc: UcAllocation,
    pop: Popularity,
    cfg: SystemConfig,
    trials: int,
    seed: int,
    disc_scale: float = DEFAULT_DISC_SCALE,
) -> SimulationResult:
    """Monte Carlo success frequency of an uncoded allocation.

    Each of the serving stations holds one uniformly chosen piece; the
    request succeeds when some prefix of them covers every piece within the
    serving depth and the decode chain reaches exactly that prefix.
    """
    violations = validate_uc(alloc, cfg)
    if violations:
        raise AllocationError("; ".join(violations))
    codes = alloc.codes
    serves = alloc.serve_counts

    def outcome(n, aux, net):
        c = codes[n]
        if c == 0:
            return False
        if c == 1:
            depth = 1
        else:
            pieces = aux.integers(0, c, size=serves[n])
            depth = subfile_cover_index(pieces, c)
            if depth == 0:
                return False
        realization = sample_network(cfg, net, disc_scale)
        return sic_decode_chain(realization, c, depth, cfg)

    return _run_trials(pop, cfg, trials, seed, outcome)


# --------------------------------------------------------------------------
# reference schemes
# --------------------------------------------------------------------------


def water_fill_mu(pop: Popularity, cache_size: int) -> tuple[float, tuple[float, ...]]:
    """Water level and per-file caching probabilities of the graded scheme.

    Solves sum(min(a_n * cache_size + mu, 1)) == cache_size by bisection on
    the monotone left side.  The level is never negative because clamping
    at one only removes mass.
    """
    probs = pop.probs
    if not 1 <= cache_size < len(probs):
        raise ValueError(
            f"cache_size must satisfy 1 <= K < {len(probs)}, got {cache_size}"
        )

    def total(mu: float) -> float:
        return math.fsum(min(a * cache_size + mu, 1.0) for a in probs)

    lo, hi = 0.0, 1.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if total(mid) < cache_size:
            lo = mid
        else:
            hi = mid
    mu = 0.5 * (lo + hi)
    return mu, tuple(min(a * cache_size + mu, 1.0) for a in probs)


def _strip_covers(
    u: np.ndarray, lo: float, width: float, cache_size: int
) -> np.ndarray:
    # Membership test for the ladder placement: each station lays the
    # per-file probabilities end to end over [0, cache_size] and keeps the
    # files whose strip contains u + j for some integer j in [0, K).  The
    # unique candidate offset for the strip starting at lo is ceil(lo - u).
    j = np.ceil(lo - u)
    return (j >= 0.0) & (j <= cache_size - 1) & (u + j < lo + width)


def simulate_baseline(
    which: int,
    pop: Popularity,
    cfg: SystemConfig,
    trials: int,
    seed: int,
    disc_scale: float = DEFAULT_DISC_SCALE,
) -> McEstimate:
    """Monte Carlo success frequency of a whole-file reference scheme.

    Scheme 1 caches the most popular cache_size files everywhere; scheme 2
    caches every file with equal probability; scheme 3 grades the caching
    probability toward popular files by water filling.  Schemes 2 and 3 use
    the ladder placement, so each station holds exactly cache_size files.
    The user connects to the nearest station holding the request and decodes
    it against all other stations' interference, with no SIC and the whole
    file's bit budget.
    """
    if which not in (1, 2, 3):
        raise ValueError(f"baseline must be 1, 2 or 3, got {which}")
    k = cfg.cache_size
    if which == 2:
        widths = (k / cfg.n_files,) * cfg.n_files
    elif which == 3:
        _, widths = water_fill_mu(pop, k)
    else:
        widths = None

    if widths is not None:
        edges = [0.0]
        for w in widths:
            edges.append(edges[-1] + w)
    threshold = 2.0**cfg.rate_ratio - 1.0
    alpha = cfg.path_loss_exp

    def outcome(n, aux, net):
        if which == 1:
            if n >= k:
                return False
            realization = sample_network(cfg, net, disc_scale)
            powers = _received_powers(realization, alpha)
            serving = 0
        else:
            realization = sample_network(cfg, net, disc_scale)
            u = aux.random(realization.bs_distances.size)
            member = _strip_covers(u, edges[n], widths[n], k)
            if not member.any():
                return False
            serving = int(member.argmax())
            powers = _received_powers(realization, alpha)
        signal = float(powers[serving])
        interference = float(powers[:serving].sum()) + float(
            powers[serving + 1 :].sum()
        )
        return signal > threshold * interference

    return _run_trials(pop, cfg, trials, seed, outcome).overall

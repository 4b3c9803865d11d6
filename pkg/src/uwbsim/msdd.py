"""Differential detectors operating on correlation samples.

The data symbols form a Markov chain in the sliding state
S_i = (a_i, ..., a_{i-M+1}); sample Y_{i,m} observes the product of the m
newest entries of S_i times the signal amplitude.  Detection runs a
forward/backward sweep over the 2^M states in the log domain.  The merge
output gamma deliberately excludes the symbol's own prior, so it is the
extrinsic message an outer decoder can consume; APP = prior * gamma.

The block detector treats U = N/M blocks independently, enumerating the 2^M
hypotheses of a block explicitly; its soft output lambda likewise excludes the
symbol's own prior.  The plain DD baseline just takes the sign of the
adjacent-symbol correlation.

The squared residual in the likelihood is divided by variance_factor * sigma^2
with variance_factor defaulting to 1 (not the conventional 2); a consistent
factor cancels from the detector's own posteriors but shifts the sharpness of
the soft outputs handed to a decoder, so it is exposed as a knob.
"""

import numpy as np

from . import beliefs
from .acr import BlockCorrSamples, CorrSamples

# hypothesis enumeration cost is 2^M; refuse absurd windows by default
MAX_WINDOW = 10

_TINY = np.finfo(float).tiny


class TrellisSpec:
    """State/transition tables for window size M.

    States are integers in [0, 2^M); bit k set means a_{i-k} = -1, so state 0
    is the all-+1 state.  signs[s, m-1] is the product of the m newest symbols
    of state s.
    """

    def __init__(self, M: int):
        if not (1 <= M <= MAX_WINDOW):
            raise ValueError(f"window size must be in 1..{MAX_WINDOW}")
        self.M = M
        self.n_states = 1 << M
        s = np.arange(self.n_states)
        bits = (s[:, None] >> np.arange(M)[None, :]) & 1
        self.state_bits = bits
        self.signs = np.cumprod(1 - 2 * bits, axis=1).astype(float)
        self.mask = self.n_states - 1

    def state_symbols(self, s: int) -> np.ndarray:
        """Symbols (a_i, ..., a_{i-M+1}) of state s, newest first."""
        return 1 - 2 * self.state_bits[s]

    def shift(self, s_prev: int, a: int) -> int:
        """Successor state when symbol a in {+1,-1} is shifted in."""
        bit = (1 - a) // 2
        return ((s_prev << 1) | bit) & self.mask

    def is_valid_transition(self, s_prev: int, a: int, s_next: int) -> bool:
        return s_next == self.shift(s_prev, a)

    def transitions(self):
        """All (s_prev, a, s_next) triples; 2^(M+1) of them."""
        out = []
        for s_prev in range(self.n_states):
            for a in (+1, -1):
                out.append((s_prev, a, self.shift(s_prev, a)))
        return out


_trellis_cache: dict[int, TrellisSpec] = {}


def build_trellis(M: int) -> TrellisSpec:
    if M not in _trellis_cache:
        _trellis_cache[M] = TrellisSpec(M)
    return _trellis_cache[M]


def evidence(y_row: np.ndarray, pad_row: np.ndarray, state: int,
             trellis: TrellisSpec, amplitude: float, sigma_sq: float,
             variance_factor: int = 1) -> float:
    """Likelihood factor p(Y_i | state) in (0, 1]; padded samples contribute 1."""
    if sigma_sq <= 0:
        raise ValueError("sigma_sq must be positive")
    y = np.asarray(y_row, dtype=float)
    keep = ~np.asarray(pad_row, dtype=bool)
    resid = y[keep] - amplitude * trellis.signs[state, :len(y)][keep]
    return float(np.exp(-np.sum(resid ** 2) / (variance_factor * sigma_sq)))


def log_evidence_matrix(samples: CorrSamples, trellis: TrellisSpec,
                        amplitude: float, sigma_sq: float,
                        variance_factor: int = 1) -> np.ndarray:
    """log p(Y_i | S_i) for every step and state, shape (N, 2^M).

    The squared residual is expanded so the state axis only enters through
    one (N,M)x(M,2^M) product; signs are +-1 so the quadratic term reduces to
    the per-row count of live samples.
    """
    if sigma_sq <= 0:
        raise ValueError("sigma_sq must be positive")
    Y = samples.values
    keep = (~samples.pad_mask).astype(float)
    kY = Y * keep
    const = np.sum(kY * Y, axis=1) + amplitude ** 2 * keep.sum(axis=1)
    cross = kY @ trellis.signs.T
    se = const[:, None] - 2.0 * amplitude * cross
    return -se / (variance_factor * sigma_sq)


def _log_priors(priors, n: int) -> np.ndarray:
    if priors is None:
        return np.full((n, 2), np.log(0.5))
    priors = np.asarray(priors, dtype=float)
    if priors.shape != (n, 2):
        raise ValueError("priors must have shape (N, 2)")
    return np.log(np.maximum(priors, _TINY))


def _forward_log(logE: np.ndarray, logp: np.ndarray, stats=None) -> np.ndarray:
    """Max-normalized log alpha, rows 0..N; row 0 is the all-+1 point mass."""
    N, S = logE.shape
    half = S >> 1
    prev0 = np.arange(S) >> 1
    prev1 = prev0 + half
    in_bit = np.arange(S) & 1
    la = np.empty((N + 1, S))
    la[0] = -np.inf
    la[0, 0] = 0.0
    for i in range(1, N + 1):
        prev = la[i - 1]
        v = np.logaddexp(prev[prev0], prev[prev1]) + logp[i - 1, in_bit] + logE[i - 1]
        la[i] = v - v.max()
        if stats is not None:
            stats["transition_visits"] = stats.get("transition_visits", 0) + 2 * S
    return la


def _backward_log(logE: np.ndarray, logp: np.ndarray, stats=None) -> np.ndarray:
    """Max-normalized log beta, rows 0..N; row N is uniform (all zeros)."""
    N, S = logE.shape
    to0 = (np.arange(S) << 1) & (S - 1)
    to1 = to0 | 1
    lb = np.empty((N + 1, S))
    lb[N] = 0.0
    for i in range(N, 0, -1):
        nxt = lb[i] + logE[i - 1]
        v = np.logaddexp(nxt[to0] + logp[i - 1, 0], nxt[to1] + logp[i - 1, 1])
        lb[i - 1] = v - v.max()
        if stats is not None:
            stats["transition_visits"] = stats.get("transition_visits", 0) + 2 * S
    return lb


def _row_logsumexp(x: np.ndarray) -> np.ndarray:
    m = x.max(axis=1)
    with np.errstate(invalid="ignore"):
        out = m + np.log(np.sum(np.exp(x - m[:, None]), axis=1))
    return np.where(np.isfinite(m), out, -np.inf)


def _merge_log(la: np.ndarray, lb: np.ndarray, logE: np.ndarray) -> np.ndarray:
    """Unnormalized log gamma (N, 2): prior of a_i intentionally left out."""
    N, S = logE.shape
    to0 = (np.arange(S) << 1) & (S - 1)
    to1 = to0 | 1
    post = lb[1:] + logE      # indexed by destination state, rows i = 1..N
    prev = la[:-1]            # rows i-1 = 0..N-1
    lg = np.empty((N, 2))
    lg[:, 0] = _row_logsumexp(prev + post[:, to0])
    lg[:, 1] = _row_logsumexp(prev + post[:, to1])
    return lg


def forward_pass(samples: CorrSamples, priors, trellis: TrellisSpec,
                 amplitude: float, sigma_sq: float, variance_factor: int = 1,
                 stats=None) -> np.ndarray:
    """Normalized state distributions alpha(S_0)..alpha(S_N), shape (N+1, 2^M)."""
    logE = log_evidence_matrix(samples, trellis, amplitude, sigma_sq, variance_factor)
    logp = _log_priors(priors, samples.n_symbols)
    la = _forward_log(logE, logp, stats)
    p = np.exp(la)
    return p / p.sum(axis=1, keepdims=True)


def backward_pass(samples: CorrSamples, priors, trellis: TrellisSpec,
                  amplitude: float, sigma_sq: float, variance_factor: int = 1,
                  stats=None) -> np.ndarray:
    """Normalized state distributions beta(S_0)..beta(S_N); beta(S_N) uniform."""
    logE = log_evidence_matrix(samples, trellis, amplitude, sigma_sq, variance_factor)
    logp = _log_priors(priors, samples.n_symbols)
    lb = _backward_log(logE, logp, stats)
    p = np.exp(lb)
    return p / p.sum(axis=1, keepdims=True)


def merge(alpha: np.ndarray, beta: np.ndarray, samples: CorrSamples, priors,
          trellis: TrellisSpec, amplitude: float, sigma_sq: float,
          variance_factor: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Combine passes into (app, gamma); alpha/beta as returned by the passes."""
    logE = log_evidence_matrix(samples, trellis, amplitude, sigma_sq, variance_factor)
    logp = _log_priors(priors, samples.n_symbols)
    with np.errstate(divide="ignore"):
        lg = _merge_log(np.log(alpha), np.log(beta), logE)
    gamma = beliefs.from_log(lg)
    app = beliefs.from_log(lg + logp)
    return app, gamma


def msdd_app(samples: CorrSamples, M: int, amplitude: float, sigma_sq: float,
             priors=None, variance_factor: int = 1, stats=None
             ) -> tuple[np.ndarray, np.ndarray]:
    """Full sliding-window detection pipeline; returns (app, gamma)."""
    trellis = build_trellis(M)
    if samples.window != M:
        raise ValueError("sample window does not match M")
    logE = log_evidence_matrix(samples, trellis, amplitude, sigma_sq, variance_factor)
    logp = _log_priors(priors, samples.n_symbols)
    la = _forward_log(logE, logp, stats)
    lb = _backward_log(logE, logp, stats)
    lg = _merge_log(la, lb, logE)
    gamma = beliefs.from_log(lg)
    app = beliefs.from_log(lg + logp)
    return app, gamma


def msdd_extrinsic(samples: CorrSamples, M: int, amplitude: float,
                   sigma_sq: float, priors=None, variance_factor: int = 1
                   ) -> np.ndarray:
    """Extrinsic gamma only (what the joint schedule consumes)."""
    return msdd_app(samples, M, amplitude, sigma_sq, priors, variance_factor)[1]


def detect_mmsdd(samples: CorrSamples, M: int, amplitude: float,
                 sigma_sq: float, variance_factor: int = 1) -> np.ndarray:
    """Hard sliding-window decisions under uniform priors."""
    app, _ = msdd_app(samples, M, amplitude, sigma_sq, None, variance_factor)
    return beliefs.hard(app)


def detect_dd(samples: CorrSamples) -> np.ndarray:
    """Conventional differential detection: sign of Y_{i,1}, ties to +1."""
    return np.where(samples.values[:, 0] >= 0.0, 1, -1).astype(int)


_block_cache: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}


def _block_tables(M: int):
    """(bits, signs3, valid): per-hypothesis bit patterns and sample signs.

    bits[h, t] encodes local symbol x_{t+1} (0 means +1).  signs3[h, r, c] is
    the noiseless sign of the block sample correlating windows r+1 and c under
    hypothesis h, i.e. the product x_{c+1}..x_{r+1}.
    """
    if not (1 <= M <= MAX_WINDOW):
        raise ValueError(f"block size must be in 1..{MAX_WINDOW}")
    if M not in _block_cache:
        H = 1 << M
        bits = (np.arange(H)[:, None] >> np.arange(M)[None, :]) & 1
        x = 1 - 2 * bits
        C = np.concatenate([np.ones((H, 1)), np.cumprod(x, axis=1)], axis=1)
        signs3 = C[:, 1:, None] * C[:, None, :-1]
        valid = np.tril(np.ones((M, M), dtype=bool))
        signs3 = signs3 * valid[None, :, :]
        _block_cache[M] = (bits, signs3, valid)
    return _block_cache[M]


def _block_loglik(blocks: BlockCorrSamples, amplitude: float, sigma_sq: float,
                  variance_factor: int = 1) -> np.ndarray:
    """log p(block u | hypothesis h), shape (U, 2^M)."""
    if sigma_sq <= 0:
        raise ValueError("sigma_sq must be positive")
    M = blocks.block_size
    _, signs3, valid = _block_tables(M)
    resid = blocks.values[:, None, :, :] - amplitude * signs3[None, :, :, :]
    se = np.einsum("uhrc,rc->uh", resid ** 2, valid.astype(float))
    return -se / (variance_factor * sigma_sq)


def bmsdd_extrinsic(blocks: BlockCorrSamples, priors, amplitude: float,
                    sigma_sq: float, variance_factor: int = 1) -> np.ndarray:
    """Per-symbol extrinsic lambda from independent block enumeration."""
    M = blocks.block_size
    U = blocks.n_blocks
    N = U * M
    bits, _, _ = _block_tables(M)
    ll = _block_loglik(blocks, amplitude, sigma_sq, variance_factor)
    logp = _log_priors(priors, N).reshape(U, M, 2)
    # per-hypothesis prior mass of the whole block, then remove own symbol
    lp_h = logp[:, np.arange(M)[None, :], bits[:, :]].sum(axis=2)
    lg = np.empty((U, M, 2))
    for t in range(M):
        term = ll + lp_h - logp[:, t, :][:, bits[:, t]]
        for b in (0, 1):
            cols = bits[:, t] == b
            sub = term[:, cols]
            mx = sub.max(axis=1)
            lg[:, t, b] = mx + np.log(np.sum(np.exp(sub - mx[:, None]), axis=1))
    return beliefs.from_log(lg.reshape(N, 2))


def bmsdd_detect(blocks: BlockCorrSamples) -> np.ndarray:
    """Hard block decisions: per-block max-likelihood hypothesis.

    The quadratic expands so the argmax only needs the sign-weighted sample
    sum; amplitude and noise level drop out.
    """
    _, signs3, _ = _block_tables(blocks.block_size)
    score = np.einsum("urc,hrc->uh", blocks.values, signs3)
    best = np.argmax(score, axis=1)
    bits, _, _ = _block_tables(blocks.block_size)
    return (1 - 2 * bits[best]).reshape(-1).astype(int)

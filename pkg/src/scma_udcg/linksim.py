"""Downlink SCMA link simulation with a message passing detector.

Bits are Gray labelled onto codeword indices, superimposed per resource,
sent through AWGN or block Rayleigh fading and detected with log-domain
sum-product message passing on the factor graph.

Random streams are keyed by ``(seed, Eb/N0 index, block index)`` so a curve
does not depend on how many worker threads produced it.
"""

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from math import log2

import numpy as np
from scipy.special import logsumexp

#: Environment variable overriding the default number of simulation threads.
THREADS_ENV = "SCMA_UDCG_THREADS"

EBN0_CONVENTION = ("Eb = mean codeword energy per user / log2(M) (1/log2(M) for normalized sets); "
                   "sigma^2 = N0 per complex resource sample")
LABELING = "binary-reflected Gray over the canonical point order, MSB first"

_TINY = np.finfo(float).tiny


def _marginalize(ext, selector):
    """Max-normalized ``log sum exp`` of ``ext`` (F, C) grouped by ``selector`` (C, M).

    Each frame is shifted by its maximum before the single ``exp``.  Symbols
    whose every combination lies more than ~708 nats below the best one are
    clipped at that depth instead of becoming ``-inf``.
    """
    peak = ext.max(axis=1, keepdims=True)
    msg = np.log(np.maximum(np.exp(ext - peak) @ selector, _TINY))
    return msg - msg.max(axis=1, keepdims=True)


def gray_labels(M):
    """Gray label of every codeword index."""
    m = np.arange(M)
    return m ^ (m >> 1)


def label_bits(M):
    """``(M, log2 M)`` bit table: row ``m`` is the Gray label of index ``m``."""
    nb = int(log2(M))
    labels = gray_labels(M)
    return ((labels[:, None] >> np.arange(nb - 1, -1, -1)[None, :]) & 1).astype(np.int8)


def bits_to_indices(bits, M):
    """Map ``(..., log2 M)`` bit arrays to codeword indices."""
    bits = np.asarray(bits)
    nb = int(log2(M))
    if bits.shape[-1] != nb:
        raise ValueError(f"expected {nb} bits per user for M={M}, got {bits.shape[-1]}")
    weights = 1 << np.arange(nb - 1, -1, -1)
    labels = bits.astype(np.int64) @ weights
    inverse = np.empty(M, dtype=np.int64)
    inverse[gray_labels(M)] = np.arange(M)
    return inverse[labels]


def map_bits(bits, cbs):
    """Superimposed transmit vector for one ``(J, log2 M)`` bit matrix.

    A leading batch axis is allowed: ``(F, J, log2 M)`` gives ``(F, K)``.
    """
    bits = np.asarray(bits)
    if bits.shape[-2] != cbs.J:
        raise ValueError(f"expected bits for {cbs.J} users, got {bits.shape[-2]}")
    idx = bits_to_indices(bits, cbs.M)
    return transmit(idx, cbs)


def transmit(indices, cbs):
    indices = np.asarray(indices)
    users = np.arange(cbs.J)
    # books[j, :, m_j] summed over users
    x = cbs.books.transpose(0, 2, 1)[users, indices]   # (..., J, K)
    return x.sum(axis=-2)


def apply_channel(x, channel, sigma2, rng):
    """Return ``(y, h)`` with ``y = h * x + z`` and ``E|z|^2 = sigma2``.

    Rayleigh coefficients are unit-power circular Gaussian, one per
    resource and codeword.
    """
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    x = np.asarray(x, dtype=complex)
    if channel == "awgn":
        h = np.ones_like(x)
    elif channel in ("rayleigh", "rayleigh_iid"):
        h = (rng.standard_normal(x.shape) + 1j * rng.standard_normal(x.shape)) / np.sqrt(2)
    else:
        raise ValueError(f"unknown channel {channel!r}")
    z = np.sqrt(sigma2 / 2) * (rng.standard_normal(x.shape) + 1j * rng.standard_normal(x.shape))
    return h * x + z, h


class MessagePassingDetector:
    """Log-domain sum-product detector bound to one codebook set."""

    def __init__(self, cbs):
        self.cbs = cbs
        self.users = cbs.graph.rn_users
        self.resources = cbs.graph.un_resources
        self.tables = []
        for k, users in enumerate(self.users):
            table = np.zeros((1,) * len(users), dtype=complex)
            for i, j in enumerate(users):
                shape = [1] * len(users)
                shape[i] = cbs.M
                table = table + cbs.books[j, k].reshape(shape)
            self.tables.append(table.ravel())
        # selector[i][c, m] = 1 when local combination c gives user i symbol m
        self.selectors = []
        for users in self.users:
            combos = np.indices((cbs.M,) * len(users)).reshape(len(users), -1)
            self.selectors.append([np.eye(cbs.M)[combos[i]] for i in range(len(users))])
        self.bit_table = label_bits(cbs.M)

    def log_beliefs(self, y, h, sigma2, iterations=10):
        """Normalized log posteriors ``(F, J, M)`` for received ``(F, K)`` samples."""
        if iterations < 1:
            raise ValueError("iterations must be >= 1")
        y = np.atleast_2d(y)
        h = np.atleast_2d(h)
        F, M = y.shape[0], self.cbs.M
        metrics = []
        for k, table in enumerate(self.tables):
            diff = y[:, k, None] - h[:, k, None] * table[None, :]
            metrics.append(-(diff.real ** 2 + diff.imag ** 2) / sigma2)     # (F, M**d)
        u2r = [[np.zeros((F, M)) for _ in users] for users in self.users]
        r2u = [[np.zeros((F, M)) for _ in users] for users in self.users]
        for _ in range(iterations):
            for k, users in enumerate(self.users):
                sel = self.selectors[k]
                spread = [u2r[k][i] @ sel[i].T for i in range(len(users))]  # (F, M**d)
                for i in range(len(users)):
                    ext = metrics[k] + sum(spread[o] for o in range(len(users)) if o != i)
                    r2u[k][i] = _marginalize(ext, sel[i])
            for j, resources in enumerate(self.resources):
                incoming = [r2u[k][self.users[k].index(j)] for k in resources]
                total = np.sum(incoming, axis=0)
                for k, msg in zip(resources, incoming):
                    out = total - msg
                    u2r[k][self.users[k].index(j)] = out - out.max(axis=1, keepdims=True)
        beliefs = np.empty((F, self.cbs.J, M))
        for j, resources in enumerate(self.resources):
            b = np.sum([r2u[k][self.users[k].index(j)] for k in resources], axis=0)
            beliefs[:, j] = b - logsumexp(b, axis=1, keepdims=True)
        return beliefs

    def detect(self, y, h, sigma2, iterations=10):
        """Symbol decisions ``(F, J)`` and bit LLRs ``(F, J, log2 M)``.

        LLRs are ``log P(b = 0) - log P(b = 1)``.
        """
        beliefs = self.log_beliefs(y, h, sigma2, iterations)
        decisions = np.argmax(beliefs, axis=2)
        zero = self.bit_table == 0                               # (M, nb)
        neg = np.full(zero.shape, -np.inf)
        b = beliefs[..., :, None]                                # (F, J, M, 1)
        llr0 = logsumexp(np.where(zero, b, neg), axis=2)
        llr1 = logsumexp(np.where(~zero, b, neg), axis=2)
        return decisions, llr0 - llr1


def mpa_detect(y, h, cbs, sigma2, iterations=10):
    """Detect one received vector; returns ``(decisions (J,), llrs (J, log2 M))``."""
    det = MessagePassingDetector(cbs)
    decisions, llrs = det.detect(np.asarray(y)[None], np.asarray(h)[None], sigma2, iterations)
    return decisions[0], llrs[0]


@dataclass(frozen=True)
class SimConfig:
    ebno_db_grid: tuple
    channel: str = "awgn"
    mpa_iterations: int = 10
    max_codewords: int = 100_000
    target_errors: int = 200
    seed: int = 0
    block_size: int = 2000

    def __post_init__(self):
        object.__setattr__(self, "ebno_db_grid", tuple(float(e) for e in self.ebno_db_grid))
        if self.mpa_iterations < 1:
            raise ValueError("mpa_iterations must be >= 1")
        if self.max_codewords < 1:
            raise ValueError("max_codewords must be >= 1")
        if self.block_size < 1:
            raise ValueError("block_size must be >= 1")
        if self.channel not in ("awgn", "rayleigh", "rayleigh_iid"):
            raise ValueError(f"unknown channel {self.channel!r}")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class BerPoint:
    ebno_db: float
    bits: int
    errors: int
    ber: float
    codewords: int
    symbol_errors: int


@dataclass(frozen=True)
class BerCurve:
    points: list
    seed: int
    config_hash: str
    metadata: dict = field(default_factory=dict)

    @property
    def ber(self):
        return np.array([p.ber for p in self.points])

    def to_rows(self):
        return [(p.ebno_db, p.bits, p.errors, p.ber, self.seed) for p in self.points]


def config_digest(cbs, cfg):
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(cbs.books).tobytes())
    h.update(json.dumps(cfg.to_dict(), sort_keys=True).encode())
    return h.hexdigest()


def default_workers():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _run_block(det, cbs, cfg, sigma2, ebno_index, block_index, n):
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(ebno_index, block_index)))
    nb = int(log2(cbs.M))
    bits = rng.integers(0, 2, size=(n, cbs.J, nb), dtype=np.int8)
    idx = bits_to_indices(bits, cbs.M)
    y, h = apply_channel(transmit(idx, cbs), cfg.channel, sigma2, rng)
    decisions, _ = det.detect(y, h, sigma2, cfg.mpa_iterations)
    decided_bits = det.bit_table[decisions]
    return int(np.count_nonzero(decided_bits != bits)), int(np.count_nonzero(decisions != idx))


def simulate_ber(cbs, cfg, workers=None):
    """Monte Carlo BER over ``cfg.ebno_db_grid``.

    Each point runs blocks of ``cfg.block_size`` codewords until
    ``cfg.target_errors`` bit errors or ``cfg.max_codewords`` codewords.
    Blocks are consumed in index order, so the early stop (and the whole
    curve) is identical for any `workers` count.
    """
    workers = workers or default_workers()
    det = MessagePassingDetector(cbs)
    nb = int(log2(cbs.M))
    eb = float(np.mean(cbs.average_energy())) / nb
    sizes = [min(cfg.block_size, cfg.max_codewords - s)
             for s in range(0, cfg.max_codewords, cfg.block_size)]
    points = []
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for e_idx, ebno in enumerate(cfg.ebno_db_grid):
            sigma2 = eb * 10 ** (-ebno / 10)
            errors = sym_errors = codewords = 0
            b = 0
            done = False
            while b < len(sizes) and not done:
                wave = range(b, min(b + workers, len(sizes)))
                results = pool.map(lambda i: _run_block(det, cbs, cfg, sigma2, e_idx, i, sizes[i]), wave)
                for i, (be, se) in zip(wave, results):
                    errors += be
                    sym_errors += se
                    codewords += sizes[i]
                    if errors >= cfg.target_errors:
                        done = True
                        break
                b = wave[-1] + 1
            bits = codewords * cbs.J * nb
            points.append(BerPoint(ebno, bits, errors, errors / bits, codewords, sym_errors))
    meta = {"ebno_convention": EBN0_CONVENTION, "labeling": LABELING,
            "detector": f"log-domain sum-product MPA, {cfg.mpa_iterations} iterations",
            "channel": cfg.channel}
    return BerCurve(points=points, seed=cfg.seed, config_hash=config_digest(cbs, cfg), metadata=meta)

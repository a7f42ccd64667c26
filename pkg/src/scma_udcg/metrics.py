"""Energies, distances, coding gains and error bounds.

Closed-form expressions live next to exhaustive evaluations so that each can
be checked against the other.
"""

from dataclasses import asdict, dataclass, field
from itertools import combinations

import numpy as np
from scipy.special import erfc

from ._distance import closest_pair
from .udcg import DEFAULT_SIZE_CAP, DesignError, build_udcg, rotation_angles, superimpose

#: Largest combination constellation (M**J points) scanned by exact MPD.
MPD_EXACT_CAP = 2 ** 16

#: Table-style MEDs divide the unit-average-energy distance by sqrt(M); this
#: is the distance after scaling every codebook to unit *total* energy.
TABLE_CONVENTION = "distance, codebooks scaled to unit total energy (sum_m ||x_m||^2 = 1)"


def sum_energy_superimposed(params, mode="closed_form", size_cap=DEFAULT_SIZE_CAP):
    """Total energy ``E_c`` of the superimposed constellation.

    ``closed_form`` evaluates the analytical sum; ``brute_force`` adds up
    ``|c_p|^2`` over every superimposed point.
    """
    if mode == "brute_force":
        sup = superimpose(build_udcg(params), size_cap=size_cap)
        return float(np.sum(np.abs(sup.points) ** 2))
    if mode != "closed_form":
        raise ValueError(f"unknown mode {mode!r}")
    return superimposed_energy_closed(params.amplitudes, params.r,
                                      rotation_angles(params.r, params.epsilons))


def superimposed_energy_closed(amplitudes, r, thetas):
    """Closed-form ``E_c`` from raw ring amplitudes and rotation angles."""
    amps = np.asarray(amplitudes, dtype=float)
    n_r = 2 ** r
    M, d_f = n_r * len(amps), len(thetas)
    q = np.arange(1, n_r + 1)
    ring_sum = np.sum(2 * q * np.cos(2 * np.pi * q / n_r)) - n_r
    cross = sum(np.cos(thetas[n] - thetas[i]) for n, i in combinations(range(d_f), 2))
    return float(d_f * M ** (d_f - 1) * n_r * np.sum(amps ** 2)
                 + 2 * M ** (d_f - 2) * ring_sum * np.sum(amps) ** 2 * cross)


def average_energy_superimposed(params, mode="closed_form"):
    return sum_energy_superimposed(params, mode) / params.M ** params.d_f


def med_superimposed(sup):
    """Exact minimum distance between distinct superimposed points."""
    if len(sup) < 1:
        raise DesignError("empty superimposed constellation")
    return closest_pair(sup.points)[0]


def _theta_min(r, thetas, shift):
    n_r = 2 ** r
    best = np.inf
    ldiff = np.arange(-(n_r - 1), n_r)
    for n in range(len(thetas)):
        for i in range(len(thetas)):
            if n == i:
                continue
            ang = 2 * np.pi / n_r * (ldiff - shift) + thetas[n] - thetas[i]
            best = min(best, float(np.min(np.abs(ang))))
    return best


def med_closed_cases(params):
    """Minimum distances of the two closed-form pair classes.

    Class 1 moves two constellations one phase step in opposite directions;
    class 2 moves two constellations one ring in opposite directions.
    Returns ``(d1, d2)``; ``d2`` is ``None`` for single-ring designs.
    """
    r, a, t = params.r, params.a, params.t
    thetas = rotation_angles(r, params.epsilons)
    theta1 = _theta_min(r, thetas, shift=1)
    d1 = np.sqrt(8 * a ** 2 * np.sin(np.pi / 2 ** r) ** 2 * (1 - np.cos(theta1)))
    if params.V == 0:
        return float(d1), None
    theta2 = _theta_min(r, thetas, shift=0)
    d2 = np.sqrt(2 * t ** 2 * (1 - np.cos(theta2)))
    return float(d1), float(d2)


def codebook_energy_closed(params):
    """Sum energy of one designed codebook, ``B * 2**r * sum_v (a + v t)^2``."""
    return float(params.B * 2 ** params.r * np.sum(params.amplitudes ** 2))


def codebook_med_closed(params):
    """Piecewise codebook MED for designed (non-interleaved) codebooks."""
    return codebook_med_piecewise(params.a, params.r, params.t, params.B, params.V)


def codebook_med_piecewise(a, r, t, B=2, V=1):
    """``sqrt(B) * 2a sin(pi / 2**r)`` if ``t = 0`` or ``t`` exceeds it, else ``sqrt(B) * t``.

    A single ring (``V = 0``) has no ring step, so only the phase term applies.
    """
    inner = 2 * a * np.sin(np.pi / 2 ** r)
    if V == 0 or not t or t >= inner:
        return float(np.sqrt(B) * inner)
    return float(np.sqrt(B) * t)


def codebook_stats(cbs, j):
    """``(average energy, exact codeword MED)`` of user `j`'s codebook."""
    book = cbs.books[j]
    if book.size == 0:
        raise DesignError("empty codebook")
    e_avg = float(np.sum(np.abs(book) ** 2) / cbs.M)
    d_min = closest_pair(book.T)[0]
    return e_avg, float(d_min)


def coding_gain(d_min, e_avg):
    """Squared minimum distance over average energy."""
    if not e_avg > 0:
        raise ValueError("average energy must be positive")
    return d_min ** 2 / e_avg


def resource_superposition(cbs, k, size_cap=DEFAULT_SIZE_CAP):
    return superimpose(cbs.resource_symbols(k), size_cap=size_cap)


def per_rn_med(cbs, size_cap=DEFAULT_SIZE_CAP):
    """Exact MED of the superimposed constellation on every resource."""
    return np.array([med_superimposed(resource_superposition(cbs, k, size_cap))
                     for k in range(cbs.K)])


def _product_distance_min(a, b_rows):
    """min over rows of b of prod_k |a_k - b_k|."""
    return np.min(np.prod(np.abs(b_rows - a), axis=1))


def min_product_distance(cbs, mode="per_codebook", cap=MPD_EXACT_CAP):
    """Minimum product distance.

    ``exact`` scans all pairs of the combination constellation (every joint
    choice of the J users' codewords, summed per resource) and multiplies the
    K coordinate distances, zero factors included.  ``per_codebook`` takes,
    per user, the minimum over codeword pairs of the product over the user's
    own resources, and returns the smallest value over users.
    """
    if mode == "per_codebook":
        best = np.inf
        for j, resources in enumerate(cbs.graph.un_resources):
            cw = cbs.books[j][list(resources)].T          # (M, B)
            diff = np.abs(cw[:, None, :] - cw[None, :, :])
            prod = np.prod(diff, axis=2)
            iu = np.triu_indices(cbs.M, 1)
            best = min(best, float(np.min(prod[iu])))
        return best
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    size = cbs.M ** cbs.J
    if size > cap:
        raise DesignError(f"combination constellation has {size} points, exact MPD cap is {cap}")
    combo = np.zeros((1, cbs.K), dtype=complex)
    for j in range(cbs.J):
        combo = (combo[:, None, :] + cbs.books[j].T[None, :, :]).reshape(-1, cbs.K)
    best = np.inf
    for i in range(combo.shape[0] - 1):
        best = min(best, float(_product_distance_min(combo[i], combo[i + 1:])))
        if best == 0.0:
            # no smaller value exists
            return 0.0
    return best


def qfunc(x):
    """Gaussian tail probability ``Q(x) = erfc(x / sqrt 2) / 2``."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / np.sqrt(2.0))


def union_bound(d_min, sigma2, K, M, J, channel="awgn", h=None):
    """Union bound on the joint detection error probability.

    With ``channel="rayleigh"`` the bound is conditioned on the channel
    vector `h`.
    """
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    if channel == "awgn":
        gain = K
    elif channel == "rayleigh":
        if h is None:
            raise ValueError("conditioned Rayleigh bound needs the channel vector h")
        gain = float(np.sum(np.abs(np.asarray(h)) ** 2))
    else:
        raise ValueError(f"unknown channel {channel!r}")
    return float((M ** J - 1) * qfunc(np.sqrt(gain / (2 * sigma2)) * d_min))


@dataclass
class MetricsReport:
    e_c_sum: float
    e_c_avg: float
    d_min_c: float
    gain_c: float
    e_x_avg: float
    d_min_x: float
    gain_x: float
    per_rn_med: list
    per_rn_med_table: list
    mpd: float = None
    mpd_mode: str = None
    table_convention: str = TABLE_CONVENTION
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def evaluate_codebook_set(cbs, mpd_mode="per_codebook"):
    """Compute a :class:`MetricsReport` from the codebooks alone.

    Superimposed quantities are averaged over resources (energies) or
    minimized over resources (distances); codebook quantities likewise over
    users.  The same numbers come out for a freshly designed set and for one
    read back from JSON.
    """
    sups = [resource_superposition(cbs, k) for k in range(cbs.K)]
    e_sums = [float(np.sum(np.abs(s.points) ** 2)) for s in sups]
    e_avgs = [e / len(s) for e, s in zip(e_sums, sups)]
    meds = [med_superimposed(s) for s in sups]
    stats = [codebook_stats(cbs, j) for j in range(cbs.J)]
    e_x_avg = float(np.mean([s[0] for s in stats]))
    d_min_x = float(min(s[1] for s in stats))
    d_min_c = float(min(meds))
    e_c_avg = float(np.mean(e_avgs))
    # unit total codebook energy: divide by sqrt(M * mean per-codeword energy)
    table_scale = 1.0 / np.sqrt(cbs.M * e_x_avg)
    mpd = min_product_distance(cbs, mpd_mode) if mpd_mode else None
    return MetricsReport(
        e_c_sum=float(np.mean(e_sums)), e_c_avg=e_c_avg, d_min_c=d_min_c,
        gain_c=coding_gain(d_min_c, e_c_avg), e_x_avg=e_x_avg, d_min_x=d_min_x,
        gain_x=coding_gain(d_min_x, e_x_avg), per_rn_med=[float(m) for m in meds],
        per_rn_med_table=[float(m * table_scale) for m in meds],
        mpd=mpd, mpd_mode=mpd_mode,
    )


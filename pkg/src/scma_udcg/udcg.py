"""Uniquely decomposable constellation groups (UDCG).

A group consists of one base ring constellation ``C_0`` and ``N`` phase
rotated copies ``C_n = exp(j*theta_n) * C_0``.  Any sum taking one point from
each constellation identifies its constituents uniquely, which is what keeps
the per-resource superposition of an SCMA system decodable.

Points inside a constellation are ordered amplitude-major: point index
``p = v * 2**r + l`` carries amplitude ``a + v*t`` and phase ``2*pi*l / 2**r``.
"""

from dataclasses import dataclass, field
from itertools import product
from math import comb, log2

import numpy as np

from ._distance import closest_pair

#: Largest superimposed constellation that will be enumerated.
DEFAULT_SIZE_CAP = 2 ** 24

#: Absolute tolerance used to decide that two superimposed points coincide.
DEFAULT_UDC_TOL = 1e-9


class DesignError(ValueError):
    """Raised for parameter combinations outside the construction's domain."""


def _is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class DesignParams:
    """All knobs of a UDCG codebook design.

    Parameters
    ----------
    M : int
        Points per constellation (power of two, >= 2).
    r : int
        Ring-order exponent; each ring holds ``2**r`` points.
    a : float
        Innermost ring amplitude.
    t : float or None
        Amplitude step between rings. Must be positive when there is more
        than one ring, since the ring amplitudes have to be strictly
        increasing.  ``None`` leaves it unset (e.g. before a step-size
        search); single-ring designs treat it as 0.
    epsilons : tuple of float
        Rotation exponents of constellations ``1..N``.  Consecutive pairs are
        equal and pairs strictly increase, e.g. ``(1, 1, 2, 2)``.
    K, J, B : int
        Resources, users and resources per user of the SCMA system.
    """

    M: int
    r: int
    a: float = 0.5
    t: float = None
    epsilons: tuple = (1.0, 1.0)
    K: int = 4
    J: int = 6
    B: int = 2

    def __post_init__(self):
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))
        check_group_params(self.M, self.r, self.a, self.t, self.epsilons)
        K, J, B = self.K, self.J, self.B
        if min(K, J, B) < 1:
            raise DesignError("K, J and B must be positive")
        if B >= K:
            raise DesignError(f"B={B} must be smaller than K={K}")
        if J <= K:
            raise DesignError(f"J={J} must exceed K={K} (overloaded system)")
        if J > comb(K, B):
            raise DesignError(f"J={J} exceeds C(K, B)={comb(K, B)} distinct factor-graph columns")

    @property
    def V(self):
        """Index of the outermost ring (number of rings minus one)."""
        return self.M // 2 ** self.r - 1

    @property
    def N(self):
        return len(self.epsilons)

    @property
    def d_f(self):
        return self.N + 1

    @property
    def amplitudes(self):
        return group_amplitudes(self.M, self.r, self.a, self.t)

    def replace(self, **changes):
        values = {f: getattr(self, f) for f in self.__dataclass_fields__}
        values.update(changes)
        return DesignParams(**values)

    def to_dict(self):
        return {
            "M": int(self.M), "r": int(self.r), "a": float(self.a),
            "t": None if self.t is None else float(self.t),
            "epsilons": list(self.epsilons), "K": int(self.K), "J": int(self.J), "B": int(self.B),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(M=int(d["M"]), r=int(d["r"]), a=float(d["a"]),
                   t=None if d.get("t") is None else float(d["t"]),
                   epsilons=tuple(d["epsilons"]), K=int(d["K"]), J=int(d["J"]), B=int(d["B"]))


def check_group_params(M, r, a, t, epsilons):
    """Validate the constellation-group part of a design (no SCMA sizes)."""
    if not isinstance(M, (int, np.integer)) or M < 2 or not _is_power_of_two(M):
        raise DesignError(f"M must be a power of two >= 2, got {M!r}")
    if not isinstance(r, (int, np.integer)) or r < 1 or r > log2(M):
        raise DesignError(f"r must be an integer in [1, log2(M)={int(log2(M))}], got {r!r}")
    if not a > 0:
        raise DesignError(f"base amplitude a must be positive, got {a!r}")
    if t is not None and t < 0:
        raise DesignError(f"step size t must be non-negative, got {t!r}")
    V = M // 2 ** r - 1
    if V >= 1 and t == 0:
        raise DesignError(
            f"t=0 with {V + 1} rings makes the rings coincide; amplitudes must be strictly increasing"
        )
    check_epsilons(epsilons)


def group_amplitudes(M, r, a, t):
    """Ring amplitudes ``a + v*t``; ``t`` may be ``None`` for a single ring."""
    V = M // 2 ** r - 1
    if V == 0:
        return np.array([float(a)])
    if t is None:
        raise DesignError("step size t is unset for a multi-ring design")
    return a + t * np.arange(V + 1)


def check_epsilons(epsilons):
    """Validate the paired rotation-exponent pattern ``e1 = e2 < e3 = e4 < ...``.

    An odd trailing entry is allowed; it only has to exceed the last pair.
    """
    eps = list(epsilons)
    if not eps:
        raise DesignError("at least one rotated constellation is required (N >= 1)")
    if any(not e > 0 for e in eps):
        raise DesignError(f"rotation exponents must be positive, got {eps}")
    for i in range(0, len(eps) - 1, 2):
        if eps[i] != eps[i + 1]:
            raise DesignError(f"rotation exponents must come in equal pairs, got {eps}")
    heads = eps[::2]
    if any(b <= a for a, b in zip(heads, heads[1:])):
        raise DesignError(f"rotation exponent pairs must strictly increase, got {eps}")


def rotation_angles(r, epsilons):
    """Rotation angles ``theta_0..theta_N``; ``theta_0 = 0``."""
    thetas = [0.0]
    for n, e in enumerate(epsilons, start=1):
        thetas.append((-1) ** n * np.pi / 2 ** (r + e))
    return np.array(thetas)


def ring_constellation(amplitudes, r):
    """Base constellation with the given ring amplitudes, amplitude-major."""
    amplitudes = np.asarray(amplitudes, dtype=float)
    phases = np.exp(2j * np.pi * np.arange(2 ** r) / 2 ** r)
    return (amplitudes[:, None] * phases[None, :]).ravel()


@dataclass(frozen=True)
class ConstellationGroup:
    """Base constellation plus its rotated copies.

    ``points[n]`` is constellation ``C_n``; all rows share the canonical
    point order of the base.
    """

    points: np.ndarray
    amplitudes: np.ndarray
    thetas: np.ndarray
    r: int
    params: DesignParams = None

    @property
    def n_constellations(self):
        return self.points.shape[0]

    @property
    def M(self):
        return self.points.shape[1]

    @property
    def base(self):
        return self.points[0]


def group_from_parts(amplitudes, r, thetas, params=None):
    """Build a group from an amplitude vector and explicit rotation angles."""
    base = ring_constellation(amplitudes, r)
    thetas = np.asarray(thetas, dtype=float)
    points = np.exp(1j * thetas)[:, None] * base[None, :]
    points.setflags(write=False)
    return ConstellationGroup(points=points, amplitudes=np.asarray(amplitudes, float),
                              thetas=thetas, r=r, params=params)


def build_udcg(params):
    """Construct the ``N + 1`` constellations of a UDCG.

    Examples
    --------
    >>> g = build_udcg(DesignParams(M=4, r=2, a=0.5))
    >>> g.points.shape
    (3, 4)
    >>> np.allclose(g.thetas, [0, -np.pi / 8, np.pi / 8])
    True
    """
    if not isinstance(params, DesignParams):
        raise TypeError("params must be a DesignParams instance")
    return group_from_parts(params.amplitudes, params.r,
                            rotation_angles(params.r, params.epsilons), params)


@dataclass(frozen=True)
class SuperimposedConstellation:
    """All sums of one point per constellation.

    ``index_map[p]`` holds the per-constellation point indices summed into
    ``points[p]``; the first constellation varies slowest.
    """

    points: np.ndarray
    index_map: np.ndarray

    def __len__(self):
        return self.points.shape[0]


def superimpose(constellations, size_cap=DEFAULT_SIZE_CAP):
    """Enumerate the superimposed constellation of a group.

    `constellations` is a :class:`ConstellationGroup` or any sequence of
    1-D complex arrays (they need not share a size).
    """
    rows = constellations.points if isinstance(constellations, ConstellationGroup) else constellations
    rows = [np.asarray(c, dtype=complex) for c in rows]
    sizes = [len(c) for c in rows]
    total = int(np.prod(sizes, dtype=object))
    if total > size_cap:
        raise DesignError(f"superimposed constellation would have {total} points, cap is {size_cap}")
    points = np.zeros(1, dtype=complex)
    for c in rows:
        points = (points[:, None] + c[None, :]).ravel()
    index_map = np.array(list(product(*[range(s) for s in sizes])), dtype=np.int64)
    index_map = index_map.reshape(total, len(rows))
    return SuperimposedConstellation(points=points, index_map=index_map)


@dataclass(frozen=True)
class UDCResult:
    is_udc: bool
    min_distance: float
    witness: tuple = field(default=None)


def check_uniquely_decodable(sup, tol=DEFAULT_UDC_TOL):
    """Decide unique decodability by exhaustive nearest-pair search.

    Returns a :class:`UDCResult`.  When the check fails, ``witness`` holds the
    two index tuples whose sums (nearly) coincide.
    """
    d, i, j = closest_pair(sup.points)
    if i < 0:
        return UDCResult(True, np.inf, None)
    if d > tol:
        return UDCResult(True, d, None)
    witness = (tuple(int(x) for x in sup.index_map[i]), tuple(int(x) for x in sup.index_map[j]))
    return UDCResult(False, d, witness)

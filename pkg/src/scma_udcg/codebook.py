"""Codebook assembly from a UDCG and a factor graph.

Each resource row of the generation matrix names which constellation of the
group a user transmits on that resource.  A user's codebook ``X_j`` is the
K x M matrix whose row ``k`` holds that constellation (or zeros).
"""

from dataclasses import dataclass, replace

import numpy as np

from .factorgraph import FactorGraph
from .udcg import ConstellationGroup, DesignError, DesignParams


@dataclass(frozen=True)
class GenerationMatrix:
    """Constellation index per (resource, user); ``-1`` where unused.

    ``interleave`` marks entries whose point order is permuted by
    :func:`interleave_codebook_set`.
    """

    entries: np.ndarray
    interleave: np.ndarray

    def describe(self):
        rows = []
        for k, row in enumerate(self.entries):
            cells = [("0" if n < 0 else f"C{n}" + ("^e" if self.interleave[k, j] else ""))
                     for j, n in enumerate(row)]
            rows.append(" ".join(f"{c:>5}" for c in cells))
        return "\n".join(rows)


def allocate_generation_matrix(graph):
    """Assign constellations so each resource uses each one exactly once.

    User ``j`` on resource ``k`` (both 1-based) gets ``(k + u) mod d_f``,
    where ``u`` counts the users of resource ``k`` up to and including ``j``.
    """
    K, J = graph.K, graph.J
    entries = -np.ones((K, J), dtype=np.int64)
    for k, users in enumerate(graph.rn_users):
        d_f = len(users)
        for u, j in enumerate(users, start=1):
            entries[k, j] = (k + 1 + u) % d_f
    # rows of mu-even resources of each user get the permuted point order
    interleave = np.zeros((K, J), dtype=bool)
    for j, resources in enumerate(graph.un_resources):
        for mu, k in enumerate(resources, start=1):
            interleave[k, j] = mu % 2 == 0
    return GenerationMatrix(entries=entries, interleave=interleave)


@dataclass(frozen=True)
class CodebookSet:
    """J codebooks stored as a ``(J, K, M)`` complex array.

    ``params`` is ``None`` for imported codebooks of unknown origin.
    """

    books: np.ndarray
    graph: FactorGraph
    params: DesignParams = None
    normalization: float = 1.0
    interleaved: bool = False
    thetas: np.ndarray = None
    name: str = "udcg"
    report: object = None

    def __post_init__(self):
        books = np.array(self.books, dtype=complex)
        if books.ndim != 3:
            raise DesignError("codebooks must have shape (J, K, M)")
        if books.shape[:2] != (self.graph.J, self.graph.K):
            raise DesignError(
                f"codebook shape {books.shape} does not match graph K={self.graph.K}, J={self.graph.J}")
        books.setflags(write=False)
        object.__setattr__(self, "books", books)

    @property
    def J(self):
        return self.books.shape[0]

    @property
    def K(self):
        return self.books.shape[1]

    @property
    def M(self):
        return self.books.shape[2]

    def average_energy(self):
        """Per-user average codeword energy ``(1/M) sum_m ||x_m||^2``."""
        return np.sum(np.abs(self.books) ** 2, axis=(1, 2)) / self.M

    def resource_symbols(self, k):
        """Symbol alphabets ``x_{k, m_j}`` of the users on resource `k`."""
        return [self.books[j, k] for j in self.graph.rn_users[k]]


def build_codebook_set(gen, group, graph):
    """Place the allocated constellations into sparse K x M codebooks."""
    if not isinstance(group, ConstellationGroup):
        raise TypeError("group must be a ConstellationGroup")
    if graph.d_f != group.n_constellations:
        raise DesignError(
            f"graph has d_f={graph.d_f} but the group has {group.n_constellations} constellations")
    books = np.zeros((graph.J, graph.K, group.M), dtype=complex)
    for k in range(graph.K):
        for j in range(graph.J):
            n = gen.entries[k, j]
            if graph.f[k, j]:
                books[j, k] = group.points[n]
    return CodebookSet(books=books, graph=graph, params=group.params,
                       thetas=group.thetas, normalization=1.0, interleaved=False)


def interleave_permutation(M, r):
    """Point permutation applied to interleaved rows (0-based).

    Point ``(v, l)`` takes the place of ``(V - v, (l + 2**(r-1)) mod 2**r)``:
    reversed ring order combined with a half turn of the phase index.
    """
    if r < 1:
        raise DesignError("interleaving needs r >= 1")
    M_r = 2 ** r
    M_h = M_r // 2
    V = M // M_r - 1
    p = np.arange(M)
    v, l = divmod(p, M_r)
    return (V - v) * M_r + (l + M_h) % M_r


def interleave_codebook_set(cbs):
    """Permute the points of every second nonzero row of each codebook."""
    if cbs.interleaved:
        raise DesignError("codebook set is already interleaved")
    if cbs.params is None:
        raise DesignError("interleaving needs the design parameters (r)")
    perm = interleave_permutation(cbs.M, cbs.params.r)
    gen = allocate_generation_matrix(cbs.graph)
    books = np.array(cbs.books)
    for k, j in zip(*np.nonzero(gen.interleave)):
        books[j, k] = books[j, k, perm]
    return replace(cbs, books=books, interleaved=True)


def normalize_codebook_set(cbs):
    """Scale all codebooks by one factor so the mean codeword energy is 1."""
    energy = cbs.average_energy()
    if np.any(energy <= 0):
        raise DesignError("cannot normalize a codebook with zero energy")
    scale = 1.0 / np.sqrt(np.mean(energy))
    return replace(cbs, books=cbs.books * scale, normalization=cbs.normalization * scale)


def latin_property_holds(cbs, tol=1e-12):
    """True when the nonzero entries of every codeword are pairwise distinct."""
    for j, resources in enumerate(cbs.graph.un_resources):
        rows = cbs.books[j, list(resources)]
        for a in range(len(resources)):
            for b in range(a + 1, len(resources)):
                if np.any(np.abs(rows[a] - rows[b]) <= tol):
                    return False
    return True

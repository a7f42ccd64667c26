"""Regular SCMA factor graphs built from the largest binary column values."""

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .udcg import DesignError


@dataclass(frozen=True)
class FactorGraph:
    """K x J binary mapping of users (columns) onto resources (rows).

    Indices are 0-based internally; :meth:`describe` reports 1-based ones.
    """

    f: np.ndarray

    def __post_init__(self):
        f = np.array(self.f, dtype=np.int8)
        if f.ndim != 2 or not np.isin(f, (0, 1)).all():
            raise DesignError("factor graph must be a 2-D binary matrix")
        f.setflags(write=False)
        object.__setattr__(self, "f", f)

    @property
    def K(self):
        return self.f.shape[0]

    @property
    def J(self):
        return self.f.shape[1]

    @property
    def B(self):
        return int(self.f[:, 0].sum())

    @property
    def d_f(self):
        return int(self.f[0].sum())

    @property
    def overload(self):
        return self.J / self.K

    @property
    def rn_users(self):
        """Users attached to each resource, in increasing order."""
        return tuple(tuple(int(j) for j in np.flatnonzero(row)) for row in self.f)

    @property
    def un_resources(self):
        """Resources used by each user, in increasing order."""
        return tuple(tuple(int(k) for k in np.flatnonzero(col)) for col in self.f.T)

    def column_values(self):
        """Binary-to-decimal value of each column, first row most significant."""
        weights = 2 ** np.arange(self.K - 1, -1, -1)
        return [int(v) for v in weights @ self.f]

    def is_regular(self):
        cols = self.f.sum(axis=0)
        rows = self.f.sum(axis=1)
        return bool((cols == cols[0]).all() and (rows == rows[0]).all())

    def validate(self):
        """Check regularity, distinct columns and ``d_f = J*B/K``."""
        cols = self.f.sum(axis=0)
        rows = self.f.sum(axis=1)
        if not (cols == cols[0]).all():
            raise DesignError(f"column weights differ: {cols.tolist()}")
        target = self.J * int(cols[0]) / self.K
        if not (rows == target).all():
            unbalanced = [k + 1 for k, w in enumerate(rows) if w != target]
            raise DesignError(f"row weights {rows.tolist()} differ from J*B/K = {target:g}; "
                              f"unbalanced resources {unbalanced}")
        if len(set(map(tuple, self.f.T))) != self.J:
            raise DesignError("factor graph columns are not distinct")
        return self

    def to_bitstrings(self):
        return ["".join(str(int(b)) for b in col) for col in self.f.T]

    @classmethod
    def from_bitstrings(cls, columns):
        if not columns:
            raise DesignError("empty factor graph")
        f = np.array([[int(c) for c in col] for col in columns], dtype=np.int8).T
        return cls(f)

    def describe(self):
        lines = []
        for k, users in enumerate(self.rn_users, start=1):
            lines.append(f"RN{k}: users {[j + 1 for j in users]}")
        return "\n".join(lines)


def design_factor_graph(K, J, B):
    """Pick the J weight-B columns with the largest decimal values.

    Columns are ordered by strictly decreasing value. The result must be row
    regular; when it is not (possible only for ``J < C(K, B)``) a
    :class:`DesignError` names the unbalanced resources.

    Examples
    --------
    >>> design_factor_graph(4, 6, 2).column_values()
    [12, 10, 9, 6, 5, 3]
    """
    if min(K, J, B) < 1:
        raise DesignError("K, J and B must be positive")
    if B >= K:
        raise DesignError(f"B={B} must be smaller than K={K}")
    if J > comb(K, B):
        raise DesignError(f"J={J} exceeds C(K, B)={comb(K, B)}")
    if (J * B) % K:
        raise DesignError(f"J*B={J * B} is not divisible by K={K}")
    columns = []
    for ones in combinations(range(K), B):
        col = np.zeros(K, dtype=np.int8)
        col[list(ones)] = 1
        columns.append(col)
    weights = 2 ** np.arange(K - 1, -1, -1)
    columns.sort(key=lambda c: -int(weights @ c))
    graph = FactorGraph(np.array(columns[:J]).T)
    return graph.validate()

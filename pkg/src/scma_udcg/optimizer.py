"""Step-size search and the end-to-end codebook design flow."""

import logging
from dataclasses import dataclass, replace

import numpy as np

from .codebook import (allocate_generation_matrix, build_codebook_set,
                       interleave_codebook_set, normalize_codebook_set)
from .factorgraph import design_factor_graph
from .metrics import (average_energy_superimposed, codebook_energy_closed,
                      codebook_med_closed, coding_gain, evaluate_codebook_set,
                      med_superimposed)
from .udcg import DesignError, build_udcg, superimpose

log = logging.getLogger(__name__)

#: Relative margin a later grid point must beat the incumbent by.
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class SearchConfig:
    t_ini: float = 0.0
    t_end: float = 2.0
    grid_step: float = 0.05
    criterion: str = "codebook"

    def __post_init__(self):
        if not 0 <= self.t_ini < self.t_end:
            raise DesignError(f"need 0 <= t_ini < t_end, got ({self.t_ini}, {self.t_end})")
        if not self.grid_step > 0:
            raise DesignError("grid_step must be positive")
        if self.criterion not in ("superimposed", "codebook"):
            raise DesignError(f"criterion must be 'superimposed' or 'codebook', got {self.criterion!r}")
        if len(self.grid()) < 2:
            raise DesignError("search range holds fewer than two grid points")

    def grid(self):
        n = int(np.floor((self.t_end - self.t_ini) / self.grid_step + 1e-9))
        # rounding keeps multiples of the step exact in decimal
        return [round(self.t_ini + i * self.grid_step, 12) for i in range(n + 1)]


@dataclass(frozen=True)
class SearchResult:
    t_star: float
    gain_star: float
    trace: list

    def __iter__(self):
        return iter((self.t_star, self.gain_star, self.trace))


def superimposed_gain(params):
    """Coding gain of the superimposed constellation (exact MED)."""
    d = med_superimposed(superimpose(build_udcg(params)))
    return coding_gain(d, average_energy_superimposed(params))


def codebook_gain(params):
    """Coding gain of one designed codebook from its closed-form MED and energy."""
    e_avg = codebook_energy_closed(params) / params.M
    return coding_gain(codebook_med_closed(params), e_avg)


def optimize_step_size(params, cfg):
    """Exhaustive grid search for the gain-maximizing ring step ``t``.

    The ``t`` carried by `params` is ignored.  Grid points where the rings
    would coincide (``t = 0`` with several rings) are skipped.  Ties go to the
    smaller ``t``.  Single-ring designs return ``t = 0`` without searching.
    """
    gain_fn = superimposed_gain if cfg.criterion == "superimposed" else codebook_gain
    if params.V == 0:
        log.info("single-ring design (M = 2**r): step size has no effect, using t = 0")
        p = params.replace(t=0.0)
        g = gain_fn(p)
        return SearchResult(0.0, g, [(0.0, g)])
    trace = []
    for t in cfg.grid():
        if t <= 0:
            continue
        trace.append((t, gain_fn(params.replace(t=t))))
    if not trace:
        raise DesignError("search range holds no positive step size")
    t_star, g_star = trace[0]
    for t, g in trace[1:]:
        if g > g_star * (1 + TIE_RTOL):
            t_star, g_star = t, g
    return SearchResult(t_star, g_star, trace)


def max_plateaus(trace, rtol=1e-9):
    """Number of separate runs of grid points attaining the maximum gain."""
    gains = np.array([g for _, g in trace])
    at_max = gains >= gains.max() * (1 - rtol)
    return int(np.sum(at_max[1:] & ~at_max[:-1]) + at_max[0])


def design_pipeline(params, cfg=None, interleave=True):
    """Run the full design: search ``t``, build, allocate, interleave, normalize.

    When `cfg` is ``None`` the ``t`` in `params` is used as is.  Extra
    rotation exponents beyond ``d_f - 1`` are dropped.

    Returns the normalized :class:`CodebookSet` with ``report`` set to its
    :class:`MetricsReport`; search details go under ``report.extra``.
    """
    graph = design_factor_graph(params.K, params.J, params.B)
    n_rot = graph.d_f - 1
    if len(params.epsilons) < n_rot:
        raise DesignError(f"d_f={graph.d_f} needs {n_rot} rotation exponents, got {len(params.epsilons)}")
    if len(params.epsilons) > n_rot:
        params = params.replace(epsilons=params.epsilons[:n_rot])
    search = None
    if cfg is not None:
        search = optimize_step_size(params, cfg)
        params = params.replace(t=search.t_star)
    group = build_udcg(params)
    gen = allocate_generation_matrix(graph)
    cbs = build_codebook_set(gen, group, graph)
    if interleave:
        cbs = interleave_codebook_set(cbs)
    cbs = normalize_codebook_set(cbs)
    report = evaluate_codebook_set(cbs)
    report.extra["t"] = float(params.t or 0.0)
    if search is not None:
        report.extra.update(criterion=cfg.criterion, t_star=search.t_star,
                            gain_star=search.gain_star)
    return replace(cbs, report=report)

"""scikit-learn style front ends for the point-set searches.

Both searches are "fitted" without data: ``fit()`` runs the randomized
search and stores the generating matrices.  The fitted object then samples
point sets, reports WAFOM, and scores itself as ``-log10 WAFOM`` (larger is
better, as scikit-learn expects).
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_divides, check_int, check_seed
from .f2 import MAX_DIGITS, enumerate_points_gray, point_to_reals
from .integrate import IntegrationRequest, digital_shift, qmc_integrate
from .search import SearchConfig, search_extensible
from .seqgen import PrimitivePoly, primitive_poly, search_sequential, seqgen_as_digital_net
from .wafom import build_tables, wafom_tabled


class _NetMixin:
    def sample(self, d=None, shift=True):
        """Points of ``P_d`` in Gray order as an ``(2**d, S)`` float array."""
        check_is_fitted(self, "generating_matrices_")
        G = self.generating_matrices_
        d = G.m if d is None else d
        s = digital_shift(G.n) if shift else 0.0
        return point_to_reals(enumerate_points_gray(G, d), G.n, s)

    def wafom(self, d=None) -> float:
        check_is_fitted(self, "generating_matrices_")
        G = self.generating_matrices_
        d = G.m if d is None else d
        return wafom_tabled(G, d, build_tables(G.n, self.n_segments)).value

    def integrate(self, f, d=None, shift=True) -> float:
        check_is_fitted(self, "generating_matrices_")
        G = self.generating_matrices_
        return qmc_integrate(IntegrationRequest(G, G.m if d is None else d, f, shift))

    def score(self, X=None, y=None) -> float:
        w = self.wafom()
        return -math.log10(w) if w > 0 else math.inf


class ExtensibleWafomSearch(_NetMixin, BaseEstimator):
    """Greedy search for extensible low-WAFOM generating matrices.

    Parameters
    ----------
    n_digits : int
        Rows of each generating matrix (bits of precision).
    n_columns : int
        Columns to search; the net is extensible up to ``2**n_columns`` points.
    n_dims : int
        Dimension ``S``.
    n_trials : int
        Random candidates per column stage.
    n_segments : int
        Lookup-table segments; must divide ``n_digits``.
    random_state : int
        Master seed.
    """

    def __init__(
        self,
        n_digits=30,
        n_columns=25,
        n_dims=5,
        n_trials=7000,
        n_segments=3,
        random_state=0,
        max_resident_d=20,
        n_jobs=1,
    ):
        self.n_digits = n_digits
        self.n_columns = n_columns
        self.n_dims = n_dims
        self.n_trials = n_trials
        self.n_segments = n_segments
        self.random_state = random_state
        self.max_resident_d = max_resident_d
        self.n_jobs = n_jobs

    def _config(self) -> SearchConfig:
        n = check_int("n_digits", self.n_digits, 1, MAX_DIGITS)
        m = check_int("n_columns", self.n_columns, 1, n)
        check_divides(n, check_int("n_segments", self.n_segments, 1))
        return SearchConfig(
            n=n,
            m=m,
            S=check_int("n_dims", self.n_dims, 1),
            M=check_int("n_trials", self.n_trials, 1),
            q=self.n_segments,
            master_seed=check_seed(self.random_state),
            max_resident_d=check_int("max_resident_d", self.max_resident_d, 12),
            n_jobs=check_int("n_jobs", self.n_jobs, 1),
        )

    def fit(self, X=None, y=None):
        G, trace = search_extensible(self._config())
        self.generating_matrices_ = G
        self.trace_ = trace
        self.wafom_ = trace.wafom
        return self


class SequentialGeneratorSearch(_NetMixin, BaseEstimator):
    """Random search over ``U`` for a sequential generator of fixed degree."""

    def __init__(
        self,
        n_digits=30,
        degree=10,
        n_dims=5,
        n_trials=7000,
        n_segments=3,
        random_state=0,
        poly=None,
    ):
        self.n_digits = n_digits
        self.degree = degree
        self.n_dims = n_dims
        self.n_trials = n_trials
        self.n_segments = n_segments
        self.random_state = random_state
        self.poly = poly

    def fit(self, X=None, y=None):
        n = check_int("n_digits", self.n_digits, 1, MAX_DIGITS)
        d = check_int("degree", self.degree, 2, min(n, 32))
        check_divides(n, check_int("n_segments", self.n_segments, 1))
        S = check_int("n_dims", self.n_dims, 1)
        poly = primitive_poly(d) if self.poly is None else PrimitivePoly(int(self.poly))
        res = search_sequential(
            n, d, S, check_int("n_trials", self.n_trials, 1), self.n_segments,
            check_seed(self.random_state), poly,
        )
        self.config_ = res.config
        self.generating_matrices_ = seqgen_as_digital_net(res.config, S)
        self.wafom_ = np.array([res.wafom])
        return self

"""scikit-learn style front ends for the sign database and the consistency engine."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .appkit import DeltaDetProduct, boolean_zeros, build_consistency_db, consistency_query
from .atlas import build_adaptive, build_uniform, deserialize, serialize
from .engine import QueryStats, bench, sign_query
from .region import DEFAULT_DEPTH_LIMIT
from .slp import build_powersum_slp
from .validation import check_family, check_point, check_points


class SignConditionIndex(BaseEstimator):
    """Preprocess a polynomial family so sign vectors can be read off cheaply.

    ``fit`` takes the family (``MultiPoly`` objects or their JSON dicts) in place
    of a training matrix; ``predict`` maps points of ``[0,1]^n`` to rows of
    signs in ``{-1, 0, 1}``.

    Parameters
    ----------
    delta : MultiPoly or DeltaDetProduct, optional
        Restricts the database to ``{delta >= 1}``. Defaults to the constant 1.
    mode : {"adaptive", "uniform"}
    k : int, optional
        Cutting members allowed per cell; defaults to the dimension.
    grid_log2 : int
        Cells per axis is ``2**grid_log2`` in uniform mode.
    max_depth : int
        Refinement cap in adaptive mode.
    depth_limit : int
        Subdivision depth of each certified cut decision.
    verify_delta : bool
        Check ``delta(x) >= 1`` exactly at query time.
    threads : int
        Worker processes for adaptive builds.
    """

    def __init__(
        self,
        delta=None,
        mode="adaptive",
        k=None,
        grid_log2=4,
        max_depth=12,
        depth_limit=DEFAULT_DEPTH_LIMIT,
        verify_delta=False,
        threads=1,
    ):
        self.delta = delta
        self.mode = mode
        self.k = k
        self.grid_log2 = grid_log2
        self.max_depth = max_depth
        self.depth_limit = depth_limit
        self.verify_delta = verify_delta
        self.threads = threads

    def fit(self, family, y=None, programs=None):
        family = check_family(family)
        if self.mode == "adaptive":
            db = build_adaptive(
                family, self.delta, self.k, self.max_depth, self.depth_limit, self.threads, programs
            )
        elif self.mode == "uniform":
            db = build_uniform(family, self.delta, self.grid_log2, self.depth_limit, self.k, programs=programs)
        else:
            raise ValueError(f"mode must be 'adaptive' or 'uniform', got {self.mode!r}")
        self._set_database(db)
        return self

    def _set_database(self, db):
        self.database_ = db
        self.n_features_in_ = db.n
        self.n_polys_ = db.s

    def query(self, x):
        """``(signs, QueryStats)`` for a single point."""
        check_is_fitted(self, "database_")
        return sign_query(self.database_, check_point(x, self.n_features_in_), verify_delta=self.verify_delta)

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "database_")
        pts = check_points(X, self.n_features_in_)
        out = np.zeros((len(pts), self.n_polys_), dtype=np.int8)
        for row, x in enumerate(pts):
            out[row] = sign_query(self.database_, x, verify_delta=self.verify_delta)[0]
        return out

    def query_stats(self, X) -> list[QueryStats]:
        check_is_fitted(self, "database_")
        return [self.query(x)[1] for x in check_points(X, self.n_features_in_)]

    def bench(self, X) -> dict:
        check_is_fitted(self, "database_")
        return bench(self.database_, check_points(X, self.n_features_in_), verify_delta=self.verify_delta)

    def to_bytes(self) -> bytes:
        check_is_fitted(self, "database_")
        return serialize(self.database_)

    @classmethod
    def from_bytes(cls, payload: bytes, **params) -> "SignConditionIndex":
        db = deserialize(payload)
        est = cls(delta=db.delta, mode=db.mode, k=db.k, depth_limit=db.depth_limit, **params)
        if db.mode == "uniform":
            est.grid_log2 = db.grid_log2
        else:
            est.max_depth = db.max_depth
        est._set_database(db)
        return est


class ConsistencyIndex(BaseEstimator):
    """Answers whether ``G(X) = 0, H(u, X) = 0`` has one of the given integer solutions.

    ``fit(H, zeros)`` takes a straight-line program over ``(U, X)`` and the
    integer zeros of ``G``; ``predict`` returns one boolean per point ``u``.
    """

    def __init__(
        self,
        delta=None,
        mode="adaptive",
        k=None,
        grid_log2=4,
        max_depth=12,
        depth_limit=DEFAULT_DEPTH_LIMIT,
        verify_delta=False,
    ):
        self.delta = delta
        self.mode = mode
        self.k = k
        self.grid_log2 = grid_log2
        self.max_depth = max_depth
        self.depth_limit = depth_limit
        self.verify_delta = verify_delta

    @classmethod
    def boolean_powersum(cls, m: int, n: int, **params) -> "ConsistencyIndex":
        """Fitted index for the boolean-cube / power-sum instance with the Vandermonde delta."""
        params.setdefault("delta", DeltaDetProduct.for_boolean(m, n))
        return cls(**params).fit(build_powersum_slp(m, n), boolean_zeros(n))

    def fit(self, H, zeros):
        db = build_consistency_db(
            H,
            zeros,
            self.delta,
            mode=self.mode,
            k=self.k,
            max_depth=self.max_depth,
            depth_limit=self.depth_limit,
            grid_log2=self.grid_log2,
        )
        self.database_ = db
        self.n_features_in_ = db.n
        return self

    def query(self, u):
        check_is_fitted(self, "database_")
        return consistency_query(
            self.database_, check_point(u, self.n_features_in_), verify_delta=self.verify_delta
        )

    def predict(self, U) -> np.ndarray:
        check_is_fitted(self, "database_")
        pts = check_points(U, self.n_features_in_)
        return np.array([self.query(u)[0] for u in pts], dtype=bool)

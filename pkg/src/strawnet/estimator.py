"""scikit-learn style front end for straw-model conflict detection."""

from __future__ import annotations

import os
from collections.abc import Mapping

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import EvidenceError
from .formats import load_network
from .network import Evidence, Network, check_network
from .straw import (
    TARGET_CONFIG_CAP,
    StrawKind,
    Verdict,
    build_straw,
    check_scorable,
    conflict_report,
)


def check_model(net) -> Network:
    """Accept a :class:`Network` or a path to a network document and validate it."""
    if isinstance(net, (str, os.PathLike)):
        net = load_network(net)
    if not isinstance(net, Network):
        raise TypeError(f"expected a Network or a path, got {type(net).__name__}")
    return check_network(net)


def _missing(value) -> bool:
    if value is None:
        return True
    if isinstance(value, float) and np.isnan(value):
        return True
    return isinstance(value, str) and value == ""


def check_findings(X, net: Network, feature_names=None) -> list[Evidence]:
    """Coerce ``X`` to a list of validated findings.

    ``X`` may be a sequence of mappings (``{variable: state}``), a pandas
    DataFrame whose columns are variable names, or a 2-D array of state names
    whose columns follow ``feature_names``. Missing cells (``None``, ``NaN``
    or ``""``) mean the variable is unobserved.
    """
    if hasattr(X, "columns") and hasattr(X, "to_dict"):
        rows = X.to_dict(orient="records")
    elif isinstance(X, Mapping):
        raise TypeError("X must be a collection of findings, not a single mapping")
    elif len(X) and all(isinstance(r, Mapping) for r in X):
        rows = list(X)
    else:
        arr = np.asarray(X, dtype=object)
        if arr.size == 0:
            return []
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D array of state names, got {arr.ndim}-D")
        if feature_names is None:
            raise ValueError("array input needs feature names")
        if arr.shape[1] != len(feature_names):
            raise ValueError(
                f"X has {arr.shape[1]} columns, expected {len(feature_names)}"
            )
        rows = [dict(zip(feature_names, r)) for r in arr]

    out = []
    for i, row in enumerate(rows):
        clean = {str(k): str(v) for k, v in row.items() if not _missing(v)}
        try:
            out.append(check_scorable(net, clean))
        except EvidenceError as exc:
            raise EvidenceError(f"row {i}: {exc}") from None
    return out


class StrawConflictDetector(TransformerMixin, BaseEstimator):
    """Flag findings that a straw model explains better than the given network.

    Parameters
    ----------
    kind : {"bipartite", "independent"}, default="bipartite"
        Straw model built from the fitted network.
    threshold : float, default=0.0
        A case is predicted as a conflict when its index exceeds this value.
    target_cap : int, default=4096
        Largest number of joint target configurations for the bipartite
        construction.

    Attributes
    ----------
    network_ : Network
        The validated given model.
    straw_ : Network
        The straw model built at fit time.
    feature_names_in_ : ndarray of str
        Evidence-role variable names, the columns expected by array input.
    n_features_in_ : int
        Number of Evidence-role variables.

    Examples
    --------
    >>> from strawnet import StrawConflictDetector, load_cancer_network
    >>> det = StrawConflictDetector().fit(load_cancer_network())
    >>> det.predict([{"Palpation": "yes", "Diabetes": "yes"}])
    array([1])
    """

    def __init__(self, kind="bipartite", threshold=0.0, target_cap=TARGET_CONFIG_CAP):
        self.kind = kind
        self.threshold = threshold
        self.target_cap = target_cap

    def fit(self, X, y=None):
        """Build the straw model for network ``X`` (a Network or a path); ``y`` is ignored."""
        kind = StrawKind(self.kind)
        self.network_ = check_model(X)
        self.straw_ = build_straw(self.network_, kind, cap=self.target_cap)
        names = [v.name for v in self.network_.evidence_variables]
        self.feature_names_in_ = np.array(names, dtype=object)
        self.n_features_in_ = len(names)
        return self

    def report(self, X):
        check_is_fitted(self, "straw_")
        kind = StrawKind(self.kind)
        cases = check_findings(X, self.network_, list(self.feature_names_in_))
        straws = {kind: self.straw_}
        cache = {}
        out = []
        for e in cases:
            if e not in cache:
                cache[e] = conflict_report(
                    self.network_, e, (kind,), straws=straws, threshold=self.threshold
                )
            out.append(cache[e])
        return out

    def transform(self, X):
        """Columns: given-model probability, straw probability, conflict index."""
        kind = StrawKind(self.kind)
        reports = self.report(X)
        return np.array(
            [[r.p_given, r.p_straw[kind], r.index[kind]] for r in reports], dtype=float
        ).reshape(-1, 3)

    def score_samples(self, X):
        """Conflict index ``log2(P_straw / P_given)`` per case."""
        return self.transform(X)[:, 2]

    def decision_function(self, X):
        return self.score_samples(X) - self.threshold

    def predict(self, X):
        """1 for a conflict, 0 otherwise (undefined indices count as 0)."""
        return np.array(
            [r.verdict[StrawKind(self.kind)] is Verdict.CONFLICT for r in self.report(X)],
            dtype=int,
        )

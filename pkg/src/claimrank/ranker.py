"""Pairwise rankSVM with an RBF kernel, trained by sequential minimal
optimization over preference difference vectors.

Ranking is reduced to classification: each preference (x⁺ must outrank x⁻)
yields the mirrored examples (x⁺−x⁻, +1) and (x⁻−x⁺, −1).  That training
set is symmetric, which forces a zero bias and lets the dual be solved in a
reduced form with one shared multiplier β per mirrored pair:

    maximize  2·(Σ β − ½ βᵀGβ),   0 ≤ β ≤ C,
    G_ij = K(z_i, z_j) − K(z_i, −z_j),   z_i = x⁺_i − x⁻_i,

where K is the RBF kernel.  G is positive semi-definite, so coordinate
ascent on the most KKT-violating coordinates converges; the stationarity
check uses g = 1 − Gβ (half the true gradient, sign-preserving).
"""

from __future__ import annotations

import json
import logging
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from .corpus import rng_from_seed
from .features import FeatureConfig, ScalerParams

logger = logging.getLogger(__name__)

MAX_ITER_FLOOR = 10_000


class RankerError(ValueError):
    """Raised on malformed constraints, dimension mismatches or bad model files."""


@dataclass(frozen=True)
class TrainConfig:
    C: float = 1.0
    gamma: float | str = "auto"  # "auto" resolves to 1/num_features
    epsilon_tol: float = 0.001
    max_pairs_per_query: int = 500
    seed: int = 0
    max_iterations: int | None = None  # None → 10·n_constraints, floor 10,000
    kernel_degree: int = 3  # recorded for config fidelity; unused by the RBF kernel
    cache_rows: int = 4096

    def __post_init__(self):
        if self.C <= 0:
            raise RankerError(f"C must be positive, got {self.C}")
        if self.gamma != "auto" and (not isinstance(self.gamma, (int, float)) or self.gamma <= 0):
            raise RankerError(f"gamma must be 'auto' or positive, got {self.gamma!r}")
        if self.epsilon_tol <= 0:
            raise RankerError(f"epsilon_tol must be positive, got {self.epsilon_tol}")
        if self.max_pairs_per_query < 1:
            raise RankerError("max_pairs_per_query must be >= 1")

    def to_dict(self) -> dict:
        return {
            "C": self.C,
            "gamma": self.gamma,
            "epsilon_tol": self.epsilon_tol,
            "max_pairs_per_query": self.max_pairs_per_query,
            "seed": self.seed,
            "max_iterations": self.max_iterations,
            "kernel_degree": self.kernel_degree,
            "cache_rows": self.cache_rows,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        return cls(**d)


@dataclass(frozen=True)
class PairConstraint:
    query_id: str
    positive: np.ndarray
    negative: np.ndarray


def build_constraints(query_pools, config: TrainConfig) -> list[PairConstraint]:
    """Preference constraints from per-query pools.

    ``query_pools`` yields (query_id, candidates, gold_ids) where candidates
    is a list of (cand_id, vector) covering the pool with golds already
    injected.  Every gold × non-gold product pair becomes a constraint; pools
    exceeding max_pairs_per_query are subsampled deterministically.  Queries
    whose pool contains no gold are skipped with a warning.
    """
    constraints: list[PairConstraint] = []
    for query_id, candidates, gold_ids in sorted(query_pools, key=lambda q: q[0]):
        gold_ids = set(gold_ids)
        pos = [(cid, v) for cid, v in candidates if cid in gold_ids]
        neg = [(cid, v) for cid, v in candidates if cid not in gold_ids]
        if not pos:
            logger.warning("query %s: no gold candidate in pool, skipped", query_id)
            continue
        pos.sort(key=lambda cv: cv[0])
        neg.sort(key=lambda cv: cv[0])
        pairs = [(p, n) for p in pos for n in neg]
        if len(pairs) > config.max_pairs_per_query:
            rng = rng_from_seed(config.seed, _stable_hash(query_id))
            keep = sorted(rng.choice(len(pairs), config.max_pairs_per_query, replace=False))
            pairs = [pairs[int(i)] for i in keep]
        for (pid, pv), (nid, nv) in pairs:
            constraints.append(PairConstraint(query_id, pv, nv))
    return constraints


def _stable_hash(text: str) -> int:
    # 64-bit FNV-1a; Python's hash() is salted per process
    h = 0xCBF29CE484222325
    for b in text.encode("utf-8"):
        h = ((h ^ b) * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


@dataclass
class RankSVMModel:
    support: np.ndarray  # (n_support, dim) difference vectors
    multipliers: np.ndarray  # (n_support,) shared duals in [0, C]
    gamma: float
    C: float
    feature_config: FeatureConfig | None = None
    feature_config_hash: str = ""
    scaler: ScalerParams | None = None
    train_info: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return int(self.support.shape[1])

    @property
    def n_support(self) -> int:
        return int(self.support.shape[0])


class _KernelRows:
    """Lazily computed rows of G with least-recently-used eviction."""

    def __init__(self, z: np.ndarray, gamma: float, capacity: int):
        self.z = z
        self.gamma = gamma
        self.capacity = max(1, capacity)
        self.norms = np.einsum("ij,ij->i", z, z)
        self._rows: OrderedDict[int, np.ndarray] = OrderedDict()

    def row(self, i: int) -> np.ndarray:
        cached = self._rows.get(i)
        if cached is not None:
            self._rows.move_to_end(i)
            return cached
        dots = self.z @ self.z[i]
        base = self.norms + self.norms[i]
        row = np.exp(-self.gamma * (base - 2.0 * dots)) - np.exp(
            -self.gamma * (base + 2.0 * dots)
        )
        if len(self._rows) >= self.capacity:
            self._rows.popitem(last=False)
        self._rows[i] = row
        return row


def _count_contradictions(z: np.ndarray) -> int:
    # +0.0 canonicalizes -0.0 so byte keys compare consistently
    counts: dict[bytes, int] = {}
    n_zero = 0
    for row in z:
        if not row.any():
            n_zero += 1  # x⁺ == x⁻: self-contradictory preference
            continue
        key = (row + 0.0).tobytes()
        counts[key] = counts.get(key, 0) + 1
    n_opposed = 0
    for key, c in counts.items():
        arr = np.frombuffer(key, dtype=np.float64)
        n_opposed += c * counts.get((-arr + 0.0).tobytes(), 0)
    return n_zero + n_opposed // 2


def train(
    constraints,
    config: TrainConfig,
    feature_config: FeatureConfig | None = None,
    feature_config_hash: str = "",
    scaler: ScalerParams | None = None,
) -> RankSVMModel:
    """Solve the reduced symmetric dual by SMO-style coordinate ascent."""
    constraints = list(constraints)
    if not constraints:
        raise RankerError("train needs at least one constraint")
    dims = {c.positive.shape[0] for c in constraints} | {c.negative.shape[0] for c in constraints}
    if len(dims) != 1:
        raise RankerError(f"constraint vectors disagree on dimension: {sorted(dims)}")
    z = np.array([c.positive - c.negative for c in constraints], dtype=np.float64)
    if not np.all(np.isfinite(z)):
        raise RankerError("non-finite feature values in constraints")
    n, dim = z.shape
    gamma = 1.0 / dim if config.gamma == "auto" else float(config.gamma)
    C = float(config.C)
    tol = float(config.epsilon_tol)
    max_iter = config.max_iterations
    if max_iter is None:
        max_iter = max(MAX_ITER_FLOOR, 10 * n)

    contradictions = _count_contradictions(z)
    if contradictions:
        logger.warning("training set contains %d contradictory preference pairs", contradictions)

    kernel = _KernelRows(z, gamma, config.cache_rows)
    diag = 2.0 * (1.0 - np.exp(-4.0 * gamma * kernel.norms))
    beta = np.zeros(n, dtype=np.float64)
    g = np.ones(n, dtype=np.float64)  # g = 1 − Gβ; β = 0 initially

    def update(i: int) -> None:
        if diag[i] > 1e-300:
            target = beta[i] + g[i] / diag[i]
        else:
            # degenerate (zero) difference vector: objective is linear in β_i
            target = C if g[i] > 0 else 0.0
        new = min(max(target, 0.0), C)
        delta = new - beta[i]
        if delta != 0.0:
            beta[i] = new
            np.subtract(g, delta * kernel.row(i), out=g)

    iterations = 0
    violation = np.inf
    while iterations < max_iter:
        up_mask = beta < C
        down_mask = beta > 0.0
        viol_up = np.max(g[up_mask]) if up_mask.any() else -np.inf
        viol_down = -np.min(g[down_mask]) if down_mask.any() else -np.inf
        violation = max(viol_up, viol_down)
        if violation <= tol:
            break
        if viol_up >= viol_down:
            candidates = np.where(up_mask)[0]
            i = int(candidates[np.argmax(g[candidates])])
        else:
            candidates = np.where(down_mask)[0]
            i = int(candidates[np.argmin(g[candidates])])
        update(i)
        iterations += 1
    converged = violation <= tol
    if not converged:
        logger.warning(
            "SMO stopped at max_iterations=%d with KKT violation %.3g", max_iter, violation
        )

    keep = beta > 0.0
    info = {
        "n_constraints": n,
        "iterations": iterations,
        "converged": bool(converged),
        "kkt_violation": float(violation) if np.isfinite(violation) else 0.0,
        "contradictions": contradictions,
        "objective": float(dual_objective(z, beta, gamma)),
    }
    return RankSVMModel(
        support=z[keep].copy(),
        multipliers=beta[keep].copy(),
        gamma=gamma,
        C=C,
        feature_config=feature_config,
        feature_config_hash=feature_config_hash,
        scaler=scaler,
        train_info=info,
    )


def dual_objective(z: np.ndarray, beta: np.ndarray, gamma: float) -> float:
    """Full mirrored-problem dual value 2(Σβ − ½ βᵀGβ); O(n²), for diagnostics."""
    sq = np.einsum("ij,ij->i", z, z)
    dots = z @ z.T
    G = np.exp(-gamma * (sq[:, None] + sq[None, :] - 2 * dots)) - np.exp(
        -gamma * (sq[:, None] + sq[None, :] + 2 * dots)
    )
    return float(2.0 * (beta.sum() - 0.5 * beta @ G @ beta))


def decision(model: RankSVMModel, x: np.ndarray) -> float:
    """Σ β_j (K(z_j, x) − K(−z_j, x)); exactly antisymmetric in x."""
    x = np.asarray(x, dtype=np.float64)
    if model.n_support == 0:
        return 0.0
    if x.shape[0] != model.support.shape[1]:
        raise RankerError(
            f"vector has {x.shape[0]} dims, model expects {model.support.shape[1]}"
        )
    d_minus = model.support - x
    d_plus = model.support + x
    k_pos = np.exp(-model.gamma * np.einsum("ij,ij->i", d_minus, d_minus))
    k_neg = np.exp(-model.gamma * np.einsum("ij,ij->i", d_plus, d_plus))
    return float(model.multipliers @ (k_pos - k_neg))


def rerank(model: RankSVMModel, candidates) -> list[tuple[str, float]]:
    """Sort (cand_id, vector) pairs by decision descending; ties by id."""
    scored = [(cid, decision(model, vec)) for cid, vec in candidates]
    scored.sort(key=lambda cs: (-cs[1], cs[0]))
    return scored


# ---------------------------------------------------------------------------
# persistence


def save_model(model: RankSVMModel, path) -> None:
    payload = {
        "version": 1,
        "kind": "rbf-ranksvm",
        "gamma": model.gamma,
        "C": model.C,
        "dim": model.dim,
        "feature_config": model.feature_config.to_dict() if model.feature_config else None,
        "feature_config_hash": model.feature_config_hash,
        "scaler": model.scaler.to_dict() if model.scaler else None,
        "support_vectors": [[float(v) for v in row] for row in model.support],
        "multipliers": [float(b) for b in model.multipliers],
        "train_info": model.train_info,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_model(path) -> RankSVMModel:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("kind") != "rbf-ranksvm" or payload.get("version") != 1:
        raise RankerError(f"{path}: not a recognized model file")
    dim = int(payload["dim"])
    support = np.asarray(payload["support_vectors"], dtype=np.float64).reshape(-1, dim)
    multipliers = np.asarray(payload["multipliers"], dtype=np.float64)
    if support.shape[0] != multipliers.shape[0]:
        raise RankerError(f"{path}: {support.shape[0]} support vectors vs "
                          f"{multipliers.shape[0]} multipliers")
    fc = payload.get("feature_config")
    scaler = payload.get("scaler")
    return RankSVMModel(
        support=support,
        multipliers=multipliers,
        gamma=float(payload["gamma"]),
        C=float(payload["C"]),
        feature_config=FeatureConfig.from_dict(fc) if fc else None,
        feature_config_hash=payload.get("feature_config_hash", ""),
        scaler=ScalerParams.from_dict(scaler) if scaler else None,
        train_info=payload.get("train_info", {}),
    )

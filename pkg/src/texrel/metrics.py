"""Emergent-language evaluation: topographic similarity, cluster
precision/recall, lexicon size, TRE, pTRE, and generalization error.

Degenerate values (zero variance, empty denominators) are reported as
None, never silently coerced to a number.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .concepts import AttributeTuple, tuple_symbols

VOCAB_SIZE = 21
UTTERANCE_LENGTH = 10


@dataclass(frozen=True)
class Utterance:
    """Fixed-length sequence of token ids from a fixed vocabulary."""

    tokens: tuple[int, ...]
    vocab_size: int = VOCAB_SIZE

    def __post_init__(self):
        if not 2 <= self.vocab_size <= 255:
            raise ValueError("vocab_size must be in 2..255")
        if any(not 0 <= t < self.vocab_size for t in self.tokens):
            raise ValueError("token id out of vocabulary")

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass
class LanguageSample:
    """Aligned (meaning, utterance) pairs; the input to every metric."""

    pairs: list[tuple[AttributeTuple, Utterance]]

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("language sample is empty")
        task = self.pairs[0][0].task
        arity = self.pairs[0][0].arity
        shape = (self.pairs[0][1].vocab_size, len(self.pairs[0][1]))
        for meaning, utt in self.pairs:
            if meaning.task is not task or meaning.arity != arity:
                raise ValueError("meanings must share task and arity")
            if (utt.vocab_size, len(utt)) != shape:
                raise ValueError("utterances must share vocab size and length")

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def meanings(self) -> list[AttributeTuple]:
        return [m for m, _ in self.pairs]

    @property
    def utterances(self) -> list[Utterance]:
        return [u for _, u in self.pairs]

    def token_matrix(self) -> np.ndarray:
        return np.array([u.tokens for u in self.utterances], dtype=np.uint8)

    def meaning_matrix(self) -> np.ndarray:
        return np.array([m.values for m in self.meanings], dtype=np.int32)


def edit_distance(a, b) -> int:
    """Levenshtein distance with unit insert/delete/substitute costs."""
    ta = a.tokens if isinstance(a, Utterance) else tuple(a)
    tb = b.tokens if isinstance(b, Utterance) else tuple(b)
    return int(kernels.levenshtein(ta, tb))


def _average_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j < len(values) and sorted_vals[j] == sorted_vals[i]:
            j += 1
        ranks[order[i:j]] = (i + j - 1) / 2.0
        i = j
    return ranks


def spearman(xs: Sequence[float], ys: Sequence[float]) -> Optional[float]:
    """Rank correlation with average ties; None when either side has zero
    variance.  Identical (reversed) rank vectors return exactly +1 (-1)."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise ValueError("spearman needs two equal-length lists of >= 2 values")
    if np.all(x == x[0]) or np.all(y == y[0]):
        return None
    rx = _average_ranks(x)
    ry = _average_ranks(y)
    if np.array_equal(rx, ry):
        return 1.0
    if np.array_equal(rx + ry, np.full_like(rx, len(rx) - 1)):
        return -1.0
    rx -= rx.mean()
    ry -= ry.mean()
    return float((rx * ry).sum() / np.sqrt((rx * rx).sum() * (ry * ry).sum()))


def pairwise_meaning_distances(sample: LanguageSample) -> np.ndarray:
    """Condensed (i<j) slot-wise meaning distances."""
    values = sample.meaning_matrix()
    iu, ju = np.triu_indices(len(values), k=1)
    return (values[iu] != values[ju]).sum(axis=1).astype(np.int32)


def pairwise_edit_distances(sample: LanguageSample) -> np.ndarray:
    """Condensed (i<j) Levenshtein distances."""
    return kernels.pairwise_levenshtein(sample.token_matrix())


def topographic_similarity(sample: LanguageSample) -> Optional[float]:
    """Spearman correlation between pairwise meaning distances and pairwise
    utterance edit distances, over all unordered pairs (duplicates
    included).  None when either distance list is constant."""
    if len(sample) < 2:
        raise ValueError("need at least 2 pairs")
    return spearman(pairwise_meaning_distances(sample), pairwise_edit_distances(sample))


def cluster_precision_recall(
    sample: LanguageSample,
) -> tuple[Optional[float], Optional[float]]:
    """Pairwise agreement between identical-utterance clusters (predicted)
    and identical-meaning clusters (ground truth).

    precision = tp/(tp+fp), recall = tp/(tp+fn); a zero denominator yields
    None.  Computed from cluster sizes; tests check it against an O(n^2)
    pair-enumeration oracle.
    """
    if len(sample) < 2:
        raise ValueError("need at least 2 pairs")
    utt_sizes = Counter(u.tokens for u in sample.utterances)
    meaning_sizes = Counter(m.values for m in sample.meanings)
    joint_sizes = Counter((m.values, u.tokens) for m, u in sample.pairs)

    def same_pairs(sizes: Counter) -> int:
        return sum(n * (n - 1) // 2 for n in sizes.values())

    tp = same_pairs(joint_sizes)
    tp_fp = same_pairs(utt_sizes)
    tp_fn = same_pairs(meaning_sizes)
    precision = tp / tp_fp if tp_fp else None
    recall = tp / tp_fn if tp_fn else None
    return precision, recall


def lexicon_size(sample: LanguageSample) -> int:
    """Number of distinct utterances in the sample."""
    return len({u.tokens for u in sample.utterances})


@dataclass(frozen=True)
class TreConfig:
    learning_rate: float = 0.1
    max_steps: int = 3000
    epsilon: float = 1e-6

    def __post_init__(self):
        if self.learning_rate <= 0 or self.max_steps < 1 or self.epsilon < 0:
            raise ValueError("TRE config values must be positive")


@dataclass(frozen=True)
class TreFit:
    """Result of the additive-composition fit; score is the final mean L1
    residual, loss_curve the accepted (non-increasing) objective sequence."""

    score: float
    loss_curve: tuple[float, ...]
    primitives: tuple[str, ...] = field(repr=False, default=())


_HUBER_DELTA = 0.5


def _count_vectors(sample: LanguageSample) -> np.ndarray:
    vocab = sample.utterances[0].vocab_size
    out = np.zeros((len(sample), vocab), dtype=np.float64)
    for i, u in enumerate(sample.utterances):
        for t in u.tokens:
            out[i, t] += 1.0
    return out


def tre_fit(sample: LanguageSample, cfg: TreConfig = TreConfig()) -> TreFit:
    """Tree reconstruction error under additive composition.

    Each meaning composes as the sum of learned per-symbol vectors (its
    annotation-tree leaves plus root symbol); utterances are represented by
    token-count vectors; the score is the mean L1 residual.  From zero
    init, the fit first attempts a least-squares jump (accepted only if it
    improves, which it always does for additively consistent languages,
    where it lands on an exact interpolant), then descends a Huber-smoothed
    surrogate of the L1 objective (a raw sign subgradient is not a descent
    direction at the kinks where most coordinates start) with
    reject-and-halve backtracking from cfg.learning_rate, until the L1
    residual falls below cfg.epsilon or no descent step exists.  The
    surrogate shares its zero set with the L1 loss and the recorded curve
    never increases by construction.
    """
    symbol_lists = [tuple_symbols(m) for m in sample.meanings]
    primitives = sorted({s for symbols in symbol_lists for s in symbols})
    index = {s: i for i, s in enumerate(primitives)}
    n = len(sample)
    membership = np.zeros((n, len(primitives)), dtype=np.float64)
    for i, symbols in enumerate(symbol_lists):
        for s in symbols:
            membership[i, index[s]] += 1.0
    targets = _count_vectors(sample)

    def l1_loss(emb: np.ndarray) -> float:
        return float(np.abs(membership @ emb - targets).sum(axis=1).mean())

    def surrogate(emb: np.ndarray) -> float:
        a = np.abs(membership @ emb - targets)
        h = np.where(a <= _HUBER_DELTA, a * a / (2 * _HUBER_DELTA), a - _HUBER_DELTA / 2)
        return float(h.sum(axis=1).mean())

    embeddings = np.zeros((len(primitives), targets.shape[1]), dtype=np.float64)
    curve = [surrogate(embeddings)]
    step = cfg.learning_rate
    steps = 0
    jump, *_ = np.linalg.lstsq(membership, targets, rcond=None)
    if steps < cfg.max_steps:
        steps += 1
        if surrogate(jump) < curve[-1]:
            embeddings = jump
            curve.append(surrogate(jump))
    while steps < cfg.max_steps and l1_loss(embeddings) > cfg.epsilon:
        residual = membership @ embeddings - targets
        grad = membership.T @ np.clip(residual / _HUBER_DELTA, -1.0, 1.0) / n
        if not grad.any():
            break
        accepted = False
        while steps < cfg.max_steps:
            trial = embeddings - step * grad
            trial_loss = surrogate(trial)
            steps += 1
            if trial_loss < curve[-1]:
                embeddings = trial
                curve.append(trial_loss)
                accepted = True
                step *= 2.0
                break
            step /= 2.0
            if step < 1e-30:
                break
        if not accepted:
            break
    return TreFit(
        score=l1_loss(embeddings), loss_curve=tuple(curve), primitives=tuple(primitives)
    )


def ptre(tre: float, precision: Optional[float]) -> Optional[float]:
    """TRE divided by cluster precision; None when precision is undefined
    or zero."""
    if precision is None or precision == 0:
        return None
    return tre / precision


def generalization_error(acc_same: float, acc_new: float) -> float:
    """Accuracy gap between seen-item and held-out-item evaluation."""
    for v in (acc_same, acc_new):
        if not 0.0 <= v <= 1.0:
            raise ValueError("accuracies must be in [0, 1]")
    return acc_same - acc_new


@dataclass
class MetricsReport:
    rho: Optional[float]
    precision: Optional[float]
    recall: Optional[float]
    lexicon_size: int
    tre: float
    ptre: Optional[float]
    generalization_error: Optional[float] = None

    def to_json_dict(self) -> dict:
        out: dict = {"lexicon_size": self.lexicon_size, "tre": self.tre}
        for key in ("rho", "precision", "recall", "ptre", "generalization_error"):
            value = getattr(self, key)
            out[key] = 0.0 if value is None else value
            out[f"{key}_defined"] = value is not None
        return out


def evaluate_language(sample: LanguageSample, tre_cfg: TreConfig = TreConfig()) -> MetricsReport:
    """All sample-level metrics in one pass (generalization error is filled
    in by callers that also ran a referential evaluation)."""
    precision, recall = cluster_precision_recall(sample)
    fit = tre_fit(sample, tre_cfg)
    return MetricsReport(
        rho=topographic_similarity(sample),
        precision=precision,
        recall=recall,
        lexicon_size=lexicon_size(sample),
        tre=fit.score,
        ptre=ptre(fit.score, precision),
    )

"""Multinomial naive Bayes over token lists, with add-alpha smoothing."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .graph import ClanError


@dataclass(frozen=True)
class TokenClassifierModel:
    classes: tuple[int, ...]
    log_priors: np.ndarray = field(repr=False)
    # shape (n_classes, n_vocab)
    log_likelihood_table: np.ndarray = field(repr=False)
    vocab_index: Mapping[str, int] = field(repr=False)
    smoothing_alpha: float = 1.0

    @property
    def vocabulary(self) -> frozenset[str]:
        return frozenset(self.vocab_index)

    @property
    def log_prior_map(self) -> dict[int, float]:
        return dict(zip(self.classes, self.log_priors.tolist()))

    def log_likelihood(self, cls: int, token: str) -> float:
        return float(self.log_likelihood_table[self.classes.index(cls), self.vocab_index[token]])

    def posteriors(self, tokens: Iterable[str]) -> np.ndarray:
        """Normalised class posteriors; out-of-vocabulary tokens are ignored."""
        counts = Counter(t for t in tokens if t in self.vocab_index)
        scores = self.log_priors.copy()
        if counts:
            idx = np.fromiter((self.vocab_index[t] for t in counts), dtype=np.int64)
            n = np.fromiter(counts.values(), dtype=np.float64)
            scores = scores + self.log_likelihood_table[:, idx] @ n
        scores -= scores.max()
        p = np.exp(scores)
        return p / p.sum()


def train_from_documents(
    documents: Mapping[int, Sequence[Sequence[str]]], alpha: float = 1.0
) -> TokenClassifierModel:
    """Fit the model from ``class -> list of token lists``.

    Priors follow the number of documents per class (empty documents count),
    likelihoods are ``(count + alpha) / (class_total + alpha * |V|)``.
    """
    if not alpha > 0:
        raise ClanError("alpha must be > 0")
    classes = tuple(sorted(documents))
    if not classes:
        raise ClanError("no classes to train on")
    vocab = sorted({t for docs in documents.values() for doc in docs for t in doc})
    if not vocab:
        raise ClanError("no training features")
    vocab_index = {t: i for i, t in enumerate(vocab)}

    counts = np.zeros((len(classes), len(vocab)))
    n_docs = np.zeros(len(classes))
    for row, c in enumerate(classes):
        n_docs[row] = len(documents[c])
        for doc in documents[c]:
            for t in doc:
                counts[row, vocab_index[t]] += 1
    if not (n_docs > 0).all():
        raise ClanError("every class needs at least one document")

    smoothed = counts + alpha
    log_lik = np.log(smoothed) - np.log(smoothed.sum(axis=1, keepdims=True))
    log_priors = np.log(n_docs) - np.log(n_docs.sum())
    return TokenClassifierModel(classes, log_priors, log_lik, vocab_index, float(alpha))


def classify_node(model: TokenClassifierModel, tokens: Iterable[str]) -> tuple[int, float]:
    """Argmax-posterior class and its posterior.

    With no in-vocabulary tokens this reduces to the largest prior. Exact
    ties go to the lowest class id.
    """
    post = model.posteriors(tokens)
    best = int(np.argmax(post))
    return model.classes[best], float(post[best])

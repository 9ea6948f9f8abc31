"""Mô hình ngẫu nhiên và phép liệt kê vét cạn dùng làm đối chứng trong kiểm thử"""
import itertools
from typing import Sequence, Tuple

import numpy as np

from app.services.hmm_model import HmmModel, Tagset


def random_model(
    rng: np.random.Generator,
    n_tags: int,
    n_words: int,
    sparsity: float = 0.3,
    closed: Sequence[str] = (),
) -> HmmModel:
    names = [f"T{k}" for k in range(n_tags)]
    tagset = Tagset.from_names(names, closed)
    initial = rng.dirichlet(np.ones(n_tags))
    transitions = rng.dirichlet(np.ones(n_tags), size=n_tags)
    emissions = rng.dirichlet(np.ones(n_words), size=n_tags).T
    mask = rng.random((n_words, n_tags)) < sparsity
    # mỗi từ giữ ít nhất một nhãn
    mask[np.arange(n_words), rng.integers(n_tags, size=n_words)] = False
    emissions[mask] = 0.0
    vocabulary = [f"w{k}" for k in range(n_words)]
    return HmmModel(tagset, initial, transitions, vocabulary, emissions)


def generator_model(rng: np.random.Generator, n_tags: int = 6, n_words: int = 60) -> HmmModel:
    """Mô hình sinh cho kiểm thử hiệu chỉnh: chuyển nhãn khá phẳng, mỗi từ có 2-3 nhãn"""
    names = [f"T{k}" for k in range(n_tags)]
    tagset = Tagset.from_names(names)
    initial = rng.dirichlet(np.full(n_tags, 5.0))
    transitions = rng.dirichlet(np.full(n_tags, 5.0), size=n_tags)
    weights = np.zeros((n_words, n_tags))
    for row in range(n_words):
        tags = rng.choice(n_tags, size=int(rng.integers(2, 4)), replace=False)
        weights[row, tags] = rng.uniform(0.2, 1.0, size=len(tags))
    # tag nào cũng phải phát ra ít nhất một từ
    for k in range(n_tags):
        if weights[:, k].sum() == 0.0:
            weights[k % n_words, k] = 0.5
    emissions = weights / weights.sum(axis=0, keepdims=True)
    vocabulary = [f"w{k}" for k in range(n_words)]
    return HmmModel(tagset, initial, transitions, vocabulary, emissions)


def enumerate_paths(model: HmmModel, sentence: Sequence[str]) -> Tuple[np.ndarray, np.ndarray]:
    """Mọi dãy nhãn cùng trọng số pi(t1)e(w1|t1) * prod A(t_{i-1}, t_i) e(w_i|t_i)"""
    obs, _ = model.observation_matrix(sentence)
    paths = np.array(list(itertools.product(range(model.n_tags), repeat=len(sentence))))
    weights = model.initial[paths[:, 0]] * obs[0, paths[:, 0]]
    for t in range(1, len(sentence)):
        weights = weights * model.transitions[paths[:, t - 1], paths[:, t]] * obs[t, paths[:, t]]
    return paths, weights


def path_weight(model: HmmModel, sentence: Sequence[str], path: Sequence[int]) -> float:
    obs, _ = model.observation_matrix(sentence)
    weight = model.initial[path[0]] * obs[0, path[0]]
    for t in range(1, len(sentence)):
        weight = weight * model.transitions[path[t - 1], path[t]] * obs[t, path[t]]
    return float(weight)


def enumerated_marginals(model: HmmModel, sentence: Sequence[str]) -> np.ndarray:
    paths, weights = enumerate_paths(model, sentence)
    marginals = np.zeros((len(sentence), model.n_tags))
    for t in range(len(sentence)):
        np.add.at(marginals[t], paths[:, t], weights)
    return marginals / weights.sum()


def random_sentence(rng: np.random.Generator, model: HmmModel, length: int):
    return [model.vocabulary[k] for k in rng.integers(len(model.vocabulary), size=length)]

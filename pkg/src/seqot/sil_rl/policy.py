"""Autoregressive softmax policies over toy token environments.

Both policy classes condition each step on (position, previous token); the
tabular kind keeps one logit row per (position, previous) pair while the
linear kind adds a position column and a previous-token column of a weight
matrix, which ties parameters across contexts. Exact log-probability
gradients are available in closed form, which keeps finite-difference and
enumeration oracles cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from ..embeddings import EmbeddingTable
from .envs import ToyEnv


class PolicyKind(str, Enum):
    TABULAR = "tabular"
    LINEAR = "linear"


@dataclass
class Policy:
    """Flat-parameter softmax policy; ``params`` must stay finite."""

    kind: PolicyKind
    vocab_size: int
    horizon: int
    params: np.ndarray
    temperature: float = 1.0

    def __post_init__(self):
        self.params = np.asarray(self.params, dtype=float)
        expected = self.num_params(self.kind, self.vocab_size, self.horizon)
        if self.params.shape != (expected,):
            raise ValueError(f"params must have shape ({expected},), got {self.params.shape}")
        if not np.all(np.isfinite(self.params)):
            raise ValueError("policy logits must be finite")
        if not self.temperature > 0:
            raise ValueError("temperature must be positive")

    # previous-token index used at position 0
    @property
    def start_index(self) -> int:
        return self.vocab_size

    @staticmethod
    def num_params(kind: PolicyKind, vocab_size: int, horizon: int) -> int:
        if kind is PolicyKind.TABULAR:
            return horizon * (vocab_size + 1) * vocab_size
        return vocab_size * (horizon + vocab_size + 1)

    @classmethod
    def tabular(cls, vocab_size: int, horizon: int, temperature: float = 1.0) -> "Policy":
        size = cls.num_params(PolicyKind.TABULAR, vocab_size, horizon)
        return cls(PolicyKind.TABULAR, vocab_size, horizon, np.zeros(size), temperature)

    @classmethod
    def linear(cls, vocab_size: int, horizon: int, temperature: float = 1.0) -> "Policy":
        size = cls.num_params(PolicyKind.LINEAR, vocab_size, horizon)
        return cls(PolicyKind.LINEAR, vocab_size, horizon, np.zeros(size), temperature)

    def copy(self) -> "Policy":
        return Policy(self.kind, self.vocab_size, self.horizon, self.params.copy(), self.temperature)

    def _table(self) -> np.ndarray:
        return self.params.reshape(self.horizon, self.vocab_size + 1, self.vocab_size)

    def _weights(self) -> np.ndarray:
        return self.params.reshape(self.vocab_size, self.horizon + self.vocab_size + 1)

    def logits(self, position: int, prev: int) -> np.ndarray:
        if self.kind is PolicyKind.TABULAR:
            return self._table()[position, prev]
        w = self._weights()
        return w[:, position] + w[:, self.horizon + prev]

    def logits_batch(self, position: int, prev: np.ndarray) -> np.ndarray:
        if self.kind is PolicyKind.TABULAR:
            return self._table()[position, prev]
        w = self._weights()
        return w[:, position][None, :] + w[:, self.horizon + prev].T

    def step_probs(self, position: int, prev: int) -> np.ndarray:
        return _softmax(self.logits(position, prev) / self.temperature)

    def step_probs_batch(self, position: int, prev: np.ndarray) -> np.ndarray:
        return _softmax(self.logits_batch(position, prev) / self.temperature, axis=1)

    def step_logprobs(self, tokens: Sequence[int]) -> np.ndarray:
        """Per-step log pi(y_t | position, previous token)."""
        out = np.empty(len(tokens))
        prev = self.start_index
        for t, tok in enumerate(tokens):
            probs = self.step_probs(t, prev)
            out[t] = np.log(probs[tok])
            prev = tok
        return out

    def log_prob(self, tokens: Sequence[int]) -> float:
        return float(self.step_logprobs(tokens).sum())

    def grad_log_prob(self, tokens: Sequence[int]) -> np.ndarray:
        """Exact gradient of log pi(tokens) w.r.t. the flat parameters."""
        grad = np.zeros_like(self.params)
        prev = self.start_index
        if self.kind is PolicyKind.TABULAR:
            view = grad.reshape(self.horizon, self.vocab_size + 1, self.vocab_size)
            for t, tok in enumerate(tokens):
                probs = self.step_probs(t, prev)
                row = -probs / self.temperature
                row[tok] += 1.0 / self.temperature
                view[t, prev] += row
                prev = tok
        else:
            view = grad.reshape(self.vocab_size, self.horizon + self.vocab_size + 1)
            for t, tok in enumerate(tokens):
                probs = self.step_probs(t, prev)
                row = -probs / self.temperature
                row[tok] += 1.0 / self.temperature
                view[:, t] += row
                view[:, self.horizon + prev] += row
                prev = tok
        return grad


def _softmax(logits: np.ndarray, axis: int = -1) -> np.ndarray:
    shifted = logits - logits.max(axis=axis, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=axis, keepdims=True)


@dataclass(frozen=True)
class Trajectory:
    """One sampled episode: tokens, their step log-probs, and the final reward."""

    condition: int | None
    tokens: tuple[int, ...]
    step_logprobs: np.ndarray
    reward: float


def sample_trajectories(
    policy: Policy,
    env: ToyEnv,
    count: int,
    rng: np.random.Generator | int,
) -> list[Trajectory]:
    """Draw ``count`` i.i.d. trajectories; deterministic given the seed.

    In conditional environments one condition id is drawn per call and
    shared by the whole batch (matching the per-condition batching of the
    training loop).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    condition = None
    if env.conditional:
        ids = env.condition_ids()
        condition = ids[int(gen.integers(0, len(ids)))]

    tokens = np.empty((count, env.horizon), dtype=int)
    logprobs = np.empty((count, env.horizon))
    prev = np.full(count, policy.start_index)
    for t in range(env.horizon):
        probs = policy.step_probs_batch(t, prev)
        draws = gen.random(count)
        cdf = probs.cumsum(axis=1)
        chosen = (cdf > draws[:, None]).argmax(axis=1)
        chosen[cdf[:, -1] <= draws] = env.vocab_size - 1  # cdf[-1] may round below 1
        logprobs[:, t] = np.log(probs[np.arange(count), chosen])
        tokens[:, t] = chosen
        prev = chosen

    out = []
    for i in range(count):
        seq = tuple(int(x) for x in tokens[i])
        out.append(
            Trajectory(
                condition=condition,
                tokens=seq,
                step_logprobs=logprobs[i].copy(),
                reward=env.reward(seq, condition),
            )
        )
    return out


def greedy_decode(policy: Policy, env: ToyEnv, condition: int | None = None) -> Trajectory:
    """Argmax decode; exact logit ties resolve to the lowest token id."""
    tokens = []
    logprobs = np.empty(env.horizon)
    prev = policy.start_index
    for t in range(env.horizon):
        probs = policy.step_probs(t, prev)
        tok = int(np.argmax(probs))
        logprobs[t] = np.log(probs[tok])
        tokens.append(tok)
        prev = tok
    return Trajectory(
        condition=condition,
        tokens=tuple(tokens),
        step_logprobs=logprobs,
        reward=env.reward(tokens, condition),
    )


def soft_argmax(logits: Sequence[float], table: EmbeddingTable, beta: float) -> np.ndarray:
    """Temperature-sharpened softmax mix of the table's embedding rows.

    The i-th logit corresponds to the i-th token of the table (insertion
    order). As ``beta`` shrinks the mix approaches the argmax embedding.
    """
    values = np.asarray(logits, dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValueError("logits must be finite")
    if not beta > 0:
        raise ValueError("beta must be positive")
    if len(values) != len(table):
        raise ValueError(f"got {len(values)} logits for a table of {len(table)} tokens")
    weights = _softmax(values / beta)
    return weights @ table.matrix()

"""Policy-gradient estimators: plain baseline REINFORCE plus the indirect
and direct self-imitation updates.

All gradients point in the ascent direction. The indirect update augments
each sampled trajectory's advantage with a gated, plan-weighted similarity
to buffered high-reward sequences; the direct update replays buffered
sequences themselves with positively clamped advantages. Ablation variants
replace the transport machinery with uniform weights over mean-embedding
similarities.
"""

from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np

from ..embeddings import EmbeddingTable
from ..nested import nested_wasserstein
from ..text_metrics import naive_semantic_score
from .buffer import BufferEntry
from .config import SilConfig, SilVariant
from .envs import ToyEnv
from .policy import Policy, Trajectory


def reinforce_grad(trajs: Sequence[Trajectory], policy: Policy, baseline: float) -> np.ndarray:
    """Mean of ``(reward - baseline) * grad log pi`` over the batch."""
    if not trajs:
        raise ValueError("need at least one trajectory")
    grad = np.zeros_like(policy.params)
    for traj in trajs:
        grad += (traj.reward - baseline) * policy.grad_log_prob(traj.tokens)
    return grad / len(trajs)


def _words(tokens: Sequence[int]) -> list[str]:
    return [str(t) for t in tokens]


def _pair_weights_and_rewards(
    trajs: Sequence[Trajectory],
    buffer_sample: Sequence[BufferEntry],
    table: EmbeddingTable,
    config: SilConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """Outer coupling weights and pairwise similarity matrix (K x K')."""
    k, k_prime = len(trajs), len(buffer_sample)
    if config.variant is SilVariant.SIL_I_NOW:
        weights = np.full((k, k_prime), 1.0 / (k * k_prime))
        rewards = np.array(
            [
                [naive_semantic_score(table, _words(t.tokens), _words(e.tokens)) for e in buffer_sample]
                for t in trajs
            ]
        )
        return weights, rewards
    result = nested_wasserstein(
        table,
        [_words(t.tokens) for t in trajs],
        [_words(e.tokens) for e in buffer_sample],
        config.ot,
    )
    return result.outer_plan.values, result.seq_reward_matrix


def wsil_i_grad(
    trajs: Sequence[Trajectory],
    buffer_sample: Sequence[BufferEntry],
    policy: Policy,
    table: EmbeddingTable,
    config: SilConfig,
    baseline: float,
) -> np.ndarray:
    """Combined RL + indirect self-imitation ascent gradient.

    Trajectory k's total coefficient is ``(r_k - baseline) + lambda *
    sum_j w_kj * s_kj * I[score(b_j) > r_k]`` where ``w`` is the outer
    coupling, ``s`` the pairwise similarity, and the indicator gates each
    buffer partner independently, so only higher-scoring history is
    imitated. The batch mean of coefficient-weighted score gradients is
    returned; with ``lambda_sil == 0`` (or every gate closed) the result is
    bitwise identical to :func:`reinforce_grad`.
    """
    if not buffer_sample:
        raise ValueError("buffer sample must be nonempty (skip the SIL step instead)")
    rl = reinforce_grad(trajs, policy, baseline)
    if config.lambda_sil == 0.0:
        return rl

    gate = np.array(
        [[entry.reward > traj.reward for entry in buffer_sample] for traj in trajs]
    )
    if not gate.any():
        return rl

    weights, rewards = _pair_weights_and_rewards(trajs, buffer_sample, table, config)
    coef = config.lambda_sil * (weights * rewards * gate).sum(axis=1)
    sil = np.zeros_like(policy.params)
    for traj, c in zip(trajs, coef):
        if c != 0.0:
            sil += c * policy.grad_log_prob(traj.tokens)
    return rl + sil / len(trajs)


def wsil_d_grad(
    buffer_sample: Sequence[BufferEntry],
    refs: Sequence[Sequence[int]],
    policy: Policy,
    table: EmbeddingTable,
    config: SilConfig,
) -> np.ndarray:
    """Direct self-imitation ascent gradient on buffered sequences.

    Each buffer sequence is scored against the reference set (plan-weighted
    pairwise rewards, or mean-embedding similarity for the ablation), the
    batch mean of those scores serves as the baseline, and only positive
    advantages contribute: ``lambda * sum_j (score_j - mean)_+ *
    grad log pi(b_j)``. With a single entry the advantage is exactly zero,
    so the direct update needs at least two buffer samples to act.
    """
    if not buffer_sample:
        raise ValueError("buffer sample must be nonempty (skip the SIL step instead)")
    if not refs:
        raise ValueError("direct self-imitation needs a nonempty reference set")
    if config.lambda_sil == 0.0:
        return np.zeros_like(policy.params)

    if config.variant is SilVariant.SIL_D_NOW:
        scores = np.array(
            [
                np.mean([naive_semantic_score(table, _words(e.tokens), _words(r)) for r in refs])
                for e in buffer_sample
            ]
        )
    else:
        result = nested_wasserstein(
            table,
            [_words(e.tokens) for e in buffer_sample],
            [_words(r) for r in refs],
            config.ot,
        )
        scores = result.per_hyp_reward

    advantages = np.maximum(scores - scores.mean(), 0.0)
    grad = np.zeros_like(policy.params)
    for entry, adv in zip(buffer_sample, advantages):
        if adv > 0.0:
            grad += adv * policy.grad_log_prob(entry.tokens)
    return config.lambda_sil * grad


def enumerate_sequences(env: ToyEnv) -> list[tuple[int, ...]]:
    """All V^T token sequences of the environment (capped at 4096)."""
    total = env.vocab_size**env.horizon
    if total > 4096:
        raise ValueError(f"enumeration of {total} sequences exceeds the 4096 cap")
    return [tuple(seq) for seq in itertools.product(range(env.vocab_size), repeat=env.horizon)]


def exact_policy_gradient(
    policy: Policy,
    env: ToyEnv,
    baseline: float = 0.0,
    condition: int | None = None,
) -> np.ndarray:
    """Exact ascent gradient by full enumeration (testing oracle).

    Computes ``sum_Y pi(Y) (r(Y) - baseline) grad log pi(Y)`` over every
    sequence the environment admits.
    """
    grad = np.zeros_like(policy.params)
    for seq in enumerate_sequences(env):
        prob = math.exp(policy.log_prob(seq))
        grad += prob * (env.reward(seq, condition) - baseline) * policy.grad_log_prob(seq)
    return grad


def exact_expected_reward(policy: Policy, env: ToyEnv, condition: int | None = None) -> float:
    """Exact E[r(Y)] by full enumeration (testing oracle)."""
    return float(
        sum(
            math.exp(policy.log_prob(seq)) * env.reward(seq, condition)
            for seq in enumerate_sequences(env)
        )
    )

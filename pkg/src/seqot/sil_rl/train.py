"""The alternating RL / self-imitation training loop.

Every loop iteration samples a fresh batch, refreshes the replay buffer,
and then applies exactly one gradient update: either plain baseline
REINFORCE or the configured self-imitation update, chosen by an exact
rational credit schedule (one SIL update per 1/ratio RL updates, ramping as
configured). All randomness flows from the config seed through separate
trajectory/buffer streams, so runs are bit-reproducible and a zero
imitation weight leaves the parameter trajectory identical to plain
REINFORCE.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .buffer import BufferCriterion, ReplayBuffer, buffer_update
from .config import BaselineMode, Schedule, SilConfig, SilVariant
from .envs import ToyEnv
from .gradients import reinforce_grad, wsil_d_grad, wsil_i_grad
from .policy import Policy, PolicyKind, Trajectory, greedy_decode, sample_trajectories


@dataclass
class TrainResult:
    policy: Policy
    buffer: ReplayBuffer
    records: list[dict]
    rl_steps: int
    sil_steps: int

    def final_mean_reward(self, tail: int = 100) -> float:
        tail_records = self.records[-tail:]
        return float(np.mean([r["mean_reward"] for r in tail_records]))


def schedule_ratio(schedule: Schedule, iteration: int) -> Fraction:
    """Exact SIL-per-RL ratio at a loop iteration (linear ramp)."""
    initial = Fraction(str(schedule.initial))
    final = Fraction(str(schedule.final))
    if schedule.ramp_steps == 0:
        return final
    progress = Fraction(min(iteration, schedule.ramp_steps), schedule.ramp_steps)
    return initial + (final - initial) * progress


def schedule_kinds(schedule: Schedule, steps: int) -> list[str]:
    """The exact rl/sil decision sequence the trainer will realize."""
    kinds = []
    credit = Fraction(0)
    for i in range(steps):
        if credit >= 1:
            kinds.append("sil")
            credit -= 1
        else:
            kinds.append("rl")
            credit += schedule_ratio(schedule, i)
    return kinds


def pretrain_mle(policy: Policy, env: ToyEnv, smoothing: float = 1.0) -> Policy:
    """Fit the policy to the environment's reference corpus by count
    normalization (additively smoothed); logits become log-frequencies.

    The tabular kind fits every (position, previous-token) context; the
    linear kind can only absorb a position-independent previous-token
    model, so it receives the pooled first-order fit in its
    previous-token block.
    """
    refs = [ref for cond in env.references.values() for ref in cond]
    if not refs:
        raise ValueError("pretraining needs a nonempty reference corpus")
    v, horizon, start = env.vocab_size, env.horizon, policy.start_index

    if policy.kind is PolicyKind.TABULAR:
        counts = np.full((horizon, v + 1, v), smoothing)
        for ref in refs:
            prev = start
            for t, tok in enumerate(ref[:horizon]):
                counts[t, prev, tok] += 1.0
                prev = tok
        probs = counts / counts.sum(axis=2, keepdims=True)
        params = (policy.temperature * np.log(probs)).ravel()
    else:
        counts = np.full((v + 1, v), smoothing)
        for ref in refs:
            prev = start
            for tok in ref[:horizon]:
                counts[prev, tok] += 1.0
                prev = tok
        probs = counts / counts.sum(axis=1, keepdims=True)
        weights = np.zeros((v, horizon + v + 1))
        weights[:, horizon:] = policy.temperature * np.log(probs).T
        params = weights.ravel()
    return Policy(policy.kind, v, horizon, params, policy.temperature)


def _default_capacity(config: SilConfig, env: ToyEnv) -> int:
    if config.buffer_capacity is not None:
        return config.buffer_capacity
    return 5 if env.conditional else 64


def _batch_baseline(
    trajs: Sequence[Trajectory],
    config: SilConfig,
    policy: Policy,
    env: ToyEnv,
    running: float,
) -> float:
    if config.baseline_mode is BaselineMode.GREEDY:
        return greedy_decode(policy, env, trajs[0].condition).reward
    return running


def train(env: ToyEnv, policy: Policy, config: SilConfig, steps: int, on_step=None) -> TrainResult:
    """Run ``steps`` loop iterations and return the final policy plus logs.

    Each record carries (step, kind, mean reward, baseline, buffer
    min/max/size, gradient norm, wall time). Wall time is the only
    non-deterministic field; persisted logs drop it (see the CLI).
    ``on_step(step, kind, policy)``, if given, observes the policy right
    after each update.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    root = np.random.SeedSequence(config.seed)
    traj_stream, buffer_stream = [np.random.default_rng(s) for s in root.spawn(2)]

    policy = policy.copy()
    if config.pretrain:
        policy = pretrain_mle(policy, env, config.pretrain_smoothing)

    buffer = ReplayBuffer(capacity=_default_capacity(config, env), dedupe=config.buffer_dedupe)
    kinds = schedule_kinds(config.schedule, steps)
    running_baseline = 0.0
    records: list[dict] = []
    rl_steps = sil_steps = 0

    for step, kind in enumerate(kinds):
        started = time.perf_counter()
        trajs = sample_trajectories(policy, env, config.k, traj_stream)
        condition = trajs[0].condition
        rewards = np.array([t.reward for t in trajs])
        if step == 0 and config.baseline_mode is BaselineMode.CONSTANT:
            running_baseline = float(rewards.mean())
        baseline = _batch_baseline(trajs, config, policy, env, running_baseline)

        buffer_update(buffer, trajs, config.buffer_criterion, env=env,
                      bleu_order=config.bleu_order, step=step)

        if kind == "sil":
            sample = buffer.sample(config.k_prime, buffer_stream, condition)
            if config.variant in (SilVariant.WSIL_I, SilVariant.SIL_I_NOW):
                grad = wsil_i_grad(trajs, sample, policy, env.table, config, baseline)
            else:
                refs = env.references_for(condition)
                grad = wsil_d_grad(sample, refs, policy, env.table, config)
            sil_steps += 1
        else:
            grad = reinforce_grad(trajs, policy, baseline)
            rl_steps += 1

        policy.params = policy.params + config.learning_rate * grad
        decay = config.baseline_decay
        running_baseline = decay * running_baseline + (1.0 - decay) * float(rewards.mean())
        if on_step is not None:
            on_step(step, kind, policy)

        records.append(
            {
                "step": step,
                "kind": kind,
                "mean_reward": float(rewards.mean()),
                "baseline": float(baseline),
                "buffer_min": buffer.min_reward(condition),
                "buffer_max": buffer.max_reward(condition),
                "buffer_size": len(buffer),
                "grad_norm": float(np.linalg.norm(grad)),
                "wall_time_ms": (time.perf_counter() - started) * 1000.0,
            }
        )

    return TrainResult(policy=policy, buffer=buffer, records=records,
                       rl_steps=rl_steps, sil_steps=sil_steps)


def file_log_record(record: dict) -> dict:
    """Log record as persisted: wall time stripped so reruns are byte-identical."""
    return {k: v for k, v in record.items() if k != "wall_time_ms"}

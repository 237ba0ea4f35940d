"""Token embedding tables, cosine costs, and padded pairwise cost matrices.

Embedding files use the common plain-text layout: a header line ``V d``
followed by one line per token, ``token x_1 ... x_d``. Parsing is
locale-independent (ASCII whitespace, ``.`` decimal point).
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

logger = logging.getLogger(__name__)

#: Reserved token appended to the shorter sequence so both sides of a
#: transport problem carry the same number of mass atoms. It has no stored
#: vector: its cost against any real token is fixed at 1.0 (the cosine cost
#: of orthogonal directions, i.e. semantically neutral) and 0.0 against
#: itself.
PAD_TOKEN = "<PAD>"
PAD_REAL_COST = 1.0


class OovPolicy(str, Enum):
    """What :func:`resolve` does with out-of-vocabulary tokens."""

    STRICT = "strict"
    HASH_FALLBACK = "hash"


class EmbeddingError(Exception):
    """Base class for embedding-table failures."""


class UnreadableFileError(EmbeddingError):
    def __init__(self, path, reason: str):
        super().__init__(f"cannot read embedding file {path!r}: {reason}")
        self.path = path


class MalformedHeaderError(EmbeddingError):
    def __init__(self, line: int, detail: str):
        super().__init__(f"line {line}: malformed header ({detail})")
        self.line = line


class ArityMismatchError(EmbeddingError):
    def __init__(self, line: int, expected: int, got: int):
        super().__init__(f"line {line}: expected {expected} vector components, got {got}")
        self.line = line
        self.expected = expected
        self.got = got


class InvalidValueError(EmbeddingError):
    def __init__(self, line: int, value: str):
        super().__init__(f"line {line}: not a decimal number: {value!r}")
        self.line = line
        self.value = value


class ZeroVectorError(EmbeddingError):
    def __init__(self, line: int, token: str):
        super().__init__(f"line {line}: token {token!r} has an all-zeros vector (cosine undefined)")
        self.line = line
        self.token = token


class ReservedTokenError(EmbeddingError):
    def __init__(self, line: int):
        super().__init__(f"line {line}: {PAD_TOKEN!r} is reserved and may not appear in a table")
        self.line = line


class UnknownTokenError(EmbeddingError):
    def __init__(self, token: str):
        super().__init__(f"unknown token {token!r} (strict OOV policy)")
        self.token = token


class DegenerateVectorError(EmbeddingError):
    def __init__(self, what: str = "input"):
        super().__init__(f"zero-norm {what}: cosine cost undefined")


@dataclass(frozen=True)
class EmbeddingTable:
    """Immutable token -> d-dimensional vector map.

    Invariants enforced at load time: every vector has length ``dim``, no
    vector is all-zeros, and :data:`PAD_TOKEN` is absent. Instances are
    safe to share across threads; all operations on them are pure.
    """

    dim: int
    entries: dict[str, np.ndarray]
    oov_policy: OovPolicy = OovPolicy.STRICT

    def __contains__(self, token: str) -> bool:
        return token in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def tokens(self) -> list[str]:
        """Tokens in file/insertion order (the order :meth:`matrix` rows use)."""
        return list(self.entries)

    def matrix(self) -> np.ndarray:
        """All stored vectors stacked as a ``len(self) x dim`` array."""
        return np.stack(list(self.entries.values()))

    def vector(self, token: str) -> np.ndarray:
        """Vector for ``token``, applying the table's OOV policy."""
        if token == PAD_TOKEN:
            raise ReservedTokenError(0)
        hit = self.entries.get(token)
        if hit is not None:
            return hit
        if self.oov_policy is OovPolicy.HASH_FALLBACK:
            return _hash_fallback_vector(token, self.dim)
        raise UnknownTokenError(token)


def _hash_fallback_vector(token: str, dim: int) -> np.ndarray:
    """Deterministic unit vector for an OOV token (stable across runs)."""
    digest = hashlib.sha256(b"seqot-oov:" + token.encode("utf-8")).digest()
    rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
    v = rng.standard_normal(dim)
    norm = np.linalg.norm(v)
    if norm == 0.0:  # unreachable in practice, keep the invariant airtight
        v = np.zeros(dim)
        v[0] = 1.0
        return v
    return v / norm


def load_embeddings(path, oov_policy: OovPolicy = OovPolicy.STRICT) -> EmbeddingTable:
    """Parse a ``V d`` header plus token/vector lines into a table.

    Duplicate tokens keep the last occurrence (a warning is logged). Raises
    a distinct error naming the offending line for malformed headers, wrong
    vector arity, non-numeric components, all-zero vectors, and the
    reserved pad token.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UnreadableFileError(path, exc.strerror or str(exc)) from exc

    if not lines or not lines[0].strip():
        raise MalformedHeaderError(1, "empty file or blank header")
    head = lines[0].split()
    if len(head) != 2:
        raise MalformedHeaderError(1, f"expected 'V d', got {lines[0]!r}")
    try:
        declared, dim = int(head[0]), int(head[1])
    except ValueError:
        raise MalformedHeaderError(1, f"expected two integers, got {lines[0]!r}") from None
    if dim < 1 or declared < 0:
        raise MalformedHeaderError(1, f"V={declared}, d={dim} out of range")

    entries: dict[str, np.ndarray] = {}
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = raw.split()
        token = parts[0]
        if token == PAD_TOKEN:
            raise ReservedTokenError(lineno)
        if len(parts) - 1 != dim:
            raise ArityMismatchError(lineno, dim, len(parts) - 1)
        try:
            vec = np.array([float(p) for p in parts[1:]])
        except ValueError as exc:
            bad = next(p for p in parts[1:] if not _is_decimal(p))
            raise InvalidValueError(lineno, bad) from exc
        if not np.all(np.isfinite(vec)):
            raise InvalidValueError(lineno, "non-finite component")
        if np.linalg.norm(vec) == 0.0:
            raise ZeroVectorError(lineno, token)
        if token in entries:
            logger.warning("duplicate token %r at line %d: last occurrence wins", token, lineno)
        entries[token] = vec

    if declared != len(entries):
        logger.warning("header declares %d tokens, file has %d", declared, len(entries))
    return EmbeddingTable(dim=dim, entries=entries, oov_policy=oov_policy)


def _is_decimal(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def resolve(table: EmbeddingTable, tokens: Sequence[str]) -> np.ndarray:
    """Stack the embeddings of ``tokens`` into a ``len(tokens) x dim`` matrix."""
    if len(tokens) == 0:
        raise ValueError("cannot resolve an empty token list")
    return np.stack([table.vector(t) for t in tokens])


def cosine_cost(za: Sequence[float], zb: Sequence[float]) -> float:
    """``1 - cos(za, zb)``, clipped into [0, 2]."""
    a = np.asarray(za, dtype=float)
    b = np.asarray(zb, dtype=float)
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise DegenerateVectorError()
    return float(np.clip(1.0 - (a / na) @ (b / nb), 0.0, 2.0))


@dataclass(frozen=True)
class CostMatrix:
    """Square pairwise cosine-cost matrix over two padded token sequences.

    ``values[i, j]`` is the cost of matching hypothesis token ``i`` against
    reference token ``j``; entries lie in [0, 2], identical non-pad tokens
    cost exactly 0.0, and cells touching a synthesized pad cost exactly
    :data:`PAD_REAL_COST`. ``pad_mask`` marks those synthesized cells.
    """

    values: np.ndarray
    pad_mask: np.ndarray
    hyp_tokens: tuple[str, ...]
    ref_tokens: tuple[str, ...]

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


def pad_tokens(tokens: Sequence[str], length: int) -> tuple[str, ...]:
    """Right-pad ``tokens`` with :data:`PAD_TOKEN` up to ``length``."""
    return tuple(tokens) + (PAD_TOKEN,) * (length - len(tokens))


def build_cost_matrix(table: EmbeddingTable, hyp: Sequence[str], ref: Sequence[str]) -> CostMatrix:
    """Pad the shorter sequence, then fill the L x L cosine-cost matrix.

    L = max(len(hyp), len(ref)); only the shorter side receives pads, so
    pad-vs-pad cells never occur in practice.
    """
    if len(hyp) == 0 or len(ref) == 0:
        raise ValueError("both sequences must be nonempty")
    n, m = len(hyp), len(ref)
    size = max(n, m)

    eh = resolve(table, hyp)
    er = resolve(table, ref)
    eh = eh / np.linalg.norm(eh, axis=1, keepdims=True)
    er = er / np.linalg.norm(er, axis=1, keepdims=True)

    values = np.full((size, size), PAD_REAL_COST)
    values[:n, :m] = np.clip(1.0 - eh @ er.T, 0.0, 2.0)
    same = np.array([[h == r for r in ref] for h in hyp])
    values[:n, :m][same] = 0.0

    pad_mask = np.zeros((size, size), dtype=bool)
    pad_mask[n:, :] = True
    pad_mask[:, m:] = True
    return CostMatrix(
        values=values,
        pad_mask=pad_mask,
        hyp_tokens=pad_tokens(hyp, size),
        ref_tokens=pad_tokens(ref, size),
    )

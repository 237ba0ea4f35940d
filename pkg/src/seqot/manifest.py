"""Run manifests: enough resolved state to reproduce any output byte-for-byte.

Every CLI artifact embeds its manifest (command, resolved configuration,
sha256 digests of the input files, seed, tool version). Nothing
time-dependent goes in, so identical invocations produce identical bytes.
"""

from __future__ import annotations

import hashlib
from typing import Mapping, Sequence

from . import __version__


def file_digest(path) -> str:
    sha = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            sha.update(chunk)
    return sha.hexdigest()


def build_manifest(
    command: str,
    config: Mapping,
    inputs: Sequence,
    seed: int | None = None,
) -> dict:
    return {
        "command": command,
        "config": dict(config),
        "inputs": {str(p): file_digest(p) for p in inputs},
        "seed": seed,
        "version": __version__,
    }

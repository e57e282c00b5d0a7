"""Run manifests: everything needed to reproduce a pipeline run.

Two runs with equal manifests (timestamps aside) produce bit-identical
outputs in deterministic modes.
"""

import hashlib
import json
import time

from . import __version__


def corpus_hash(corpus):
    """Content hash over (id, text) in pinned order."""
    h = hashlib.sha256()
    for doc in corpus:
        h.update(doc.id.encode("utf-8"))
        h.update(b"\x00")
        h.update(doc.text.encode("utf-8"))
        h.update(b"\x01")
    return h.hexdigest()


def build_manifest(*, lexer_config, engine_config=None, match_config=None,
                   embedding_params=None, source_corpus=None,
                   target_corpus=None, seed=None, extra=None):
    manifest = {
        "tool_version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "lexer_config": lexer_config.to_dict(),
        "seed": seed,
    }
    if engine_config is not None:
        manifest["engine_config"] = engine_config.to_dict()
    if match_config is not None:
        manifest["match_config"] = match_config.to_dict()
    if embedding_params is not None:
        manifest["embedding_params"] = dict(embedding_params)
    if source_corpus is not None:
        manifest["source_corpus_hash"] = corpus_hash(source_corpus)
    if target_corpus is not None:
        manifest["target_corpus_hash"] = corpus_hash(target_corpus)
    if extra:
        manifest.update(extra)
    return manifest


def write_manifest(manifest, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)

"""Versioned on-disk snapshots of trained scorers."""

from __future__ import annotations

import io
import json
import zipfile
from dataclasses import asdict
from pathlib import Path

import numpy as np

from ..errors import CheckpointMismatch
from ..util import atomic_write_bytes
from .networks import Model, ModelConfig, build_model

FORMAT_VERSION = 1


def _deterministic_npz(arrays: dict[str, np.ndarray]) -> bytes:
    """npz container with pinned timestamps: same arrays, same bytes."""
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_STORED) as z:
        for name in sorted(arrays):
            payload = io.BytesIO()
            np.lib.format.write_array(payload, np.asanyarray(arrays[name]),
                                      allow_pickle=False)
            info = zipfile.ZipInfo(name + ".npy", date_time=(1980, 1, 1, 0, 0, 0))
            z.writestr(info, payload.getvalue())
    return buf.getvalue()


def save_checkpoint(path: str | Path, model: Model, seed: int,
                    best_epoch: int, val_auc: float,
                    extra: dict | None = None) -> None:
    """Write parameters plus enough metadata to rebuild the model exactly.

    The write is atomic: a sibling temp file is renamed over the target.
    """
    path = Path(path)
    meta = {
        "format_version": FORMAT_VERSION,
        "model_config": asdict(model.config),
        "input_shape": list(model.input_shape),
        "seed": seed,
        "best_epoch": best_epoch,
        "val_auc": val_auc,
    }
    if extra:
        meta.update(extra)
    arrays = {f"param/{name}": arr for name, arr in model.named_params()}
    arrays["meta"] = np.frombuffer(json.dumps(meta).encode("utf-8"), dtype=np.uint8)
    atomic_write_bytes(path, _deterministic_npz(arrays))


def load_checkpoint(path: str | Path) -> tuple[Model, dict]:
    """Rebuild the stored model; raises CheckpointMismatch on a bad container."""
    path = Path(path)
    try:
        with np.load(path) as z:
            keys = set(z.files)
            if "meta" not in keys:
                raise CheckpointMismatch(f"{path}: no metadata block")
            meta = json.loads(bytes(z["meta"]).decode("utf-8"))
            arrays = {k[len("param/"):]: z[k] for k in keys if k.startswith("param/")}
    except (OSError, ValueError, json.JSONDecodeError) as e:
        raise CheckpointMismatch(f"{path}: unreadable checkpoint ({e})") from e
    if meta.get("format_version") != FORMAT_VERSION:
        raise CheckpointMismatch(
            f"{path}: format version {meta.get('format_version')}, expected {FORMAT_VERSION}"
        )
    try:
        config = ModelConfig(**meta["model_config"])
        input_shape = tuple(meta["input_shape"])
        model = build_model(config, input_shape,
                            np.random.default_rng(0), np.random.default_rng(0))
        model.set_state(arrays)
    except (KeyError, TypeError, ValueError) as e:
        raise CheckpointMismatch(f"{path}: stored model does not reconstruct ({e})") from e
    return model, meta

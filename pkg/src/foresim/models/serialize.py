"""Versioned binary container for fitted models.

Layout: magic bytes ``EXBT``, format version (u16 LE), a u32-length UTF-8
JSON metadata blob, then a u32 block count followed by named float64 array
blocks (u16 name length, name, u8 ndim, u64 dims, raw little-endian data).
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..errors import DataError
from .logistic import LogisticModel
from .mlp import MLP
from .ridge import RidgeModel

MAGIC = b"EXBT"
VERSION = 1


def _write_block(fh, name: str, array: np.ndarray) -> None:
    encoded = name.encode("utf-8")
    fh.write(struct.pack("<H", len(encoded)))
    fh.write(encoded)
    arr = np.ascontiguousarray(array, dtype="<f8")
    fh.write(struct.pack("<B", arr.ndim))
    for dim in arr.shape:
        fh.write(struct.pack("<Q", dim))
    fh.write(arr.tobytes())


def _read_exact(fh, size: int) -> bytes:
    data = fh.read(size)
    if len(data) != size:
        raise DataError("truncated model container")
    return data


def _read_block(fh) -> tuple[str, np.ndarray]:
    (name_len,) = struct.unpack("<H", _read_exact(fh, 2))
    name = _read_exact(fh, name_len).decode("utf-8")
    (ndim,) = struct.unpack("<B", _read_exact(fh, 1))
    shape = tuple(struct.unpack("<Q", _read_exact(fh, 8))[0] for _ in range(ndim))
    count = int(np.prod(shape)) if shape else 1
    data = np.frombuffer(_read_exact(fh, count * 8), dtype="<f8")
    return name, data.reshape(shape).copy()


def save_model(model, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(model, RidgeModel):
        meta = {"family": "ridge", "intercept": model.intercept}
        blocks = [("coef", model.coef)]
    elif isinstance(model, LogisticModel):
        meta = {"family": "logistic", "intercept": model.intercept}
        blocks = [("coef", model.coef)]
    elif isinstance(model, MLP):
        meta = {
            "family": "mlp",
            "layer_sizes": list(model.layer_sizes),
            "activation": model.activation,
            "task": model.task,
            "l2": model.l2,
            "learning_rate": model.learning_rate,
            "optimiser": model.optimiser,
            "epochs": model.epochs,
            "batch_size": model.batch_size,
            "seed": model.seed,
            "n_features": model._n_features,
        }
        blocks = []
        for i, (w, b) in enumerate(zip(model.weights, model.biases)):
            blocks.append((f"w{i}", w))
            blocks.append((f"b{i}", b))
    else:
        raise DataError(f"cannot serialise model of type {type(model).__name__}")

    with path.open("wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<H", VERSION))
        meta_bytes = json.dumps(meta, sort_keys=True).encode("utf-8")
        fh.write(struct.pack("<I", len(meta_bytes)))
        fh.write(meta_bytes)
        fh.write(struct.pack("<I", len(blocks)))
        for name, array in blocks:
            _write_block(fh, name, np.asarray(array, dtype=float))


def load_model(path: str | Path):
    path = Path(path)
    with path.open("rb") as fh:
        if _read_exact(fh, 4) != MAGIC:
            raise DataError(f"{path}: not a model container (bad magic)")
        (version,) = struct.unpack("<H", _read_exact(fh, 2))
        if version != VERSION:
            raise DataError(f"{path}: unsupported container version {version}")
        (meta_len,) = struct.unpack("<I", _read_exact(fh, 4))
        meta = json.loads(_read_exact(fh, meta_len).decode("utf-8"))
        (n_blocks,) = struct.unpack("<I", _read_exact(fh, 4))
        blocks = dict(_read_block(fh) for _ in range(n_blocks))

    family = meta.get("family")
    if family == "ridge":
        return RidgeModel(blocks["coef"], float(meta["intercept"]))
    if family == "logistic":
        return LogisticModel(blocks["coef"], float(meta["intercept"]))
    if family == "mlp":
        model = MLP(tuple(meta["layer_sizes"]), meta["activation"], meta["task"],
                    meta["l2"], meta["learning_rate"], meta["optimiser"],
                    meta["epochs"], meta["batch_size"], meta["seed"])
        n_layers = len(model.layer_sizes) + 1
        model.weights = [blocks[f"w{i}"] for i in range(n_layers)]
        model.biases = [blocks[f"b{i}"] for i in range(n_layers)]
        model._n_features = meta["n_features"]
        return model
    raise DataError(f"{path}: unknown model family '{family}'")

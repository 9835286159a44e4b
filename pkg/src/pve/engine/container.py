"""PVE1 model container: load and save.

Layout, bit-exact:

    magic            4 bytes  b"PVE1"
    header length    uint32 little-endian
    header           UTF-8 JSON: {format_version, name, input_shape,
                     n_ai, n_human, layers: [{kind, hyperparams,
                     weight_offset, weight_len, bias_offset, bias_len}]}
    weight blob      raw little-endian float32
    checksum         CRC32 of everything preceding, uint32 little-endian

Saving is canonical (sorted JSON keys, compact separators), so
save(load(data)) reproduces data byte for byte.
"""

from __future__ import annotations

import json
import struct
import zlib

import numpy as np

from .errors import ChecksumMismatchError, MalformedContainerError, UnsupportedLayerError
from .graph import LAYER_KINDS, LayerSpec, ModelGraph

MAGIC = b"PVE1"

_HEADER_KEYS = {"format_version", "name", "input_shape", "n_ai", "n_human", "layers"}
_LAYER_KEYS = {"kind", "hyperparams", "weight_offset", "weight_len", "bias_offset", "bias_len"}


def save_model(model: ModelGraph) -> bytes:
    header = {
        "format_version": model.format_version,
        "name": model.name,
        "input_shape": list(model.input_shape),
        "n_ai": model.n_ai,
        "n_human": model.n_human,
        "layers": [
            {
                "kind": spec.kind,
                "hyperparams": dict(spec.hyperparams),
                "weight_offset": spec.weight_offset,
                "weight_len": spec.weight_len,
                "bias_offset": spec.bias_offset,
                "bias_len": spec.bias_len,
            }
            for spec in model.layers
        ],
    }
    hjson = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    body = MAGIC + struct.pack("<I", len(hjson)) + hjson
    body += model.weights.astype("<f4", copy=False).tobytes()
    return body + struct.pack("<I", zlib.crc32(body))


def load_model(data: bytes) -> ModelGraph:
    if len(data) < len(MAGIC) + 8:
        raise MalformedContainerError(f"container of {len(data)} bytes is too short")
    if data[:4] != MAGIC:
        raise MalformedContainerError(f"bad magic {data[:4]!r}, expected {MAGIC!r}")
    (hlen,) = struct.unpack("<I", data[4:8])
    blob_start = 8 + hlen
    if blob_start + 4 > len(data):
        raise MalformedContainerError(
            f"declared header of {hlen} bytes exceeds container size {len(data)}")

    (stored_crc,) = struct.unpack("<I", data[-4:])
    actual_crc = zlib.crc32(data[:-4])
    if stored_crc != actual_crc:
        raise ChecksumMismatchError(
            f"checksum 0x{stored_crc:08x} != computed 0x{actual_crc:08x}")

    try:
        header = json.loads(data[8:blob_start].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedContainerError(f"header is not valid JSON: {exc}") from exc
    _check_header(header)

    blob_bytes = data[blob_start:-4]
    if len(blob_bytes) % 4:
        raise MalformedContainerError(
            f"weight blob of {len(blob_bytes)} bytes is not float32-aligned")
    weights = np.frombuffer(blob_bytes, dtype="<f4")

    specs = []
    for i, entry in enumerate(header["layers"]):
        if entry["kind"] not in LAYER_KINDS:
            raise UnsupportedLayerError(i, entry["kind"])
        specs.append(LayerSpec(
            kind=entry["kind"],
            hyperparams=dict(entry["hyperparams"]),
            weight_offset=entry["weight_offset"],
            weight_len=entry["weight_len"],
            bias_offset=entry["bias_offset"],
            bias_len=entry["bias_len"],
        ))

    return ModelGraph(
        name=header["name"],
        layers=specs,
        input_shape=tuple(header["input_shape"]),
        weights=weights,
        n_ai=header["n_ai"],
        n_human=header["n_human"],
        format_version=header["format_version"],
    )


def _check_header(header) -> None:
    if not isinstance(header, dict) or set(header) != _HEADER_KEYS:
        raise MalformedContainerError(
            f"header keys {sorted(header) if isinstance(header, dict) else header!r} "
            f"!= required {sorted(_HEADER_KEYS)}")
    if not isinstance(header["name"], str):
        raise MalformedContainerError("name must be a string")
    for key in ("format_version", "n_ai", "n_human"):
        if not isinstance(header[key], int):
            raise MalformedContainerError(f"{key} must be an integer")
    shape = header["input_shape"]
    if (not isinstance(shape, list) or not shape
            or not all(isinstance(d, int) and d >= 1 for d in shape)):
        raise MalformedContainerError(f"input_shape {shape!r} must be positive integers")
    if not isinstance(header["layers"], list):
        raise MalformedContainerError("layers must be a list")
    for i, entry in enumerate(header["layers"]):
        if not isinstance(entry, dict) or set(entry) != _LAYER_KEYS:
            raise MalformedContainerError(f"layer {i}: malformed layer record")
        if not isinstance(entry["kind"], str) or not isinstance(entry["hyperparams"], dict):
            raise MalformedContainerError(f"layer {i}: malformed kind or hyperparams")
        for key in ("weight_offset", "weight_len", "bias_offset", "bias_len"):
            if not isinstance(entry[key], int) or entry[key] < 0:
                raise MalformedContainerError(f"layer {i}: {key} must be a non-negative integer")


def read_model(path) -> ModelGraph:
    with open(path, "rb") as fh:
        return load_model(fh.read())


def write_model(model: ModelGraph, path) -> None:
    with open(path, "wb") as fh:
        fh.write(save_model(model))

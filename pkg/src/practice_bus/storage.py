"""
Binary and text artifacts.

Every binary file starts with a 6-byte magic and a little-endian u16 format
version. Arrays are written as ``<f8`` in row-major order. Nothing time
dependent is stored, so identical runs produce identical bytes.

Checkpoint layout::

    magic "PBCKPT" | u16 version | u16 chunk count
    repeated: u16 name length | name (utf-8) | u64 payload length | payload

Chunks: ``meta`` (YAML) and, per behavior tag ``B`` / ``B*``,
``dataset/<tag>`` (CSV), ``pca/<tag>`` and ``svm/<tag>``.
"""

import io
import logging
import math
import struct
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
import yaml

from practice_bus._version import __version__
from practice_bus.errors import FormatError
from practice_bus.features.pca import PcaBasis
from practice_bus.learning.active import ConvergenceState
from practice_bus.learning.svm import LabeledDataset, SvmModel, SvmParams
from practice_bus.sim.devices import Behavior
from practice_bus.sim.geometry import Pose2
from practice_bus.training.session import BehaviorPairSession, BehaviorSlot

logger = logging.getLogger(__name__)

PCA_MAGIC = b"PBPCA\0"
SVM_MAGIC = b"PBSVM\0"
CHECKPOINT_MAGIC = b"PBCKPT"
FORMAT_VERSION = 1

_HEADER = struct.Struct("<6sH")
_PCA_DIMS = struct.Struct("<IIId")
_SVM_FIELDS = struct.Struct("<ddddQIIddQ")
_NAME_LEN = struct.Struct("<H")
_PAYLOAD_LEN = struct.Struct("<Q")

FLOAT = np.dtype("<f8")
INDEX = np.dtype("<i8")


class _Reader:
    """Cursor over a byte buffer that raises FormatError on truncation."""

    def __init__(self, data: bytes, what: str):
        self.data = data
        self.what = what
        self.offset = 0

    def take(self, size: int) -> bytes:
        end = self.offset + size
        if end > len(self.data):
            raise FormatError(f"{self.what}: truncated at byte {self.offset}")
        chunk = self.data[self.offset : end]
        self.offset = end
        return chunk

    def unpack(self, layout: struct.Struct) -> tuple[Any, ...]:
        return layout.unpack(self.take(layout.size))

    def array(self, dtype: np.dtype, count: int) -> np.ndarray:
        raw = self.take(dtype.itemsize * count)
        return np.frombuffer(raw, dtype=dtype).astype(dtype.newbyteorder("="))

    def text(self) -> str:
        (length,) = self.unpack(_NAME_LEN)
        return self.take(length).decode("utf-8")

    def done(self) -> None:
        if self.offset != len(self.data):
            raise FormatError(f"{self.what}: {len(self.data) - self.offset} trailing bytes")


def _header(magic: bytes) -> bytes:
    return _HEADER.pack(magic, FORMAT_VERSION)


def _check_header(reader: _Reader, magic: bytes) -> None:
    found, version = reader.unpack(_HEADER)
    if found != magic:
        raise FormatError(f"{reader.what}: bad magic {found!r}, expected {magic!r}")
    if version != FORMAT_VERSION:
        raise FormatError(f"{reader.what}: unsupported version {version}")


def _text(value: str) -> bytes:
    encoded = value.encode("utf-8")
    return _NAME_LEN.pack(len(encoded)) + encoded


def _floats(values: np.ndarray) -> bytes:
    return np.ascontiguousarray(values, dtype=FLOAT).tobytes()


# ============================================================================
# PCA basis
# ============================================================================


def encode_pca(basis: PcaBasis) -> bytes:
    return b"".join(
        [
            _header(PCA_MAGIC),
            _PCA_DIMS.pack(basis.dimension, basis.rank, basis.components, basis.total_variance),
            _text(basis.behavior),
            _floats(basis.mean),
            _floats(basis.eigenvalues),
            _floats(basis.basis),
        ]
    )


def decode_pca(data: bytes) -> PcaBasis:
    reader = _Reader(data, "PCA basis")
    _check_header(reader, PCA_MAGIC)
    dimension, rank, components, total_variance = reader.unpack(_PCA_DIMS)
    behavior = reader.text()
    mean = reader.array(FLOAT, dimension)
    eigenvalues = reader.array(FLOAT, rank)
    basis = reader.array(FLOAT, dimension * rank).reshape(dimension, rank)
    reader.done()
    return PcaBasis(mean, basis, eigenvalues, components, total_variance, behavior)


# ============================================================================
# SVM model
# ============================================================================


def encode_svm(model: SvmModel) -> bytes:
    params = model.params
    c_positive = math.nan if params.c_positive is None else params.c_positive
    m, k = model.support_vectors.shape
    return b"".join(
        [
            _header(SVM_MAGIC),
            _SVM_FIELDS.pack(
                params.gamma,
                params.c_negative,
                c_positive,
                params.tol,
                params.max_iterations,
                m,
                k,
                model.bias,
                model.objective,
                model.iterations,
            ),
            _floats(model.support_vectors),
            _floats(model.dual_coef),
            np.ascontiguousarray(model.support_indices, dtype=INDEX).tobytes(),
        ]
    )


def decode_svm(data: bytes) -> SvmModel:
    reader = _Reader(data, "SVM model")
    _check_header(reader, SVM_MAGIC)
    gamma, c_neg, c_pos, tol, max_iter, m, k, bias, objective, iterations = reader.unpack(
        _SVM_FIELDS
    )
    params = SvmParams(
        gamma=gamma,
        c_negative=c_neg,
        c_positive=None if math.isnan(c_pos) else c_pos,
        tol=tol,
        max_iterations=max_iter,
    )
    support_vectors = reader.array(FLOAT, m * k).reshape(m, k)
    dual_coef = reader.array(FLOAT, m)
    support_indices = reader.array(INDEX, m)
    reader.done()
    return SvmModel(
        support_vectors, dual_coef, bias, params, support_indices, objective, iterations
    )


# ============================================================================
# Datasets and tables
# ============================================================================


def dataset_to_csv(data: LabeledDataset) -> str:
    return data.to_frame().to_csv(index=False, float_format="%.17g", lineterminator="\n")


def dataset_from_csv(text: str, behavior: str = "") -> LabeledDataset:
    frame = pd.read_csv(io.StringIO(text), float_precision="round_trip")
    return LabeledDataset.from_frame(frame, behavior)


def write_table(frame: pd.DataFrame, path: str | Path) -> Path:
    path = Path(path)
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def write_params(params: SvmParams, path: str | Path) -> Path:
    path = Path(path)
    values = {
        "gamma": float(params.gamma),
        "c_negative": float(params.c_negative),
        "tol": float(params.tol),
        "max_iterations": int(params.max_iterations),
    }
    path.write_text(yaml.safe_dump(values, sort_keys=True), encoding="utf-8")
    return path


def read_params(path: str | Path) -> SvmParams:
    try:
        values = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        return SvmParams(**values)
    except (TypeError, ValueError, yaml.YAMLError) as e:
        raise FormatError(f"{path}: not a parameter file ({e})") from e


# ============================================================================
# Session checkpoint
# ============================================================================


def _pose_list(pose: Pose2) -> list[float]:
    return [float(v) for v in pose.as_list()]


def _meta(session: BehaviorPairSession) -> dict[str, Any]:
    behaviors = {}
    for which, slot in session.slots.items():
        assert slot.pca is not None
        behaviors[which.value] = {
            "action": slot.action,
            "flags": [bool(f) for f in slot.convergence.flags],
            "visit_budget": slot.convergence.budget,
            "explained_variance": float(slot.pca.explained_variance_ratio().sum()),
        }
    return {
        "format": FORMAT_VERSION,
        "package": __version__,
        "scenario": session.scenario,
        "device_kind": session.device_kind,
        "seed_point": [float(v) for v in session.seed_point],
        "nominal_pose": _pose_list(session.nominal_pose),
        "practice_poses": [_pose_list(p) for p in session.practice_poses],
        "visits": session.visits,
        "behaviors": behaviors,
    }


def encode_checkpoint(session: BehaviorPairSession) -> bytes:
    if not session.ready:
        raise ValueError("only an initialized session can be checkpointed")
    chunks: list[tuple[str, bytes]] = [
        ("meta", yaml.safe_dump(_meta(session), sort_keys=True).encode("utf-8"))
    ]
    for which, slot in session.slots.items():
        assert slot.pca is not None and slot.model is not None
        chunks.append((f"dataset/{which.value}", dataset_to_csv(slot.dataset).encode("utf-8")))
        chunks.append((f"pca/{which.value}", encode_pca(slot.pca)))
        chunks.append((f"svm/{which.value}", encode_svm(slot.model)))

    parts = [_header(CHECKPOINT_MAGIC), _NAME_LEN.pack(len(chunks))]
    for name, payload in chunks:
        parts.append(_text(name))
        parts.append(_PAYLOAD_LEN.pack(len(payload)))
        parts.append(payload)
    return b"".join(parts)


def decode_checkpoint(data: bytes) -> BehaviorPairSession:
    reader = _Reader(data, "checkpoint")
    _check_header(reader, CHECKPOINT_MAGIC)
    (count,) = reader.unpack(_NAME_LEN)
    chunks: dict[str, bytes] = {}
    for _ in range(count):
        name = reader.text()
        (length,) = reader.unpack(_PAYLOAD_LEN)
        chunks[name] = reader.take(length)
    reader.done()

    try:
        meta = yaml.safe_load(chunks["meta"].decode("utf-8"))
        slots = {}
        for which in (Behavior.PRIMARY, Behavior.COMPLEMENT):
            info = meta["behaviors"][which.value]
            model = decode_svm(chunks[f"svm/{which.value}"])
            csv_text = chunks[f"dataset/{which.value}"].decode("utf-8")
            dataset = dataset_from_csv(csv_text, info["action"])
            slots[which] = BehaviorSlot(
                behavior=which,
                action=info["action"],
                dataset=dataset,
                convergence=ConvergenceState(
                    flags=list(info["flags"]), budget=int(info["visit_budget"])
                ),
                pca=decode_pca(chunks[f"pca/{which.value}"]),
                model=model,
                params=model.params.unresolved(),
            )
        return BehaviorPairSession(
            scenario=meta["scenario"],
            device_kind=meta["device_kind"],
            seed_point=np.asarray(meta["seed_point"], dtype=float),
            nominal_pose=Pose2(*meta["nominal_pose"]),
            practice_poses=[Pose2(*p) for p in meta["practice_poses"]],
            slots=slots,
            visits=int(meta["visits"]),
        )
    except KeyError as e:
        raise FormatError(f"checkpoint is missing {e}") from e


def save_checkpoint(session: BehaviorPairSession, path: str | Path) -> Path:
    path = Path(path)
    path.write_bytes(encode_checkpoint(session))
    logger.debug(f"📦 Saved checkpoint {path}")
    return path


def load_checkpoint(path: str | Path) -> BehaviorPairSession:
    path = Path(path)
    if not path.is_file():
        raise FormatError(f"checkpoint not found: {path}")
    return decode_checkpoint(path.read_bytes())


# ============================================================================
# Images
# ============================================================================


def encode_ppm(rgb: np.ndarray) -> bytes:
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3 or rgb.dtype != np.uint8:
        raise FormatError(f"PPM needs an (H, W, 3) uint8 image, got {rgb.shape} {rgb.dtype}")
    height, width = rgb.shape[:2]
    return f"P6\n{width} {height}\n255\n".encode("ascii") + np.ascontiguousarray(rgb).tobytes()


def decode_ppm(data: bytes) -> np.ndarray:
    fields: list[bytes] = []
    offset = 0
    while len(fields) < 4:
        while offset < len(data) and data[offset : offset + 1].isspace():
            offset += 1
        if data[offset : offset + 1] == b"#":
            offset = data.index(b"\n", offset) + 1
            continue
        end = offset
        while end < len(data) and not data[end : end + 1].isspace():
            end += 1
        if end == offset:
            raise FormatError("PPM header is truncated")
        fields.append(data[offset:end])
        offset = end
    offset += 1  # single whitespace before the raster

    if fields[0] != b"P6" or fields[3] != b"255":
        raise FormatError(f"not an 8-bit P6 image: {fields[0]!r} max {fields[3]!r}")
    width, height = int(fields[1]), int(fields[2])
    raster = data[offset:]
    if len(raster) != width * height * 3:
        raise FormatError(f"PPM raster has {len(raster)} bytes, expected {width * height * 3}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width, 3).copy()


def write_ppm(path: str | Path, rgb: np.ndarray) -> Path:
    path = Path(path)
    path.write_bytes(encode_ppm(rgb))
    return path


def read_ppm(path: str | Path) -> np.ndarray:
    return decode_ppm(Path(path).read_bytes())

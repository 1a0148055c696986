"""
Codec persistence in the CLRC little-endian container.

Layout:
    magic "CLRC" | version u32 = 1 | method u8 (1 PCA, 2 DWT, 3 AE) | section count u32
    per section: name length u16 | UTF-8 name | dtype u8 (1 float64, 2 int64) |
                 ndim u8 | dims u64 x ndim | payload (row-major)

Every codec stores a "grid" section (int64: kind, rows, cols, T). Strings such
as the wavelet filter name are stored as int64 code points.
"""
import logging
import struct
from pathlib import Path
from typing import Iterable

import numpy as np
import torch

from src.core.constants import FileFormatConstants
from src.core.exceptions import CodecFormatError
from src.models.codec import Codec, CodecMethod
from src.models.grid import Grid
from src.services.learners.ae_learner import (
    AeHyperparameters,
    AeLoss,
    AeModel,
    AutoencoderNetwork,
    OutputActivation,
    ae_codec,
)
from src.services.learners.dwt_learner import DwtModel, dwt_codec
from src.services.learners.pca_learner import PcaModel, pca_codec
from src.services.wavelet import DyadicPadding, WaveletFilter

logger = logging.getLogger(__name__)

PathLike = str | Path

_METHOD_CODES = {CodecMethod.PCA: 1, CodecMethod.DWT: 2, CodecMethod.AE: 3}
_CODE_METHODS = {code: method for method, code in _METHOD_CODES.items()}
_DTYPES = {
    FileFormatConstants.DTYPE_FLOAT64: np.dtype("<f8"),
    FileFormatConstants.DTYPE_INT64: np.dtype("<i8"),
}


def _dtype_code(arr: np.ndarray) -> int:
    if np.issubdtype(arr.dtype, np.floating):
        return FileFormatConstants.DTYPE_FLOAT64
    if np.issubdtype(arr.dtype, np.integer):
        return FileFormatConstants.DTYPE_INT64
    raise CodecFormatError(f"cannot store arrays of dtype {arr.dtype}")


def write_sections(path: PathLike, method_code: int, sections: Iterable[tuple[str, np.ndarray]]) -> None:
    items = list(sections)
    chunks = [
        struct.pack(
            FileFormatConstants.CLRC_HEADER_FORMAT,
            FileFormatConstants.CLRC_MAGIC,
            FileFormatConstants.CLRC_VERSION,
            method_code,
            len(items),
        )
    ]
    for name, array in items:
        arr = np.asarray(array)
        code = _dtype_code(arr)
        payload = np.ascontiguousarray(arr, dtype=_DTYPES[code])
        encoded = name.encode("utf-8")
        chunks.append(struct.pack("<H", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack("<BB", code, payload.ndim))
        chunks.append(struct.pack(f"<{payload.ndim}Q", *payload.shape))
        chunks.append(payload.tobytes(order="C"))
    Path(path).write_bytes(b"".join(chunks))


def read_sections(path: PathLike) -> tuple[int, dict[str, np.ndarray]]:
    """
    Read every section of a CLRC file.

    Raises:
        CodecFormatError: Bad magic, version, dtype or truncated payload
    """
    data = Path(path).read_bytes()
    header_size = struct.calcsize(FileFormatConstants.CLRC_HEADER_FORMAT)
    if len(data) < header_size:
        raise CodecFormatError(f"{path}: truncated header")
    magic, version, method_code, count = struct.unpack_from(FileFormatConstants.CLRC_HEADER_FORMAT, data, 0)
    if magic != FileFormatConstants.CLRC_MAGIC:
        raise CodecFormatError(f"{path}: bad magic {magic!r}")
    if version != FileFormatConstants.CLRC_VERSION:
        raise CodecFormatError(f"{path}: unsupported version {version}")

    offset = header_size
    sections: dict[str, np.ndarray] = {}
    try:
        for _ in range(count):
            (name_len,) = struct.unpack_from("<H", data, offset)
            offset += 2
            name = data[offset:offset + name_len].decode("utf-8")
            offset += name_len
            code, ndim = struct.unpack_from("<BB", data, offset)
            offset += 2
            shape = struct.unpack_from(f"<{ndim}Q", data, offset)
            offset += 8 * ndim
            if code not in _DTYPES:
                raise CodecFormatError(f"{path}: section '{name}' has unknown dtype {code}")
            dtype = _DTYPES[code]
            size = int(np.prod(shape, dtype=np.int64)) * dtype.itemsize
            if offset + size > len(data):
                raise CodecFormatError(f"{path}: section '{name}' is truncated")
            sections[name] = np.frombuffer(data, dtype=dtype, count=size // dtype.itemsize, offset=offset).reshape(shape).copy()
            offset += size
    except struct.error as exc:
        raise CodecFormatError(f"{path}: truncated section table ({exc})") from exc
    if offset != len(data):
        raise CodecFormatError(f"{path}: {len(data) - offset} trailing bytes")
    return method_code, sections


def _grid_section(grid: Grid) -> np.ndarray:
    kind = FileFormatConstants.GRID_KIND_TWO_D if grid.is_two_d else FileFormatConstants.GRID_KIND_ONE_D
    return np.array([kind, grid.rows, grid.cols, grid.length], dtype=np.int64)


def _grid_from_section(values: np.ndarray) -> Grid:
    kind, rows, cols, t = (int(v) for v in values)
    if kind == FileFormatConstants.GRID_KIND_TWO_D:
        return Grid.two_d(rows, cols)
    return Grid.one_d(t)


def _text_section(text: str) -> np.ndarray:
    return np.array([ord(ch) for ch in text], dtype=np.int64)


def _text_from_section(values: np.ndarray) -> str:
    return "".join(chr(int(v)) for v in values)


def _require(sections: dict[str, np.ndarray], *names: str) -> None:
    missing = [n for n in names if n not in sections]
    if missing:
        raise CodecFormatError(f"codec file lacks section(s) {', '.join(missing)}")


def save_codec(codec: Codec, path: PathLike) -> None:
    """
    Serialize a built-in codec; loading it back reproduces the same encode/decode bit-exactly.

    Raises:
        CodecFormatError: User codecs (no serializable model)
    """
    sections: list[tuple[str, np.ndarray]] = [("grid", _grid_section(codec.grid))]
    model = codec.model
    if codec.method is CodecMethod.PCA and isinstance(model, PcaModel):
        sections += [
            ("column_means", model.column_means),
            ("basis", model.basis),
            ("singular_values", model.singular_values),
        ]
    elif codec.method is CodecMethod.DWT and isinstance(model, DwtModel):
        sections += [
            ("filter_name", _text_section(model.filter.name)),
            ("filter_lowpass", model.filter.lowpass),
            ("levels", np.array([model.levels], dtype=np.int64)),
            ("padding", np.array(
                [[p.original_length, p.padded_length, p.left, p.right] for p in model.padding], dtype=np.int64
            )),
            ("keep_set", model.keep_set),
            ("scree", model.scree),
        ]
    elif codec.method is CodecMethod.AE and isinstance(model, AeModel):
        hyper = model.hyper
        sections += [
            ("architecture", np.array([
                model.t,
                hyper.hidden,
                model.k,
                1 if hyper.output_activation is OutputActivation.SIGMOID else 0,
                1 if hyper.loss is AeLoss.BCE else 0,
                hyper.epochs,
                hyper.batch_size,
            ], dtype=np.int64)),
            ("learning_rate", np.array([hyper.learning_rate], dtype=np.float64)),
        ]
        for name, tensor in model.network.state_dict().items():
            sections.append((f"state.{name}", tensor.detach().cpu().numpy()))
    else:
        raise CodecFormatError(f"codecs of method '{codec.method.value}' cannot be serialized")

    write_sections(path, _METHOD_CODES[codec.method], sections)
    logger.info(f"Saved {codec.method.value} codec (K={codec.k}, T={codec.t}) to {path}")


def load_codec(path: PathLike) -> Codec:
    """
    Load a codec written by save_codec.

    Raises:
        OSError: File cannot be read
        CodecFormatError: Malformed file or unknown method
    """
    method_code, sections = read_sections(path)
    if method_code not in _CODE_METHODS:
        raise CodecFormatError(f"{path}: unknown codec method {method_code}")
    method = _CODE_METHODS[method_code]
    _require(sections, "grid")
    grid = _grid_from_section(sections["grid"])

    if method is CodecMethod.PCA:
        _require(sections, "column_means", "basis", "singular_values")
        model = PcaModel(
            column_means=sections["column_means"],
            basis=sections["basis"],
            singular_values=sections["singular_values"],
        )
        return pca_codec(model, grid)

    if method is CodecMethod.DWT:
        _require(sections, "filter_name", "filter_lowpass", "levels", "padding", "keep_set", "scree")
        wavelet = WaveletFilter.from_lowpass(sections["filter_lowpass"], _text_from_section(sections["filter_name"]))
        padding = tuple(
            DyadicPadding(original_length=int(o), padded_length=int(p), left=int(left), right=int(right))
            for o, p, left, right in sections["padding"]
        )
        dwt_model = DwtModel(
            filter=wavelet,
            levels=int(sections["levels"][0]),
            padding=padding,
            keep_set=sections["keep_set"],
            scree=sections["scree"],
            grid=grid,
        )
        return dwt_codec(dwt_model)

    _require(sections, "architecture", "learning_rate")
    t, hidden, k, sigmoid, bce, epochs, batch = (int(v) for v in sections["architecture"])
    hyper = AeHyperparameters(
        hidden=hidden,
        epochs=epochs,
        batch_size=batch,
        learning_rate=float(sections["learning_rate"][0]),
        output_activation=OutputActivation.SIGMOID if sigmoid else OutputActivation.LINEAR,
        loss=AeLoss.BCE if bce else AeLoss.MSE,
    )
    network = AutoencoderNetwork(t, hidden, k, hyper.output_activation)
    state = {
        name[len("state."):]: torch.from_numpy(values)
        for name, values in sections.items()
        if name.startswith("state.")
    }
    try:
        network.load_state_dict(state)
    except RuntimeError as exc:
        raise CodecFormatError(f"{path}: autoencoder weights do not match the architecture ({exc})") from exc
    network.eval()
    return ae_codec(AeModel(network=network, hyper=hyper, t=t, k=k), grid)

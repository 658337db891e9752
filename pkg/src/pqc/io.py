"""JSON serialization of channels and atomic file output.

Complex entries are stored as ``[re, im]`` pairs of JSON numbers written in
Python's shortest round-trip decimal form, so float64 values survive a
save/load cycle bit for bit.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .channels import ChannelEnsemble, KrausChannel, StinespringChannel, stinespring_to_kraus

FORMAT = "pqc-channel"
VERSION = 1
FLOAT_FORMAT = "IEEE-754 binary64, shortest round-trip decimal"


def _encode_matrix(a: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(a, dtype=complex)]


def _decode_matrix(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise ValueError(f"matrix entries must be [re, im] pairs, got array of shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def channel_to_dict(ch) -> dict:
    if isinstance(ch, KrausChannel):
        return {"kind": "kraus", "dim": ch.dim, "operators": [_encode_matrix(k) for k in ch.operators]}
    if isinstance(ch, StinespringChannel):
        return {
            "kind": "stinespring",
            "system_qubits": ch.system_qubits,
            "ancilla_qubits": ch.ancilla_qubits,
            "ancilla_init": ch.ancilla_init,
            "dilation": _encode_matrix(ch.dilation),
        }
    if isinstance(ch, ChannelEnsemble):
        return {
            "kind": "ensemble",
            "dim": ch.dim,
            "members": [{"weight": w, "channel": channel_to_dict(c)} for w, c in ch.members],
        }
    raise TypeError(f"cannot serialize {type(ch).__name__}")


def channel_from_dict(data: dict):
    kind = data.get("kind")
    if kind == "kraus":
        ch = KrausChannel([_decode_matrix(k) for k in data["operators"]])
        if "dim" in data and int(data["dim"]) != ch.dim:
            raise ValueError(f"declared dim {data['dim']} does not match operators of size {ch.dim}")
        return ch
    if kind == "stinespring":
        return StinespringChannel(
            int(data["system_qubits"]),
            int(data["ancilla_qubits"]),
            _decode_matrix(data["dilation"]),
            int(data.get("ancilla_init", 0)),
        )
    if kind == "ensemble":
        members = []
        for m in data["members"]:
            ch = channel_from_dict(m["channel"])
            if isinstance(ch, StinespringChannel):
                ch = stinespring_to_kraus(ch)
            elif isinstance(ch, ChannelEnsemble):
                ch = ch.to_kraus()
            members.append((float(m["weight"]), ch))
        return ChannelEnsemble(members)
    raise ValueError(f"unknown channel kind {kind!r}")


def dumps_channel(ch) -> str:
    doc = {"format": FORMAT, "version": VERSION, "float_format": FLOAT_FORMAT}
    doc.update(channel_to_dict(ch))
    return json.dumps(doc, indent=1) + "\n"


def loads_channel(text: str):
    data = json.loads(text)
    if data.get("format", FORMAT) != FORMAT:
        raise ValueError(f"not a {FORMAT} document")
    return channel_from_dict(data)


def save_channel(ch, path) -> None:
    write_atomic(path, dumps_channel(ch))


def load_channel(path):
    return loads_channel(Path(path).read_text())


def write_atomic(path, text: str) -> None:
    """Write ``text`` via a temporary sibling file and rename; no partial file on failure."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise

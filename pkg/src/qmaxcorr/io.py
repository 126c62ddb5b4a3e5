"""
File formats.

States and channels are JSON, with complex matrices encoded row-major as
nested lists of ``[re, im]`` pairs::

    {"dim_a": 2, "dim_b": 2, "matrix": [[[0.25, 0.0], ...], ...], "tol": 1e-10}
    {"dim_in": 2, "dim_out": 2, "kraus": [<matrix>, ...]}

Classical distributions are CSV files with ``d_A`` rows of ``d_B`` decimal
probabilities.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .channels import QuantumChannel, validate_channel
from .classical import JointDistribution, joint_distribution
from .errors import DimensionMismatch
from .states import STATE_TOL, BipartiteState, validate_density

FORMAT_VERSION = "1"


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(rows) -> np.ndarray:
    a = np.asarray(rows, dtype=float)
    if a.ndim != 3 or a.shape[2] != 2:
        raise ValueError("matrix must be a nested list of [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def state_to_dict(rho: BipartiteState) -> dict:
    return {"dim_a": rho.dim_a, "dim_b": rho.dim_b, "matrix": encode_matrix(rho.matrix)}


def state_from_dict(d: dict) -> BipartiteState:
    return validate_density(decode_matrix(d["matrix"]), (d["dim_a"], d["dim_b"]), tol=d.get("tol", STATE_TOL))


def channel_to_dict(ch: QuantumChannel) -> dict:
    return {"dim_in": ch.dim_in, "dim_out": ch.dim_out, "kraus": [encode_matrix(k) for k in ch.kraus]}


def channel_from_dict(d: dict) -> QuantumChannel:
    ch = validate_channel([decode_matrix(k) for k in d["kraus"]], **({"tol": d["tol"]} if "tol" in d else {}))
    if (ch.dim_in, ch.dim_out) != (d["dim_in"], d["dim_out"]):
        raise DimensionMismatch(
            f"Kraus operators are {ch.dim_out}x{ch.dim_in}, header says {d['dim_out']}x{d['dim_in']}"
        )
    return ch


def load_state(path) -> BipartiteState:
    return state_from_dict(json.loads(Path(path).read_text()))


def save_state(rho: BipartiteState, path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(rho)))


def load_channel(path) -> QuantumChannel:
    return channel_from_dict(json.loads(Path(path).read_text()))


def save_channel(ch: QuantumChannel, path) -> None:
    Path(path).write_text(json.dumps(channel_to_dict(ch)))


def load_distribution(path) -> JointDistribution:
    with open(path, newline="") as fh:
        rows = [[float(x) for x in row] for row in csv.reader(fh) if row and any(x.strip() for x in row)]
    if len({len(r) for r in rows}) > 1:
        raise ValueError("CSV rows have different lengths")
    return joint_distribution(rows)


def save_distribution(dist: JointDistribution, path) -> None:
    with open(path, "w", newline="") as fh:
        csv.writer(fh).writerows([repr(float(x)) for x in row] for row in dist.p)

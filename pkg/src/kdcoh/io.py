"""JSON file formats for states, bases, KD tables and CIP channel specs.

Complex matrices are stored as nested ``[re, im]`` pairs, row-major.
"""
from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from .errors import DomainError, StateFileError
from .kdq import KDDistribution
from .qstate import DensityOperator, OrthonormalBasis
from .channels import CIPSpec


def encode_matrix(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def decode_matrix(raw) -> np.ndarray:
    arr = np.asarray(raw, dtype=float)
    if arr.ndim == 2:  # real matrix given without imaginary parts
        return arr.astype(complex)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValueError(f"expected an n x n x 2 array of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def _key_line(text: str, key: str) -> int:
    m = re.search(rf'"{re.escape(key)}"\s*:', text)
    return text.count("\n", 0, m.start()) + 1 if m else 1


def _load(path) -> tuple[dict, str]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise StateFileError(f"{path}: cannot read ({exc.strerror})") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg}, column {exc.colno})") from exc
    if not isinstance(obj, dict):
        raise StateFileError(f"{path}:1: top-level value must be an object")
    return obj, text


def _field(obj, text, path, key):
    if key not in obj:
        raise StateFileError(f"{path}:1: missing field {key!r}")
    return obj[key]


def _matrix_field(obj, text, path, key) -> np.ndarray:
    raw = _field(obj, text, path, key)
    try:
        return decode_matrix(raw)
    except (ValueError, TypeError) as exc:
        raise StateFileError(f"{path}:{_key_line(text, key)}: field {key!r}: {exc}") from exc


def load_state(path) -> DensityOperator:
    obj, text = _load(path)
    m = _matrix_field(obj, text, path, "matrix")
    dims = obj.get("subsystem_dims")
    if "dim" in obj and obj["dim"] != m.shape[0]:
        raise StateFileError(f"{path}:{_key_line(text, 'dim')}: dim {obj['dim']} does not match matrix size {m.shape[0]}")
    try:
        return DensityOperator(m, tuple(dims) if dims else None)
    except DomainError as exc:
        raise StateFileError(f"{path}:{_key_line(text, 'matrix')}: {exc}") from exc


def save_state(rho: DensityOperator, path) -> None:
    obj = {"dim": rho.dim, "subsystem_dims": list(rho.subsystem_dims or []) or None,
           "matrix": encode_matrix(rho.matrix)}
    Path(path).write_text(json.dumps(obj, indent=1) + "\n")


def load_basis(path) -> OrthonormalBasis:
    obj, text = _load(path)
    cols = _matrix_field(obj, text, path, "columns")
    dims = obj.get("subsystem_dims")
    try:
        return OrthonormalBasis(cols, tuple(dims) if dims else None)
    except DomainError as exc:
        raise StateFileError(f"{path}:{_key_line(text, 'columns')}: {exc}") from exc


def save_basis(basis: OrthonormalBasis, path) -> None:
    obj = {"dim": basis.dim, "subsystem_dims": list(basis.subsystem_dims or []) or None,
           "columns": encode_matrix(basis.columns)}
    Path(path).write_text(json.dumps(obj, indent=1) + "\n")


def kd_to_dict(kd: KDDistribution) -> dict:
    out = {"dim": kd.dim, "table": encode_matrix(kd.table)}
    for name, b in (("a_basis", kd.a_basis), ("b_basis", kd.b_basis)):
        if b is not None:
            out[name] = encode_matrix(b.columns)
    return out


def load_cip(path) -> CIPSpec:
    obj, text = _load(path)
    probs = _field(obj, text, path, "probs")
    perms = _field(obj, text, path, "perms")
    try:
        return CIPSpec(np.asarray(probs, dtype=float), tuple(tuple(p) for p in perms))
    except (DomainError, TypeError, ValueError) as exc:
        raise StateFileError(f"{path}:{_key_line(text, 'perms')}: {exc}") from exc


def load_pair(path):
    """Susceptibility input: either ``rho0`` + ``drho`` or ``rho0`` + generator ``H``."""
    from .susceptibility import StateDerivativePair, unitary_derivative

    obj, text = _load(path)
    rho_m = _matrix_field(obj, text, path, "rho0")
    try:
        rho0 = DensityOperator(rho_m)
        if "drho" in obj:
            return StateDerivativePair(rho0, _matrix_field(obj, text, path, "drho"))
        if "H" in obj:
            return StateDerivativePair(rho0, unitary_derivative(rho0, _matrix_field(obj, text, path, "H")))
    except DomainError as exc:
        raise StateFileError(f"{path}:{_key_line(text, 'rho0')}: {exc}") from exc
    raise StateFileError(f"{path}:1: need either 'drho' or generator 'H'")

"""Constraint-system input files.

Schema (JSON)::

    {
      "name": "su2_spin1_trivial",                 # optional
      "m": 3,
      "dim_V": 4,
      "G_matrices": [ [[[re, im], ...], ...], ... ],   # m matrices, d x d
      "structure_constants": [{"a": 1, "b": 2, "c": 3, "value": 1.0}, ...],
      "inner_product": [[[re, im], ...], ...],     # optional, default identity
      "tolerances": {"operator": 1e-10, "rank": 1e-9}  # optional
    }

Indices are 1-based. Unlisted structure constants are zero, so both ``C_ab^c`` and
``C_ba^c`` must be given.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .cohomology import RANK_TOL
from .errors import ConfigurationError
from .observables import StructureConstants
from .quantize import DEFAULT_TOL, max_abs

SCHEMA_KEYS = {"name", "m", "dim_V", "G_matrices", "structure_constants", "inner_product", "tolerances", "description"}


@dataclass(frozen=True, eq=False)
class ConstraintSystem:
    name: str
    m: int
    dim_V: int
    G_matrices: tuple[np.ndarray, ...]
    structure_constants: StructureConstants
    inner_product: np.ndarray
    tolerances: dict = field(default_factory=dict)
    digest: str = ""

    @property
    def operator_tol(self) -> float:
        return float(self.tolerances.get("operator", DEFAULT_TOL))

    @property
    def rank_tol(self) -> float:
        return float(self.tolerances.get("rank", RANK_TOL))


def _matrix(raw, d: int, what: str, problems: list[str]) -> np.ndarray | None:
    if not isinstance(raw, list) or len(raw) != d or any(not isinstance(r, list) or len(r) != d for r in raw):
        problems.append(f"{what} must be a {d}x{d} array of [re, im] pairs")
        return None
    out = np.zeros((d, d), dtype=complex)
    for i, row in enumerate(raw):
        for j, z in enumerate(row):
            if not (isinstance(z, list) and len(z) == 2 and all(isinstance(t, (int, float)) for t in z)):
                problems.append(f"{what}[{i}][{j}] is not an [re, im] pair")
                return None
            out[i, j] = complex(z[0], z[1])
    return out


def digest_of(raw: dict) -> str:
    canon = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def parse_system(raw: dict, name: str = "system") -> ConstraintSystem:
    """Validate a decoded system; raises ConfigurationError listing every violated invariant."""
    problems: list[str] = []
    if not isinstance(raw, dict):
        raise ConfigurationError("system file must hold a JSON object")
    unknown = sorted(set(raw) - SCHEMA_KEYS)
    if unknown:
        problems.append(f"unknown fields: {', '.join(unknown)}")
    m, d = raw.get("m"), raw.get("dim_V")
    if not isinstance(m, int) or m < 1:
        problems.append("m must be a positive integer")
    if not isinstance(d, int) or d < 1:
        problems.append("dim_V must be a positive integer")
    if problems and (not isinstance(m, int) or not isinstance(d, int) or m < 1 or d < 1):
        raise ConfigurationError("invalid system", problems)

    inner = np.eye(d, dtype=complex)
    if raw.get("inner_product") is not None:
        h = _matrix(raw["inner_product"], d, "inner_product", problems)
        if h is not None:
            asym = max_abs(h - h.conj().T)
            if asym > 1e-12:
                problems.append(f"inner_product is not Hermitian: max asymmetry {asym:.3e}")
            elif np.min(np.linalg.eigvalsh((h + h.conj().T) / 2)) <= 0:
                problems.append("inner_product is not positive definite")
            inner = h

    mats = raw.get("G_matrices")
    G: list[np.ndarray] = []
    if not isinstance(mats, list) or len(mats) != m:
        problems.append(f"G_matrices must list exactly m={m} matrices")
    else:
        for a, g in enumerate(mats, start=1):
            mat = _matrix(g, d, f"G_matrices[{a}]", problems)
            if mat is None:
                continue
            asym = max_abs(inner @ mat - mat.conj().T @ inner)
            if asym > 1e-10 * d:
                problems.append(f"G_{a} is not Hermitian: max asymmetry {asym:.3e}")
            G.append(mat)

    entries: dict[tuple[int, int, int], Fraction] = {}
    for n, item in enumerate(raw.get("structure_constants", []) or []):
        try:
            a, b, c = int(item["a"]), int(item["b"]), int(item["c"])
            v = Fraction(str(item["value"]))
        except (KeyError, TypeError, ValueError):
            problems.append(f"structure_constants[{n}] must have integer a, b, c and a numeric value")
            continue
        if not all(1 <= x <= m for x in (a, b, c)):
            problems.append(f"structure_constants[{n}] index ({a},{b},{c}) outside 1..{m}")
            continue
        if (a, b, c) in entries:
            problems.append(f"structure constant ({a},{b},{c}) listed twice")
            continue
        entries[(a, b, c)] = v
    C = StructureConstants(m, entries, validate=False)
    problems.extend(C.violations())

    tols = raw.get("tolerances") or {}
    if not isinstance(tols, dict) or any(k not in ("operator", "rank") for k in tols):
        problems.append("tolerances may only set 'operator' and 'rank'")
        tols = {}
    if problems:
        raise ConfigurationError(f"invalid system {raw.get('name', name)!r}", problems)
    return ConstraintSystem(
        name=str(raw.get("name", name)),
        m=m,
        dim_V=d,
        G_matrices=tuple(G),
        structure_constants=C,
        inner_product=inner,
        tolerances=dict(tols),
        digest=digest_of(raw),
    )


def load_system(path: str | Path) -> ConstraintSystem:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigurationError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"parse error in {path}: {exc}") from exc
    return parse_system(raw, name=path.stem)


def encode_matrix(a: np.ndarray) -> list:
    # adding 0.0 turns negative zeros into plain zeros
    return [[[float(z.real) + 0.0, float(z.imag) + 0.0] for z in row] for row in np.asarray(a, dtype=complex)]


def system_to_json(name: str, G_mats, entries: dict[tuple[int, int, int], float], inner=None, description: str = "") -> dict:
    """Inverse of :func:`parse_system` for writing example files."""
    G_mats = [np.asarray(g, dtype=complex) for g in G_mats]
    out = {
        "name": name,
        "m": len(G_mats),
        "dim_V": G_mats[0].shape[0],
        "G_matrices": [encode_matrix(g) for g in G_mats],
        "structure_constants": [
            {"a": a, "b": b, "c": c, "value": float(v)} for (a, b, c), v in sorted(entries.items())
        ],
    }
    if description:
        out["description"] = description
    if inner is not None:
        out["inner_product"] = encode_matrix(inner)
    return out

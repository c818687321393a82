"""Instance serialization: SDPA sparse text format and a native JSON form.

The sparse format is the ecosystem's block-diagonal text interchange: a
header with the variable count, block count, block sizes (negative size =
diagonal block) and the objective vector, followed by entry lines

    <matrix#> <block#> <row> <col> <value>

with 1-based upper-triangle indices; matrix 0 holds the constant matrix
and matrix i the coefficient of variable i.  This reader supports one
semidefinite block plus at most one diagonal block, whose rows map onto
the instance's linear constraints.  Values are written with 17 significant
digits so parse(write(inst)) reproduces every entry exactly.

The native JSON format stores dense matrices verbatim and exists for exact
reproducibility of experiments; matrix-pair files feed the one-shot
projection command.
"""

from __future__ import annotations

import io
import json
from typing import TextIO

import numpy as np

from .errors import ParseError, UnsupportedFeature
from .model import SdpInstance

_FMT = "%.17g"


def _fmt(x: float) -> str:
    return _FMT % float(x)


def parse_sdpa(source: str | TextIO) -> SdpInstance:
    """Parse SDPA sparse format into an instance.

    Raises ParseError with the offending line number on malformed input
    and UnsupportedFeature for multiple semidefinite blocks.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    lines = source.read().splitlines()

    idx = 0

    def next_data_line() -> tuple[int, str]:
        nonlocal idx
        while idx < len(lines):
            lineno = idx + 1
            text = lines[idx]
            idx += 1
            stripped = text.strip()
            if stripped and not stripped.startswith(("*", '"')):
                return lineno, stripped
        raise ParseError("unexpected end of file", len(lines))

    def parse_int(token: str, lineno: int, what: str) -> int:
        try:
            return int(token)
        except ValueError:
            raise ParseError(f"bad {what} {token!r}", lineno) from None

    lineno, text = next_data_line()
    k = parse_int(text.split()[0], lineno, "variable count")
    if k < 1:
        raise ParseError(f"need at least one variable, got {k}", lineno)

    lineno, text = next_data_line()
    nblocks = parse_int(text.split()[0], lineno, "block count")

    lineno, text = next_data_line()
    cleaned = text.replace("{", " ").replace("}", " ").replace("(", " ").replace(")", " ").replace(",", " ")
    sizes = [parse_int(tok, lineno, "block size") for tok in cleaned.split()]
    if len(sizes) != nblocks:
        raise ParseError(f"{len(sizes)} block sizes for {nblocks} blocks", lineno)
    sdp_blocks = [i for i, s in enumerate(sizes) if s > 0]
    diag_blocks = [i for i, s in enumerate(sizes) if s < 0]
    if len(sdp_blocks) != 1 or len(diag_blocks) > 1 or len(sizes) != len(sdp_blocks) + len(diag_blocks):
        raise UnsupportedFeature(
            "supported layouts: one semidefinite block plus at most one diagonal block"
        )
    sdp_block = sdp_blocks[0] + 1
    n = sizes[sdp_blocks[0]]
    diag_block = diag_blocks[0] + 1 if diag_blocks else None
    n_lin = -sizes[diag_blocks[0]] if diag_blocks else 0

    lineno, text = next_data_line()
    cleaned = text.replace("{", " ").replace("}", " ").replace(",", " ")
    toks = cleaned.split()
    if len(toks) != k:
        raise ParseError(f"objective has {len(toks)} entries, expected {k}", lineno)
    try:
        b = np.array([float(t) for t in toks])
    except ValueError:
        raise ParseError("bad objective entry", lineno) from None

    C = np.zeros((n, n))
    A = [np.zeros((n, n)) for _ in range(k)]
    c_lin = np.zeros(n_lin)
    a_lin = np.zeros((n_lin, k))

    while idx < len(lines):
        raw = lines[idx]
        lineno = idx + 1
        idx += 1
        stripped = raw.strip()
        if not stripped or stripped.startswith(("*", '"')):
            continue
        toks = stripped.split()
        if len(toks) != 5:
            raise ParseError(f"expected 5 fields, got {len(toks)}", lineno)
        mat = parse_int(toks[0], lineno, "matrix index")
        blk = parse_int(toks[1], lineno, "block index")
        row = parse_int(toks[2], lineno, "row index")
        col = parse_int(toks[3], lineno, "column index")
        try:
            val = float(toks[4])
        except ValueError:
            raise ParseError(f"bad value {toks[4]!r}", lineno) from None
        if not 0 <= mat <= k:
            raise ParseError(f"matrix index {mat} outside [0, {k}]", lineno)
        if blk == sdp_block:
            if not (1 <= row <= n and 1 <= col <= n):
                raise ParseError(f"entry ({row}, {col}) outside the {n}x{n} block", lineno)
            if row > col:
                row, col = col, row
            target = C if mat == 0 else A[mat - 1]
            target[row - 1, col - 1] = val
            target[col - 1, row - 1] = val
        elif diag_block is not None and blk == diag_block:
            if row != col:
                raise ParseError("off-diagonal entry in a diagonal block", lineno)
            if not 1 <= row <= n_lin:
                raise ParseError(f"diagonal index {row} outside the block", lineno)
            if mat == 0:
                c_lin[row - 1] = val
            else:
                a_lin[row - 1, mat - 1] = val
        else:
            raise ParseError(f"unknown block index {blk}", lineno)

    linear = [(a_lin[j].copy(), float(c_lin[j])) for j in range(n_lin)]
    return SdpInstance(b=b, A=A, C=C, linear_constraints=linear)


def write_sdpa(inst: SdpInstance, target: TextIO | None = None) -> str | None:
    """Serialize an instance to SDPA sparse text; returns the string when
    no target stream is given.  Output is byte-stable for equal input."""
    buf = io.StringIO()
    rows = inst.all_linear_constraints() if inst.nonneg_y else inst.linear_constraints
    n_lin = len(rows)
    buf.write(f"{inst.k}\n")
    buf.write(f"{2 if n_lin else 1}\n")
    if n_lin:
        buf.write(f"{inst.n} -{n_lin}\n")
    else:
        buf.write(f"{inst.n}\n")
    buf.write(" ".join(_fmt(x) for x in inst.b) + "\n")

    def emit(mat_idx: int, dense: np.ndarray, lin_col):
        for i in range(inst.n):
            for j in range(i, inst.n):
                if dense[i, j] != 0.0:
                    buf.write(
                        f"{mat_idx} 1 {i + 1} {j + 1} {_fmt(dense[i, j])}\n"
                    )
        if n_lin:
            for r in range(n_lin):
                v = lin_col(r)
                if v != 0.0:
                    buf.write(f"{mat_idx} 2 {r + 1} {r + 1} {_fmt(v)}\n")

    emit(0, inst.C, lambda r: rows[r][1])
    for i, Ai in enumerate(inst.A):
        emit(i + 1, Ai, lambda r, _i=i: rows[r][0][_i])

    text = buf.getvalue()
    if target is None:
        return text
    target.write(text)
    return None


def instance_to_dict(inst: SdpInstance) -> dict:
    return {
        "kind": "sdp-instance",
        "n": inst.n,
        "k": inst.k,
        "b": inst.b.tolist(),
        "C": inst.C.tolist(),
        "A": [a.tolist() for a in inst.A],
        "linear_constraints": [
            {"a": a.tolist(), "rhs": ca} for a, ca in inst.linear_constraints
        ],
        "nonneg_y": inst.nonneg_y,
    }


def instance_from_dict(data: dict) -> SdpInstance:
    if data.get("kind") != "sdp-instance":
        raise ParseError("not an instance document")
    return SdpInstance(
        b=np.array(data["b"], dtype=float),
        A=[np.array(a, dtype=float) for a in data["A"]],
        C=np.array(data["C"], dtype=float),
        linear_constraints=[
            (np.array(row["a"], dtype=float), float(row["rhs"]))
            for row in data.get("linear_constraints", [])
        ],
        nonneg_y=bool(data.get("nonneg_y", False)),
    )


def save_instance(inst: SdpInstance, path: str):
    """Write an instance; .dat-s extension selects the sparse text format,
    anything else gets native JSON."""
    if str(path).endswith(".dat-s"):
        with open(path, "w") as fh:
            write_sdpa(inst, fh)
    else:
        with open(path, "w") as fh:
            json.dump(instance_to_dict(inst), fh)
            fh.write("\n")


def load_instance(path: str) -> SdpInstance:
    with open(path) as fh:
        text = fh.read()
    if str(path).endswith(".dat-s"):
        return parse_sdpa(text)
    return instance_from_dict(json.loads(text))


def save_matrix_pair(X, D, path: str):
    with open(path, "w") as fh:
        json.dump(
            {
                "kind": "matrix-pair",
                "X": np.asarray(X, dtype=float).tolist(),
                "D": np.asarray(D, dtype=float).tolist(),
            },
            fh,
        )
        fh.write("\n")


def load_matrix_pair(path: str) -> tuple[np.ndarray, np.ndarray]:
    with open(path) as fh:
        data = json.load(fh)
    if data.get("kind") != "matrix-pair":
        raise ParseError("not a matrix-pair document")
    return np.array(data["X"], dtype=float), np.array(data["D"], dtype=float)

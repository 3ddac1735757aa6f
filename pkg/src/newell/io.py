"""File formats: snapshot/table/profile CSVs and key = value sidecars.

Every writer is atomic (temp file + rename). Sidecars hold one
``key = <json value>`` pair per line.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .pde import Field
from .scattering import KGrid, ScatteringTable, cofactor

SNAPSHOT_HEADER = ["x", "re_q", "im_q", "r"]
TABLE_HEADER = (
    ["k"]
    + [f"{part}_s{i}{j}" for i in range(1, 4) for j in range(1, 4) for part in ("re", "im")]
    + ["re_r1", "im_r1", "re_r2", "im_r2"]
)
PROFILE_HEADER = ["x", "t", "region", "zeta", "k0", "nu", "re_q_asym", "im_q_asym", "abs_q_asym"]
COMPARE_HEADER = ["x", "abs_q_numeric", "abs_q_asym", "region", "rel_err"]


def atomic_write(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _jsonable(value):
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def format_kv(data: dict) -> str:
    return "".join(f"{key} = {json.dumps(_jsonable(val))}\n" for key, val in data.items())


def write_kv(path, data: dict) -> Path:
    return atomic_write(path, format_kv(data))


def read_kv(path) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        key, _, val = line.partition(" = ")
        out[key.strip()] = json.loads(val)
    return out


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta")


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(v) -> str:
    return repr(float(v))


def write_snapshot(path, field: Field, meta: dict | None = None) -> Path:
    rows = ([_num(x), _num(q.real), _num(q.imag), _num(r)] for x, q, r in zip(field.x, field.q, field.r))
    atomic_write(path, _csv_text(SNAPSHOT_HEADER, rows))
    info = {"t": field.t, "x0": field.x0, "dx": field.dx, "N": field.n, "sigma": field.sigma}
    info.update(meta or {})
    write_kv(sidecar_path(path), info)
    return Path(path)


def _read_numeric(path, header):
    with open(path, newline="") as fh:
        first = fh.readline().strip().split(",")
        if first != header:
            raise ValueError(f"{path}: unexpected header {first[:4]}...")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return data


def read_snapshot(path) -> tuple[Field, dict]:
    data = _read_numeric(path, SNAPSHOT_HEADER)
    meta = read_kv(sidecar_path(path)) if sidecar_path(path).exists() else {}
    x = data[:, 0]
    dx = float(meta.get("dx", x[1] - x[0]))
    field = Field(
        x0=float(x[0]),
        dx=dx,
        q=data[:, 1] + 1j * data[:, 2],
        r=data[:, 3],
        t=float(meta.get("t", 0.0)),
        sigma=int(meta.get("sigma", 1)),
    )
    return field, meta


def write_table(path, table: ScatteringTable, meta: dict | None = None) -> Path:
    rows = []
    for i in range(len(table)):
        row = [_num(table.k[i])]
        for z in table.s[i].reshape(-1):
            row += [_num(z.real), _num(z.imag)]
        row += [_num(table.r1[i].real), _num(table.r1[i].imag), _num(table.r2[i].real), _num(table.r2[i].imag)]
        rows.append(row)
    atomic_write(path, _csv_text(TABLE_HEADER, rows))
    g = table.grid
    info = {"sigma": table.sigma, "k_min": g.k_min, "k_max": g.k_max, "count": g.count}
    info.update(meta or {})
    write_kv(sidecar_path(path), info)
    return Path(path)


def read_table(path) -> ScatteringTable:
    data = _read_numeric(path, TABLE_HEADER)
    meta = read_kv(sidecar_path(path))
    k = data[:, 0]
    s = (data[:, 1:19:2] + 1j * data[:, 2:19:2]).reshape(-1, 3, 3)
    r1 = data[:, 19] + 1j * data[:, 20]
    r2 = data[:, 21] + 1j * data[:, 22]
    grid = KGrid(float(meta["k_min"]), float(meta["k_max"]), int(meta["count"]))
    if not np.allclose(k, grid.values(), rtol=0, atol=1e-12):
        raise ValueError(f"{path}: k column does not match the recorded grid")
    return ScatteringTable(grid.values(), s, cofactor(s), r1, r2, int(meta["sigma"]), grid, {})


def write_rows(path, header, rows, meta: dict | None = None) -> Path:
    atomic_write(path, _csv_text(header, rows))
    if meta is not None:
        write_kv(sidecar_path(path), meta)
    return Path(path)

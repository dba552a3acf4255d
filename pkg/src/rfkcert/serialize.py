"""File formats for all emitted artifacts.

Every number goes through repr, every JSON document is written with sorted
keys, and the manifest hashes each file, so a repeated run with the same
inputs produces byte-identical output.  Payloads live in CSV, provenance in
a JSON sidecar next to them.
"""

from __future__ import annotations

import hashlib
import json
import os

import numpy as np

from .mesh import Mesh2D
from .profiles import ParallelProfile
from .params import Side

SCHEMA = 1


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Side):
        return obj.value
    return obj


def canonical_json(obj) -> str:
    doc = _jsonable(obj)
    if isinstance(doc, dict):
        doc.setdefault("schema", SCHEMA)
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def write_json(path: str, obj) -> str:
    with open(path, "w") as fh:
        fh.write(canonical_json(obj))
    return path


def read_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def write_csv(path: str, header: str, columns) -> str:
    rows = np.broadcast_arrays(*columns)
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in zip(*rows):
            fh.write(",".join(repr(float(x)) for x in row) + "\n")
    return path


def write_profile(path: str, profile: ParallelProfile) -> list[str]:
    """Profile payload as `delta,s,v,S,V` CSV plus a JSON sidecar."""
    write_csv(path, "delta,s,v,S,V",
               (profile.delta, profile.s, profile.v, profile.S, profile.V))
    sidecar = os.path.splitext(path)[0] + ".json"
    write_json(sidecar, {
        "side": profile.side,
        "grid": len(profile.delta),
        "delta_omega": profile.delta_omega,
        "domain_volume": profile.domain_volume,
        "boundary_measure": profile.boundary_measure,
        "N": profile.N,
        "meta": profile.meta,
    })
    return [path, sidecar]


def read_profile(path: str) -> ParallelProfile:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    side_meta = read_json(os.path.splitext(path)[0] + ".json")
    return ParallelProfile(
        side=Side(side_meta["side"]),
        delta=data[:, 0], s=data[:, 1], v=data[:, 2], S=data[:, 3], V=data[:, 4],
        delta_omega=side_meta["delta_omega"],
        domain_volume=side_meta["domain_volume"],
        boundary_measure=side_meta["boundary_measure"],
        N=side_meta["N"],
        meta=side_meta.get("meta", {}),
    )


def write_radial_pair(path: str, pair) -> list[str]:
    """Eigenpair payload as `r,phi,dphi` CSV plus JSON metadata."""
    write_csv(path, "r,phi,dphi", (pair.r, pair.phi, pair.dphi))
    prob = pair.problem
    sidecar = os.path.splitext(path)[0] + ".json"
    write_json(sidecar, {
        "lambda": pair.lam,
        "zero_count": pair.zero_count,
        "r_star": pair.r_star,
        "problem": {
            "r0": prob.r0, "r1": prob.r1, "mode": prob.mode,
            "bc_inner": prob.bc_inner.kind, "bc_outer": prob.bc_outer.kind,
            "robin_inner": prob.bc_inner.k, "robin_outer": prob.bc_outer.k,
            "N": prob.params.N, "p": prob.params.p,
        },
        "meta": pair.meta,
    })
    return [path, sidecar]


def write_plane_pair(path: str, pair) -> list[str]:
    """Planar eigenvector as `vertex,value` CSV plus JSON metadata."""
    with open(path, "w") as fh:
        fh.write("vertex,value\n")
        for i, v in enumerate(pair.values):
            fh.write(f"{i},{float(v)!r}\n")
    sidecar = os.path.splitext(path)[0] + ".json"
    write_json(sidecar, {
        "eigenvalue": pair.eigenvalue,
        "dirichlet_tags": list(pair.dirichlet_tags),
        "residual": pair.residual,
        "meta": pair.meta,
    })
    return [path, sidecar]


def write_report(path: str, report) -> str:
    return write_json(path, report.to_dict())


def write_mesh(path: str, mesh: Mesh2D) -> str:
    with open(path, "w") as fh:
        fh.write(f"{mesh.n_nodes}\n")
        for (x, y), tag in zip(mesh.nodes, mesh.tags):
            fh.write(f"{float(x)!r} {float(y)!r} {int(tag)}\n")
        fh.write(f"{len(mesh.tris)}\n")
        for i, j, k in mesh.tris:
            fh.write(f"{i} {j} {k}\n")
    return path


def read_mesh(path: str) -> Mesh2D:
    with open(path) as fh:
        tokens = fh.read().split("\n")
    n = int(tokens[0])
    nodes = np.empty((n, 2))
    tags = np.empty(n, dtype=np.int8)
    for i in range(n):
        x, y, t = tokens[1 + i].split()
        nodes[i] = float(x), float(y)
        tags[i] = int(t)
    m = int(tokens[1 + n])
    tris = np.empty((m, 3), dtype=np.int64)
    for i in range(m):
        tris[i] = [int(t) for t in tokens[2 + n + i].split()]
    h_max = 0.0
    for a, b in ((0, 1), (1, 2), (2, 0)):
        d = nodes[tris[:, a]] - nodes[tris[:, b]]
        h_max = max(h_max, float(np.hypot(d[:, 0], d[:, 1]).max()))
    return Mesh2D(nodes=nodes, tris=tris, tags=tags, h_max=h_max, meta={"source": path})


def write_polygon(path: str, loops) -> str:
    """Loop soup as counts plus `x y` lines; the first loop is the outer one."""
    with open(path, "w") as fh:
        fh.write(f"{len(loops)}\n")
        for loop in loops:
            arr = np.asarray(loop, dtype=float)
            fh.write(f"{len(arr)}\n")
            for x, y in arr:
                fh.write(f"{float(x)!r} {float(y)!r}\n")
    return path


def read_polygon(path: str) -> list[np.ndarray]:
    with open(path) as fh:
        tokens = fh.read().split()
    pos = 0
    count = int(tokens[pos]); pos += 1
    loops = []
    for _ in range(count):
        n = int(tokens[pos]); pos += 1
        arr = np.array(tokens[pos:pos + 2 * n], dtype=float).reshape(n, 2)
        pos += 2 * n
        loops.append(arr)
    if not loops:
        raise ValueError(f"{path}: no loops")
    return loops


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(outdir: str, produced, stale=(), extra=None) -> str:
    """Record every produced file with its content hash.

    `stale` marks files from a run that aborted partway; readers should
    treat those as suspect.  The manifest itself is excluded from hashing.
    """
    entries = []
    for path in sorted(set(produced) | set(stale)):
        rel = os.path.relpath(path, outdir)
        entry = {"path": rel, "stale": path in set(stale)}
        if os.path.exists(path):
            entry["sha256"] = sha256_file(path)
            entry["bytes"] = os.path.getsize(path)
        else:
            entry["stale"] = True
        entries.append(entry)
    doc = {"files": entries}
    if extra:
        doc.update(_jsonable(extra))
    return write_json(os.path.join(outdir, "manifest.json"), doc)

"""File formats: witness JSON, path JSON, sample CSV, report JSON.

All floats serialize through repr (JSON) or %.17g (CSV), which round
trips float64 exactly, so a written path reloads bit for bit.  Writes
go through a temporary file and an atomic rename.
"""

from __future__ import annotations

import json
import os
import tempfile
from typing import Iterable

import numpy as np

from .errors import InputError
from .generators import GeneratorSpec, generate_points
from .geometry import ConeSpec, UnitDirection
from .mollifier import SampleRow, build_smooth_path, make_kernel
from .pipeline import PathBuild
from .skeleton import (
    AnchorEntry,
    AnchorSequence,
    WitnessSequence,
    build_skeleton,
)


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".pathcert-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _f17(value: float) -> str:
    return format(float(value), ".17g")


# ---- witness files ------------------------------------------------------


def witness_from_dict(data: dict) -> WitnessSequence:
    """Parse {"dimension": n, "pairs": [...]} or {"dimension", "generator"}."""
    if not isinstance(data, dict):
        raise InputError("witness document must be a JSON object")
    if "dimension" not in data:
        raise InputError("witness document needs a 'dimension' key")
    dimension = data["dimension"]
    if not isinstance(dimension, int) or dimension < 1:
        raise InputError(f"dimension must be a positive integer, got {dimension!r}")
    if ("pairs" in data) == ("generator" in data):
        raise InputError("witness document needs exactly one of 'pairs' or 'generator'")
    if "generator" in data:
        g = data["generator"]
        if not isinstance(g, dict) or "kind" not in g:
            raise InputError("generator must be an object with a 'kind' key")
        known = {"kind", "count", "start", "stop", "axis"}
        unknown = set(g) - known
        if unknown:
            raise InputError(f"unknown generator keys: {', '.join(sorted(unknown))}")
        spec = GeneratorSpec(
            kind=g["kind"],
            dimension=dimension,
            count=int(g.get("count", GeneratorSpec.count)),
            start=float(g.get("start", GeneratorSpec.start)),
            stop=float(g.get("stop", GeneratorSpec.stop)),
            axis=tuple(g["axis"]) if "axis" in g else None,
        )
        return WitnessSequence.ingest(generate_points(spec))
    pairs = data["pairs"]
    if not isinstance(pairs, list) or not pairs:
        raise InputError("'pairs' must be a non-empty list")
    points = []
    directions = []
    explicit = None
    for i, pair in enumerate(pairs):
        if not isinstance(pair, dict) or "x" not in pair:
            raise InputError(f"pair {i} must be an object with an 'x' key")
        points.append(np.asarray(pair["x"], dtype=float))
        has_y = "y" in pair
        if explicit is None:
            explicit = has_y
        elif explicit != has_y:
            raise InputError("either every pair carries 'y' or none does")
        if has_y:
            directions.append(np.asarray(pair["y"], dtype=float))
    return WitnessSequence.ingest(points, directions if explicit else None)


def load_witness(path: str) -> WitnessSequence:
    try:
        with open(path) as handle:
            data = json.load(handle)
    except OSError as exc:
        raise InputError(f"cannot read witness file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"witness file is not valid JSON: {exc}") from exc
    return witness_from_dict(data)


# ---- path files ---------------------------------------------------------


def build_to_dict(build: PathBuild) -> dict:
    anchors = build.anchors
    return {
        "dimension": anchors.dimension,
        "k_max": build.k_max,
        "seed": build.seed,
        "half_angle": build.half_angle,
        "cover_size": build.cover_size,
        "parity": anchors.parity,
        "cone_axis": [float(v) for v in anchors.cone.axis.coords],
        "kernel_c": build.path.kernel.c,
        "domain": [build.path.domain_inf, build.path.domain_sup],
        "witness_scale": build.witness.scale if build.witness is not None else 1.0,
        "matched": [[int(k), int(i)] for k, i in anchors.matched],
        "anchors": [
            {
                "k": entry.k,
                "source": entry.source,
                "a": [float(v) for v in entry.a],
                "b": [float(v) for v in entry.b.coords],
                "t0": entry.t0,
                "t1": entry.t1,
                "t2": entry.t2,
            }
            for entry in anchors.entries
        ],
    }


def build_from_dict(data: dict) -> PathBuild:
    """Rebuild a path from its JSON form.

    The skeleton and windows are reconstructed from the stored anchors,
    so a reloaded path evaluates bit for bit like the original.
    """
    if not isinstance(data, dict):
        raise InputError("path document must be a JSON object")
    required = {
        "dimension",
        "k_max",
        "seed",
        "half_angle",
        "parity",
        "cone_axis",
        "domain",
        "matched",
        "anchors",
    }
    missing = required - set(data)
    if missing:
        raise InputError(f"path document misses keys: {', '.join(sorted(missing))}")
    cone = ConeSpec(UnitDirection(np.asarray(data["cone_axis"], dtype=float)))
    entries = []
    for item in data["anchors"]:
        entries.append(
            AnchorEntry(
                k=int(item["k"]),
                a=np.asarray(item["a"], dtype=float),
                b=UnitDirection(np.asarray(item["b"], dtype=float)),
                source=str(item["source"]),
                t0=float(item["t0"]),
                t1=float(item["t1"]),
                t2=float(item["t2"]),
            )
        )
    anchors = AnchorSequence(
        parity=str(data["parity"]),
        cone=cone,
        entries=tuple(entries),
        matched=tuple((int(k), int(i)) for k, i in data["matched"]),
    )
    skeleton = build_skeleton(anchors)
    path = build_smooth_path(anchors, skeleton=skeleton)
    stored_kernel = data.get("kernel_c")
    if stored_kernel is not None and abs(stored_kernel - path.kernel.c) > 1e-12:
        raise InputError("stored kernel constant deviates from the computed one")
    stored_domain = data.get("domain")
    if stored_domain is not None:
        lo, hi = float(stored_domain[0]), float(stored_domain[1])
        if lo != path.domain_inf or hi != path.domain_sup:
            raise InputError("stored domain deviates from the rebuilt one")
    return PathBuild(
        witness=None,
        k_max=int(data["k_max"]),
        half_angle=float(data["half_angle"]),
        seed=int(data["seed"]),
        cover_size=int(data.get("cover_size", 0)),
        cone=cone,
        parity=anchors.parity,
        anchors=anchors,
        skeleton=skeleton,
        path=path,
    )


def save_build(path: str, build: PathBuild) -> None:
    atomic_write_text(path, json.dumps(build_to_dict(build), indent=2) + "\n")


def load_build(path: str) -> PathBuild:
    try:
        with open(path) as handle:
            data = json.load(handle)
    except OSError as exc:
        raise InputError(f"cannot read path file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"path file is not valid JSON: {exc}") from exc
    return build_from_dict(data)


# ---- samples and reports ------------------------------------------------


def samples_to_csv(rows: Iterable[SampleRow], dimension: int) -> str:
    header = (
        ["t"]
        + [f"s{i}" for i in range(1, dimension + 1)]
        + [f"d{i}" for i in range(1, dimension + 1)]
        + ["norm_s", "norm_ds", "product"]
    )
    lines = [",".join(header)]
    for row in rows:
        fields = (
            [_f17(row.t)]
            + [_f17(v) for v in row.s]
            + [_f17(v) for v in row.ds]
            + [_f17(row.norm_s), _f17(row.norm_ds), _f17(row.product)]
        )
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def reports_to_json(reports) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2) + "\n"


def probe_to_json(report) -> str:
    data = {
        "field": report.field_name,
        "epsilon": report.epsilon,
        "limsup_estimate": report.limsup_estimate,
        "verdict": report.verdict,
        "matched_anchors": report.matched_count,
        "domain": [report.domain[0], report.domain[1]],
        "tail_profile": [
            {"delta": delta, "sup": sup} for delta, sup in report.tail_profile
        ],
    }
    return json.dumps(data, indent=2) + "\n"


def tail_to_csv(report) -> str:
    lines = ["delta,sup"]
    for delta, sup in report.tail_profile:
        lines.append(f"{_f17(delta)},{_f17(sup)}")
    return "\n".join(lines) + "\n"

"""CSV and JSON serialization of fields and schedules.

Single-valued fields use the line-oriented CSV form ``t,n,value`` (one row
per on-support point) and the structured JSON form
``{"horizon": T, "slices": [[...], ...]}``.  Wave fields serialize to JSON
only, with one slice table per chiral component (complex entries become
``[re, im]`` pairs).  Schedules serialize to JSON with explicit ``null`` for
undefined sites.

Readers reject parity and cone violations, duplicated rows, and slices of
the wrong length; on-support points missing from a CSV file are taken to be
zero.
"""

from __future__ import annotations

import csv
import json
import math

import numpy as np

from .lattice import (
    CoinSchedule,
    ComplexWaveField,
    FluxField,
    FormatError,
    JumpSchedule,
    ProbabilitySequence,
    ScalarField,
    WaveField,
    from_storage_index,
    to_storage_index,
    SupportError,
)

SCHEMA_VERSION = 1


def _open_write(path):
    return open(path, "w", newline="")


def write_field_csv(field, path) -> None:
    """Write a single-valued field as ``t,n,value`` rows in (t, n) order."""
    with _open_write(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "n", "value"])
        for t, s in enumerate(field.slices):
            for k, v in enumerate(s):
                writer.writerow([t, from_storage_index(k, t), repr(float(v))])


def _parse_row(row, lineno, ncols):
    if len(row) != ncols:
        raise FormatError(f"row {lineno}: expected {ncols} columns, got {len(row)}")
    try:
        t = int(row[0])
        n = int(row[1])
        vals = [float(x) for x in row[2:]]
    except ValueError as exc:
        raise FormatError(f"row {lineno}: {exc}") from None
    return t, n, vals


def _read_csv_slices(path, ncols=3):
    """Collect raw slices from a t,n,value[,...] CSV file."""
    per_t: dict[int, dict[int, list[float]]] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise FormatError(f"{path}: empty file")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            t, n, vals = _parse_row(row, lineno, ncols)
            try:
                k = to_storage_index(n, t)
            except SupportError as exc:
                raise FormatError(f"row {lineno}: {exc}") from None
            slot = per_t.setdefault(t, {})
            if k in slot:
                raise FormatError(f"row {lineno}: duplicate entry for (n={n}, t={t})")
            slot[k] = vals
    if not per_t:
        raise FormatError(f"{path}: no data rows")
    horizon = max(per_t)
    slices = []
    for t in range(horizon + 1):
        s = np.zeros((t + 1, ncols - 2))
        for k, vals in per_t.get(t, {}).items():
            s[k] = vals
        slices.append(s)
    return slices


def read_probability_csv(path) -> ProbabilitySequence:
    slices = [s[:, 0] for s in _read_csv_slices(path)]
    try:
        return ProbabilitySequence(slices, accept_tol=1e-9, renormalize=True)
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from None


def write_field_json(field, path) -> None:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "horizon": len(field.slices) - 1,
        "slices": [[float(v) for v in s] for s in field.slices],
    }
    with _open_write(path) as fh:
        json.dump(doc, fh)
        fh.write("\n")


def _load_json(path):
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON: {exc}") from None


def _json_slices(doc, path):
    try:
        horizon = int(doc["horizon"])
        slices = doc["slices"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{path}: missing or malformed field document: {exc}") from None
    if len(slices) != horizon + 1:
        raise FormatError(
            f"{path}: horizon {horizon} but {len(slices)} slices present")
    for t, s in enumerate(slices):
        if len(s) != t + 1:
            raise FormatError(
                f"{path}: slice t={t} has {len(s)} entries, expected {t + 1}")
    return slices


def read_probability_json(path) -> ProbabilitySequence:
    slices = _json_slices(_load_json(path), path)
    try:
        return ProbabilitySequence(slices, accept_tol=1e-9, renormalize=True)
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from None


def write_flux_json(flux: FluxField, path) -> None:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "horizon": flux.steps,
        "slices": [[float(v) for v in s] for s in flux.slices],
    }
    with _open_write(path) as fh:
        json.dump(doc, fh)
        fh.write("\n")


def _wave_payload(w):
    if isinstance(w, ComplexWaveField):
        conv = lambda v: [v.real, v.imag]
        kind = "complex"
    else:
        conv = float
        kind = "real"
    return {
        "schema_version": SCHEMA_VERSION,
        "horizon": w.horizon,
        "kind": kind,
        "plus": [[conv(v) for v in s] for s in w.plus_slices],
        "minus": [[conv(v) for v in s] for s in w.minus_slices],
    }


def write_wavefield_json(w, path) -> None:
    with _open_write(path) as fh:
        json.dump(_wave_payload(w), fh)
        fh.write("\n")


def read_wavefield_json(path):
    doc = _load_json(path)
    kind = doc.get("kind", "real")
    if kind == "complex":
        conv = lambda v: complex(v[0], v[1])
        cls = ComplexWaveField
    else:
        conv = float
        cls = WaveField
    plus = [[conv(v) for v in s] for s in doc["plus"]]
    minus = [[conv(v) for v in s] for s in doc["minus"]]
    return cls(plus, minus)


def write_schedule_json(schedule, path) -> None:
    kind = "coin" if isinstance(schedule, CoinSchedule) else "jump"
    entries = []
    for t in range(schedule.steps):
        vals = schedule.value_slices[t]
        defined = schedule.defined_slices[t]
        for k in range(t + 1):
            entries.append({
                "t": t,
                "n": from_storage_index(k, t),
                "value": float(vals[k]) if defined[k] else None,
            })
    doc = {
        "schema_version": SCHEMA_VERSION,
        "horizon": schedule.steps,
        "kind": kind,
        "entries": entries,
    }
    with _open_write(path) as fh:
        json.dump(doc, fh)
        fh.write("\n")


def read_schedule_json(path):
    doc = _load_json(path)
    try:
        steps = int(doc["horizon"])
        kind = doc["kind"]
        entries = doc["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{path}: malformed schedule document: {exc}") from None
    if kind not in ("coin", "jump"):
        raise FormatError(f"{path}: unknown schedule kind {kind!r}")
    values = [np.full(t + 1, math.nan) for t in range(steps)]
    defined = [np.zeros(t + 1, dtype=bool) for t in range(steps)]
    seen = set()
    for e in entries:
        try:
            t = int(e["t"])
            n = int(e["n"])
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"{path}: malformed schedule entry {e!r}") from None
        if not 0 <= t < steps:
            raise FormatError(f"{path}: entry at t={t} outside horizon {steps}")
        try:
            k = to_storage_index(n, t)
        except SupportError as exc:
            raise FormatError(f"{path}: {exc}") from None
        if (t, k) in seen:
            raise FormatError(f"{path}: duplicate schedule entry for (n={n}, t={t})")
        seen.add((t, k))
        if e.get("value") is not None:
            values[t][k] = float(e["value"])
            defined[t][k] = True
    cls = CoinSchedule if kind == "coin" else JumpSchedule
    return cls(values, defined)


def write_mc_csv(rho: ProbabilitySequence, stderr: ScalarField, path) -> None:
    """Monte Carlo output: ``t,n,rho,stderr`` rows."""
    with _open_write(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "n", "rho", "stderr"])
        for t in range(rho.horizon + 1):
            rs = rho.slices[t]
            es = stderr.slices[t]
            for k in range(t + 1):
                writer.writerow(
                    [t, from_storage_index(k, t), repr(float(rs[k])), repr(float(es[k]))])

"""CSV and JSON readers/writers for pipeline artifacts.

All CSV artifacts may carry leading ``#`` comment lines (used for provenance
stamps); readers skip them. Floats are written with Python's shortest
round-trip repr so artifacts reload bit-exactly.
"""

import csv
import io
import json
from pathlib import Path

import numpy as np

from ..errors import LengthMismatch
from .profiles import N_BINS, RawCptSamples, RegularProfile
from .records import SiteRecord

PROFILE_HEADER = ["site_id", "depth_m", "ic", "qc1ncs"]
SITE_HEADER = ["site_id", "pga_g", "gwd_m", "l_m", "slope_pct", "elev_m", "label"]
REGULAR_HEADER = ["site_id", "channel"] + [f"v{i:03d}" for i in range(N_BINS)]
LATENT_HEADER = ["site_id"] + [f"I_c{i}" for i in range(10)] + [f"q_c{i}" for i in range(10)]


def fmt_float(x) -> str:
    """Shortest decimal string that round-trips to the same float."""
    return repr(float(x))


def comment_lines(provenance: dict | None) -> list[str]:
    if not provenance:
        return []
    return [f"# {key}: {provenance[key]}" for key in sorted(provenance)]


def _open_rows(path) -> tuple[list[str], list[list[str]]]:
    """Read a CSV, returning (header, data rows), skipping '#' comments."""
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.reader(io.StringIO("".join(lines))))
    if not rows:
        raise LengthMismatch(f"{path}: no header row")
    return rows[0], rows[1:]


def _write_csv(path, header: list[str], rows, provenance: dict | None) -> None:
    with open(path, "w", newline="") as fh:
        for line in comment_lines(provenance):
            fh.write(line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_profile_samples(path, samples: list[RawCptSamples], provenance=None) -> None:
    rows = []
    for s in samples:
        for d, ic, qc in zip(s.depths, s.ic, s.qc1ncs):
            rows.append([s.site_id, fmt_float(d), fmt_float(ic), fmt_float(qc)])
    _write_csv(path, PROFILE_HEADER, rows, provenance)


def read_profile_samples(path) -> list[RawCptSamples]:
    """Read raw samples grouped by site, preserving first-seen site order."""
    header, rows = _open_rows(path)
    if header != PROFILE_HEADER:
        raise LengthMismatch(f"{path}: expected header {PROFILE_HEADER}, got {header}")
    by_site: dict[str, list[tuple[float, float, float]]] = {}
    for row in rows:
        if len(row) != 4:
            raise LengthMismatch(f"{path}: bad row {row!r}")
        by_site.setdefault(row[0], []).append((float(row[1]), float(row[2]), float(row[3])))
    out = []
    for site_id, triples in by_site.items():
        arr = np.array(triples)
        out.append(RawCptSamples(site_id, arr[:, 0], arr[:, 1], arr[:, 2]))
    return out


def write_site_records(path, records: list[SiteRecord], provenance=None) -> None:
    rows = [
        [r.site_id, fmt_float(r.pga_g), fmt_float(r.gwd_m), fmt_float(r.l_m),
         fmt_float(r.slope_pct), fmt_float(r.elev_m), str(r.label)]
        for r in records
    ]
    _write_csv(path, SITE_HEADER, rows, provenance)


def read_site_records(path) -> list[SiteRecord]:
    header, rows = _open_rows(path)
    if header != SITE_HEADER:
        raise LengthMismatch(f"{path}: expected header {SITE_HEADER}, got {header}")
    out = []
    for row in rows:
        if len(row) != 7:
            raise LengthMismatch(f"{path}: bad row {row!r}")
        out.append(
            SiteRecord(row[0], float(row[1]), float(row[2]), float(row[3]),
                       float(row[4]), float(row[5]), int(row[6]))
        )
    return out


def write_regular_profiles(path, profiles: list[RegularProfile], provenance=None) -> None:
    """One row per (site, channel): site_id, channel, then 200 bin values."""
    rows = []
    for p in profiles:
        rows.append([p.site_id, "ic"] + [fmt_float(v) for v in p.ic])
        rows.append([p.site_id, "qc1ncs"] + [fmt_float(v) for v in p.qc1ncs])
    _write_csv(path, REGULAR_HEADER, rows, provenance)


def read_regular_profiles(path) -> list[RegularProfile]:
    header, rows = _open_rows(path)
    if header != REGULAR_HEADER:
        raise LengthMismatch(f"{path}: unexpected header")
    channels: dict[str, dict[str, np.ndarray]] = {}
    order: list[str] = []
    for row in rows:
        if len(row) != 2 + N_BINS:
            raise LengthMismatch(f"{path}: row for {row[:2]} has {len(row) - 2} values")
        site_id, channel = row[0], row[1]
        if site_id not in channels:
            channels[site_id] = {}
            order.append(site_id)
        channels[site_id][channel] = np.array([float(v) for v in row[2:]])
    out = []
    for site_id in order:
        got = channels[site_id]
        if set(got) != {"ic", "qc1ncs"}:
            raise LengthMismatch(f"{path}: site {site_id} missing a channel")
        out.append(RegularProfile(site_id, got["ic"], got["qc1ncs"]))
    return out


def write_latent_table(path, site_ids: list[str], latents_ic: np.ndarray,
                       latents_qc: np.ndarray, provenance=None) -> None:
    """Latent features per site: ten I_c* columns then ten q_c* columns."""
    latents_ic = np.asarray(latents_ic, dtype=float)
    latents_qc = np.asarray(latents_qc, dtype=float)
    if latents_ic.shape != (len(site_ids), 10) or latents_qc.shape != (len(site_ids), 10):
        raise LengthMismatch("latent arrays must be (n_sites, 10)")
    rows = [
        [sid] + [fmt_float(v) for v in latents_ic[i]] + [fmt_float(v) for v in latents_qc[i]]
        for i, sid in enumerate(site_ids)
    ]
    _write_csv(path, LATENT_HEADER, rows, provenance)


def read_latent_table(path) -> tuple[list[str], np.ndarray, np.ndarray]:
    header, rows = _open_rows(path)
    if header != LATENT_HEADER:
        raise LengthMismatch(f"{path}: expected header {LATENT_HEADER}, got {header}")
    site_ids = [row[0] for row in rows]
    values = np.array([[float(v) for v in row[1:]] for row in rows], dtype=float)
    if values.size and values.shape[1] != 20:
        raise LengthMismatch(f"{path}: expected 20 latent columns")
    values = values.reshape(len(site_ids), 20)
    return site_ids, values[:, :10], values[:, 10:]


def write_json(path, doc: dict, provenance: dict | None = None) -> None:
    if provenance is not None:
        doc = {**doc, "provenance": provenance}
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())

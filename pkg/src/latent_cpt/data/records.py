"""Site-level records and the profile/site join."""

from dataclasses import dataclass

import numpy as np

from ..errors import DuplicateId, NonPositiveValue
from .profiles import RegularProfile


@dataclass(frozen=True)
class SiteRecord:
    """Per-site attributes and the lateral-spreading label.

    pga_g      peak ground acceleration, g
    gwd_m      depth to groundwater, m
    l_m        distance to the nearest river channel, m
    slope_pct  ground slope, percent
    elev_m     ground surface elevation, m
    label      1 if lateral spreading was observed, else 0
    """

    site_id: str
    pga_g: float
    gwd_m: float
    l_m: float
    slope_pct: float
    elev_m: float
    label: int

    def validate(self) -> None:
        if not (self.pga_g > 0 and self.l_m > 0):
            raise NonPositiveValue(f"{self.site_id}: pga_g and l_m must be > 0")
        if not (self.gwd_m >= 0 and self.slope_pct >= 0):
            raise NonPositiveValue(f"{self.site_id}: gwd_m and slope_pct must be >= 0")
        if self.label not in (0, 1):
            raise NonPositiveValue(f"{self.site_id}: label must be 0 or 1")
        vals = [self.pga_g, self.gwd_m, self.l_m, self.slope_pct, self.elev_m]
        if not np.all(np.isfinite(vals)):
            raise NonPositiveValue(f"{self.site_id}: non-finite site attribute")


@dataclass(frozen=True)
class JoinReport:
    """Sites dropped while joining profiles with site records."""

    missing_profile: tuple[str, ...]
    missing_record: tuple[str, ...]

    @property
    def n_dropped(self) -> int:
        return len(self.missing_profile) + len(self.missing_record)


def join_datasets(
    profiles: list[RegularProfile], records: list[SiteRecord]
) -> tuple[list[tuple[RegularProfile, SiteRecord]], JoinReport]:
    """Inner-join profiles and site records on site_id.

    Either input may mention sites the other lacks; those are dropped and
    reported. Output is ordered by sorted site_id so the join is independent
    of input order. Duplicated ids on either side raise DuplicateId.
    """
    prof_by_id: dict[str, RegularProfile] = {}
    for p in profiles:
        if p.site_id in prof_by_id:
            raise DuplicateId(f"duplicate profile for site {p.site_id!r}")
        prof_by_id[p.site_id] = p
    rec_by_id: dict[str, SiteRecord] = {}
    for r in records:
        if r.site_id in rec_by_id:
            raise DuplicateId(f"duplicate site record for site {r.site_id!r}")
        rec_by_id[r.site_id] = r

    shared = sorted(prof_by_id.keys() & rec_by_id.keys())
    rows = [(prof_by_id[s], rec_by_id[s]) for s in shared]
    report = JoinReport(
        missing_record=tuple(sorted(prof_by_id.keys() - rec_by_id.keys())),
        missing_profile=tuple(sorted(rec_by_id.keys() - prof_by_id.keys())),
    )
    return rows, report

"""Shared fixture builders and randomized data generators."""

from __future__ import annotations

import random
import string

from cubble import (
    MISSING,
    Column,
    CoordMode,
    CubbleMeta,
    Kind,
    SpatialTable,
    Table,
    TimeKind,
    TimePoint,
    make_cubble,
)

DAY1 = TimePoint.parse("2020-01-01")


def station_table() -> Table:
    return Table.from_dict(
        {
            "id": ["ASN00086038", "ASN00086077", "ASN00086282"],
            "long": [144.9066, 145.0964, 144.8321],
            "lat": [-37.7276, -37.98, -37.6655],
            "elev": [78.4, 12.1, 113.0],
            "name": ["essendon airport", "moorabbin airport", "melbourne airport"],
            "wmo_id": [95866, 94870, 94866],
        }
    )


_METEO = {
    "ASN00086038": {
        "prcp": [0.0, 0.0, 0.0, 0.0, 18.0, 0.0, 0.0, 5.2, 0.0, 0.0],
        "tmax": [26.8, 26.3, 34.5, 29.3, 16.1, 22.7, 24.5, 26.0, 30.1, 31.9],
        "tmin": [11.0, 12.2, 12.7, 18.8, 12.5, 12.9, 13.1, 15.4, 15.0, 17.2],
    },
    "ASN00086077": {
        "prcp": [0.0, 0.0, 0.0, 0.4, 22.8, 0.0, 0.0, 6.0, 0.0, 0.0],
        "tmax": [25.2, 24.8, 32.8, 28.4, 17.0, 21.8, 23.4, 25.1, 28.8, 30.5],
        "tmin": [12.6, 13.4, 13.8, 18.2, 13.0, 13.4, 13.9, 15.8, 15.7, 17.9],
    },
    "ASN00086282": {
        "prcp": [0.0, 0.0, 0.0, 0.0, 16.2, 0.0, 0.2, 4.4, 0.0, 0.0],
        "tmax": [27.4, 27.0, 35.1, 30.0, 15.8, 23.2, 25.2, 26.6, 30.9, 32.6],
        "tmin": [10.1, 11.3, 11.9, 17.9, 11.8, 12.1, 12.4, 14.7, 14.2, 16.5],
    },
}


def meteo_table() -> Table:
    ids: list[str] = []
    dates: list[TimePoint] = []
    prcp: list[float] = []
    tmax: list[float] = []
    tmin: list[float] = []
    for site, series in _METEO.items():
        for d in range(10):
            ids.append(site)
            dates.append(DAY1.add(d))
            prcp.append(series["prcp"][d])
            tmax.append(series["tmax"][d])
            tmin.append(series["tmin"][d])
    return Table.from_dict(
        {"id": ids, "date": dates, "prcp": prcp, "tmax": tmax, "tmin": tmin}
    )


def airport_cubble() -> SpatialTable:
    cb, _ = make_cubble(
        station_table(),
        meteo_table(),
        key="id",
        index="date",
        coords=("long", "lat"),
    )
    return cb


def _random_text(rng: random.Random) -> str:
    return "".join(rng.choices(string.ascii_lowercase, k=rng.randint(1, 8)))


def _random_values(rng: random.Random, kind: Kind, n: int, missing_rate=0.1):
    out = []
    for _ in range(n):
        if rng.random() < missing_rate:
            out.append(MISSING)
        elif kind is Kind.FLOAT64:
            out.append(round(rng.uniform(-100, 100), 4))
        elif kind is Kind.INT64:
            out.append(rng.randint(-1000, 1000))
        elif kind is Kind.BOOL:
            out.append(rng.random() < 0.5)
        else:
            out.append(_random_text(rng))
    return out


def random_cubble(
    rng: random.Random,
    max_sites: int = 50,
    max_len: int = 200,
    allow_empty_series: bool = True,
) -> SpatialTable:
    """A structurally valid random spatial cubble with mixed column kinds."""
    n_sites = rng.randint(1, max_sites)
    index_kind = rng.choice(list(TimeKind) + [None])
    int_keys = rng.random() < 0.3
    keys = (
        rng.sample(range(10000), n_sites)
        if int_keys
        else [f"S{i:04d}" for i in rng.sample(range(10000), n_sites)]
    )

    n_spatial = rng.randint(0, 3)
    spatial_kinds = [
        rng.choice([Kind.FLOAT64, Kind.INT64, Kind.TEXT, Kind.BOOL])
        for _ in range(n_spatial)
    ]
    n_temporal = rng.randint(1, 4)
    temporal_kinds = [
        rng.choice([Kind.FLOAT64, Kind.INT64, Kind.TEXT, Kind.BOOL])
        for _ in range(n_temporal)
    ]
    var_names = [f"v{i}" for i in range(n_temporal)]

    cells = []
    for _ in range(n_sites):
        length = rng.randint(0 if allow_empty_series else 2, max_len)
        counts: list[int] = []
        c = rng.randint(0, 50)
        for _ in range(length):
            counts.append(c)
            c += rng.randint(1, 4)
        if index_kind is None:
            idx_vals: list = counts
            idx_col = Column("stamp", idx_vals, Kind.INT64)
        else:
            idx_col = Column(
                "stamp",
                [TimePoint(index_kind, c) for c in counts],
                Kind.TIME,
                index_kind,
            )
        cols = [idx_col]
        for name, kind in zip(var_names, temporal_kinds):
            cols.append(Column(name, _random_values(rng, kind, length), kind))
        cells.append(Table(cols))

    spatial_cols = [
        Column("site", keys, Kind.INT64 if int_keys else Kind.TEXT),
        Column("x", [round(rng.uniform(-180, 180), 4) for _ in range(n_sites)]),
        Column("y", [round(rng.uniform(-90, 90), 4) for _ in range(n_sites)]),
    ]
    for i, kind in enumerate(spatial_kinds):
        spatial_cols.append(
            Column(f"s{i}", _random_values(rng, kind, n_sites), kind)
        )
    spatial_cols.append(Column("ts", cells, Kind.NESTED))

    from cubble.calendar import index_count, step_from_count_groups

    groups = [
        [index_count(v) for v in cell.columns[0].values] for cell in cells
    ]
    step, defaulted = step_from_count_groups(groups)
    meta = CubbleMeta(
        key="site",
        index="stamp",
        coords=("x", "y"),
        coord_mode=CoordMode.GEOGRAPHIC,
        index_kind=index_kind,
        interval=None if defaulted else step,
    )
    return SpatialTable(Table(spatial_cols), meta)


VIC_LGA_NAMES = [
    "Alpine (S)", "Ararat (RC)", "Ballarat (C)", "Banyule (C)",
    "Bass Coast (S)", "Baw Baw (S)", "Bayside (C)", "Benalla (RC)",
    "Boroondara (C)", "Brimbank (C)", "Buloke (S)", "Campaspe (S)",
    "Cardinia (S)", "Casey (C)", "Central Goldfields (S)", "Colac-Otway (S)",
    "Corangamite (S)", "Darebin (C)", "East Gippsland (S)", "Frankston (C)",
    "French Island (S)", "Gannawarra (S)", "Glen Eira (C)", "Glenelg (S)",
    "Golden Plains (S)", "Greater Bendigo (C)", "Greater Dandenong (C)",
    "Greater Geelong (C)", "Greater Shepparton (C)", "Hepburn (S)",
    "Hindmarsh (S)", "Hobsons Bay (C)", "Horsham (RC)", "Hume (C)",
    "Indigo (S)", "Knox (C)", "Loddon (S)", "Macedon Ranges (S)",
    "Manningham (C)", "Mansfield (S)", "Maribyrnong (C)", "Maroondah (C)",
    "Melbourne (C)", "Melton (C)", "Mildura (RC)", "Mitchell (S)",
    "Moira (S)", "Monash (C)", "Moonee Valley (C)", "Moorabool (S)",
    "Moreland (C)", "Mornington Peninsula (S)", "Mount Alexander (S)",
    "Moyne (S)", "Murrindindi (S)", "Nillumbik (S)",
    "Northern Grampians (S)", "Port Phillip (C)", "Pyrenees (S)",
    "Queenscliffe (B)", "South Gippsland (S)", "Southern Grampians (S)",
    "Stonnington (C)", "Strathbogie (S)", "Surf Coast (S)",
    "Swan Hill (RC)", "Towong (S)", "Wangaratta (RC)", "Warrnambool (C)",
    "Wellington (S)", "West Wimmera (S)", "Whitehorse (C)",
    "Whittlesea (C)", "Wodonga (C)", "Wyndham (C)", "Yarra (C)",
    "Yarra Ranges (S)", "Yarriambiack (S)",
]


def lga_tables() -> tuple[Table, Table]:
    """Region-name fixture: 78 exact matches, two state-suffixed near
    misses, and three temporal-only catch-all categories."""
    assert len(VIC_LGA_NAMES) == 78
    spatial_names = VIC_LGA_NAMES + ["Kingston (C) (Vic.)", "Latrobe (C) (Vic.)"]
    temporal_names = VIC_LGA_NAMES + [
        "Kingston (C)", "Latrobe (C)", "Interstate", "Overseas", "Unknown",
    ]
    spatial = Table.from_dict(
        {
            "lga_name_2018": spatial_names,
            "long": [140.0 + 0.1 * i for i in range(len(spatial_names))],
            "lat": [-37.0] * len(spatial_names),
        }
    )
    rows = []
    for name in temporal_names:
        for d in range(3):
            rows.append((name, DAY1.add(d), float(d)))
    temporal = Table.from_dict(
        {
            "lga": [r[0] for r in rows],
            "date": [r[1] for r in rows],
            "n": [r[2] for r in rows],
        }
    )
    return spatial, temporal

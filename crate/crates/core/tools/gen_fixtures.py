#!/usr/bin/env python3
"""Generate the bundled synthetic fixtures under crates/core/fixtures/.

Everything is seeded; re-running reproduces the committed files byte for byte.
Golden values are NOT computed here; see oracle.py.
"""
import csv
import gzip
import io
import json
import math
import os
from datetime import datetime, timedelta, timezone
from zoneinfo import ZoneInfo

import numpy as np

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")
R_EARTH = 6_371_000.0
NY = ZoneInfo("America/New_York")

NYC_BOX = (40.4774, -74.2591, 40.9176, -73.7004)  # south, west, north, east
APP_GRID = dict(anchor_lat=40.6980, anchor_lon=-74.0250, cell_size_m=30.0, n_rows=400, n_cols=400)
ANALYSIS_GRID = dict(anchor_lat=40.4774, anchor_lon=-74.2591, cell_size_m=100.0, n_rows=490, n_cols=475)

PER_KM = 2.15 / 1.609344
PER_MIN = 0.40


def offset_to_latlon(grid, north_m, east_m):
    lat = grid["anchor_lat"] + math.degrees(north_m / R_EARTH)
    lon = grid["anchor_lon"] + math.degrees(east_m / (R_EARTH * math.cos(math.radians(grid["anchor_lat"]))))
    return lat, lon


def cell_center(grid, row, col):
    s = grid["cell_size_m"]
    return offset_to_latlon(grid, (row + 0.5) * s, (col + 0.5) * s)


def haversine_km(a, b):
    lat1, lon1 = map(math.radians, a)
    lat2, lon2 = map(math.radians, b)
    h = math.sin((lat2 - lat1) / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2
    return 2 * R_EARTH * math.asin(math.sqrt(h)) / 1000.0


def write_text(path, text):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", newline="") as f:
        f.write(text)


def write_gz(path, text):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    # mtime=0 keeps the archive deterministic
    with open(path, "wb") as raw:
        with gzip.GzipFile(filename="", mode="wb", fileobj=raw, mtime=0) as gz:
            gz.write(text.encode())


# ---------------------------------------------------------------------------
# Gazetteer: landmarks inside the app grid
# ---------------------------------------------------------------------------
GAZETTEER = [
    ("Times Square", 40.7580, -73.9855),
    ("Grand Central", 40.7527, -73.9772),
    ("Penn Station", 40.7506, -73.9935),
    ("Union Square", 40.7359, -73.9911),
    ("Wall Street", 40.7060, -74.0088),
    ("Columbus Circle", 40.7681, -73.9819),
    ("Empire State Building", 40.7484, -73.9857),
    ("Washington Square", 40.7308, -73.9973),
    ("Chelsea Market", 40.7424, -74.0060),
    ("Rockefeller Center", 40.7587, -73.9787),
    ("Brooklyn Bridge Park", 40.7003, -73.9967),
    ("Lincoln Center", 40.7725, -73.9835),
    ("Metropolitan Museum", 40.7794, -73.9632),
    ("Bryant Park", 40.7536, -73.9832),
    ("SoHo", 40.7233, -74.0030),
    ("Chinatown", 40.7158, -73.9970),
    ("East Village", 40.7265, -73.9815),
    ("Hudson Yards", 40.7538, -74.0020),
    ("Flatiron", 40.7411, -73.9897),
    ("Tribeca", 40.7163, -74.0086),
    ("Upper East Side", 40.7736, -73.9566),
    ("Upper West Side", 40.7870, -73.9754),
    ("Murray Hill", 40.7479, -73.9757),
    ("Gramercy", 40.7368, -73.9845),
    ("Long Island City", 40.7447, -73.9485),
    ("Williamsburg", 40.7081, -73.9571),
    ("Battery Park", 40.7033, -74.0170),
    ("Midtown East", 40.7549, -73.9680),
    ("Kips Bay", 40.7420, -73.9780),
    ("Greenwich Village", 40.7336, -74.0027),
]
OUTSIDE_APP = [
    ("JFK Airport", 40.6413, -73.7781),
    ("LaGuardia Airport", 40.7769, -73.8740),
    ("Park Slope", 40.6710, -73.9814),
    ("Astoria", 40.7644, -73.9235),
    ("Harlem 125th", 40.8075, -73.9456),
]


def gen_gazetteer():
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["name", "lat", "lon"])
    for name, lat, lon in GAZETTEER:
        w.writerow([name, f"{lat:.4f}", f"{lon:.4f}"])
    write_text(os.path.join(ROOT, "service", "gazetteer.csv"), out.getvalue())


# ---------------------------------------------------------------------------
# Taxi trip + fare sample (2013 TLC layout)
# ---------------------------------------------------------------------------
TRIP_HEADER = ["medallion", "hack_license", "vendor_id", "rate_code", "store_and_fwd_flag",
               "pickup_datetime", "dropoff_datetime", "passenger_count", "trip_time_in_secs",
               "trip_distance", "pickup_longitude", "pickup_latitude", "dropoff_longitude",
               "dropoff_latitude"]
FARE_HEADER = ["medallion", " hack_license", " vendor_id", " pickup_datetime", " payment_type",
               " fare_amount", " surcharge", " mta_tax", " tip_amount", " tolls_amount", " total_amount"]


def gen_trips(rng):
    n = 10_000
    hubs = [(lat, lon) for _, lat, lon in GAZETTEER]
    medallions = [f"{rng.integers(16**12):012X}{rng.integers(16**8):08X}" for _ in range(400)]
    hacks = [f"{rng.integers(16**12):012X}{rng.integers(16**8):08X}" for _ in range(900)]
    start = datetime(2013, 5, 1, tzinfo=NY)
    app_south, app_west = APP_GRID["anchor_lat"], APP_GRID["anchor_lon"]
    app_north, app_east = offset_to_latlon(APP_GRID, 12_000.0, 12_000.0)

    def jitter(p, metres):
        dn, de = rng.uniform(-metres, metres, 2)
        lat = p[0] + math.degrees(dn / R_EARTH)
        lon = p[1] + math.degrees(de / (R_EARTH * math.cos(math.radians(p[0]))))
        return lat, lon

    def random_point():
        u = rng.random()
        if u < 0.72:
            a = hubs[rng.integers(len(hubs))]
            return jitter(a, 6.0)
        if u < 0.92:
            return (rng.uniform(app_south + 0.01, app_north - 0.01), rng.uniform(app_west + 0.01, app_east - 0.05))
        o = OUTSIDE_APP[rng.integers(len(OUTSIDE_APP))]
        return jitter((o[1], o[2]), 40.0)

    trips, fares = [], []
    used_keys = set()
    for i in range(n):
        while True:
            med = medallions[rng.integers(len(medallions))]
            hack = hacks[rng.integers(len(hacks))]
            pickup = start + timedelta(seconds=int(rng.integers(0, 30 * 86400)))
            key = (med, hack, pickup)
            if key not in used_keys:
                used_keys.add(key)
                break
        o = random_point()
        d = random_point()
        hav = max(haversine_km(o, d), 0.15)
        km = hav * rng.uniform(1.15, 1.45)
        miles = round(km / 1.609344, 2)
        speed = rng.uniform(8.0, 28.0)
        secs = int(round(km / speed * 3600.0)) + 30
        dropoff = pickup + timedelta(seconds=secs)
        fare = 2.5 + 2.5 * miles + 0.5 * (secs / 60.0) * 0.3
        fare = max(2.5, round(fare * 2) / 2)
        surcharge = [0.0, 0.5, 1.0][rng.integers(3)]
        mta = 0.5
        tolls = 5.33 if rng.random() < 0.02 else 0.0
        card = rng.random() < 0.55
        tip = round(fare * rng.uniform(0.1, 0.3), 2) if card else 0.0
        total = round(fare + surcharge + mta + tip + tolls, 2)
        trips.append([med, hack, "CMT" if rng.random() < 0.5 else "VTS", "1", "N",
                      pickup.strftime("%Y-%m-%d %H:%M:%S"), dropoff.strftime("%Y-%m-%d %H:%M:%S"),
                      str(int(rng.integers(1, 5))), str(secs), f"{miles:.2f}",
                      f"{o[1]:.6f}", f"{o[0]:.6f}", f"{d[1]:.6f}", f"{d[0]:.6f}"])
        fares.append([med, hack, trips[-1][2], trips[-1][5], "CRD" if card else ("CSH" if rng.random() < 0.97 else "NOC"),
                      f"{fare:.2f}", f"{surcharge:.2f}", f"{mta:.2f}", f"{tip:.2f}", f"{tolls:.2f}", f"{total:.2f}"])

    # --- dirty rows ---------------------------------------------------------
    idx = rng.permutation(n)
    cursor = 0

    def take(k):
        nonlocal cursor
        out = idx[cursor:cursor + k]
        cursor += k
        return [int(x) for x in out]

    for i in take(120):  # non-numeric latitude
        trips[i][11] = ["abc", "40.7x", "N/A", "--"][rng.integers(4)]
    for i in take(30):  # empty longitude
        trips[i][12] = ""
    for i in take(60):  # zeroed GPS fix
        trips[i][10] = "0"
        trips[i][11] = "0"
    for i in take(40):  # dropoff before pickup
        p = datetime.strptime(trips[i][5], "%Y-%m-%d %H:%M:%S")
        trips[i][6] = (p - timedelta(seconds=int(rng.integers(60, 900)))).strftime("%Y-%m-%d %H:%M:%S")
    for i in take(20):  # unparseable dropoff
        trips[i][6] = "2013-13-45 99:00:00"
    for i in take(12):  # negative distance
        trips[i][9] = f"-{trips[i][9]}"
    for i in take(15):  # bad distance number
        trips[i][9] = "1.2.3"
    short_rows = take(20)  # truncated rows
    for i in take(30):  # negative fare amount
        fares[i][5] = f"-{fares[i][5]}"
    for i in take(20):  # total below fare
        fares[i][10] = f"{float(fares[i][5]) - 1.0:.2f}"
    for i in take(15):  # bad fare number
        fares[i][5] = "twelve"
    unmatched_trips = set(take(80))
    dup_fares = take(10)
    dup_trips = take(5)
    outside_box = take(10)  # far away but valid coordinates
    for i in outside_box:
        trips[i][13] = "41.500000"

    trip_rows = []
    for i in range(n):
        row = trips[i]
        if i in short_rows:
            row = row[: int(rng.integers(3, 9))]
        trip_rows.append(row)
        if i in dup_trips:
            trip_rows.append(list(row))
    fare_rows = []
    for i in range(n):
        if i in unmatched_trips:
            continue
        fare_rows.append(fares[i])
        if i in dup_fares:
            extra = list(fares[i])
            extra[5] = f"{float(extra[5]) + 0.5:.2f}"
            fare_rows.append(extra)
    # orphan fares
    for k in range(50):
        med = medallions[rng.integers(len(medallions))]
        t = (start + timedelta(seconds=int(rng.integers(0, 30 * 86400)))).strftime("%Y-%m-%d %H:%M:%S")
        fare_rows.append([med, "ORPHAN%04d" % k, "CMT", t, "CSH", "9.00", "0.50", "0.50", "0.00", "0.00", "10.00"])
    # fares are not in trip order in the raw exports
    order = rng.permutation(len(fare_rows))
    fare_rows = [fare_rows[i] for i in order]

    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(TRIP_HEADER)
    w.writerows(trip_rows)
    write_text(os.path.join(ROOT, "ingest", "trips_sample.csv"), out.getvalue())
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(FARE_HEADER)
    w.writerows(fare_rows)
    write_text(os.path.join(ROOT, "ingest", "fares_sample.csv"), out.getvalue())


MAPPING = """# 2013 NYC TLC trip_data / trip_fare layout.
delimiter = ","
timestamp_format = "%Y-%m-%d %H:%M:%S"
timezone = "America/New_York"
distance_unit = "miles"
join_key = ["medallion", "hack_license", "pickup_time"]

[trip_columns]
medallion = "medallion"
hack_license = "hack_license"
pickup_time = "pickup_datetime"
dropoff_time = "dropoff_datetime"
trip_distance = "trip_distance"
pickup_lat = "pickup_latitude"
pickup_lon = "pickup_longitude"
dropoff_lat = "dropoff_latitude"
dropoff_lon = "dropoff_longitude"

[fare_columns]
medallion = "medallion"
hack_license = "hack_license"
pickup_time = "pickup_datetime"
payment_type = "payment_type"
fare_amount = "fare_amount"
tip_amount = "tip_amount"
total_amount = "total_amount"

[payment_codes]
card = ["CRD", "1"]
cash = ["CSH", "2"]
"""


# ---------------------------------------------------------------------------
# Surge processes
# ---------------------------------------------------------------------------
def ar1(rng, n, rho):
    x = np.empty(n)
    x[0] = rng.standard_normal()
    s = math.sqrt(1 - rho * rho)
    for t in range(1, n):
        x[t] = rho * x[t - 1] + s * rng.standard_normal()
    return x


def daily_profile(local_hours):
    h = np.asarray(local_hours, dtype=float)
    morning = np.exp(-0.5 * ((h - 8.5) / 1.5) ** 2)
    evening = np.exp(-0.5 * ((h - 19.5) / 2.0) ** 2)
    night = np.exp(-0.5 * ((h - 3.5) / 1.5) ** 2)
    return 0.8 * morning + 0.9 * evening - 0.6 * night


def quantize_multiplier(excess):
    k = np.floor(np.maximum(excess, 0.0) * 10.0 + 1e-9)
    return np.minimum(3.0, 1.0 + k / 10.0)


def base_price(o, d, circuity=1.3, speed=18.0):
    km = haversine_km(o, d) * circuity
    minutes = km / speed * 60.0
    return round(PER_KM * km + PER_MIN * minutes + 2.0, 2)


def price_pair(mult, base):
    base_c = int(round(base * 100))
    price_c = int(math.floor(mult * base_c + 1e-6))
    if mult <= 1.0:
        price_c = base_c
    else:
        # stay a cent under the cap so the parsed ratio never exceeds it
        price_c = min(price_c, 3 * base_c - 1)
    w = int(round(price_c * 0.05))
    return (price_c - w) / 100.0, (price_c + w) / 100.0


def replay_text(rows):
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["route_id", "timestamp", "min", "max", "base_price"])
    for rid, ts, lo, hi, base in rows:
        w.writerow([rid, ts.strftime("%Y-%m-%dT%H:%M:%SZ"), f"{lo:.2f}", f"{hi:.2f}", f"{base:.2f}"])
    return out.getvalue()


def routes_text(routes):
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["route_id", "origin_lat", "origin_lon", "destination_lat", "destination_lon"])
    for rid, o, d in routes:
        w.writerow([rid, f"{o[0]:.6f}", f"{o[1]:.6f}", f"{d[0]:.6f}", f"{d[1]:.6f}"])
    return out.getvalue()


WEEK_START = datetime(2015, 5, 4, 0, 0, tzinfo=NY).astimezone(timezone.utc)  # Monday


def hourly_stamps():
    return [WEEK_START + timedelta(hours=h) for h in range(168)]


def local_hours(stamps):
    return [s.astimezone(NY).hour + s.astimezone(NY).minute / 60.0 for s in stamps]


def gen_weekly(rng):
    """800 routes over ~200 origin areas, sampled hourly for one week."""
    stamps = hourly_stamps()
    prof = daily_profile(local_hours(stamps))
    city = ar1(rng, 168, 0.75)
    n_origins = 200
    origins = []
    for _ in range(n_origins):
        row = int(rng.integers(120, 380))
        col = int(rng.integers(120, 330))
        origins.append((row, col))
    area_proc = {}
    thresholds = {}
    for o in origins:
        area_proc[o] = 0.75 * city + 0.66 * ar1(rng, 168, 0.6) + prof
        thresholds[o] = rng.uniform(0.2, 1.6)
    routes, rows = [], []
    for r in range(800):
        o = origins[r % n_origins]
        d = origins[int(rng.integers(n_origins))]
        olat, olon = cell_center(ANALYSIS_GRID, *o)
        dlat, dlon = cell_center(ANALYSIS_GRID, *d)
        dlat += 0.002
        rid = f"w{r:03d}"
        routes.append((rid, (olat, olon), (dlat, dlon)))
        base = base_price((olat, olon), (dlat, dlon))
        mult = quantize_multiplier(0.9 * (area_proc[o] - thresholds[o]))
        for t, s in enumerate(stamps):
            lo, hi = price_pair(float(mult[t]), base)
            rows.append((rid, s, lo, hi, base))
    write_text(os.path.join(ROOT, "surge", "routes_weekly.csv"), routes_text(routes))
    write_gz(os.path.join(ROOT, "surge", "weekly_800.replay.gz"), replay_text(rows))


def gen_experiments(rng):
    """Five routes sharing an origin, five sharing a destination; 10 minute cadence."""
    step = 600
    n = 7 * 24 * 6
    grid_times = [WEEK_START + timedelta(seconds=step * k) for k in range(n)]
    prof = daily_profile(local_hours(grid_times))
    city = ar1(rng, n, 0.985)
    times_sq = (40.7580, -73.9855)
    others = [(lat, lon) for name, lat, lon in GAZETTEER if name not in ("Times Square",)][:10]

    def area():
        return 0.8 * city + 0.6 * ar1(rng, n, 0.985) + prof

    def emit(name, pairs, mults):
        routes, rows = [], []
        for j, ((o, d), m) in enumerate(zip(pairs, mults)):
            rid = f"{name[0]}{j}"
            routes.append((rid, o, d))
            base = base_price(o, d)
            offset = int(rng.integers(0, 40))
            for k in range(n):
                ts = WEEK_START + timedelta(seconds=step * k + offset + int(rng.integers(0, 20)))
                lo, hi = price_pair(float(m[k]), base)
                rows.append((rid, ts, lo, hi, base))
        write_text(os.path.join(ROOT, "surge", f"routes_{name}.csv"), routes_text(routes))
        write_text(os.path.join(ROOT, "surge", f"{name}.replay"), replay_text(rows))

    origin_proc = area()
    pairs, mults = [], []
    for j in range(5):
        dest = others[j]
        dest_proc = area()
        pairs.append((times_sq, dest))
        mults.append(quantize_multiplier(0.9 * (origin_proc + 0.12 * dest_proc - 0.6)))
    emit("fixed_origin", pairs, mults)

    dest_proc = area()
    pairs, mults = [], []
    for j in range(5):
        org = others[5 + j]
        proc = area()
        pairs.append((org, times_sq))
        mults.append(quantize_multiplier(0.9 * (proc + 0.12 * dest_proc - 0.6)))
    emit("fixed_destination", pairs, mults)


TRAVEL = ["Train Station", "Bus Station", "Hotel", "Subway", "Airport"]
OTHER = ["Coffee Shop", "Bar", "Office", "Restaurant", "Park", "Gym", "Museum", "Bakery", "Deli", "Bookstore"]


def gen_areas(rng):
    """840 areas: one route each, hourly week of replay, plus exogenous features."""
    stamps = hourly_stamps()
    prof = daily_profile(local_hours(stamps))
    city = ar1(rng, 168, 0.75)
    cells = set()
    center = (322, 218)  # near Midtown on the analysis grid
    while len(cells) < 840:
        r = int(rng.normal(center[0], 55))
        c = int(rng.normal(center[1], 45))
        if 0 <= r < ANALYSIS_GRID["n_rows"] and 0 <= c < ANALYSIS_GRID["n_cols"]:
            cells.add((r, c))
    cells = sorted(cells)
    dist = np.array([math.hypot(r - center[0], c - center[1]) for r, c in cells])
    latent = np.exp(-dist / 60.0) + 0.15 * rng.standard_normal(len(cells))
    order = np.argsort(latent)
    quiet = set(int(i) for i in order[: int(round(0.30 * len(cells)))])
    lat_n = (latent - latent.min()) / (latent.max() - latent.min())

    routes, rows = [], []
    for i, (r, c) in enumerate(cells):
        o = cell_center(ANALYSIS_GRID, r, c)
        d = (o[0] + 0.01, o[1] + 0.008)
        rid = f"a{i:03d}"
        routes.append((rid, o, d))
        base = base_price(o, d)
        if i in quiet:
            mult = np.ones(168)
        else:
            proc = 0.6 * city + 0.5 * ar1(rng, 168, 0.6) + prof
            mult = quantize_multiplier(proc - (2.0 - 2.6 * lat_n[i]))
            if mult.max() <= 1.0:
                # guarantee at least one surge hour for the active areas
                mult[int(np.argmax(proc))] = 1.1
        for t, s in enumerate(stamps):
            lo, hi = price_pair(float(mult[t]), base)
            rows.append((rid, s, lo, hi, base))
    write_text(os.path.join(ROOT, "predict", "routes_areas.csv"), routes_text(routes))
    write_gz(os.path.join(ROOT, "predict", "areas_840.replay.gz"), replay_text(rows))

    # Exogenous features. A residential/commercial nuisance factor pushes yellow trips and
    # venue counts in opposite directions, so each signal alone is confounded while the
    # pair jointly pins down demand.
    mix = rng.standard_normal(len(cells))
    yellow = np.round(np.exp(2.5 + 3.2 * lat_n + 0.8 * mix + 0.25 * rng.standard_normal(len(cells)))).astype(int)
    nontravel = np.round(np.exp(1.0 + 3.0 * lat_n - 1.4 * mix + 0.25 * rng.standard_normal(len(cells)))).astype(int)
    travel = rng.poisson(1.0 + 0.8 * lat_n).astype(int)

    # OD snapshot on the analysis grid: each area's outgoing trips split over two destinations
    od_lines = []
    for i, (r, c) in enumerate(cells):
        n_trips = int(yellow[i])
        if n_trips == 0:
            continue
        first = n_trips // 2 + n_trips % 2
        for dest, cnt in (((r + 7, c + 3), first), ((r - 5, c + 9), n_trips - first)):
            if cnt == 0:
                continue
            dr = min(max(dest[0], 0), ANALYSIS_GRID["n_rows"] - 1)
            dc = min(max(dest[1], 0), ANALYSIS_GRID["n_cols"] - 1)
            total_c = cnt * int(rng.integers(900, 2200))
            dist_m = cnt * int(rng.integers(1500, 6000))
            dur_s = cnt * int(rng.integers(420, 1500))
            od_lines.append(f"{r},{c},{dr},{dc},{cnt},{total_c},{dist_m},{dur_s}")
    g = ANALYSIS_GRID
    header = ("# faregrid od-index v1\n"
              f"# anchor_lat={g['anchor_lat']} anchor_lon={g['anchor_lon']} cell_size_m={g['cell_size_m']} "
              f"n_rows={g['n_rows']} n_cols={g['n_cols']} skipped=0\n"
              "o_row,o_col,d_row,d_col,trip_count,total_cents,distance_m,duration_s\n")
    write_text(os.path.join(ROOT, "predict", "areas_od.csv"), header + "\n".join(od_lines) + "\n")

    venues = io.StringIO()
    vw = csv.writer(venues, lineterminator="\n")
    vw.writerow(["venue_id", "lat", "lon", "category"])
    checkins = io.StringIO()
    cw = csv.writer(checkins, lineterminator="\n")
    cw.writerow(["venue_id", "checkins"])
    vid = 0
    for i, (r, c) in enumerate(cells):
        center_ll = cell_center(ANALYSIS_GRID, r, c)
        kinds = [True] * int(travel[i]) + [False] * int(nontravel[i])
        rng.shuffle(kinds)
        for is_travel in kinds:
            dn, de = rng.uniform(-35.0, 35.0, 2)
            lat = center_ll[0] + math.degrees(dn / R_EARTH)
            lon = center_ll[1] + math.degrees(de / (R_EARTH * math.cos(math.radians(center_ll[0]))))
            cat = TRAVEL[rng.integers(len(TRAVEL))] if is_travel else OTHER[rng.integers(len(OTHER))]
            vw.writerow([f"v{vid:05d}", f"{lat:.6f}", f"{lon:.6f}", cat])
            # check-ins are popularity-driven and only loosely tied to demand
            ck = int(rng.poisson(np.exp(0.8 + 0.3 * lat_n[i] + 1.9 * rng.standard_normal())))
            cw.writerow([f"v{vid:05d}", ck])
            vid += 1
    write_text(os.path.join(ROOT, "predict", "venues.csv"), venues.getvalue())
    write_text(os.path.join(ROOT, "predict", "checkins.csv"), checkins.getvalue())


# ---------------------------------------------------------------------------
# Query log
# ---------------------------------------------------------------------------
def gen_queries(rng):
    n_users = 900
    counts = np.minimum(1 + rng.zipf(1.9, n_users) - 1 + rng.poisson(1.4, n_users), 40)
    weekday_w = np.array([0.8, 1.15, 1.2, 1.2, 1.2, 1.15, 0.7])
    hour_w = 0.25 + daily_profile(np.arange(24) + 0.5) + 0.6
    hour_w = np.maximum(hour_w, 0.05)
    slot_w = np.outer(weekday_w, hour_w).ravel()
    slot_w = slot_w / slot_w.sum()
    start_day = datetime(2015, 3, 2, tzinfo=NY)  # Monday
    hubs = [(lat, lon) for _, lat, lon in GAZETTEER]
    lines = []
    for u in range(n_users):
        uid = f"u{u:04d}"
        for _ in range(int(counts[u])):
            week = int(rng.integers(0, 10))
            slot = int(rng.choice(168, p=slot_w))
            minute = int(rng.integers(0, 60))
            local = start_day + timedelta(days=7 * week + slot // 24)
            local = local.replace(hour=slot % 24, minute=minute, second=int(rng.integers(0, 60)))
            ts = local.astimezone(timezone.utc)
            o = hubs[rng.integers(len(hubs))]
            d = hubs[rng.integers(len(hubs))]
            yellow = round(max(4.0, rng.lognormal(math.log(17.0), 0.45)), 2)
            uber = round(max(5.0, yellow + rng.normal(1.0, 8.0)), 2)
            if rng.random() < 0.03:
                uber = yellow
            delta = round(yellow * 100) - round(uber * 100)
            winner = "yellow" if delta < 0 else ("uber" if delta > 0 else "tie")
            lines.append((ts, json.dumps({
                "user_id": uid,
                "timestamp": ts.strftime("%Y-%m-%dT%H:%M:%SZ"),
                "origin": {"lat": o[0], "lon": o[1]},
                "destination": {"lat": d[0], "lon": d[1]},
                "yellow_price": f"{yellow:.2f}",
                "uber_price": f"{uber:.2f}",
                "winner": winner,
            }, separators=(",", ":"))))
    lines.sort(key=lambda x: x[0])
    write_text(os.path.join(ROOT, "savings", "queries.jsonl"), "".join(l + "\n" for _, l in lines))


def main():
    gen_gazetteer()
    gen_trips(np.random.default_rng(20130501))
    write_text(os.path.join(ROOT, "ingest", "tlc2013.toml"), MAPPING)
    gen_queries(np.random.default_rng(20150302))
    gen_weekly(np.random.default_rng(20150504))
    gen_experiments(np.random.default_rng(20150505))
    gen_areas(np.random.default_rng(20150506))


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Independent recomputation of every golden value the Rust tests compare against.

Reads only the raw fixture files and writes JSON/CSV goldens next to them.
Nothing here imports or shells out to the Rust crate.
"""
import csv
import gzip
import json
import math
import os
import statistics
from collections import Counter, defaultdict
from datetime import datetime, timezone
from zoneinfo import ZoneInfo

import numpy as np

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")
R = 6_371_000.0
NY = ZoneInfo("America/New_York")
NYC_BOX = (40.4774, -74.2591, 40.9176, -73.7004)
APP = dict(anchor_lat=40.6980, anchor_lon=-74.0250, cell=30.0, rows=400, cols=400)
ANALYSIS = dict(anchor_lat=40.4774, anchor_lon=-74.2591, cell=100.0, rows=490, cols=475)
PER_KM = 2.15 / 1.609344
PER_MIN = 0.40
CIRCUITY = 1.3
SPEED = 18.0
SPREAD = 0.1
EPS = 1e-6
TRAVEL = {"Airport", "Train Station", "Subway", "Bus Station", "Bus Stop", "Hotel", "Ferry", "Taxi",
          "Travel & Transport"}


def cell_of(g, lat, lon):
    north = R * math.radians(lat - g["anchor_lat"])
    east = R * math.radians(lon - g["anchor_lon"]) * math.cos(math.radians(g["anchor_lat"]))
    row = math.floor(north / g["cell"])
    col = math.floor(east / g["cell"])
    if 0 <= row < g["rows"] and 0 <= col < g["cols"]:
        return (row, col)
    return None


def haversine_m(a, b):
    p1, p2 = math.radians(a[0]), math.radians(b[0])
    dp = p2 - p1
    dl = math.radians(b[1] - a[1])
    h = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2.0 * R * math.asin(math.sqrt(h))


def round_half_away(x):
    return math.floor(x + 0.5) if x >= 0 else -math.floor(-x + 0.5)


def to_cents(x):
    return int(round_half_away(x * 100.0))


def money(c):
    sign = "-" if c < 0 else ""
    c = abs(c)
    return f"{sign}{c // 100}.{c % 100:02d}"


def parse_ts(s):
    dt = datetime.strptime(s.strip(), "%Y-%m-%d %H:%M:%S")
    return dt.replace(tzinfo=NY).astimezone(timezone.utc)


def finite(s):
    v = float(s)
    if not math.isfinite(v):
        raise ValueError(s)
    return v


# ---------------------------------------------------------------------------
# Ingest
# ---------------------------------------------------------------------------
def ingest():
    with open(os.path.join(ROOT, "ingest", "trips_sample.csv")) as f:
        rows = list(csv.reader(f))
    header = [h.strip() for h in rows[0]]
    col = {h: i for i, h in enumerate(header)}
    need = ["medallion", "hack_license", "pickup_datetime", "dropoff_datetime", "trip_distance",
            "pickup_latitude", "pickup_longitude", "dropoff_latitude", "dropoff_longitude"]
    width = max(col[n] for n in need) + 1
    trip_reasons = Counter()
    trips = []
    for ln, r in enumerate(rows[1:], start=2):
        if len(r) < width or any(r[col[k]].strip() == "" for k in ("medallion", "hack_license")):
            trip_reasons["missing_field"] += 1
            continue
        try:
            pu = parse_ts(r[col["pickup_datetime"]])
            do = parse_ts(r[col["dropoff_datetime"]])
        except ValueError:
            trip_reasons["bad_timestamp"] += 1
            continue
        try:
            plat, plon = finite(r[col["pickup_latitude"]]), finite(r[col["pickup_longitude"]])
            dlat, dlon = finite(r[col["dropoff_latitude"]]), finite(r[col["dropoff_longitude"]])
        except ValueError:
            trip_reasons["bad_coordinate"] += 1
            continue
        try:
            miles = finite(r[col["trip_distance"]])
        except ValueError:
            trip_reasons["bad_number"] += 1
            continue
        key = (r[col["medallion"]].strip(), r[col["hack_license"]].strip(), pu)
        trips.append(dict(line=ln, key=key, pu=pu, do=do, plat=plat, plon=plon, dlat=dlat, dlon=dlon,
                          km=miles * 1.609344))

    with open(os.path.join(ROOT, "ingest", "fares_sample.csv")) as f:
        rows = list(csv.reader(f))
    header = [h.strip() for h in rows[0]]
    col = {h: i for i, h in enumerate(header)}
    need = ["medallion", "hack_license", "pickup_datetime", "payment_type", "fare_amount", "tip_amount",
            "total_amount"]
    width = max(col[n] for n in need) + 1
    fare_reasons = Counter()
    fares = []
    for ln, r in enumerate(rows[1:], start=2):
        if len(r) < width or any(r[col[k]].strip() == "" for k in ("medallion", "hack_license")):
            fare_reasons["missing_field"] += 1
            continue
        try:
            pu = parse_ts(r[col["pickup_datetime"]])
        except ValueError:
            fare_reasons["bad_timestamp"] += 1
            continue
        try:
            fare = to_cents(finite(r[col["fare_amount"]]))
            tip = to_cents(finite(r[col["tip_amount"]]))
            total = to_cents(finite(r[col["total_amount"]]))
        except ValueError:
            fare_reasons["bad_number"] += 1
            continue
        key = (r[col["medallion"]].strip(), r[col["hack_license"]].strip(), pu)
        fares.append(dict(line=ln, key=key, fare=fare, tip=tip, total=total))

    tkeys = Counter(t["key"] for t in trips)
    fkeys = Counter(f["key"] for f in fares)
    fare_by_key = {f["key"]: f for f in fares}
    pairs = []
    for t in trips:
        k = t["key"]
        if tkeys[k] > 1 or fkeys.get(k, 0) > 1:
            trip_reasons["ambiguous_join"] += 1
        elif k not in fkeys:
            trip_reasons["unmatched"] += 1
        else:
            pairs.append((t, fare_by_key[k]))
    for fr in fares:
        k = fr["key"]
        if fkeys[k] > 1 or tkeys.get(k, 0) > 1:
            fare_reasons["ambiguous_join"] += 1
        elif k not in tkeys:
            fare_reasons["unmatched"] += 1

    south, west, north, east = NYC_BOX
    records = []
    for t, fr in pairs:
        if t["do"] < t["pu"]:
            reason = "time_order"
        elif t["km"] < 0:
            reason = "negative_distance"
        elif fr["fare"] < 0 or fr["tip"] < 0:
            reason = "negative_amount"
        elif fr["total"] < fr["fare"]:
            reason = "amount_order"
        elif not all(south <= la <= north and west <= lo <= east
                     for la, lo in ((t["plat"], t["plon"]), (t["dlat"], t["dlon"]))):
            reason = "out_of_box"
        else:
            reason = None
        if reason:
            trip_reasons[reason] += 1
        else:
            records.append(dict(t, total=fr["total"]))

    n_trip_rows = sum(1 for _ in open(os.path.join(ROOT, "ingest", "trips_sample.csv"))) - 1
    n_fare_rows = sum(1 for _ in open(os.path.join(ROOT, "ingest", "fares_sample.csv"))) - 1
    fare_matched = len(pairs)
    return records, dict(
        trips=dict(rows_read=n_trip_rows, rows_accepted=len(records),
                   rows_rejected=n_trip_rows - len(records), rejection_reasons=dict(sorted(trip_reasons.items()))),
        fares=dict(rows_read=n_fare_rows, rows_accepted=fare_matched,
                   rows_rejected=n_fare_rows - fare_matched, rejection_reasons=dict(sorted(fare_reasons.items()))),
        joined_pairs=len(pairs),
    )


def od_index(records, g):
    buckets = defaultdict(lambda: [0, 0, 0, 0])
    skipped = 0
    for r in records:
        o = cell_of(g, r["plat"], r["plon"])
        d = cell_of(g, r["dlat"], r["dlon"])
        if o is None or d is None:
            skipped += 1
            continue
        b = buckets[(o, d)]
        b[0] += 1
        b[1] += r["total"]
        b[2] += int(round_half_away(r["km"] * 1000.0))
        b[3] += int((r["do"] - r["pu"]).total_seconds())
    return buckets, skipped


def fit_fallback(records):
    x = np.array([[1.0, r["km"], (r["do"] - r["pu"]).total_seconds() / 60.0] for r in records])
    y = np.array([r["total"] / 100.0 for r in records])
    coef, *_ = np.linalg.lstsq(x, y, rcond=None)
    return [float(c) for c in coef]


def uber_base(km, minutes):
    return max(0.0, PER_KM * km + PER_MIN * minutes)


def synthetic_quote(base):
    price = 1.0 * base
    half = price * SPREAD / 2.0
    lo, hi = price - half, price + half
    return lo, hi, (lo + hi) / 2.0


def estimate(buckets, coef, o, d):
    oc, dc = cell_of(APP, *o), cell_of(APP, *d)
    b = buckets.get((oc, dc))
    if b:
        yellow = b[1] / b[0] / 100.0
        km = b[2] / b[0] / 1000.0
        minutes = b[3] / b[0] / 60.0
        src = "historical"
    else:
        km = haversine_m(o, d) / 1000.0 * CIRCUITY
        minutes = km / SPEED * 60.0
        yellow = coef[0] + coef[1] * km + coef[2] * minutes
        src = "fallback"
    lo, hi, mean = synthetic_quote(uber_base(km, minutes))
    return oc, dc, yellow, src, (lo, hi, mean)


def ingest_goldens():
    records, manifest = ingest()
    buckets, skipped = od_index(records, APP)
    coef = fit_fallback(records)
    km = 2.0 * CIRCUITY
    manifest["app_grid"] = dict(buckets=len(buckets), skipped=skipped,
                                trips_in_buckets=sum(b[0] for b in buckets.values()))
    manifest["fallback"] = dict(intercept=coef[0], per_km=coef[1], per_minute=coef[2],
                                quote_2km=coef[0] + coef[1] * km + coef[2] * (km / SPEED * 60.0))
    with open(os.path.join(ROOT, "ingest", "sample_manifest.json"), "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")

    gaz = list(csv.DictReader(open(os.path.join(ROOT, "service", "gazetteer.csv"))))
    hubs = [(g["name"], float(g["lat"]), float(g["lon"])) for g in gaz]
    with open(os.path.join(ROOT, "ingest", "golden_queries.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["origin_lat", "origin_lon", "destination_lat", "destination_lon", "yellow_mean", "uber_mean",
                    "winner"])
        for i, a in enumerate(hubs):
            for j, b in enumerate(hubs):
                if (i * 7 + j * 3) % 11 != 0:
                    continue
                _, _, yellow, _, (_, _, uber) = estimate(buckets, coef, a[1:], b[1:])
                yc, uc = to_cents(yellow), to_cents(uber)
                winner = "yellow" if yc < uc else ("uber" if uc < yc else "tie")
                w.writerow([a[1], a[2], b[1], b[2], money(yc), money(uc), winner])

    # service golden: the busiest hub-to-hub bucket
    best = None
    for a in hubs:
        for b in hubs:
            if a == b:
                continue
            k = (cell_of(APP, *a[1:]), cell_of(APP, *b[1:]))
            n = buckets.get(k, [0])[0]
            if best is None or n > best[0]:
                best = (n, a, b)
    _, a, b = best
    oc, dc, yellow, src, (lo, hi, mean) = estimate(buckets, coef, a[1:], b[1:])
    yc, uc = to_cents(yellow), to_cents(mean)
    delta = yc - uc
    request = {"origin": {"name": a[0]}, "destination": {"lat": b[1], "lon": b[2]},
               "time": "2015-05-05T13:00:00Z", "user_id": "golden"}
    response = {
        "origin": {"lat": a[1], "lon": a[2], "cell": {"row": oc[0], "col": oc[1]}},
        "destination": {"lat": b[1], "lon": b[2], "cell": {"row": dc[0], "col": dc[1]}},
        "yellow": {"provider": "yellow", "min": money(yc), "max": money(yc), "mean": money(yc),
                   "multiplier": 1.0, "source": src},
        "uber": {"provider": "uber", "min": money(to_cents(lo)), "max": money(to_cents(hi)), "mean": money(uc),
                 "multiplier": 1.0, "source": "synthetic"},
        "winner": "yellow" if delta < 0 else ("uber" if delta > 0 else "tie"),
        "delta": money(delta),
        "savings": money(abs(delta)),
    }
    with open(os.path.join(ROOT, "service", "golden_request.json"), "w") as f:
        json.dump(request, f, indent=2)
        f.write("\n")
    with open(os.path.join(ROOT, "service", "golden_response.json"), "w") as f:
        json.dump(response, f, indent=2)
        f.write("\n")


# ---------------------------------------------------------------------------
# Savings
# ---------------------------------------------------------------------------
def hour_of_week(ts):
    loc = ts.astimezone(NY)
    return loc.weekday() * 24 + loc.hour


def load_queries():
    out = []
    for line in open(os.path.join(ROOT, "savings", "queries.jsonl")):
        e = json.loads(line)
        e["ts"] = datetime.strptime(e["timestamp"], "%Y-%m-%dT%H:%M:%SZ").replace(tzinfo=timezone.utc)
        e["y"] = to_cents(float(e["yellow_price"]))
        e["u"] = to_cents(float(e["uber_price"]))
        out.append(e)
    return out


def savings_goldens():
    log = load_queries()
    n = len(log)
    deltas = [e["y"] - e["u"] for e in log]
    hist = Counter(int(round_half_away(d / 100.0)) for d in deltas)
    strategies = {}
    for name, cost in (("app_driven", lambda e: min(e["y"], e["u"])),
                       ("always_yellow", lambda e: e["y"]),
                       ("always_uber", lambda e: e["u"]),
                       ("random", lambda e: (e["y"] + e["u"]) / 2.0)):
        c = [cost(e) / 100.0 for e in log]
        strategies[name] = dict(mean=sum(c) / n, median=statistics.median(c))
    slots = defaultdict(Counter)
    for e in log:
        slots[hour_of_week(e["ts"])][e["winner"]] += 1
    stripes = ""
    for t in range(168):
        c = slots.get(t)
        if not c:
            stripes += "N"
        elif c["yellow"] > c["uber"]:
            stripes += "Y"
        elif c["uber"] > c["yellow"]:
            stripes += "B"
        else:
            stripes += "T"
    users = Counter(e["user_id"] for e in log)
    p = [0] * 168
    for e in log:
        p[hour_of_week(e["ts"])] += 1
    daily = [sum(p[d * 24 + h] for d in range(7)) / 7.0 for h in range(24)]
    per_count = Counter(users.values())
    cdf, acc = [], 0
    for k in sorted(per_count):
        acc += per_count[k]
        cdf.append([k, acc / len(users)])
    golden = dict(
        entries=n,
        mean_saving_cents=sum(abs(d) for d in deltas) / n,
        mean_delta_cents=sum(deltas) / n,
        histogram={str(k): v for k, v in sorted(hist.items())},
        strategies=strategies,
        stripes=stripes,
        users=len(users),
        mean_queries_per_user=n / len(users),
        hour_of_week=p,
        daily_profile=daily,
        cdf=cdf,
    )
    with open(os.path.join(ROOT, "savings", "golden.json"), "w") as f:
        json.dump(golden, f, indent=1)
        f.write("\n")
    return p


# ---------------------------------------------------------------------------
# Surge
# ---------------------------------------------------------------------------
def read_replay(path):
    opener = gzip.open if path.endswith(".gz") else open
    series = defaultdict(list)
    with opener(path, "rt") as f:
        for r in csv.DictReader(f):
            ts = datetime.strptime(r["timestamp"], "%Y-%m-%dT%H:%M:%SZ").replace(tzinfo=timezone.utc)
            price = (float(r["min"]) + float(r["max"])) / 2.0
            series[r["route_id"]].append((ts, price / float(r["base_price"])))
    for v in series.values():
        v.sort(key=lambda x: x[0])
    return series


def read_routes(path):
    return {r["route_id"]: (float(r["origin_lat"]), float(r["origin_lon"]))
            for r in csv.DictReader(open(path))}


def pearson(x, y):
    x, y = np.asarray(x), np.asarray(y)
    dx, dy = x - x.mean(), y - y.mean()
    return float((dx * dy).sum() / math.sqrt((dx * dx).sum() * (dy * dy).sum()))


def experiment(series):
    starts = [v[0][0].timestamp() for v in series.values()]
    ends = [v[-1][0].timestamp() for v in series.values()]
    steps = []
    for v in series.values():
        diffs = sorted(int(v[i + 1][0].timestamp() - v[i][0].timestamp()) for i in range(len(v) - 1))
        steps.append(diffs[(len(diffs) - 1) // 2])
    step = max(steps)
    t0, t1 = max(starts), min(ends)
    grid = []
    t = t0
    while t <= t1:
        grid.append(t)
        t += step
    resampled = []
    for rid in sorted(series):
        v = series[rid]
        out, j = [], 0
        for t in grid:
            while j + 1 < len(v) and v[j + 1][0].timestamp() <= t:
                j += 1
            out.append(v[j][1])
        resampled.append(out)
    rs = [pearson(resampled[i], resampled[j]) for i in range(len(resampled)) for j in range(i + 1, len(resampled))]
    return sum(rs) / len(rs), step, len(grid)


def surge_goldens(p):
    weekly = read_replay(os.path.join(ROOT, "surge", "weekly_800.replay.gz"))
    s = {}
    max_mult = 0.0
    for rid, v in weekly.items():
        row = [0] * 168
        for ts, m in v:
            max_mult = max(max_mult, m)
            if m > 1.0 + EPS:
                row[hour_of_week(ts)] = 1
        s[rid] = row
    n = len(s)
    st = sum(s[r][t] * p[t] for r in s for t in range(168)) / (n * sum(p))
    plain = sum(sum(r) for r in s.values()) / (n * 168)
    origin_r, origin_step, origin_len = experiment(read_replay(os.path.join(ROOT, "surge", "fixed_origin.replay")))
    dest_r, _, _ = experiment(read_replay(os.path.join(ROOT, "surge", "fixed_destination.replay")))
    golden = dict(weekly_routes=n, weekly_st=st, weekly_plain_fraction=plain, weekly_max_multiplier=max_mult,
                  fixed_origin_mean_r=origin_r, fixed_origin_step_s=origin_step, fixed_origin_grid_len=origin_len,
                  fixed_destination_mean_r=dest_r)
    with open(os.path.join(ROOT, "surge", "golden.json"), "w") as f:
        json.dump(golden, f, indent=1, sort_keys=True)
        f.write("\n")
    return golden


# ---------------------------------------------------------------------------
# Demand prediction features
# ---------------------------------------------------------------------------
def predict_goldens():
    series = read_replay(os.path.join(ROOT, "predict", "areas_840.replay.gz"))
    routes = read_routes(os.path.join(ROOT, "predict", "routes_areas.csv"))
    per_cell = defaultdict(list)
    for rid, v in series.items():
        c = cell_of(ANALYSIS, *routes[rid])
        per_cell[c].append(sum(m for _, m in v) / len(v))
    target = {c: sum(v) / len(v) for c, v in per_cell.items()}

    yellow = Counter()
    with open(os.path.join(ROOT, "predict", "areas_od.csv")) as f:
        lines = [l for l in f if not l.startswith("#")]
    for r in csv.DictReader(lines):
        yellow[(int(r["o_row"]), int(r["o_col"]))] += int(r["trip_count"])
    places, travel, checkins = Counter(), Counter(), Counter()
    venue_cell = {}
    for r in csv.DictReader(open(os.path.join(ROOT, "predict", "venues.csv"))):
        c = cell_of(ANALYSIS, float(r["lat"]), float(r["lon"]))
        if c is None:
            continue
        venue_cell[r["venue_id"]] = c
        places[c] += 1
        if r["category"] in TRAVEL:
            travel[c] += 1
    has_checkin = set()
    for r in csv.DictReader(open(os.path.join(ROOT, "predict", "checkins.csv"))):
        c = venue_cell.get(r["venue_id"])
        if c is None:
            continue
        checkins[c] += int(r["checkins"])
        has_checkin.add(c)

    cells = sorted(target)
    rows = []
    for c in cells:
        missing = c not in yellow or c not in places or c not in has_checkin
        rows.append((c, yellow[c], places[c], checkins[c], travel[c], target[c], missing))
    with open(os.path.join(ROOT, "predict", "area_features.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["row", "col", "yellow_trips", "fsq_places", "fsq_checkins", "fsq_travel_spots", "target",
                    "missing"])
        for c, y, pl, ck, tr, t, m in rows:
            w.writerow([c[0], c[1], y, pl, ck, tr, repr(t), "1" if m else "0"])

    x = np.array([[r[1], r[2], r[3], r[4]] for r in rows], dtype=float)
    y = np.array([r[5] for r in rows])
    gains = y - 1.0
    gains = np.where(gains > EPS, gains, 0.0)  # non-surging areas carry no gain

    def ndcg100(order):
        k = 100
        disc = 1.0 / np.log2(np.arange(2, k + 2))
        dcg = (gains[order[:k]] * disc).sum()
        ideal = np.sort(gains)[::-1][:k]
        return float(dcg / (ideal * disc).sum())

    rng = np.random.default_rng(7)
    baseline = float(np.mean([ndcg100(rng.permutation(len(rows))) for _ in range(20000)]))
    names = ["yellow_trips", "fsq_places", "fsq_checkins", "fsq_travel_spots"]
    feature_r = {n: pearson(x[:, i], y) for i, n in enumerate(names)}
    area_ids = list(range(len(rows)))  # rows already sorted by cell

    def ranked(scores):
        return np.array(sorted(area_ids, key=lambda i: (-scores[i], i)))

    feature_ndcg = {n: ndcg100(ranked(x[:, i])) for i, n in enumerate(names)}
    golden = dict(areas=len(rows), surging_fraction=float(np.mean(y > 1.0 + EPS)), baseline_ndcg_at_100=baseline,
                  feature_pearson=feature_r, feature_ndcg_at_100=feature_ndcg)
    try:
        from sklearn.tree import DecisionTreeRegressor
        preds = np.empty(len(y))
        for i in range(len(y)):
            mask = np.ones(len(y), bool)
            mask[i] = False
            m = DecisionTreeRegressor(max_depth=20, random_state=0).fit(x[mask], y[mask])
            preds[i] = m.predict(x[i:i + 1])[0]
        golden["reference_tree_loo_pearson"] = pearson(preds, y)
        golden["reference_tree_ndcg_at_100"] = ndcg100(ranked(preds))
    except ImportError:
        pass
    with open(os.path.join(ROOT, "predict", "golden.json"), "w") as f:
        json.dump(golden, f, indent=1, sort_keys=True)
        f.write("\n")
    return golden


def main():
    ingest_goldens()
    p = savings_goldens()
    print(json.dumps(surge_goldens(p), indent=1))
    print(json.dumps(predict_goldens(), indent=1))
    print(open(os.path.join(ROOT, "ingest", "sample_manifest.json")).read())


if __name__ == "__main__":
    main()

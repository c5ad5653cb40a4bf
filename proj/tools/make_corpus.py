#!/usr/bin/env python3
"""Generate the synthetic furniture corpus under data/corpus/.

Each scene is a room with a few anchored arrangements (bed + nightstands,
table + chairs, sofa + coffee table + tv stand, desk + chair) plus loose
furniture dropped at random free spots. Output is deterministic for a seed.
"""
import argparse
import json
import math
import random
from pathlib import Path

SIZES = {
    "bed": (1.0, 0.8),
    "nightstand": (0.25, 0.25),
    "wardrobe": (0.3, 0.6),
    "dresser": (0.25, 0.5),
    "cabinet": (0.3, 0.5),
    "bookshelf": (0.2, 0.6),
    "shelf": (0.15, 0.5),
    "desk": (0.35, 0.6),
    "chair": (0.25, 0.25),
    "armchair": (0.4, 0.4),
    "table": (0.4, 0.5),
    "dining_table": (0.5, 0.8),
    "sofa": (0.45, 1.0),
    "couch": (0.45, 0.9),
    "coffee_table": (0.3, 0.5),
    "tv_stand": (0.25, 0.7),
    "lamp": (0.15, 0.15),
    "plant": (0.2, 0.2),
    "stool": (0.2, 0.2),
    "ottoman": (0.25, 0.25),
    "bench": (0.2, 0.6),
    "fridge": (0.35, 0.35),
    "counter": (0.3, 0.9),
    "sink": (0.25, 0.3),
    "mirror": (0.05, 0.4),
}


def corners(obj):
    x, y, t = obj["pose"]
    hx, hy = obj["half_extents"]
    c, s = math.cos(t), math.sin(t)
    return [(x + c * a - s * b, y + s * a + c * b) for a, b in ((hx, hy), (-hx, hy), (-hx, -hy), (hx, -hy))]


def separated(p, q, gap):
    # separating axis test on both rectangles' edge normals, with a clearance margin
    cp, cq = corners(p), corners(q)
    for poly in (cp, cq):
        for k in range(4):
            ax, ay = poly[(k + 1) % 4][0] - poly[k][0], poly[(k + 1) % 4][1] - poly[k][1]
            n = math.hypot(ax, ay)
            nx, ny = -ay / n, ax / n
            pp = [nx * u + ny * v for u, v in cp]
            qq = [nx * u + ny * v for u, v in cq]
            if max(pp) + gap <= min(qq) or max(qq) + gap <= min(pp):
                return True
    return False


def inside(obj, w, h):
    return all(0.0 <= x <= w and 0.0 <= y <= h for x, y in corners(obj))


def make(label, x, y, theta, jitter, rng):
    hx, hy = SIZES[label]
    s = 1.0 + rng.uniform(-jitter, jitter)
    return {"label": label, "pose": [x, y, theta], "half_extents": [round(hx * s, 3), round(hy * s, 3)]}


def local(anchor, dx, dy, dtheta=0.0):
    x, y, t = anchor["pose"]
    c, s = math.cos(t), math.sin(t)
    return x + c * dx - s * dy, y + s * dx + c * dy, t + dtheta


def arrangement(kind, rng):
    """Objects of one arrangement in its own frame; the first is the anchor."""
    n = lambda sigma=0.04: rng.gauss(0.0, sigma)
    if kind == "bed":
        bed = make("bed", 0.0, 0.0, 0.0, 0.1, rng)
        hx, hy = bed["half_extents"]
        out = [bed]
        for side in (1, -1):
            if side == 1 or rng.random() < 0.6:
                out.append(make("nightstand", *local(bed, -hx + 0.25 + n(), side * (hy + 0.3 + n())), 0.1, rng))
        return out
    if kind == "dining":
        t = make(rng.choice(["table", "dining_table"]), 0.0, 0.0, 0.0, 0.1, rng)
        hx, hy = t["half_extents"]
        out = [t]
        for k in range(rng.randint(1, 4)):
            if k % 2 == 0:
                sgn = 1 if k == 0 else -1
                out.append(make("chair", *local(t, sgn * (hx + 0.3 + n()), n(0.1), math.pi if sgn > 0 else 0.0), 0.05, rng))
            else:
                sgn = 1 if k == 1 else -1
                out.append(make("chair", *local(t, n(0.1), sgn * (hy + 0.3 + n()), -sgn * math.pi / 2), 0.05, rng))
        return out
    if kind == "living":
        sofa = make(rng.choice(["sofa", "couch"]), 0.0, 0.0, 0.0, 0.1, rng)
        hx = sofa["half_extents"][0]
        out = [sofa, make("coffee_table", *local(sofa, hx + 0.6 + n(), n()), 0.1, rng)]
        if rng.random() < 0.7:
            out.append(make("tv_stand", *local(sofa, hx + 2.0 + n(0.1), n(), math.pi), 0.1, rng))
        if rng.random() < 0.4:
            out.append(make("armchair", *local(sofa, hx + 0.6 + n(), hx + 1.3 + n(), -math.pi / 2), 0.1, rng))
        return out
    if kind == "desk":
        desk = make("desk", 0.0, 0.0, 0.0, 0.1, rng)
        hx = desk["half_extents"][0]
        return [desk, make(rng.choice(["chair", "chair", "stool"]), *local(desk, hx + 0.3 + n(), n(0.08), math.pi), 0.05, rng)]
    if kind == "kitchen":
        c = make("counter", 0.0, 0.0, 0.0, 0.1, rng)
        hy = c["half_extents"][1]
        return [c, make("fridge", *local(c, 0.05 + n(), hy + 0.45 + n()), 0.05, rng)]
    raise ValueError(kind)


LOOSE = ["wardrobe", "dresser", "cabinet", "bookshelf", "shelf", "lamp", "plant", "ottoman",
         "bench", "mirror", "sink", "chair", "table", "armchair"]
ROOM_KINDS = {
    "bedroom": (["bed"], ["wardrobe", "dresser", "cabinet", "bookshelf", "lamp", "chair", "table", "mirror"]),
    "living": (["living"], ["bookshelf", "lamp", "plant", "ottoman", "cabinet", "shelf", "chair"]),
    "dining": (["dining"], ["cabinet", "plant", "shelf", "bench", "lamp"]),
    "office": (["desk"], ["bookshelf", "cabinet", "shelf", "plant", "table", "chair", "lamp"]),
    "studio": (["bed", "desk"], ["wardrobe", "bookshelf", "plant", "table", "chair"]),
    "kitchen": (["kitchen", "dining"], ["sink", "cabinet", "stool", "shelf"]),
}


def place(group, placed, w, h, rng, wall=False):
    for _ in range(400):
        theta = rng.choice([0.0, math.pi / 2, math.pi, -math.pi / 2]) + rng.gauss(0.0, 0.03)
        x, y = rng.uniform(0.3, w - 0.3), rng.uniform(0.3, h - 0.3)
        c, s = math.cos(theta), math.sin(theta)
        moved = []
        for o in group:
            ox, oy, ot = o["pose"]
            moved.append(dict(o, pose=[x + c * ox - s * oy, y + s * ox + c * oy, ot + theta]))
        if not all(inside(o, w, h) for o in moved):
            continue
        if all(separated(a, b, 0.05) for a in moved for b in placed):
            return moved
    return None


def scene(index, rng):
    kind = rng.choice(sorted(ROOM_KINDS))
    anchors, extras = ROOM_KINDS[kind]
    w, h = round(rng.uniform(4.0, 7.0), 2), round(rng.uniform(3.5, 6.0), 2)
    placed = []
    for a in anchors:
        got = place(arrangement(a, rng), placed, w, h, rng)
        if got:
            placed += got
    for label in rng.sample(extras, rng.randint(1, min(4, len(extras)))):
        got = place([make(label, 0.0, 0.0, 0.0, 0.1, rng)], placed, w, h, rng)
        if got:
            placed += got
    if rng.random() < 0.3:
        got = place([make(rng.choice(LOOSE), 0.0, 0.0, 0.0, 0.1, rng)], placed, w, h, rng)
        if got:
            placed += got
    objects = []
    for k, o in enumerate(placed):
        x, y, t = o["pose"]
        t = math.atan2(math.sin(t), math.cos(t))
        objects.append({"id": f"{o['label']}_{k}", "label": o["label"],
                        "pose": [round(x, 4), round(y, 4), round(t, 4)], "half_extents": o["half_extents"]})
    return {"format_version": 1, "room": {"width": w, "height": h},
            "robot": {"r_b": 0.3, "d_max": 0.6}, "objects": objects, "kind": kind}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/corpus")
    ap.add_argument("--count", type=int, default=240)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for old in out.glob("scene_*.json"):
        old.unlink()
    for i in range(args.count):
        s = scene(i, rng)
        s.pop("kind")
        (out / f"scene_{i:03d}.json").write_text(json.dumps(s, indent=1) + "\n")


if __name__ == "__main__":
    main()

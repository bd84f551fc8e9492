#!/usr/bin/env python3
"""Regenerate data/qatar_beef.json.

Customer sites are drawn uniformly inside one rectangle per region with a
fixed seed; counts follow the regional population shares. Everything else is
the beef case-study parameter set.
"""

import argparse
import json
import random
from pathlib import Path

REGIONS = [
    # id, food cost, income, residential areas, customers, DCs, x-range, y-range
    ("R1", 21.77, 275626, 22, 27, 4, (55, 80), (60, 90)),
    ("R2", 21.77, 241036, 5, 6, 1, (50, 80), (110, 150)),
    ("R3", 21.77, 241036, 2, 2, 1, (55, 80), (92, 108)),
    ("R4", 21.77, 241036, 4, 5, 2, (20, 54), (50, 90)),
]

WAREHOUSES = [("W1", (40.0, 140.0)), ("W2", (30.0, 60.0)), ("W3", (70.0, 40.0))]

# id, r_j per person per day, beta_j per kg
NUTRIENTS = [
    ("Zn", 0.24, 22), ("Ca", 24, 240), ("Fe", 0.0876, 25), ("A", 48, 660),
    ("B1", 0.024, 1), ("B2", 0.036, 2), ("B3", 0.48, 56), ("B6", 0.012, 5),
    ("B9", 7.8, 80), ("B12", 0.048, 13), ("C", 4.8, 5), ("D", 1.2, 30),
]


def build(seed, dc_capacity, warehouse_capacity, safety_stock, horizon):
    rng = random.Random(seed)
    regions = []
    dc_no = 1
    cust_no = 1
    for rid, cost, income, areas, n_cust, n_dc, xr, yr in REGIONS:
        dcs = []
        for _ in range(n_dc):
            dcs.append({"id": f"DC{dc_no}", "capacity": dc_capacity,
                        "inventory_unit_cost": 10})
            dc_no += 1
        customers = []
        for _ in range(n_cust):
            x = round(rng.uniform(*xr), 3)
            y = round(rng.uniform(*yr), 3)
            customers.append({"id": f"C{cust_no:02d}", "location": [x, y]})
            cust_no += 1
        regions.append({
            "id": rid,
            "local_food_cost": cost,
            "average_income": income,
            "residential_areas": areas,
            "unfulfilled_unit_cost": 5,
            "dcs": dcs,
            "customers": customers,
        })
    return {
        "name": "qatar_beef",
        "warehouses": [
            {"id": wid, "location": list(loc), "capacity": warehouse_capacity,
             "order_unit_cost": 3}
            for wid, loc in WAREHOUSES
        ],
        "regions": regions,
        "nutrients": [
            {"id": nid, "weight": 1, "min_requirement": r, "per_kg_content": b}
            for nid, r, b in NUTRIENTS
        ],
        "stochastic": {
            "demand": {"family": "normal", "mean": 560, "variance": 50},
            "supply_loss": {"family": "uniform", "low": 0.8, "high": 0.9},
        },
        "safety_stock_fraction": safety_stock,
        "horizon": horizon,
        "persons_per_area": 50000,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=2023)
    ap.add_argument("--dc-capacity", type=float, default=6000)
    ap.add_argument("--warehouse-capacity", type=float, default=9000)
    ap.add_argument("--safety-stock", type=float, default=0.4)
    ap.add_argument("--horizon", type=int, default=5)
    ap.add_argument("--out", type=Path,
                    default=Path(__file__).resolve().parent.parent / "data" / "qatar_beef.json")
    args = ap.parse_args()
    doc = build(args.seed, args.dc_capacity, args.warehouse_capacity,
                args.safety_stock, args.horizon)
    args.out.write_text(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    main()

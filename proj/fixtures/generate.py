#!/usr/bin/env python3
"""Regenerates shipping_sample.csv.

Synthetic freight-pricing observations over the five-node graph in
shipping_graph.json. Raising the carrier price suppresses order volume,
lengthens delivery time, and drags customer rating down; revenue gains a
little directly from the higher price but loses more through every mediator,
so all three indirect effects are negative.

The model file next to it is the fit artifact, reproduced with:

    causalmed fit fixtures/shipping_graph.json \
        --data fixtures/shipping_sample.csv --out fixtures/shipping_model.json
"""

import csv
import random
from pathlib import Path

N_ROWS = 2500
SEED = 1776


def main() -> None:
    rng = random.Random(SEED)
    out = Path(__file__).with_name("shipping_sample.csv")
    with out.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["carrier_price", "order_volume", "delivery_time", "customer_rating", "revenue"]
        )
        for _ in range(N_ROWS):
            price = rng.uniform(3.0, 9.0)
            volume = 100.0 - 4.0 * price + rng.gauss(0.0, 3.0)
            time = 1.0 + 0.5 * price + rng.gauss(0.0, 0.4)
            rating = 9.0 - 0.1 * price - 0.8 * time + rng.gauss(0.0, 0.5)
            revenue = (
                20.0 * volume
                + 150.0 * rating
                - 30.0 * time
                + 12.0 * price
                + rng.gauss(0.0, 50.0)
            )
            writer.writerow([f"{x:.4f}" for x in (price, volume, time, rating, revenue)])
    print(f"wrote {N_ROWS} rows to {out}")


if __name__ == "__main__":
    main()

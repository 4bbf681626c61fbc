"""Regenerate tests/data/frozen.json from the brute-force enumeration routes.

Run by hand: python3 tests/freeze_oracles.py. The tests compare the
closed-formula and series routes against these stored values.
"""

import json
from pathlib import Path

from treetp.bijections import verify_bijection
from treetp.trees import model1_polynomial, tree_polynomial


def rows(mode, n_max):
    return [[str(tree_polynomial(n, k, mode)) for k in range(n + 1)] for n in range(n_max + 1)]


def main():
    data = {
        "Tyz_rows": rows("yz", 5),
        "Typhi_rows": rows("yphi", 4),
        "model1_literal_b4": {
            f"{n},{k}": str(model1_polynomial(n, k, b4_reading="literal"))
            for n in range(4, 6) for k in range(n + 1)
        },
        "fifthproof_checks": verify_bijection("fifthproof", 5).checks,
        "sigma_checks": verify_bijection("sigma", 6).checks,
    }
    out = Path(__file__).with_name("data") / "frozen.json"
    out.write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()

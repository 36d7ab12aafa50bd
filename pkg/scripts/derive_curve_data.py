"""Write the omega/zeta/alpha/beta vertex table as exact rational functions of eps.

Each vertex is obtained symbolically from the same branch recipes the
library evaluates numerically, then stored as integer polynomial
coefficients (ascending powers of eps).

    python3 scripts/derive_curve_data.py [output.csv]
"""

from __future__ import annotations

import sys
from functools import reduce
from math import lcm
from pathlib import Path

import sympy as sp

from conemix.partition_geometry import CURVE_FILE, CURVE_RECIPES, CURVE_SHIFT, FWD, involution

EPS = sp.Symbol("eps", positive=True)


def integer_ratio(expr) -> tuple[list[int], list[int]]:
    num, den = sp.fraction(sp.cancel(sp.together(expr)))
    pn, pd = sp.Poly(num, EPS), sp.Poly(den, EPS)
    coeffs = [sp.Rational(c) for c in pn.all_coeffs() + pd.all_coeffs()]
    scale = reduce(lcm, (int(c.q) for c in coeffs), 1)
    lead = sp.Rational(pd.LC())
    sign = -1 if lead < 0 else 1
    to_int = lambda p: [int(sign * scale * sp.Rational(c)) for c in reversed(p.all_coeffs())]  # noqa: E731
    return to_int(pn), to_int(pd)


def curve_vertices() -> dict:
    t = sp.Rational(1, 2) - EPS
    out = {}
    for name, recipes in CURVE_RECIPES.items():
        out[name] = [tuple(sp.simplify(c) for c in r.image(FWD, t, CURVE_SHIFT)) for r in recipes]
    s = involution(t)
    out["alpha"] = [tuple(sp.simplify(c) for c in s(p)) for p in out["zeta"]]
    out["beta"] = [tuple(sp.simplify(c) for c in s(p)) for p in out["omega"]]
    return out


def render(vertices: dict) -> str:
    lines = [
        "# omega, zeta (in frak_b) and alpha, beta (in B) on the epsilon branch",
        "# each coordinate is x_num(eps)/x_den(eps); polynomial coefficients are",
        "# integers in ascending powers of eps, separated by spaces",
        "curve,index,x_num,x_den,y_num,y_den",
    ]
    for name in ("omega", "zeta", "alpha", "beta"):
        for idx, (x, y) in enumerate(vertices[name], start=1):
            xn, xd = integer_ratio(x)
            yn, yd = integer_ratio(y)
            cols = [" ".join(map(str, c)) for c in (xn, xd, yn, yd)]
            lines.append(",".join([name, str(idx)] + cols))
    return "\n".join(lines) + "\n"


def main(argv: list[str]) -> int:
    default = Path(__file__).resolve().parents[1] / "src" / "conemix" / "data" / CURVE_FILE
    target = Path(argv[1]) if len(argv) > 1 else default
    target.write_text(render(curve_vertices()), encoding="utf-8")
    print(f"wrote {target}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))

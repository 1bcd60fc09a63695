"""Emit the G(3) product kernels used by ``gatrack.ga3``.

Run ``python tools/gen_kernels.py`` and paste the output into ga3.py when the
basis ordering changes. Terms are emitted in (left index, right index) order so
the even/odd kernels are term-for-term subsets of the full product.
"""

NAMES = ["s", "v1", "v2", "v3", "b12", "b23", "b31", "t"]
# (bitmask, sign) of each basis blade in terms of canonical e_i e_j e_k order
BLADES = [(0b000, 1), (0b001, 1), (0b010, 1), (0b100, 1),
          (0b011, 1), (0b110, 1), (0b101, -1), (0b111, 1)]
INDEX = {mask: (i, sign) for i, (mask, sign) in enumerate(BLADES)}
EVEN = [0, 4, 5, 6]
ODD = [1, 2, 3, 7]


def reorder_sign(a, b):
    a >>= 1
    swaps = 0
    while a:
        swaps += bin(a & b).count("1")
        a >>= 1
    return -1 if swaps & 1 else 1


def table():
    out = {}
    for i, (ma, sa) in enumerate(BLADES):
        for j, (mb, sb) in enumerate(BLADES):
            k, sk = INDEX[ma ^ mb]
            out[i, j] = (k, sa * sb * sk * reorder_sign(ma, mb))
    return out


def kernel(left, right, lname="x", rname="y"):
    tab = table()
    comps = {}
    for i in left:
        for j in right:
            k, sign = tab[i, j]
            comps.setdefault(k, []).append((sign, i, j))
    lines = []
    for k in sorted(comps):
        expr = ""
        for n, (sign, i, j) in enumerate(comps[k]):
            term = f"{lname}{NAMES[i]} * {rname}{NAMES[j]}"
            if n == 0:
                expr = term if sign > 0 else f"-{term}"
            else:
                expr += f" + {term}" if sign > 0 else f" - {term}"
        lines.append(f"{NAMES[k]} = {expr}")
    return lines


if __name__ == "__main__":
    for title, l, r in [("full", range(8), range(8)), ("even*even", EVEN, EVEN),
                        ("even*odd", EVEN, ODD), ("odd*even", ODD, EVEN),
                        ("odd*odd", ODD, ODD)]:
        print("#", title)
        print("\n".join(kernel(l, r)))
        print()

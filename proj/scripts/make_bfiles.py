#!/usr/bin/env python3
"""Regenerate the OEIS b-file fixtures under tests/data.

Recomputes the four sequences from scratch with plain integer recurrences,
deliberately independent of the C++ implementation:

  A129921 (c): compositions, c_n = sum_{m=1..n} tau(m) c_{n-m}, c_0 = 1
  A280782 (d): gcd-1 compositions, d_n = sum_{r|n} mu(r) c_{n/r}
  A006171 (p): partitions, n p_n = sum_{k=1..n} b(k) p_{n-k} with
               b(k) = sum_{l|k} l tau(l)
  A280783 (q): gcd-1 partitions, q_n = sum_{r|n} mu(r) p_{n/r}

c and p are written with offset 0 (the empty word contributes 1); d and q
start at 1. Run from anywhere; files land next to this script's repo.
"""

import pathlib

LIMIT = 360


def divisor_sieves(limit):
    tau = [0] * (limit + 1)
    mu = [0] * (limit + 1)
    b = [0] * (limit + 1)
    mu[1] = 1
    for l in range(1, limit + 1):
        for m in range(l, limit + 1, l):
            tau[m] += 1
        if l > 1:
            # mu via the identity sum_{d|l} mu(d) = [l == 1]
            acc = 0
            d = 1
            while d * d <= l:
                if l % d == 0:
                    acc += mu[d]
                    if d != l // d:
                        acc += mu[l // d]
                d += 1
            mu[l] = -(acc - mu[l])
    for l in range(1, limit + 1):
        for m in range(l, limit + 1, l):
            b[m] += l * tau[l]
    return tau, mu, b


def main():
    tau, mu, b = divisor_sieves(LIMIT)

    c = [1] + [0] * LIMIT
    for n in range(1, LIMIT + 1):
        c[n] = sum(tau[m] * c[n - m] for m in range(1, n + 1))

    p = [1] + [0] * LIMIT
    for n in range(1, LIMIT + 1):
        total = sum(b[k] * p[n - k] for k in range(1, n + 1))
        assert total % n == 0, f"partition recurrence not exact at n={n}"
        p[n] = total // n

    def invert(seq):
        out = [0] * (LIMIT + 1)
        for n in range(1, LIMIT + 1):
            out[n] = sum(mu[r] * seq[n // r] for r in range(1, n + 1) if n % r == 0)
        return out

    d = invert(c)
    q = invert(p)

    data_dir = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"
    data_dir.mkdir(parents=True, exist_ok=True)

    def write(name, seq, offset):
        lines = [f"{n} {seq[n]}\n" for n in range(offset, LIMIT + 1)]
        (data_dir / name).write_text("".join(lines))
        print(f"wrote {name}: n={offset}..{LIMIT}")

    write("b129921.txt", c, 0)
    write("b280782.txt", d, 1)
    write("b006171.txt", p, 0)
    write("b280783.txt", q, 1)

    # spot anchors
    assert c[1:7] == [1, 3, 7, 18, 43, 108], c[1:7]
    assert d[1:7] == [1, 2, 6, 15, 42, 99], d[1:7]
    assert p[1:7] == [1, 3, 5, 11, 17, 34], p[1:7]
    assert q[1:7] == [1, 2, 4, 8, 16, 27], q[1:7]
    print("anchors ok")


if __name__ == "__main__":
    main()

"""Freeze canonical heights from PARI: `a1,..,a6 | x | y | h` per line.

Points are given on the (possibly non-minimal) input model. Heights use the
normalization h(P) ~ ln max(|num x|, |den x|).
"""
import random
import sys

import cypari2

pari = cypari2.Pari()
pari.set_real_precision(40)
rng = random.Random(7)
out = []
curves = 0
while len(out) < 300:
    kind = rng.random()
    if kind < 0.5:
        a = [rng.randint(-1, 1), rng.randint(-1, 1), rng.randint(-1, 1),
             rng.randint(-40, 40), rng.randint(-100, 100)]
    elif kind < 0.8:
        p = rng.choice([2, 3, 5])
        a = [0, p * rng.randint(-2, 2), 0, p**2 * rng.randint(-5, 5), p**3 * rng.randint(-5, 5)]
    else:
        b = [rng.randint(-1, 1), rng.randint(-1, 1), rng.randint(-1, 1),
             rng.randint(-20, 20), rng.randint(-40, 40)]
        u = rng.choice([2, 3])
        a = [b[0] * u, b[1] * u**2, b[2] * u**3, b[3] * u**4, b[4] * u**6]
    E = pari.ellinit(a)
    if len(E) == 0:
        continue
    pts = pari.ellratpoints(E, 200)
    pts = [P for P in pts if pari.ellorder(E, P) == 0]
    if not pts:
        continue
    curves += 1
    P = pts[0]
    cands = [P, pari.ellmul(E, P, 2), pari.ellmul(E, P, 3)]
    if len(pts) > 1:
        cands.append(pts[1])
    for Q in cands:
        if len(Q) < 2:
            continue
        h = pari.ellheight(E, Q, precision=160)
        out.append(f"{','.join(map(str, a))} | {Q[0]} | {Q[1]} | {h}")
sys.stdout.write("\n".join(out) + "\n")

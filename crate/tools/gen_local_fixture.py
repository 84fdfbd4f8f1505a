"""Freeze conductor, local data and torsion from PARI for a set of curves.

Output: one line per curve
  a1,a2,a3,a4,a6 | N | p:f:kod:c ... | t1,t2
with kod in PARI's encoding (1=I0, 2=II, 3=III, 4=IV, 4+n=In, -1=I0*,
-2=II*, -3=III*, -4=IV*, -4-n=In*).
"""
import random
import sys

import cypari2

pari = cypari2.Pari()
rng = random.Random(20261014)


def sample():
    kind = rng.random()
    if kind < 0.5:
        return [rng.randint(-1, 1), rng.randint(-1, 1), rng.randint(-1, 1),
                rng.randint(-60, 60), rng.randint(-200, 200)]
    if kind < 0.8:
        # force additive reduction at 2 or 3
        p = rng.choice([2, 3])
        k = rng.randint(1, 3)
        return [0, p * rng.randint(-2, 2), 0, p**(k + 1) * rng.randint(-5, 5),
                p**(k + 2) * rng.randint(-5, 5)]
    # non-minimal scaled model
    a = [rng.randint(-1, 1), rng.randint(-1, 1), rng.randint(-1, 1),
         rng.randint(-20, 20), rng.randint(-40, 40)]
    u = rng.choice([2, 3, 5, 6])
    return [a[0] * u, a[1] * u**2, a[2] * u**3, a[3] * u**4, a[4] * u**6]


seen = set()
out = []
while len(out) < 400:
    a = sample()
    if tuple(a) in seen:
        continue
    E = pari.ellinit(a)
    if len(E) == 0 or E.disc() == 0:
        continue
    seen.add(tuple(a))
    gr = pari.ellglobalred(E)
    N = int(gr[0])
    fact = pari.factor(pari.abs(pari.ellminimalmodel(E).disc()))
    locs = []
    for i in range(len(fact[0])):
        p = int(fact[0][i])
        lr = pari.elllocalred(E, p)
        locs.append(f"{p}:{int(lr[0])}:{int(lr[1])}:{int(lr[3])}")
    tors = [int(t) for t in pari.elltors(E)[1]]
    t1, t2 = (1, 1)
    if len(tors) == 1:
        t2 = tors[0]
    elif len(tors) == 2:
        t1, t2 = tors[1], tors[0]
    out.append(f"{','.join(map(str, a))} | {N} | {' '.join(locs)} | {t1},{t2}")

sys.stdout.write("\n".join(out) + "\n")

"""Regenerates welch_mpmath.json: seeded sample pairs with Welch t, df and
two-sided p evaluated at 60 significant digits."""
import json
import random

import mpmath as mp

mp.mp.dps = 60
rng = random.Random(20240611)
cases = []
for _ in range(100):
    na, nb = rng.randint(2, 40), rng.randint(2, 40)
    sa, sb = rng.uniform(0.1, 5.0), rng.uniform(0.1, 5.0)
    shift = rng.uniform(-3.0, 3.0)
    a = [rng.gauss(0.0, sa) for _ in range(na)]
    b = [rng.gauss(shift, sb) for _ in range(nb)]
    A = [mp.mpf(x) for x in a]
    B = [mp.mpf(x) for x in b]
    ma, mb = mp.fsum(A) / na, mp.fsum(B) / nb
    va = mp.fsum((x - ma) ** 2 for x in A) / (na - 1)
    vb = mp.fsum((x - mb) ** 2 for x in B) / (nb - 1)
    qa, qb = va / na, vb / nb
    t = (ma - mb) / mp.sqrt(qa + qb)
    df = (qa + qb) ** 2 / (qa ** 2 / (na - 1) + qb ** 2 / (nb - 1))
    p = mp.betainc(df / 2, mp.mpf(1) / 2, 0, df / (df + t ** 2), regularized=True)
    cases.append({"a": a, "b": b, "t": float(t), "df": float(df), "p": float(p)})

with open("welch_mpmath.json", "w") as f:
    json.dump(cases, f, indent=1)
    f.write("\n")

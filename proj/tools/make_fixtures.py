#!/usr/bin/env python3
"""Generate q-expansion fixtures for the classical-operator suites.

Each fixture is a basis of S_k(Gamma0(N), chi) computed with PARI/GP's
modular forms package (through cypari2), embedded into C with the
embedding attached to the Conrey character, plus PARI's own dimension
data for the cusp space and its new subspace.

Usage: python3 tools/make_fixtures.py [--out fixtures] [--precision 500]
"""

import argparse
import json
import math
import os

import cypari2

pari = cypari2.Pari()
pari.set_real_precision(40)

# (level, weight, conrey) targets; lower levels and conjugate-at-p spaces
# are added automatically below.
TARGETS = [
    (33, 2, 1), (30, 2, 1),            # squarefree, trivial character
    (26, 3, 7), (39, 2, 4), (14, 4, 9),  # squarefree, imprimitive nontrivial
    (44, 2, 1), (20, 3, 13), (27, 3, 8), (45, 3, 28), (25, 3, 7),  # p^n M
    (18, 3, 5),                        # mixed: primitive at 9, trivial at 2
    (11, 2, 1),                        # all-new prime level
]


def char_values(N, j):
    """Exponent table u -> e with chi(u) = exp(2 pi i e / o), o = order."""
    G = pari(f"znstar({N},1)")
    chi = pari.znconreychar(G, j)
    o = int(pari.charorder(G, chi))
    vals = {}
    for u in range(N):
        if math.gcd(u, N) != 1:
            continue
        z = pari.chareval(G, chi, u)
        vals[u] = int(round(float(z) * o)) % o if o > 1 else 0
    return o, vals


def restrict_label(N, j, L):
    """Conrey label mod L of the character induced by chi_N(j) on units mod L,
    or None when chi does not factor through L."""
    o, vals = char_values(N, j)
    target = {}
    for u, e in vals.items():
        target.setdefault(u % L, set()).add(e)
    if any(len(s) > 1 for s in target.values()):
        return None
    target = {u: s.pop() for u, s in target.items()}
    for jl in range(1, L + 1):
        if math.gcd(jl, L) != 1:
            continue
        ol, vl = char_values(L, jl % L if L > 1 else 0)
        if all((vl[u] * o) % (ol * o) == (target[u] * ol) % (ol * o) for u in vl):
            return jl % L if L > 1 else 1
    return None


def flipped_label(N, j, p):
    """Conrey label of conj(chi^(p^n)) chi^(M)."""
    n = 0
    while N % p ** (n + 1) == 0:
        n += 1
    q = p ** n
    M = N // q
    # Conrey labels multiply componentwise under CRT, conjugation inverts.
    jq = pow(j % q, -1, q)
    jm = j % M if M > 1 else 0
    return int(pari(f"lift(chinese(Mod({jq},{q}), Mod({jm},{max(M,1)})))")) if M > 1 else jq


def fixture(N, k, j, B):
    spec = f"[{N},{k},Mod({j},{N})]"
    mf = pari(f"mfinit({spec},1)")
    basis = pari.mfbasis(mf)
    forms = []
    for f in basis:
        co = pari.mfcoefs(f, B)
        emb = pari.mfembed(mf, co)
        row = []
        for c in emb:
            row.append([float(pari.real(c)), float(pari.imag(c))])
        forms.append(row)
    o, vals = char_values(N, j) if N > 1 else (1, {0: 0})
    units = sorted(vals)
    return {
        "level": N,
        "weight": k,
        "character": {"modulus": N, "conrey": j},
        "precision": B,
        "basis": forms,
        "provenance": f"PARI/GP {'.'.join(map(str, pari.version()[:3]))} mfinit({spec},1); mfbasis; mfembed",
        "character_check": {"order": o, "exponents": [[u, vals[u]] for u in units]},
        "oracle": {
            "cusp_dim": int(pari(f"mfdim({spec},1)")),
            "new_dim": int(pari(f"mfdim({spec},0)")),
            "source": "PARI/GP mfdim",
        },
    }


def prime_factors(N):
    out, d = [], 2
    while d * d <= N:
        if N % d == 0:
            out.append(d)
            while N % d == 0:
                N //= d
        d += 1
    if N > 1:
        out.append(N)
    return out


def closure(targets):
    todo, seen = list(targets), set()
    while todo:
        N, k, j = todo.pop()
        if (N, k, j) in seen:
            continue
        seen.add((N, k, j))
        for p in prime_factors(N):
            L = N // p
            jl = restrict_label(N, j, L) if L > 1 else 1
            if jl is not None and L > 1:
                todo.append((L, k, jl))
            n = 0
            while N % p ** (n + 1) == 0:
                n += 1
            if n >= 2:
                todo.append((N, k, flipped_label(N, j, p)))
    return sorted(seen)


def dimension_table(max_level, weights):
    rows = []
    for N in range(1, max_level + 1):
        for k in weights:
            for j in range(1, N + 1):
                if math.gcd(j, N) != 1:
                    continue
                spec = f"[{N},{k},Mod({j},{N})]"
                rows.append([N, k, j % N if N > 1 else 1,
                             int(pari(f"mfdim({spec},1)")), int(pari(f"mfdim({spec},0)"))])
    return {"columns": ["level", "weight", "conrey", "cusp_dim", "new_dim"],
            "source": "PARI/GP mfdim", "rows": rows}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "fixtures"))
    ap.add_argument("--precision", type=int, default=500)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    for N, k, j in closure(TARGETS):
        fx = fixture(N, k, j, args.precision)
        name = f"S{k}_{N}_{j}.json"
        with open(os.path.join(args.out, name), "w") as fh:
            json.dump(fx, fh, separators=(",", ":"))
        print(name, "dim", len(fx["basis"]), "new", fx["oracle"]["new_dim"])
    with open(os.path.join(args.out, "dimension_table.json"), "w") as fh:
        json.dump(dimension_table(60, (2, 3, 4, 5)), fh, separators=(",", ":"))


if __name__ == "__main__":
    main()

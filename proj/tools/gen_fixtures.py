#!/usr/bin/env python3
"""Generate minimal-basis FCIDUMP fixtures for hydrogen systems.

All systems use s-type Gaussian basis functions only, so every integral has a
closed form (Boys F0). RHF is converged with DIIS, integrals are transformed
to the canonical MO basis and written in FCIDUMP convention (chemists'
notation, 1-based indices).

Usage: python3 tools/gen_fixtures.py [outdir]
"""

import math
import sys
from pathlib import Path

import numpy as np

ANG2BOHR = 1.8897259886

# STO-3G hydrogen 1s (zeta = 1.24)
STO3G_H = [
    (3.42525091, 0.15432897),
    (0.62391373, 0.53532814),
    (0.16885540, 0.44463454),
]


def boys_f0(t):
    if t < 1e-12:
        return 1.0 - t / 3.0
    st = math.sqrt(t)
    return 0.5 * math.sqrt(math.pi / t) * math.erf(st)


def s_norm(a):
    return (2.0 * a / math.pi) ** 0.75


class Shell:
    """Contracted s shell at a fixed center."""

    def __init__(self, center, prims):
        self.center = np.asarray(center, dtype=float)
        self.prims = [(a, c * s_norm(a)) for a, c in prims]
        # normalize the contraction
        s = 0.0
        for a, ca in self.prims:
            for b, cb in self.prims:
                s += ca * cb * (math.pi / (a + b)) ** 1.5
        scale = 1.0 / math.sqrt(s)
        self.prims = [(a, c * scale) for a, c in self.prims]


def overlap_kinetic(sh1, sh2):
    ab2 = float(np.dot(sh1.center - sh2.center, sh1.center - sh2.center))
    s = t = 0.0
    for a, ca in sh1.prims:
        for b, cb in sh2.prims:
            p = a + b
            mu = a * b / p
            e = math.exp(-mu * ab2)
            s00 = ca * cb * (math.pi / p) ** 1.5 * e
            s += s00
            t += s00 * mu * (3.0 - 2.0 * mu * ab2)
    return s, t


def nuclear(sh1, sh2, charges):
    ab2 = float(np.dot(sh1.center - sh2.center, sh1.center - sh2.center))
    v = 0.0
    for a, ca in sh1.prims:
        for b, cb in sh2.prims:
            p = a + b
            mu = a * b / p
            e = math.exp(-mu * ab2)
            pc = (a * sh1.center + b * sh2.center) / p
            for z, center in charges:
                r2 = float(np.dot(pc - center, pc - center))
                v -= ca * cb * z * 2.0 * math.pi / p * e * boys_f0(p * r2)
    return v


def eri(sh1, sh2, sh3, sh4):
    """(12|34) in chemists' notation."""
    ab2 = float(np.dot(sh1.center - sh2.center, sh1.center - sh2.center))
    cd2 = float(np.dot(sh3.center - sh4.center, sh3.center - sh4.center))
    val = 0.0
    for a, ca in sh1.prims:
        for b, cb in sh2.prims:
            p = a + b
            pp = (a * sh1.center + b * sh2.center) / p
            ep = math.exp(-a * b / p * ab2)
            for c, cc in sh3.prims:
                for d, cd in sh4.prims:
                    q = c + d
                    pq = (c * sh3.center + d * sh4.center) / q
                    eq = math.exp(-c * d / q * cd2)
                    r2 = float(np.dot(pp - pq, pp - pq))
                    pref = 2.0 * math.pi ** 2.5 / (p * q * math.sqrt(p + q))
                    val += ca * cb * cc * cd * pref * ep * eq * boys_f0(
                        p * q / (p + q) * r2)
    return val


def build_integrals(shells, charges):
    n = len(shells)
    s = np.zeros((n, n))
    t = np.zeros((n, n))
    v = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            s[i, j], t[i, j] = overlap_kinetic(shells[i], shells[j])
            v[i, j] = nuclear(shells[i], shells[j], charges)
    g = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(i + 1):
            for k in range(n):
                for l in range(k + 1):
                    if i * (i + 1) // 2 + j < k * (k + 1) // 2 + l:
                        continue
                    val = eri(shells[i], shells[j], shells[k], shells[l])
                    for (p, q) in ((i, j), (j, i)):
                        for (r, u) in ((k, l), (l, k)):
                            g[p, q, r, u] = val
                            g[r, u, p, q] = val
    e_nuc = 0.0
    for a in range(len(charges)):
        for b in range(a):
            za, ra = charges[a]
            zb, rb = charges[b]
            e_nuc += za * zb / float(np.linalg.norm(ra - rb))
    return s, t + v, g, e_nuc


def rhf_once(s, hcore, g, e_nuc, n_elec, dm0, damping, max_iter=500,
             tol=1e-12):
    nocc = n_elec // 2
    se, sv = np.linalg.eigh(s)
    x = sv @ np.diag(se ** -0.5) @ sv.T
    dm = dm0
    e_old, e, c = 0.0, 0.0, None
    converged = False
    for it in range(max_iter):
        j = np.einsum('pqrs,rs->pq', g, dm)
        k = np.einsum('prqs,rs->pq', g, dm)
        f = hcore + j - 0.5 * k
        e = 0.5 * np.sum(dm * (hcore + f)) + e_nuc
        fp = x.T @ f @ x
        eps, cp = np.linalg.eigh(fp)
        c = x @ cp
        cocc = c[:, :nocc]
        dm_new = 2.0 * cocc @ cocc.T
        dm = (1.0 - damping) * dm_new + damping * dm
        if abs(e - e_old) < tol and it > 4:
            converged = True
            break
        e_old = e
    # final canonical orbitals from the converged density
    j = np.einsum('pqrs,rs->pq', g, dm)
    k = np.einsum('prqs,rs->pq', g, dm)
    f = hcore + j - 0.5 * k
    fp = x.T @ f @ x
    eps, cp = np.linalg.eigh(fp)
    c = x @ cp
    return converged, e, eps, c


def rhf(s, hcore, g, e_nuc, n_elec):
    n = s.shape[0]
    best = None
    guesses = [np.zeros((n, n)), np.eye(n) * n_elec / n]
    for dm0 in guesses:
        for damping in (0.0, 0.3, 0.6, 0.8):
            conv, e, eps, c = rhf_once(s, hcore, g, e_nuc, n_elec, dm0,
                                       damping)
            if conv and (best is None or e < best[0] - 1e-10):
                best = (e, eps, c)
    if best is None:
        raise RuntimeError("SCF failed to converge for all settings")
    return best


def mo_transform(hcore, g, c):
    h_mo = c.T @ hcore @ c
    g1 = np.einsum('pqrs,pi->iqrs', g, c)
    g2 = np.einsum('iqrs,qj->ijrs', g1, c)
    g3 = np.einsum('ijrs,rk->ijks', g2, c)
    g4 = np.einsum('ijks,sl->ijkl', g3, c)
    return h_mo, g4


def write_fcidump(path, h, g, e_core, n_elec, ms2=0, thresh=1e-12):
    n = h.shape[0]
    with open(path, 'w') as fh:
        fh.write(f"&FCI NORB={n:4d},NELEC={n_elec:3d},MS2={ms2:2d},\n")
        fh.write(" ORBSYM=" + "1," * n + "\n ISYM=1,\n&END\n")

        def line(v, i, j, k, l):
            fh.write(f" {v: .15E} {i:4d} {j:4d} {k:4d} {l:4d}\n")

        for i in range(n):
            for j in range(i + 1):
                for k in range(i + 1):
                    lmax = j if k == i else k
                    for l in range(lmax + 1):
                        v = g[i, j, k, l]
                        if abs(v) > thresh:
                            line(v, i + 1, j + 1, k + 1, l + 1)
        for i in range(n):
            for j in range(i + 1):
                if abs(h[i, j]) > thresh:
                    line(h[i, j], i + 1, j + 1, 0, 0)
        line(e_core, 0, 0, 0, 0)


def hsystem(positions_ang, extra_centers_ang=()):
    charges = [(1.0, np.array(p, dtype=float) * ANG2BOHR)
               for p in positions_ang]
    shells = [Shell(c, STO3G_H) for _, c in charges]
    for pos, expo in extra_centers_ang:
        shells.append(Shell(np.array(pos, dtype=float) * ANG2BOHR,
                            [(expo, 1.0)]))
    return shells, charges


def make(path, positions, n_elec, extra=()):
    shells, charges = hsystem(positions, extra)
    s, hcore, g, e_nuc = build_integrals(shells, charges)
    e_hf, eps, c = rhf(s, hcore, g, e_nuc, n_elec)
    h_mo, g_mo = mo_transform(hcore, g, c)
    write_fcidump(path, h_mo, g_mo, e_nuc, n_elec)
    print(f"{path}: n_orb={len(shells)} n_elec={n_elec} E_HF={e_hf:.10f}")


def main():
    outdir = Path(sys.argv[1] if len(sys.argv) > 1 else 'data')
    outdir.mkdir(parents=True, exist_ok=True)

    make(outdir / 'h2_sto3g_0.74.fcidump',
         [[0, 0, 0], [0, 0, 0.74]], 2)

    # H2 plus one uncontracted s function at the bond midpoint: the smallest
    # fixture with an orbital outside a 2-orbital active space.
    make(outdir / 'h2_midbond_sto3g_0.74.fcidump',
         [[0, 0, 0], [0, 0, 0.74]], 2,
         extra=[([0, 0, 0.37], 0.4)])

    for r in (0.80, 1.00, 1.25, 1.60, 2.00):
        make(outdir / f'h4_chain_sto3g_{r:.2f}.fcidump',
             [[0, 0, i * r] for i in range(4)], 4)

    for r in (1.00, 1.50, 2.00):
        make(outdir / f'h6_chain_sto3g_{r:.2f}.fcidump',
             [[0, 0, i * r] for i in range(6)], 6)


if __name__ == '__main__':
    main()

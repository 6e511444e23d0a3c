#!/usr/bin/env python3
"""Compare the pure-Python and compiled interval kernels.

Three tiers, slowest-moving parts first:

  * micro: single interval operations in a tight Python loop (per-call
    overhead included, which is most of the compiled kernel's cost here)
  * program: eval_nodes / eval_root / hc4_revise over compiled constraint
    programs from the bundled corpus, the solver's actual hot path
  * end-to-end: `prove` runs in subprocesses with DPROOF_KERNEL forced,
    checking that both backends emit byte-identical proofs

Every workload also cross-checks that the two backends agree bit for bit
on the data it times.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import random
import subprocess
import sys
import tempfile
import time
from array import array
from importlib.resources import files
from pathlib import Path

from dproof import _ikernel_py as PY

try:
    from dproof import _ikernel_c as C
except ImportError:
    C = None

from dproof.parser import parse_system
from dproof.terms import System


def _best_of(fn, repeats: int = 3) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _fmt_row(name: str, pure_s: float, c_s: float | None, calls: int) -> str:
    per_pure = pure_s / calls * 1e9
    if c_s is None:
        return f"  {name:<14} {per_pure:>10.0f} ns          (no compiled kernel)"
    per_c = c_s / calls * 1e9
    return f"  {name:<14} {per_pure:>10.0f} ns {per_c:>10.0f} ns {pure_s / c_s:>7.2f}x"


# ---------------------------------------------------------------------------
# micro tier

def _operands(rng: random.Random, n: int, lo: float, hi: float) -> list[tuple[float, float]]:
    out = []
    for _ in range(n):
        a = rng.uniform(lo, hi)
        b = rng.uniform(lo, hi)
        if b < a:
            a, b = b, a
        out.append((a, b))
    return out


def bench_micro(calls: int, rng: random.Random) -> None:
    wide = _operands(rng, 256, -50.0, 50.0)
    pos = _operands(rng, 256, 1e-3, 50.0)
    unit = _operands(rng, 256, -0.999, 0.999)
    cases = [
        ("iadd", "iadd", wide, wide),
        ("imul", "imul", wide, wide),
        ("idiv", "idiv", wide, pos),
        ("isqr", "isqr", wide, None),
        ("ipowi^5", "ipowi", wide, 5),
        ("isqrt", "isqrt", pos, None),
        ("iexp", "iexp", unit, None),
        ("ilog", "ilog", pos, None),
        ("isin", "isin", wide, None),
        ("iatan2", "iatan2", wide, pos),
        ("iasin", "iasin", unit, None),
        ("imin", "imin", wide, wide),
        ("iabs", "iabs", wide, None),
    ]
    print("micro (one interval op per call):")
    print(f"  {'op':<14} {'pure':>13} {'compiled':>13} {'speedup':>7}")
    for name, attr, xs, ys in cases:
        fp = getattr(PY, attr)
        fc = getattr(C, attr) if C is not None else None
        m = len(xs)

        def run(f=fp, xs=xs, ys=ys, m=m):
            if ys is None:
                for i in range(calls):
                    a, b = xs[i % m]
                    f(a, b)
            elif isinstance(ys, int):
                for i in range(calls):
                    a, b = xs[i % m]
                    f(a, b, ys)
            else:
                for i in range(calls):
                    a, b = xs[i % m]
                    c, d = ys[i % m]
                    f(a, b, c, d)

        # agreement first, then the clock
        if fc is not None:
            for i in range(m):
                a, b = xs[i]
                if ys is None:
                    assert fp(a, b) == fc(a, b), name
                elif isinstance(ys, int):
                    assert fp(a, b, ys) == fc(a, b, ys), name
                else:
                    c, d = ys[i]
                    assert fp(a, b, c, d) == fc(a, b, c, d), name
        tp = _best_of(run)
        tc = _best_of(lambda: run(f=fc)) if fc is not None else None
        print(_fmt_row(name, tp, tc, calls))
    print()


# ---------------------------------------------------------------------------
# program tier

def _instance_dir() -> Path:
    return Path(str(files("dproof").joinpath("instances")))


def _sub_boxes(system: System, count: int, rng: random.Random) -> list[tuple[array, array]]:
    out = []
    for _ in range(count):
        blo = array("d")
        bhi = array("d")
        for iv in system.box.ivs:
            w = iv.hi - iv.lo
            c = rng.uniform(iv.lo, iv.hi)
            h = rng.uniform(0.0, w / 2)
            blo.append(max(iv.lo, c - h))
            bhi.append(min(iv.hi, c + h))
        out.append((blo, bhi))
    return out


def bench_programs(boxes: int, rng: random.Random) -> None:
    names = ["dihedral-angle", "sphere-plane", "abs-triangle", "law-of-cosines"]
    print(f"program (all atoms of an instance, {boxes} random sub-boxes):")
    print(f"  {'instance':<14} {'pure':>13} {'compiled':>13} {'speedup':>7}")
    for name in names:
        system = parse_system((_instance_dir() / f"{name}.smt2").read_text())
        compiled = system.compile()
        bxs = _sub_boxes(system, boxes, rng)
        nv = len(system.var_names)
        out_lo = array("d", [0.0] * nv)
        out_hi = array("d", [0.0] * nv)

        def run(mod, compiled=compiled, bxs=bxs, out_lo=out_lo, out_hi=out_hi):
            for blo, bhi in bxs:
                for ca in compiled:
                    p = ca.prog
                    mod.eval_root(p.ops, p.aa, p.bb, p.clo, p.chi, blo, bhi)
                    if ca.target is not None:
                        mod.hc4_revise(
                            p.ops, p.aa, p.bb, p.clo, p.chi,
                            ca.target[0], ca.target[1], blo, bhi, out_lo, out_hi,
                        )

        if C is not None:
            for blo, bhi in bxs[:50]:
                for ca in compiled:
                    p = ca.prog
                    rp = PY.eval_root(p.ops, p.aa, p.bb, p.clo, p.chi, blo, bhi)
                    rc = C.eval_root(p.ops, p.aa, p.bb, p.clo, p.chi, blo, bhi)
                    assert rp == rc, name
        tp = _best_of(lambda: run(PY))
        tc = _best_of(lambda: run(C)) if C is not None else None
        calls = boxes * len(compiled)
        print(_fmt_row(name, tp, tc, calls))
    print()


# ---------------------------------------------------------------------------
# end-to-end tier

def bench_end_to_end() -> None:
    names = ["abs-triangle", "sphere-plane", "dihedral-angle", "quadratic-mean"]
    print("end-to-end (subprocess `prove`, wall seconds):")
    print(f"  {'instance':<14} {'pure':>13} {'compiled':>13} {'speedup':>7}")
    for name in names:
        path = _instance_dir() / f"{name}.smt2"
        digests = {}
        times = {}
        for backend in ("pure", "c"):
            if backend == "c" and C is None:
                continue
            env = dict(os.environ, DPROOF_KERNEL=backend)
            with tempfile.TemporaryDirectory() as td:
                out = Path(td) / "proof.dproof"
                t0 = time.perf_counter()
                r = subprocess.run(
                    [sys.executable, "-m", "dproof.cli", "prove", str(path),
                     "--delta", "1e-3", "-o", str(out)],
                    env=env, capture_output=True, text=True,
                )
                times[backend] = time.perf_counter() - t0
                if r.returncode != 0:
                    raise SystemExit(f"{name} [{backend}]: prove failed:\n{r.stderr}")
                digests[backend] = hashlib.sha256(out.read_bytes()).hexdigest()
        if C is not None and digests["pure"] != digests["c"]:
            raise SystemExit(f"{name}: backends produced different proofs")
        tp = times["pure"]
        tc = times.get("c")
        if tc is None:
            print(f"  {name:<14} {tp:>12.3f}s          (no compiled kernel)")
        else:
            print(f"  {name:<14} {tp:>12.3f}s {tc:>12.3f}s {tp / tc:>7.2f}x")
    if C is not None:
        print("  proof files byte-identical across backends")
    print()


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--calls", type=int, default=200_000,
                    help="micro tier calls per op (default 200000)")
    ap.add_argument("--boxes", type=int, default=2_000,
                    help="program tier sub-boxes per instance (default 2000)")
    ap.add_argument("--skip-e2e", action="store_true",
                    help="skip the subprocess tier")
    ap.add_argument("--seed", type=int, default=20260819)
    args = ap.parse_args()

    print(f"pure backend:     {PY.BACKEND}")
    print(f"compiled backend: {C.BACKEND if C is not None else 'not built'}")
    print()
    rng = random.Random(args.seed)
    bench_micro(args.calls, rng)
    bench_programs(args.boxes, rng)
    if not args.skip_e2e:
        bench_end_to_end()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

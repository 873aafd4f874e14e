"""Regenerate the shipped Fourier spin-model cells with 30 significant digits.

usage: python scripts/make_cell_corpus.py [outdir]
"""

import json
import sys
from pathlib import Path

import mpmath

mpmath.mp.dps = 40
DIGITS = 30


def entry(z):
    re, im = mpmath.re(z), mpmath.im(z)
    if abs(im) < mpmath.mpf(10) ** -35:
        im = 0
    if abs(re) < mpmath.mpf(10) ** -35:
        re = 0
    if im == 0 and re == int(re):
        return int(re)
    return [mpmath.nstr(re, DIGITS, min_fixed=-5, max_fixed=5), mpmath.nstr(im, DIGITS, min_fixed=-5, max_fixed=5)]


def fourier_cell(n: int, name: str) -> dict:
    w = mpmath.exp(2j * mpmath.pi / n)
    eye = [[1 if a == b else 0 for b in range(n)] for a in range(n)]
    diag = [[[1 if a == b == k else 0 for b in range(n)] for a in range(n)] for k in range(n)]
    # u e_kk u* for the unitary DFT u_{ab} = w^{ab}/sqrt(n): entries w^{(a-b)k}/n
    rotated = [[[entry(w ** ((a - b) * k) / n) for b in range(n)] for a in range(n)] for k in range(n)]
    return {
        "name": name,
        "ambient": {"block_sizes": [n], "trace_weights": [f"1/{n}"]},
        "subalgebras": {"P00": [eye], "P01": diag, "P10": rotated},
        "lambda_inv": n,
    }


def main() -> None:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parents[1] / "src/subspec/data/cells"
    out.mkdir(parents=True, exist_ok=True)
    for n, name in ((2, "spin2"), (3, "fourier3")):
        (out / f"{name}.json").write_text(json.dumps(fourier_cell(n, name)) + "\n")
        print(out / f"{name}.json")


if __name__ == "__main__":
    main()

"""Spectral test and diaphony along two classical sequences.

Halton points are measured with Walsh (base 2) and b-adic (base 3)
functions.  These match how the sequence is built, so the spectral test
falls like 1/N.  Kronecker points use the trigonometric system.  The CSV
from the command-line sweep is the hand-off for plotting.
"""

import subprocess
import sys

from equilens import Halton, HybridSystemConfig, Kronecker, diaphony, spectral_test
from equilens.weights import hybrid_weight, r_weight

Ns = [2**j for j in range(3, 11)]
cases = [
    ("halton(2,3)", Halton([2, 3]), HybridSystemConfig.from_tags("w2,g3")),
    ("kron(sqrt2-1, sqrt3-1)", Kronecker(["sqrt2-1", "sqrt3-1"]), HybridSystemConfig.trigonometric(2)),
]

for label, seq, system in cases:
    weight = hybrid_weight(system) if label.startswith("halton") else r_weight(2)
    print(f"{label}, {system.describe()}")
    print(f"{'N':>6}{'spectral':>12}{'N*spectral':>12}{'diaphony':>12}")
    for N in Ns:
        s = spectral_test(seq, N, system, weight).value
        f = diaphony(seq, N, system, weight).value
        print(f"{N:>6}{s:>12.6f}{N * s:>12.4f}{f:>12.6f}")
    print()

cmd = [sys.executable, "-m", "equilens", "analyze", "--seq", "halton:2,3", "--measure", "spectral",
       "--system", "w2,g3", "--sweep", "16,64,256", "--format", "csv"]
print("$ equilens " + " ".join(cmd[3:]))
print(subprocess.run(cmd, capture_output=True, text=True, check=True).stdout)

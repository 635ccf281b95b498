"""
The elementary operations as Kraus maps
=======================================

Every PF operation is a small Kraus set. This script prints each set and
checks completeness, then shows the colour duality under Hadamard.
"""

import numpy as np

from pfc.pf import OPS
from pfc.semantics import kraus, kraus_set
from pfc.semantics.kraus import HADAMARD

np.set_printoptions(precision=3, suppress=True)

# heralded operations carry two operators, one per outcome bit
for op in OPS:
    ops = kraus_set(op, alpha=np.pi / 4)
    total = sum(k.conj().T @ k for _, k in ops)
    print(f"{op:7s} outcomes={[s for s, _ in ops]!s:9s} sum K^dag K = I: {np.allclose(total, np.eye(total.shape[0]))}")

# a merge in the X basis is the Z-basis merge conjugated by Hadamards
h = HADAMARD
for s in (0, 1):
    print(f"K_H,{s} == H K_V,{s} (H x H):", np.allclose(kraus("K_H", s), h @ kraus("K_V", s) @ np.kron(h, h)))

# splits are isometries
print("split isometry:", np.allclose(kraus("K_V", 0) @ kraus("K_V", 0).conj().T, np.eye(2)))

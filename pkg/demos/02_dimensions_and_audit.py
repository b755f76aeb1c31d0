#!/usr/bin/env python3
"""Shattering dimensions and the end-to-end density audit.

The DS dimension looks for a subfamily in which every member has at least
ell neighbors per direction (found by peeling, like a k-core); the Natarajan
dimension looks for an embedded product of (ell+1)-sized label lists.  The
audit ties everything together: the ceiling of the maximum density never
exceeds the DS dimension, the Natarajan dimension never exceeds the DS
dimension, the min-max orientation value matches the density ceiling, and
the bounded-support monomials span at s = d_DS.
"""

import json

from dslab import (audit_theorem, ds_dimension, ds_shatter_core, gen_cube,
                   gen_random, natarajan_dimension, vc_dimension)
from dslab.dims import witness_to_json

H = gen_cube(4, 2, 2, 3)  # [4]^2 x [2]
d_ds, witness = ds_dimension(H, 2)
d_nat, _ = natarajan_dimension(H, 2)
print("class size:", len(H))
print("2-DS dimension:", d_ds, "witnessed on coordinates", witness.coords)
print("2-Natarajan dimension:", d_nat)
print("witness json:", witness_to_json(witness)[:80], "...")

# Peeling in action: remove one vertex from the square and the core dies.
from dslab.hclass import HypothesisClass

square = gen_cube(2, 1, 2, 2)
print("core of the full square:", ds_shatter_core(square, 1).hyps)
dented = HypothesisClass(k=2, n=2, hyps=square.hyps[:3])
print("core after removing a vertex:", ds_shatter_core(dented, 1))

# For binary classes the 1-DS dimension is the VC dimension.
B = gen_random(2, 3, 5, seed=4)
print("binary class: vc =", vc_dimension(B), " d_DS =", ds_dimension(B, 1)[0])

# A full audit of one class, as the CLI's `audit` subcommand would report it.
report = audit_theorem(gen_cube(4, 1, 2, 3), ell=1)
print(json.dumps(report.to_dict(), indent=2, sort_keys=True))

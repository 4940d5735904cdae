"""
Precomputed lattices
====================

Tables of ``p(y, n, i)`` save recomputation when the same grid is queried
often. The file carries its grid in the header and a checksum at the end.
"""

import os
import tempfile

from qsp import LatticeSpec, build_lattice, load, query, save

spec = LatticeSpec(y_start=0.3, y_step=0.05, y_count=9, n_max=60, i_cap=31)
table = build_lattice(spec)
print(f"{spec.cells} cells, shape {spec.shape}")

with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "grid.qspl")
    save(table, path)
    print(f"file size {os.path.getsize(path)} bytes")
    again = load(path)

print("reloaded table identical:", again == table)

# %%
# Queries must hit grid points; misses report the nearest cell.

print("p(0.45, 51, 5) =", query(again, 0.45, 51, 5))
try:
    query(again, 0.47, 51, 5)
except KeyError as exc:
    print("off grid:", exc.nearest)

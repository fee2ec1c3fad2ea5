"""Build the excitation-sector bases and complementary-pair codes, and show
how the four-point affine plane indexes the smallest code's words."""

from math import comb

import numpy as np

from jumpcodes import (
    affine_plane_4,
    codeword_ket,
    dfs_basis,
    jump_code,
    logical_qubits,
    parallelism_to_code,
)

print("=== excitation sectors (passive protection) ===")
basis = dfs_basis(4, 2)
print(f"DFS-(4,2) basis ({basis.dimension} states): {', '.join(basis.basis)}")
for n, k in [(4, 2), (6, 3), (8, 4)]:
    print(f"DFS-({n},{k}) dimension = C({n},{k}) = {dfs_basis(n, k).dimension}")

print("\n=== one-error-correcting jump codes ===")
for n in (2, 4, 6, 8, 10, 12):
    code = jump_code(n)
    print(
        f"N={n:2d}: {code.count:4d} code words from C({n - 1},{n // 2 - 1}) = "
        f"{comb(n - 1, n // 2 - 1):4d} pairs, "
        f"L_q = {logical_qubits(n):6.3f}, redundancy r = {code.redundancy}"
    )

code = jump_code(4, 0.0)
print("\nThe qutrit code words (phase 0):")
for i, (s, sbar) in enumerate(code.pairs):
    print(f"  |c_{i}> = (|{s}> + |{sbar}>)/sqrt(2)")
v = codeword_ket(code, 0).amplitudes
print(f"amplitudes of |c_0>: nonzero at indices {np.nonzero(v)[0].tolist()}")

print("\n=== the affine plane of four points ===")
plane = affine_plane_4()
print(f"points: {plane.points}")
print(f"lines:  {plane.lines}")
for g, h in plane.parallel_classes:
    print(f"  parallel class {g} || {h}")
rebuilt = parallelism_to_code(plane)
print(f"parallel classes -> code pairs: {rebuilt.pairs}")
print(f"matches jump_code(4): {set(rebuilt.pairs) == set(code.pairs)}")

"""Centralized numerical tolerances.

Every comparison threshold used by the library lives here so that state
validation, density-operator checks and the acceptance suite all agree on
what "equal" means.
"""

from __future__ import annotations

# State vectors and density operators
NORM_ATOL = 1e-10          # unit-norm checks on normalized states
TRACE_ATOL = 1e-10         # trace-one checks on density operators
HERMITICITY_ATOL = 1e-10   # max |rho - rho^dagger| element
EIGENVALUE_FLOOR = -1e-10  # smallest admissible eigenvalue of a density operator
ZERO_NORM = 1e-12          # below this a vector cannot be normalized
DEGENERACY_FLOOR = 1e-12   # branch probabilities below this are degenerate

# Spec-level algebraic identities (unitarity of t/r pairs, amplitude norms)
UNITARITY_ATOL = 1e-10

# Wavepackets
PACKET_NORM_ATOL = 1e-8    # discrete norm of a wavepacket
GRID_SIGMA_SPAN = 8.0      # gaussian() needs at least this many sigmas each side
EDGE_LEAK_ATOL = 1e-9      # edge-amplitude bound asserted for freshly built packets

# Interferometer
PROBABILITY_ATOL = 1e-10   # p in [0, 1] and p3 + p4 = 1 checks
DENSE_ENTRY_CAP = 1_000_000  # refuse to materialize composite states above this

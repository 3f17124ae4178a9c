"""Dissipative squeezing of photon fields by a driven, lossy qubit.

All frequencies, rates and couplings are angular frequencies quoted in GHz
(time unit = 1 ns); factors of 2*pi are absorbed into the quoted numbers.
"""

__version__ = "0.1.0"

""" Constants """

import math

# packing slack of the plain event and of the refined event
BETA_T = 1 / 32
BETA_TPLUS = 1 / 64

# tilt exponent of the constant-deviation pipeline is 1 / (GAMMA_CONST_DIV * r)
GAMMA_CONST_DIV = 16
# default tilt exponent of the general pipeline, 1 / (GAMMA_EPS_DIV * r)
GAMMA_EPS_DIV = 9

# degree cap factor floor, A >= e^4
A_FLOOR = math.exp(4)

# validity gate of the packing tail bound: (e^3 np / D)^D <= n^-GATE_POWER
GATE_POWER = 8

# enumeration budgets
MAX_ENUM_PAIRS = 24
MAX_PACKING_ENUM_PAIRS = 15
MAX_SEARCH_EDGES = 20
MAX_FAMILY_GROUND = 20
MAX_FAMILY_SETS = 12
MAX_IID_SUPPORT = 10 ** 7

# enumeration block size (bitmasks per block)
ENUM_BLOCK_BITS = 16

# masks on a 64 bit seed
SEED_MASK = (1 << 64) - 1

# rational mode recognizes p = a / b for b up to this denominator
EXACT_MAX_DENOMINATOR = 1000

# numeric tolerances
MASS_TOLERANCE = 1e-12

# significant digits of printed reals
FLOAT_DIGITS = 17

ENV_OUTPUT_DIR = "STARTAIL_OUTPUT_DIR"

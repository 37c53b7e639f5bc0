"""Named numeric constants."""

import math

#: 1/e as used everywhere a parameter is compared with the parabolic value.
ONE_OVER_E = math.exp(-1.0)

#: Diameter of the rectangle P = (1/2, 3/2) x (0, 1/2).
DIAM_P = math.sqrt(5.0) / 2.0

#: Two-sided 95% normal quantile used by Wilson intervals.
Z95 = 1.959963984540054

"""Built-in demo data: a Bennett motion and a four-pose 6R design task.

Both sets are classical examples from the mechanism-synthesis literature and
double as regression fixtures for the test suite.  Coefficients are integers
so they can be used in exact mode.
"""
from fractions import Fraction

#: Degree-2 motion of a general Bennett linkage.  Index = power of t, each row
#: an 8-tuple of Study coordinates.
BENNETT_CURVE_COEFFS = (
    (0, 22134, -42966, -115878, 0, -7812, 6510, -3906),
    (0, 39870, 9927, -73843, 0, -14586, -1473, -1881),
    (0, 4440, 16428, -37296, 0, -1332, -2664, -1332),
)

#: Four poses (identity first) admitting a cubic interpolant and a 6R loop.
SIX_R_POSES = (
    (1, 0, 0, 0, 0, 0, 0, 0),
    (0, 0, 0, 1, 1, 0, 1, 0),
    (1, 2, 0, 0, -2, 1, 0, 0),
    (3, 0, 1, 0, 1, 0, -3, 0),
)

#: The cubic motion through SIX_R_POSES (dyadic rational coefficients),
#: same layout as BENNETT_CURVE_COEFFS.
SIX_R_CURVE_COEFFS = (
    (0, Fraction(-5, 64), Fraction(-5, 128), Fraction(-5, 128), 0, Fraction(-5, 128), Fraction(5, 64), 0),
    (Fraction(-11, 64), Fraction(-1, 4), Fraction(-5, 64), Fraction(7, 64), Fraction(9, 32), Fraction(-1, 8), Fraction(11, 32), 0),
    (Fraction(-7, 16), Fraction(1, 4), Fraction(5, 16), Fraction(-1, 16), 0, Fraction(1, 8), -1, 0),
    (1, 0, 0, 0, 0, 0, 0, 0),
)

#: Manually designed connection points for the Bennett demo at scale 200
#: (millimetres): per link i, the attachment parameter on axis i and on
#: axis i+1, measured from the walked DH frame origins.
BENNETT_DESIGN_CP_MM = (
    (2.085621, 17.491631),
    (-3.508369, -0.650840),
    (-21.650840, 39.381058),
    (60.381058, -83.494598),
)

#: The d_0 the same design tables report for the base frame placement (mm,
#: scale 200).
BENNETT_DESIGN_D0_MM = 64.580219

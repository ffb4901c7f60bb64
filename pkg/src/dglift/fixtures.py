"""Small named instances shared by the tests and the demos."""

K1 = """\
field Q
algebra A
algebra B extends A
  gen x deg 2 d 0
module N over B
  basis e0 deg 0
  basis e1 deg 3
  d e1 = e0*x
"""

# e1 sits in degree 4 so that e0*x*y (degree 3) is a valid differential.
K2 = """\
field Q
algebra A
  gen y deg 1 d 0
algebra B extends A
  gen x deg 2 d y
module N over B
  basis e0 deg 0
  basis e1 deg 4
  d e1 = e0*x*y
"""

BASE_CHANGE = """\
field Q
algebra A
  gen y deg 1 d 0
algebra B extends A
  gen x deg 2 d y
module N over B
  basis e0 deg 0
  basis e1 deg 2
  d e1 = e0*y
"""

X1X2 = """\
field Q
algebra A
algebra B extends A
  gen x1 deg 1 d 0
  gen x2 deg 2 d x1
module N over B
  basis e0 deg 0
  basis e1 deg 2
  d e1 = e0*x1
"""

FREE = """\
field Q
algebra A
algebra B extends A
  gen x deg 2 d 0
  gen z deg 3 d 0
module N over B
  basis e0 deg 0
  basis e1 deg 1
  basis e2 deg 3
"""

FIXTURES = {"K1": K1, "K2": K2, "base-change": BASE_CHANGE, "x1x2": X1X2, "free": FREE}

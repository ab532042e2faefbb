"""
Moving data between a worksheet and the workspace
==================================================

A two-column table of 1000 observations, the calls that ship it to the
workspace, a few commands evaluated there, and results written back to
the grid with matlabsub.
"""

import numpy as np

from hybridlink.bridge import matlabinit
from hybridlink.workbook import Workbook

rng = np.random.default_rng(1)
wb = Workbook()
wb["A3"], wb["B3"] = "X", "Y"
wb.write_matrix("A4", rng.integers(0, 6, size=(1000, 2)).astype(float))

# a named range stands in for the block of data rows
wb.define_name("DATA", "A4:B1003")
session = matlabinit(workbook=wb)

print(session.ml_put_matrix("data", "DATA"))
print(session.ml_eval_string("x=data(:,1)"))
print(session.ml_eval_string("m=mean(x)"))
print("m =", session.ml_get_var("m"))

# results land in the sheet starting at the given cell
session.matlabsub("mean", "E6", "A4:A1003")
session.matlabsub("cov", "J8", "A4:B1003")
print("E6 =", wb["E6"])
print("J8:K9 =\n", wb.read_range("J8:K9"))

# var of the second column is the lower-right entry of the covariance
session.ml_eval_string("y=data(:,2); v=var(y)")
print("var(Y) =", session.ml_get_var("v")[0, 0], " cov(2,2) =", wb["K9"])

# failures come back as status codes and leave everything untouched
print(session.ml_eval_string("z = nosuch(x)"))
session.ml_show_matlab_errors(True)
print(session.ml_eval_string("z = nosuch(x)"))
print(session.ml_get_matrix("x", "A0"))

for rec in session.audit.records:
    print(rec.seq, rec.op, rec.status, rec.args)

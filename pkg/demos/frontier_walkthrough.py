"""
Efficient frontier for three mutual funds
=========================================

Six years of annual returns for a global fund, a corporate bond fund and a
small-cap fund sit in a small worksheet. We push them across the link,
estimate expected returns and covariance, trace 20 frontier portfolios
and pull the table back into the sheet.
"""

import tempfile
from pathlib import Path

import numpy as np

from hybridlink import data
from hybridlink.bridge import matlabinit
from hybridlink.cli import read_script
from hybridlink.plot import emit_frontier_plot
from hybridlink.workbook import load_csv

wb = load_csv(data.figure6_workbook())
print(wb.read_range("B3:D3"))
print(wb.read_range("B4:D9"))

# the bundled script is the same sequence of link calls a sheet would hold
session = matlabinit(workbook=wb)
for line in read_script(data.figure6_script()):
    status = session.execute(line.text)
    print(f"{status.code} <== {line.text}")

# expected returns are plain column means; covariance divides by n
print("ret =", session.ml_get_var("ret"))
print("cov =\n", session.ml_get_var("cov"))

# the frontier block now lives in F4:J23
np.set_printoptions(precision=4, suppress=True)
table = wb.read_range("F4:J23")
print("   risk     ror   global  bonds  smallcap")
print(table)

# lowest-risk portfolio is almost all bonds, the top end is all small cap
print("min-risk weights:", table[0, 2:])
print("max-return weights:", table[-1, 2:])

out = Path(tempfile.mkdtemp()) / "frontier"
csv_path, svg_path = emit_frontier_plot(session.plot, out)
print("wrote", csv_path, "and", svg_path)

"""
Checking a run after the fact
=============================

Every link call leaves a hash-chained record. The log can be exported,
checked for tampering and replayed against the input workbook.
"""

import json
import tempfile
from dataclasses import replace
from pathlib import Path

from hybridlink import data
from hybridlink.audit import export_jsonl, import_jsonl, replay, verify_chain
from hybridlink.bridge import LinkConfig
from hybridlink.cli import read_script, run_script
from hybridlink.workbook import load_csv

result = run_script(read_script(data.figure6_script()), load_csv(data.figure6_workbook()),
                    LinkConfig(session_id="demo"))
records = result.session.audit.records
for rec in records:
    print(f"{rec.seq:2d} {rec.op:16s} status={rec.status} {rec.value_digest[:12]} {rec.this_hash[:12]}")

path = Path(tempfile.mkdtemp()) / "audit.jsonl"
export_jsonl(records, path)
print(path.read_text().splitlines()[0])

loaded = import_jsonl(path)
print("chain intact:", verify_chain(loaded) is None)

# edit one argument and the chain breaks at that record
forged = list(loaded)
forged[2] = replace(forged[2], args=json.dumps(["retseries", "B4:D8"]))
print("first bad record:", verify_chain(forged))

# replay against the original fixture, then against an edited one
print(replay(loaded, load_csv(data.figure6_workbook())))
wb = load_csv(data.figure6_workbook())
wb["D7"] = 0.20
print(replay(loaded, wb))

# %% [markdown]
# # The command line on files
#
# Writes the running example as PNML and a small XES log into a temporary
# directory, then runs the `dpnalign` entry point on them.

# %%
import subprocess
import sys
import tempfile
from pathlib import Path

from dpnalign import EventLog
from dpnalign.pnml import write_pnml
from dpnalign.samples import clustering_traces, running_example
from dpnalign.xes import write_xes

work = Path(tempfile.mkdtemp(prefix="dpnalign-"))
(work / "net.pnml").write_text(write_pnml(running_example()))
(work / "log.xes").write_text(write_xes(EventLog(clustering_traces() * 3)))

# %% the net has two silent transitions, hence --relaxed-labels
cmd = [sys.executable, "-m", "dpnalign", "--model", str(work / "net.pnml"), "--log", str(work / "log.xes"),
       "--relaxed-labels", "--format", "json"]
done = subprocess.run(cmd, capture_output=True, text=True)
print("exit", done.returncode)
print(done.stdout)
print(done.stderr)

"""Linear decay of region-localized data, then the same study through the CLI."""
import json
import tempfile
from pathlib import Path

from bdsim.cli import main
from bdsim.experiments import run_decay
from bdsim.solver import InitialDataSpec, SolverConfig

out = Path(tempfile.mkdtemp(prefix="bdsim_demo_"))
config = SolverConfig(n=64, t_end=50.0)
for region in ("D1", "D2", "D3"):
    res = run_decay(config, InitialDataSpec(region=region, band=(1, 20)), out / region, samples=51)
    print(region, ", ".join(f"{k} = {v:.4g}" for k, v in res.summary.items() if k != "region"))

cfg = out / "decay.cfg"
cfg.write_text("n = 64\nt_end = 100\nregion = D1\nband_hi = 20\n")
code = main(["decay", "--config", str(cfg), "--out-dir", str(out / "cli")])
manifest = json.loads((out / "cli" / "manifest.json").read_text())
print("exit code", code, "outputs", manifest["outputs"], "in", out / "cli")

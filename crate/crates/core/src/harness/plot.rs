use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Percolation,
    Beta,
    Trace,
    Interdependent,
    Buffering,
}

impl PlotKind {
    pub const NAMES: [&'static str; 5] = ["percolation", "beta", "trace", "interdependent", "buffering"];

    fn required(self) -> &'static [&'static str] {
        match self {
            PlotKind::Percolation => &["f", "S_mean", "S_std"],
            PlotKind::Beta => &["beta", "f", "S_mean"],
            PlotKind::Trace => &["round", "survivor_fraction"],
            PlotKind::Interdependent => &["p", "mutual_survivor_mean"],
            PlotKind::Buffering => &["versatility", "capacity", "restored_mean"],
        }
    }

    fn body(self) -> &'static str {
        match self {
            PlotKind::Percolation => {
                r#"f = col("f"); s = col("S_mean"); e = col("S_std")
ax.errorbar(f, s, yerr=e, marker="o", ms=3, capsize=2)
ax.set_xlabel("fraction of removed nodes f"); ax.set_ylabel("G'/G")"#
            }
            PlotKind::Beta => {
                r#"betas = sorted(set(col("beta")))
for b in betas:
    pts = [(float(r["f"]), float(r["S_mean"])) for r in rows if float(r["beta"]) == b]
    ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", ms=3, label=f"beta = {b:g}")
ax.legend(); ax.set_xlabel("fraction of removed nodes f"); ax.set_ylabel("G'/G")"#
            }
            PlotKind::Trace => {
                r#"groups = {}
for r in rows:
    key = tuple((k, r[k]) for k in ("beta", "f") if k in r)
    groups.setdefault(key, []).append((float(r["round"]), float(r["survivor_fraction"])))
for key, pts in groups.items():
    label = ", ".join(f"{k}={v}" for k, v in key) or None
    ax.step([p[0] for p in pts], [p[1] for p in pts], where="post", label=label)
if len(groups) > 1: ax.legend(fontsize="small")
ax.set_xlabel("round"); ax.set_ylabel("surviving giant fraction")"#
            }
            PlotKind::Interdependent => {
                r#"ax.plot(col("p"), col("mutual_survivor_mean"), marker="o", ms=3)
ax.set_xlabel("removed fraction of network A"); ax.set_ylabel("mutually connected fraction")"#
            }
            PlotKind::Buffering => {
                r#"caps = sorted(set(col("capacity")))
for c in caps:
    pts = sorted((float(r["versatility"]), float(r["restored_mean"])) for r in rows if float(r["capacity"]) == c)
    ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", ms=3, label=f"capacity {c:g}")
ax.legend(); ax.set_xlabel("versatility"); ax.set_ylabel("restored fraction")"#
            }
        }
    }
}

impl FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "percolation" => Ok(PlotKind::Percolation),
            "beta" => Ok(PlotKind::Beta),
            "trace" => Ok(PlotKind::Trace),
            "interdependent" => Ok(PlotKind::Interdependent),
            "buffering" => Ok(PlotKind::Buffering),
            _ => Err(Error::param("kind", format!("unknown plot kind `{s}` (expected one of {})", Self::NAMES.join(", ")))),
        }
    }
}

/// Checks `csv_path`'s header against `kind` and writes a matplotlib script
/// next to it (`<stem>_plot.py`, rendering `<stem>.png`). Returns the script path.
pub fn emit_plot_script(csv_path: &Path, kind: PlotKind) -> Result<PathBuf> {
    let text = std::fs::read_to_string(csv_path)?;
    let header: Vec<&str> = text.lines().next().unwrap_or("").split(',').map(str::trim).collect();
    if let Some(missing) = kind.required().iter().find(|c| !header.contains(c)) {
        return Err(Error::Schema(format!("{} has no `{missing}` column", csv_path.display())));
    }
    let stem = csv_path.file_stem().map_or("plot".into(), |s| s.to_string_lossy().into_owned());
    let csv_name = csv_path.file_name().expect("read succeeded").to_string_lossy();
    let script = format!(
        r#"#!/usr/bin/env python3
import csv, os
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
with open(os.path.join(here, "{csv_name}"), newline="") as fh:
    rows = list(csv.DictReader(fh))

def col(name):
    return [float(r[name]) for r in rows]

fig, ax = plt.subplots(figsize=(5, 4))
{body}
fig.tight_layout()
fig.savefig(os.path.join(here, "{stem}.png"), dpi=150)
"#,
        body = kind.body()
    );
    let out = csv_path.with_file_name(format!("{stem}_plot.py"));
    std::fs::write(&out, script)?;
    Ok(out)
}

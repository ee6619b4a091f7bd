//! Emits a standalone matplotlib script for the files listed in a manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::runner::Manifest;

pub const SCRIPT_FILE: &str = "plot.py";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Panel {
    pub title: String,
    pub path: String,
    pub x: String,
    pub ys: Vec<String>,
    pub log_y: bool,
    pub xlim: Option<[f64; 2]>,
}

/// One panel per CSV, plus a zoomed copy for files that carry a zoom window.
/// Photon-number distributions get one panel per column, since `p_n(0)` and
/// the shifts differ by orders of magnitude.
pub fn panels(manifest: &Manifest) -> Vec<Panel> {
    let mut out = Vec::new();
    for (s, f) in manifest.files() {
        if f.x_column == "n" {
            out.extend(f.columns.iter().map(|c| Panel {
                title: format!("{} / {c}", s.name),
                path: f.path.clone(),
                x: f.x_column.clone(),
                ys: vec![c.clone()],
                log_y: false,
                xlim: None,
            }));
            continue;
        }
        let panel = Panel {
            title: format!("{} / {}", s.name, f.observable),
            path: f.path.clone(),
            x: f.x_column.clone(),
            ys: f.columns.clone(),
            log_y: f.log_y,
            xlim: None,
        };
        if let Some(z) = f.zoom {
            let mut zoomed = panel.clone();
            zoomed.title.push_str(" (zoom)");
            zoomed.xlim = Some(z);
            out.push(panel);
            out.push(zoomed);
        } else {
            out.push(panel);
        }
    }
    out
}

const TEMPLATE: &str = r#"#!/usr/bin/env python3
# Generated by rabi-dyn plot. Run from any directory.
import csv
import json
import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
PANELS = json.loads(r'''@PANELS@''')


def load(path):
    with open(os.path.join(HERE, path), newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return {name: [float(r[i]) for r in body] for i, name in enumerate(header)}


def main():
    cols = 2 if len(PANELS) > 1 else 1
    nrows = math.ceil(len(PANELS) / cols)
    fig, axes = plt.subplots(nrows, cols, figsize=(6 * cols, 3.2 * nrows), squeeze=False)
    for ax, panel in zip(axes.flat, PANELS):
        data = load(panel["path"])
        x = data[panel["x"]]
        for y in panel["ys"]:
            values = [abs(v) for v in data[y]] if panel["log_y"] else data[y]
            ax.plot(x, values, label=y, lw=0.8)
        if panel["log_y"]:
            ax.set_yscale("log")
        if panel["xlim"]:
            ax.set_xlim(*panel["xlim"])
        ax.set_title(panel["title"], fontsize=9)
        ax.set_xlabel(panel["x"])
        ax.legend(fontsize=7)
    for ax in list(axes.flat)[len(PANELS):]:
        ax.axis("off")
    fig.tight_layout()
    target = os.path.join(HERE, "@NAME@.png")
    fig.savefig(target, dpi=150)
    print(target)


if __name__ == "__main__":
    main()
"#;

pub fn render_script(manifest: &Manifest) -> CliResult<String> {
    let panels = panels(manifest);
    if panels.is_empty() {
        return Err(CliError::Config("manifest lists no output files".into()));
    }
    let json = serde_json::to_string_pretty(&panels).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(TEMPLATE
        .replace("@PANELS@", &json)
        .replace("@NAME@", &manifest.name))
}

/// Writes the plotting script next to the manifest and returns its path.
pub fn emit_script(manifest_path: &Path, output: Option<&Path>) -> CliResult<PathBuf> {
    let manifest = Manifest::load(manifest_path)?;
    let script = render_script(&manifest)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let target = output
        .map(Path::to_path_buf)
        .unwrap_or_else(|| dir.join(SCRIPT_FILE));
    fs::write(&target, script).map_err(|e| CliError::Io(format!("{}: {e}", target.display())))?;
    Ok(target)
}

//! Files written by a run: `trajectory.csv`, `snapshots.bin`, `manifest.json`
//! and `report.json`. Nothing time- or host-dependent is written, so identical
//! configurations give byte-identical files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use bo4lab_core::{CheckReport, RunStatus, Trajectory};
use serde::{Deserialize, Serialize};

use crate::config::{parse_config, RunConfig};
use crate::error::{io_at, CliError, Result};

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const SNAPSHOT_FILE: &str = "snapshots.bin";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const REPORT_FILE: &str = "report.json";

pub const TRAJECTORY_COLUMNS: [&str; 6] = ["t", "mass", "l2", "hs_s", "E_s", "E_l2"];

pub const GIT_DESCRIBE: &str = env!("BO4LAB_GIT_DESCRIBE");

/// 17 significant digits, enough to round-trip any `f64`.
fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Header plus one row per sample.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = TRAJECTORY_COLUMNS.join(",");
    out.push('\n');
    for (t, d) in traj.times.iter().zip(&traj.diagnostics) {
        let row = [
            *t,
            d.mass,
            d.l2,
            d.hs.first().copied().unwrap_or(f64::NAN),
            d.energy_hs.unwrap_or(f64::NAN),
            d.energy_l2.unwrap_or(f64::NAN),
        ];
        out.push_str(&row.map(num).join(","));
        out.push('\n');
    }
    out
}

/// Physical samples, sample-major, little-endian `f64`.
pub fn snapshot_bytes(traj: &Trajectory) -> Vec<u8> {
    traj.snapshots
        .iter()
        .flat_map(|u| u.values().iter().flat_map(|v| v.to_le_bytes()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotInfo {
    pub file: String,
    /// Always `"float64-le"`.
    pub dtype: String,
    /// `[samples, grid_size]`; row `i` holds `u(times[i], 2 pi j / grid_size)`.
    pub shape: [usize; 2],
    pub times: Vec<f64>,
    pub dt: f64,
    /// `"completed"` or `"blow-up at t=<time>"`.
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub grid_size: usize,
    pub seed: u64,
    pub git_describe: String,
    /// Canonical config text; parsing it reproduces the run.
    pub config: String,
    pub files: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshots: Option<SnapshotInfo>,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(io_at(path))?;
        serde_json::from_str(&text).map_err(|source| CliError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    /// The configuration recorded by the run.
    pub fn run_config(&self) -> Result<RunConfig> {
        parse_config(&self.config)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub passed: bool,
    pub checks: Vec<CheckReport>,
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut f = fs::File::create(&path).map_err(io_at(&path))?;
    f.write_all(bytes).map_err(io_at(&path))?;
    Ok(path)
}

fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s.into_bytes()
}

/// Writes every output of a run into `dir` (created if missing) and returns the paths.
pub fn write_outputs(
    dir: &Path,
    cfg: &RunConfig,
    reports: &[CheckReport],
    trajectory: Option<&Trajectory>,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_at(dir))?;
    let mut files = vec![REPORT_FILE.to_string()];
    let mut paths = Vec::new();
    let report = RunReport {
        command: cfg.command.to_string(),
        passed: !reports.is_empty() && reports.iter().all(|r| r.passed),
        checks: reports.to_vec(),
    };
    paths.push(write(dir, REPORT_FILE, &json(&report))?);

    let snapshots = match trajectory {
        Some(traj) => {
            paths.push(write(dir, TRAJECTORY_FILE, trajectory_csv(traj).as_bytes())?);
            paths.push(write(dir, SNAPSHOT_FILE, &snapshot_bytes(traj))?);
            files.extend([TRAJECTORY_FILE.to_string(), SNAPSHOT_FILE.to_string()]);
            Some(SnapshotInfo {
                file: SNAPSHOT_FILE.to_string(),
                dtype: "float64-le".to_string(),
                shape: [traj.snapshots.len(), traj.last().grid().n_points()],
                times: traj.times.clone(),
                dt: traj.dt,
                status: match traj.status {
                    RunStatus::Completed => "completed".to_string(),
                    RunStatus::BlowUp(t) => format!("blow-up at t={t}"),
                },
            })
        }
        None => None,
    };
    files.push(MANIFEST_FILE.to_string());
    let manifest = Manifest {
        command: cfg.command.to_string(),
        grid_size: cfg.n,
        seed: cfg.seed,
        git_describe: GIT_DESCRIBE.to_string(),
        config: cfg.echo(),
        files,
        snapshots,
    };
    paths.push(write(dir, MANIFEST_FILE, &json(&manifest))?);
    Ok(paths)
}

/// Reads `snapshots.bin` back as rows of `grid_size` samples.
pub fn read_snapshots(dir: &Path, manifest: &Manifest) -> Result<Vec<Vec<f64>>> {
    let info = manifest.snapshots.as_ref().ok_or_else(|| CliError::Config {
        key: "snapshots".to_string(),
        reason: "manifest records no snapshots".to_string(),
    })?;
    let path = dir.join(&info.file);
    let bytes = fs::read(&path).map_err(io_at(&path))?;
    let [rows, cols] = info.shape;
    if bytes.len() != rows * cols * 8 {
        return Err(CliError::Io {
            path,
            source: std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                "size does not match the manifest shape",
            ),
        });
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Ok(values.chunks(cols).map(<[f64]>::to_vec).collect())
}

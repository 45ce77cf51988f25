#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub fn fringe_scatter(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fringe-scatter"))
        .args(args)
        .env_remove("FRINGE_SCATTER_THREADS")
        .output()
        .expect("binary runs")
}

pub fn run_with_config(cmd: &str, config: &str, dir: &Path, extra: &[&str]) -> (Output, Option<String>) {
    let cfg = dir.join(format!("{cmd}.toml"));
    let out = dir.join(format!("{cmd}.csv"));
    let _ = std::fs::remove_file(&out);
    std::fs::write(&cfg, config).unwrap();
    let mut args = vec![cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let output = fringe_scatter(&args);
    (output, std::fs::read_to_string(&out).ok())
}

pub fn raman_config(theta: f64, phi: f64) -> String {
    format!(
        r#"units = "dimensionless"
[trap]
separation = 3.0
splitting = 0.05
[laser]
eta = 2.0
detuning = -1000.0
rabi = 1.0
duration = 2513.2741228718346
[state]
theta = {theta:e}
phi = {phi:e}
[channel]
kind = "raman"
raman_offset = 5.0
[geometry]
phi_steps = 720
"#
    )
}

pub fn rayleigh_config(separation: f64, cycles: f64) -> String {
    let splitting = 0.05;
    format!(
        r#"[trap]
separation = {separation:e}
splitting = {splitting:e}
[laser]
eta = 1.0
detuning = -1000.0
rabi = 1.0
duration = {duration:e}
[state]
theta = 0.7853981633974483
phi = 0.0
[channel]
kind = "rayleigh"
[geometry]
phi_steps = 36
omega_steps = 61
"#,
        duration = cycles * std::f64::consts::TAU / splitting
    )
}

/// Value of a `# key = value` header or footer line.
pub fn meta_value(csv: &str, key: &str) -> Option<String> {
    let prefix = format!("# {key} = ");
    csv.lines().find_map(|l| l.strip_prefix(&prefix)).map(str::to_string)
}

pub fn meta_f64(csv: &str, key: &str) -> f64 {
    meta_value(csv, key).and_then(|v| v.parse().ok()).unwrap_or(f64::NAN)
}

/// Data rows below the column header.
pub fn rows(csv: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap_or_default().split(',').map(str::to_string).collect();
    let data = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, data)
}

/// Smallest distance between two angles on the circle.
pub fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

#![allow(dead_code)]

use planwise::data::{write_csv, Project};
use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

/// Write each release as `<dir>/<project>-<version>.csv`; returns the paths.
pub fn write_project(dir: &Path, project: &Project) -> Vec<PathBuf> {
    std::fs::create_dir_all(dir).unwrap();
    project
        .versions
        .iter()
        .map(|v| {
            let path = dir.join(format!("{}-{}.csv", project.name, v.version));
            write_csv(v, File::create(&path).unwrap()).unwrap();
            path
        })
        .collect()
}

pub fn planwise(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_planwise"))
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .unwrap()
}

pub fn planwise_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_planwise"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

/// Every file under `dir`, relative path → bytes, sorted.
pub fn snapshot(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((
                    p.strip_prefix(dir).unwrap().to_path_buf(),
                    std::fs::read(&p).unwrap(),
                ));
            }
        }
    }
    out.sort();
    out
}

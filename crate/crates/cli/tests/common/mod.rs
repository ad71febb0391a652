//! Shared test helpers: an independent eigen-solver and CLI plumbing.

#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub type Entry = (f64, f64);

/// Eigenvalues of a Hermitian matrix given as `(re, im)` rows, ascending.
///
/// `H = A + iB` is embedded as the real symmetric `[[A, -B], [B, A]]`, whose
/// spectrum is that of `H` with every value doubled; cyclic Jacobi rotations
/// then diagonalize it.
pub fn oracle_eigenvalues(h: &[Vec<Entry>]) -> Vec<f64> {
    let n = h.len();
    let m = 2 * n;
    let mut a = vec![vec![0.0f64; m]; m];
    for i in 0..n {
        for j in 0..n {
            let (re, im) = h[i][j];
            a[i][j] = re;
            a[i + n][j + n] = re;
            a[i][j + n] = -im;
            a[i + n][j] = im;
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (head, tail) = a.split_at_mut(q);
                for (apk, aqk) in head[p].iter_mut().zip(tail[0].iter_mut()) {
                    let (x, y) = (*apk, *aqk);
                    *apk = c * x - s * y;
                    *aqk = s * x + c * y;
                }
            }
        }
    }
    let mut values: Vec<f64> = (0..m).map(|i| a[i][i]).collect();
    values.sort_by(f64::total_cmp);
    values.into_iter().step_by(2).collect()
}

/// `n^k × n^k` GHZ-type projector with its partial transpose on party 0,
/// built from index arithmetic alone.
pub fn ghz_partial_transpose(n: usize, k: usize) -> Vec<Vec<Entry>> {
    let dim = n.pow(k as u32);
    let high = n.pow(k as u32 - 1);
    let repeat = |i: usize| (0..k).fold(0, |acc, _| acc * n + i);
    let mut out = vec![vec![(0.0, 0.0); dim]; dim];
    for i in 0..n {
        for j in 0..n {
            // |i…i⟩⟨j…j| with the first digits exchanged
            let row = repeat(i) - i * high + j * high;
            let col = repeat(j) - j * high + i * high;
            out[row][col].0 += 1.0 / n as f64;
        }
    }
    out
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_bosesep")
}

pub fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("spawn bosesep")
}

pub fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn bosesep")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// JSONL lines sorted by their `trial_index` field.
pub fn sorted_by_trial(text: &str) -> Vec<String> {
    let mut lines: Vec<(u64, String)> = text
        .lines()
        .filter(|l| !l.is_empty())
        .map(|l| {
            let key = l
                .split("\"trial_index\":")
                .nth(1)
                .and_then(|r| r.split(|c: char| !c.is_ascii_digit()).next())
                .and_then(|d| d.parse().ok());
            (key.expect("trial_index field"), l.to_string())
        })
        .collect();
    lines.sort_by_key(|(k, _)| *k);
    lines.into_iter().map(|(_, l)| l).collect()
}

//! One-party spectral criteria for pure multipartite states and for
//! fermionic one-body density matrices.
//!
//! Every check is a list of linear inequalities `lhs ≤ rhs` evaluated in
//! floating point; an inequality holds when `lhs ≤ rhs + TOL_SPECTRA`.
//! The first failing inequality, in a fixed enumeration order, is reported.

use core::fmt;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Slack allowed on every inequality and on input validation.
pub const TOL_SPECTRA: f64 = 1e-12;

/// Eigenvalues in ascending order, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::input("empty spectrum"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < -TOL_SPECTRA || **v > 1.0 + TOL_SPECTRA) {
            return Err(Error::input(format!("eigenvalue {v} outside [0, 1]")));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::input(format!("spectrum {values:?} is not in ascending order")));
        }
        Ok(Spectrum { values })
    }

    /// Like [`Spectrum::new`], additionally requiring the values to sum to 1.
    pub fn normalized(values: Vec<f64>) -> Result<Self> {
        let s = Spectrum::new(values)?;
        let total = s.sum();
        if (total - 1.0).abs() > TOL_SPECTRA {
            return Err(Error::input(format!("spectrum sums to {total}, expected 1")));
        }
        Ok(s)
    }

    /// Sorts the values first.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        values.sort_by(f64::total_cmp);
        Spectrum::normalized(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    fn partial_sum(&self, p: usize) -> f64 {
        self.values[..p].iter().sum()
    }
}

/// A failed inequality `lhs ≤ rhs` with a human-readable label.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} > {})", self.label, self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionVerdict {
    pub compatible: bool,
    pub failed_inequality: Option<Violation>,
}

/// Verdict of a criterion known only to be necessary: a failure proves
/// incompatibility, a pass proves nothing.
#[derive(Debug, Clone, PartialEq)]
pub struct NecessityVerdict {
    pub consistent_with_necessity: bool,
    pub failed_inequality: Option<Violation>,
}

/// Collects inequalities and keeps the first failure.
struct Checker {
    failure: Option<Violation>,
}

impl Checker {
    fn new() -> Self {
        Checker { failure: None }
    }

    fn le(&mut self, lhs: f64, rhs: f64, label: impl FnOnce() -> String) {
        if self.failure.is_none() && lhs > rhs + TOL_SPECTRA {
            self.failure = Some(Violation { label: label(), lhs, rhs });
        }
    }

    fn verdict(self) -> CriterionVerdict {
        CriterionVerdict { compatible: self.failure.is_none(), failed_inequality: self.failure }
    }
}

fn check_half(l: f64, what: &str) -> Result<()> {
    if !l.is_finite() || !(-TOL_SPECTRA..=0.5 + TOL_SPECTRA).contains(&l) {
        return Err(Error::input(format!("{what} = {l} is not the smaller eigenvalue of a qubit state")));
    }
    Ok(())
}

fn check_len(s: &Spectrum, m: usize, what: &str) -> Result<()> {
    if s.len() != m {
        return Err(Error::input(format!("{what} has {} eigenvalues, expected {m}", s.len())));
    }
    if (s.sum() - 1.0).abs() > TOL_SPECTRA {
        return Err(Error::input(format!("{what} sums to {}, expected 1", s.sum())));
    }
    Ok(())
}

/// Polygon inequalities `λ_i ≤ Σ_{j≠i} λ_j` on the smaller one-qubit
/// eigenvalues; necessary and sufficient for a pure `n`-qubit state.
pub fn check_polygon(lams: &[f64]) -> Result<CriterionVerdict> {
    if lams.is_empty() {
        return Err(Error::input("no eigenvalues given"));
    }
    for (i, l) in lams.iter().enumerate() {
        check_half(*l, &format!("λ_{}", i + 1))?;
    }
    let total: f64 = lams.iter().sum();
    let mut ck = Checker::new();
    for (i, l) in lams.iter().enumerate() {
        ck.le(*l, total - l, || format!("polygon: λ_i ≤ Σ_(j≠i) λ_j, i={}", i + 1));
    }
    Ok(ck.verdict())
}

const PERMUTATIONS3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Three-qutrit pure-state criterion on ascending one-qutrit spectra.
///
/// With `λ₁ ≤ λ₂ ≤ λ₃`: `α = λ₁+λ₂`, `β = λ₁+λ₃`, `γ = λ₂+λ₃`,
/// `δ = λ₁+2λ₂`, `ε = 2λ₁+λ₂`, `ζ = 2λ₂+λ₃`, `η = 2λ₃+λ₂`, and for every
/// ordering `(a, b, c)` of the parties:
///
/// ```text
/// α_a ≤ α_b + α_c    β_a ≤ α_b + β_c    γ_a ≤ α_b + β_c    δ_a ≤ δ_b + δ_c
/// ε_a ≤ δ_b + ε_c    ζ_a ≤ δ_b + ζ_c    ζ_a ≤ ε_b + η_c
/// ```
///
/// The third line has the same right side as the second. It is evaluated
/// as written; sampled three-qutrit pure states show it is not always
/// satisfied (see the README).
pub fn check_higuchi(s1: &Spectrum, s2: &Spectrum, s3: &Spectrum) -> Result<CriterionVerdict> {
    let spectra = [s1, s2, s3];
    for (k, s) in spectra.iter().enumerate() {
        check_len(s, 3, &format!("spectrum {}", k + 1))?;
    }
    // [α, β, γ, δ, ε, ζ, η] per party.
    let q: Vec<[f64; 7]> = spectra
        .iter()
        .map(|s| {
            let [l1, l2, l3] = [s.values[0], s.values[1], s.values[2]];
            [l1 + l2, l1 + l3, l2 + l3, l1 + 2.0 * l2, 2.0 * l1 + l2, 2.0 * l2 + l3, 2.0 * l3 + l2]
        })
        .collect();
    const NAMES: [&str; 7] = ["α", "β", "γ", "δ", "ε", "ζ", "η"];
    // (lhs, first rhs term, second rhs term) as indices into NAMES.
    const LINES: [(usize, usize, usize); 7] =
        [(0, 0, 0), (1, 0, 1), (2, 0, 1), (3, 3, 3), (4, 3, 4), (5, 3, 5), (5, 4, 6)];
    let mut ck = Checker::new();
    for [a, b, c] in PERMUTATIONS3 {
        for (l, r1, r2) in LINES {
            ck.le(q[a][l], q[b][r1] + q[c][r2], || {
                format!(
                    "higuchi: {}_a ≤ {}_b + {}_c, a={},b={},c={}",
                    NAMES[l],
                    NAMES[r1],
                    NAMES[r2],
                    a + 1,
                    b + 1,
                    c + 1
                )
            });
        }
    }
    Ok(ck.verdict())
}

/// Pure states on `C² ⊗ C² ⊗ C⁴`: `l1`, `l2` are the smaller eigenvalues of
/// the qubits and `s3 = (λ₃, μ₃, ν₃, ξ₃)` the ascending spectrum of the
/// four-level party.
pub fn check_bravyi(l1: f64, l2: f64, s3: &Spectrum) -> Result<CriterionVerdict> {
    check_half(l1, "λ_1")?;
    check_half(l2, "λ_2")?;
    check_len(s3, 4, "four-level spectrum")?;
    let [lam, mu, nu, xi] = [s3.values[0], s3.values[1], s3.values[2], s3.values[3]];
    let mut ck = Checker::new();
    ck.le(lam + mu, l1, || String::from("bravyi: λ_1 ≥ λ_3 + μ_3"));
    ck.le(lam + mu, l2, || String::from("bravyi: λ_2 ≥ λ_3 + μ_3"));
    ck.le(2.0 * lam + mu + nu, l1 + l2, || String::from("bravyi: λ_1 + λ_2 ≥ 2λ_3 + μ_3 + ν_3"));
    ck.le((l1 - l2).abs(), (nu - lam).min(xi - mu), || String::from("bravyi: |λ_1 - λ_2| ≤ min(ν_3 - λ_3, ξ_3 - μ_3)"));
    Ok(ck.verdict())
}

/// Necessary condition for `n` particles with `m`-dimensional spaces: for
/// every ordered pair `(a, b)` and `p = 1..m-1`,
/// `Σ_{i≤p} λ_i^(a) ≤ Σ_{i≤p} λ_i^(b) + Σ_{c≠a,b} Σ_{i≤m-1} λ_i^(c)`.
pub fn check_hzg(spectra: &[Spectrum], m: usize) -> Result<NecessityVerdict> {
    if spectra.len() < 2 {
        return Err(Error::input("at least two spectra are required"));
    }
    if m < 2 {
        return Err(Error::input("local dimension must be at least 2"));
    }
    for (k, s) in spectra.iter().enumerate() {
        check_len(s, m, &format!("spectrum {}", k + 1))?;
    }
    let tails: Vec<f64> = spectra.iter().map(|s| s.partial_sum(m - 1)).collect();
    let all_tails: f64 = tails.iter().sum();
    let mut ck = Checker::new();
    for a in 0..spectra.len() {
        for b in 0..spectra.len() {
            if a == b {
                continue;
            }
            let others = all_tails - tails[a] - tails[b];
            for p in 1..m {
                ck.le(spectra[a].partial_sum(p), spectra[b].partial_sum(p) + others, || {
                    format!(
                        "hzg: Σ_(i≤p) λ_i^(a) ≤ Σ_(i≤p) λ_i^(b) + Σ_(c≠a,b) Σ_(i<m) λ_i^(c), a={},b={},p={p}",
                        a + 1,
                        b + 1
                    )
                });
            }
        }
    }
    let v = ck.verdict();
    Ok(NecessityVerdict { consistent_with_necessity: v.compatible, failed_inequality: v.failed_inequality })
}

/// One-body density matrix of `n_fermions` fermions: every eigenvalue in
/// `[0, 1/n]`.
pub fn check_coleman(spec: &Spectrum, n_fermions: usize) -> Result<CriterionVerdict> {
    if n_fermions == 0 {
        return Err(Error::input("number of fermions must be at least 1"));
    }
    check_len(spec, spec.len(), "spectrum")?;
    let bound = 1.0 / n_fermions as f64;
    let mut ck = Checker::new();
    for (i, l) in spec.values.iter().enumerate() {
        ck.le(*l, bound, || format!("coleman: λ_i ≤ 1/n, i={}, n={n_fermions}", i + 1));
        ck.le(0.0, *l, || format!("coleman: λ_i ≥ 0, i={}", i + 1));
    }
    Ok(ck.verdict())
}

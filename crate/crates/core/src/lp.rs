//! Exact feasibility oracle for the classical problem.
//!
//! Encodes "these tables are marginals of one distribution" directly as a
//! linear system over the `2^n` joint probabilities and solves it with a
//! rational phase-one simplex. Nothing here depends on the odd-subset
//! conditions in [`crate::classical`], so the two can cross-check each other.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::classical::{JointTable, MarginalFamily};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::subset::extract_bits;

/// Default cap on the number of variables (64 joint probabilities).
pub const DEFAULT_MAX_VARS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualityRow {
    pub coefficients: Vec<Rational>,
    pub rhs: Rational,
}

/// `A p = b, p ≥ 0` over the joint probabilities `p_x`, indexed by
/// [`crate::Outcome::bits`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilitySystem {
    n: usize,
    rows: Vec<EqualityRow>,
}

impl FeasibilitySystem {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_vars(&self) -> usize {
        1 << self.n
    }

    pub fn rows(&self) -> &[EqualityRow] {
        &self.rows
    }

    /// Whether `p` satisfies every row and is nonnegative.
    pub fn is_satisfied_by(&self, p: &[Rational]) -> bool {
        p.len() == self.num_vars()
            && p.iter().all(|v| !v.is_negative())
            && self.rows.iter().all(|r| r.coefficients.iter().zip(p).map(|(a, x)| a * x).sum::<Rational>() == r.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleVerdict {
    pub feasible: bool,
    pub solution: Option<JointTable>,
}

pub fn build_system(f: &MarginalFamily) -> Result<FeasibilitySystem> {
    build_system_with_cap(f, DEFAULT_MAX_VARS)
}

/// One row per (stored subset, restriction value), then the sum-to-one row.
pub fn build_system_with_cap(f: &MarginalFamily, max_vars: usize) -> Result<FeasibilitySystem> {
    let n = f.n();
    if n > max_vars {
        return Err(Error::Resource(format!("LP oracle is capped at {max_vars} variables, instance has {n}")));
    }
    let nv = 1usize << n;
    let mut rows = Vec::new();
    for t in f.tables() {
        let a = t.subset().bits();
        for (idx, value) in t.values().iter().enumerate() {
            let coefficients = (0..nv)
                .map(|x| if extract_bits(x as u32, a) == idx { Rational::one() } else { Rational::zero() })
                .collect();
            rows.push(EqualityRow { coefficients, rhs: value.clone() });
        }
    }
    rows.push(EqualityRow { coefficients: vec![Rational::one(); nv], rhs: Rational::one() });
    Ok(FeasibilitySystem { n, rows })
}

pub fn solve_feasibility(s: &FeasibilitySystem) -> OracleVerdict {
    let a: Vec<Vec<Rational>> = s.rows.iter().map(|r| r.coefficients.clone()).collect();
    let b: Vec<Rational> = s.rows.iter().map(|r| r.rhs.clone()).collect();
    match find_nonnegative_solution(a, b, s.num_vars()) {
        Some(p) => {
            debug_assert!(s.is_satisfied_by(&p));
            let joint = JointTable::new(s.n, p).expect("feasible point of the marginal system is a distribution");
            OracleVerdict { feasible: true, solution: Some(joint) }
        }
        None => OracleVerdict { feasible: false, solution: None },
    }
}

/// Builds and solves in one step.
pub fn check_feasible(f: &MarginalFamily) -> Result<OracleVerdict> {
    Ok(solve_feasibility(&build_system(f)?))
}

fn pivot(rows: &mut [Vec<Rational>], rhs: &mut [Rational], r: usize, j: usize) {
    let p = rows[r][j].clone();
    if !p.is_one() {
        for v in rows[r].iter_mut() {
            if !v.is_zero() {
                *v /= &p;
            }
        }
        rhs[r] /= &p;
    }
    let (pivot_row, pivot_rhs) = (rows[r].clone(), rhs[r].clone());
    for i in 0..rows.len() {
        if i == r || rows[i][j].is_zero() {
            continue;
        }
        let factor = rows[i][j].clone();
        for (v, pv) in rows[i].iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *v -= &factor * pv;
            }
        }
        rhs[i] -= &factor * &pivot_rhs;
    }
}

/// Finds `x ≥ 0` with `a x = b`, or `None`.
///
/// Row reduction first removes linearly dependent rows (and detects an
/// inconsistent system); the pivot columns give an initial basis. Rows whose
/// right-hand side is negative are negated and get an artificial variable,
/// and phase one minimizes the artificial sum under Bland's rule.
fn find_nonnegative_solution(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>, nv: usize) -> Option<Vec<Rational>> {
    // Reduced row echelon form.
    let mut rank = 0;
    let mut basis: Vec<usize> = Vec::new();
    for j in 0..nv {
        if rank == a.len() {
            break;
        }
        let Some(r) = (rank..a.len()).find(|&r| !a[r][j].is_zero()) else { continue };
        a.swap(rank, r);
        b.swap(rank, r);
        pivot(&mut a, &mut b, rank, j);
        basis.push(j);
        rank += 1;
    }
    if b[rank..].iter().any(|v| !v.is_zero()) {
        return None;
    }
    a.truncate(rank);
    b.truncate(rank);

    // Artificial rows: basic variable is an artificial, tracked as `None`.
    let mut basic: Vec<Option<usize>> = basis.into_iter().map(Some).collect();
    for i in 0..rank {
        if b[i].is_negative() {
            for v in a[i].iter_mut() {
                *v = -v.clone();
            }
            b[i] = -b[i].clone();
            basic[i] = None;
        }
    }

    loop {
        let artificial_rows: Vec<usize> = (0..rank).filter(|&i| basic[i].is_none()).collect();
        if artificial_rows.is_empty() {
            break;
        }
        // Reduced cost of column j is -Σ_{artificial rows} a[i][j]; enter the
        // lowest-index column with a negative reduced cost.
        let entering = (0..nv).find(|&j| {
            basic.iter().all(|bv| *bv != Some(j))
                && artificial_rows.iter().map(|&i| &a[i][j]).sum::<Rational>().is_positive()
        });
        let Some(j) = entering else { break };
        // Ratio test; ties broken by the smallest basic index (artificials first).
        let mut best: Option<(usize, Rational)> = None;
        for i in 0..rank {
            if !a[i][j].is_positive() {
                continue;
            }
            let ratio = &b[i] / &a[i][j];
            let better = match &best {
                None => true,
                Some((bi, br)) => ratio < *br || (ratio == *br && basic_key(basic[i]) < basic_key(basic[*bi])),
            };
            if better {
                best = Some((i, ratio));
            }
        }
        let (r, _) = best.expect("a column with positive reduced-cost sum has a positive entry in some row");
        pivot(&mut a, &mut b, r, j);
        basic[r] = Some(j);
    }

    let infeasibility: Rational = (0..rank).filter(|&i| basic[i].is_none()).map(|i| &b[i]).sum();
    if infeasibility.is_positive() {
        return None;
    }
    let mut x = vec![Rational::zero(); nv];
    for (i, bv) in basic.iter().enumerate() {
        if let Some(j) = bv {
            x[*j] = b[i].clone();
        }
    }
    Some(x)
}

fn basic_key(b: Option<usize>) -> (u8, usize) {
    match b {
        None => (0, 0),
        Some(j) => (1, j),
    }
}

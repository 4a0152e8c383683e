// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::VertexSet;
use crate::linalg::{BitMatrix, BitVec, Gf2Solver};

/// Largest matrix dimension the checker accepts.
pub const UKP_MAX_N: usize = 20_000;

/// Each solvable right-hand side contributes a coset of the kernel, which is
/// enumerated in full, so the kernel dimension is capped.
pub const UKP_MAX_KERNEL_DIM: usize = 24;

/// A nonzero `v` over GF(2) with `|supp(Av)| <= ell`, `supp(Av)` disjoint
/// from `Q`, and a level set larger than `(1 - eta) n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UkpWitness {
    pub vector: Vec<usize>,
    pub max_level_fraction: f64,
    pub supp_av: Vec<usize>,
    pub q: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UkpReport {
    pub n: usize,
    pub ell: usize,
    pub eta: f64,
    pub kernel_dim: usize,
    /// Right-hand sides `s` for which `Av = s` was solvable.
    pub solvable_rhs: usize,
    pub passed: bool,
    pub witness: Option<UkpWitness>,
}

/// Checks that every nonzero `v` over GF(2) with `Av = s`, `|supp(s)| <= ell`
/// and `supp(s)` outside `Q` has both level sets of size at least `eta n`.
///
/// This is the sufficient condition that a rational kernel check reduces
/// to, not the rational property itself. Solvability of `Av = e_i + e_j` is
/// read off kernel signatures, so only solvable systems are visited; each
/// visited solution set is a kernel coset walked in Gray-code order.
pub fn check_ukp_f2(a: &BitMatrix, ell: usize, q: &VertexSet, eta: f64) -> Result<UkpReport> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::invalid("square matrix required"));
    }
    if ell > 2 {
        return Err(Error::invalid(format!("ell = {ell} exceeds 2")));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::invalid(format!("eta = {eta} must lie in [0, 1]")));
    }
    if n > UKP_MAX_N {
        return Err(Error::cap(
            "UKP matrix dimension",
            n as u64,
            UKP_MAX_N as u64,
        ));
    }
    if !q.valid_for(n) {
        return Err(Error::invalid("Q out of range"));
    }
    let solver = Gf2Solver::new(a);
    let kernel = solver.kernel();
    if kernel.len() > UKP_MAX_KERNEL_DIM {
        return Err(Error::cap(
            "UKP kernel dimension",
            kernel.len() as u64,
            UKP_MAX_KERNEL_DIM as u64,
        ));
    }
    let limit = (1.0 - eta) * n as f64;
    let bad = |v: &BitVec| {
        let w = v.count_ones();
        w != 0 && (w as f64 > limit || (n - w) as f64 > limit)
    };

    let mut report = UkpReport {
        n,
        ell,
        eta,
        kernel_dim: kernel.len(),
        solvable_rhs: 0,
        passed: true,
        witness: None,
    };
    let finish = |v: BitVec, supp: Vec<usize>, report: &mut UkpReport| {
        let w = v.count_ones();
        report.passed = false;
        report.witness = Some(UkpWitness {
            vector: v.iter_ones().collect(),
            max_level_fraction: w.max(n - w) as f64 / n as f64,
            supp_av: supp,
            q: q.as_slice().to_vec(),
        });
    };

    // s = 0
    report.solvable_rhs += 1;
    if let Some(v) = scan_coset(BitVec::zeros(n), kernel, &bad) {
        finish(v, vec![], &mut report);
        return Ok(report);
    }
    if ell == 0 {
        return Ok(report);
    }

    let allowed: Vec<usize> = (0..n).filter(|&i| !q.contains(i)).collect();
    let mut groups: HashMap<&BitVec, Vec<usize>> = HashMap::new();
    for &i in &allowed {
        groups.entry(solver.signature(i)).or_default().push(i);
    }
    // deterministic visiting order
    let mut groups: Vec<(bool, Vec<usize>)> = groups
        .into_iter()
        .map(|(sig, members)| (sig.is_zero(), members))
        .collect();
    groups.sort_by_key(|(_, m)| m[0]);

    for (zero_sig, members) in &groups {
        if *zero_sig {
            for &i in members {
                report.solvable_rhs += 1;
                if let Some(v) = scan_coset(solver.particular(i).clone(), kernel, &bad) {
                    finish(v, vec![i], &mut report);
                    return Ok(report);
                }
            }
        }
        if ell < 2 {
            continue;
        }
        for (x, &i) in members.iter().enumerate() {
            for &j in &members[x + 1..] {
                report.solvable_rhs += 1;
                // particular solutions add up to one for e_i + e_j
                let mut start = solver.particular(i).clone();
                start.xor_assign(solver.particular(j));
                if let Some(v) = scan_coset(start, kernel, &bad) {
                    finish(v, vec![i, j], &mut report);
                    return Ok(report);
                }
            }
        }
    }
    Ok(report)
}

/// Visits every element of `start + span(kernel)`, returning the first one
/// that `bad` flags.
fn scan_coset(mut v: BitVec, kernel: &[BitVec], bad: &impl Fn(&BitVec) -> bool) -> Option<BitVec> {
    if bad(&v) {
        return Some(v);
    }
    for step in 1u64..(1u64 << kernel.len()) {
        v.xor_assign(&kernel[step.trailing_zeros() as usize]);
        if bad(&v) {
            return Some(v);
        }
    }
    None
}

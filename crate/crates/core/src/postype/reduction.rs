//! Support-reduction transforms. Both preserve the moment matrix
//! `Σ z(t) t tᵀ`, strictly increase the total mass `Σ z(t)`, and keep a
//! feasible `(C, z)` feasible.

use num_integer::Integer;
use serde::Serialize;

use super::{canonical, WeightFunction};
use crate::error::{Error, Result};

fn require_support(z: &WeightFunction, u: &[i64]) -> Result<f64> {
    let w = z.get(u);
    if w == 0.0 {
        return Err(Error::NotInSupport(u.to_vec()));
    }
    Ok(w)
}

fn same_coset(u: &[i64], v: &[i64]) -> bool {
    u.iter().zip(v).all(|(a, b)| (a - b).is_even())
}

/// Merges two support vectors of the same coset of `L*/2L*`.
///
/// With `z(v) ≤ z(u)`: `z(±u) ← z(u) - z(v)`, `z(±v) ← 0` and
/// `z((±u ± v)/2) += 2z(v)`. The total mass grows by `4z(v)`.
pub fn merge_coset_pair(z: &WeightFunction, u: &[i64], v: &[i64]) -> Result<WeightFunction> {
    let zu = require_support(z, u)?;
    let zv = require_support(z, v)?;
    if canonical(u) == canonical(v) || !same_coset(u, v) {
        return Err(Error::NotSameCosetPair {
            u: u.to_vec(),
            v: v.to_vec(),
        });
    }
    if zv > zu {
        return Err(Error::WeightOrderViolation { zu, zv });
    }
    let half_sum: Vec<i64> = u.iter().zip(v).map(|(a, b)| (a + b) / 2).collect();
    let half_diff: Vec<i64> = u.iter().zip(v).map(|(a, b)| (a - b) / 2).collect();
    let mut out = z.clone();
    out.set(u, zu - zv)?;
    out.set(v, 0.0)?;
    out.add(&half_sum, 2.0 * zv)?;
    out.add(&half_diff, 2.0 * zv)?;
    Ok(out)
}

/// Moves the weight of `u = k·v` onto `v`: `z(±v) += k² z(u)`, `z(±u) ← 0`.
pub fn collapse_multiple(z: &WeightFunction, u: &[i64], v: &[i64], k: i64) -> Result<WeightFunction> {
    let zu = require_support(z, u)?;
    if k < 2 || u.len() != v.len() || u.iter().zip(v).any(|(a, b)| *a != k * b) {
        return Err(Error::NotAMultiple {
            u: u.to_vec(),
            v: v.to_vec(),
            k,
        });
    }
    let mut out = z.clone();
    out.set(u, 0.0)?;
    out.add(v, (k * k) as f64 * zu)?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StepKind {
    Collapse { k: i64 },
    Merge,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionStep {
    #[serde(flatten)]
    pub kind: StepKind,
    pub u: Vec<i64>,
    pub v: Vec<i64>,
    pub mass_increase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionReport {
    pub steps: Vec<ReductionStep>,
    pub initial_mass: f64,
    pub final_mass: f64,
    /// Largest entry of `|M_final - M_initial|` for the moment matrix.
    pub moment_drift: f64,
    pub final_support_size: usize,
    /// Largest norm in the final support. No a-priori bound is known.
    pub final_support_radius: f64,
}

fn gcd_all(u: &[i64]) -> i64 {
    u.iter().fold(0_i64, |g, &c| g.gcd(&c))
}

/// `u` is primitive iff the gcd of its coordinates is 1.
pub fn is_primitive(u: &[i64]) -> bool {
    gcd_all(u) == 1
}

/// Applies the two transforms until neither applies.
///
/// Non-primitive vectors are collapsed first, largest multiple first; then
/// same-coset pairs are merged in order of decreasing `min(z(u), z(v))`.
/// At the fixpoint the support is primitive with at most one vector per
/// nonzero coset of `L*/2L*`, so at most `2ⁿ - 1` pairs. Fails with
/// `NonTermination` after `10·s²` steps, `s` the initial support size.
pub fn reduce_support(z: &WeightFunction) -> Result<(WeightFunction, ReductionReport)> {
    let cap = 10 * z.len().max(1).pow(2);
    let initial_mass = z.total_mass();
    let initial_moment = z.moment();
    let mut cur = z.clone();
    let mut steps = Vec::new();
    loop {
        let next = next_transform(&cur);
        let Some((kind, u, v)) = next else { break };
        if steps.len() >= cap {
            return Err(Error::NonTermination(cap));
        }
        let before = cur.total_mass();
        cur = match kind {
            StepKind::Collapse { k } => collapse_multiple(&cur, &u, &v, k)?,
            StepKind::Merge => merge_coset_pair(&cur, &u, &v)?,
        };
        steps.push(ReductionStep {
            kind,
            u,
            v,
            mass_increase: cur.total_mass() - before,
        });
    }
    let moment_drift = (cur.moment() - initial_moment).amax();
    let report = ReductionReport {
        steps,
        initial_mass,
        final_mass: cur.total_mass(),
        moment_drift,
        final_support_size: cur.len(),
        final_support_radius: cur.support_radius(),
    };
    Ok((cur, report))
}

fn next_transform(z: &WeightFunction) -> Option<(StepKind, Vec<i64>, Vec<i64>)> {
    let collapse = z
        .pairs()
        .map(|(u, _)| (gcd_all(u), u))
        .filter(|(g, _)| *g >= 2)
        .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(a.1)));
    if let Some((k, u)) = collapse {
        let v = u.iter().map(|c| c / k).collect();
        return Some((StepKind::Collapse { k }, u.clone(), v));
    }
    let entries: Vec<(&Vec<i64>, f64)> = z.pairs().collect();
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..entries.len() {
        for j in (i + 1)..entries.len() {
            if !same_coset(entries[i].0, entries[j].0) {
                continue;
            }
            let m = entries[i].1.min(entries[j].1);
            if best.is_none_or(|(bm, _, _)| m > bm) {
                best = Some((m, i, j));
            }
        }
    }
    best.map(|(_, i, j)| {
        let (a, b) = (entries[i], entries[j]);
        let (u, v) = if a.1 >= b.1 { (a.0, b.0) } else { (b.0, a.0) };
        (StepKind::Merge, u.clone(), v.clone())
    })
}

//! Double description: extreme rays of `{y ∈ R^k : ⟨a_i, y⟩ ≥ 0}` for a
//! constraint matrix of full column rank.

use std::collections::BTreeSet;

use crate::linalg::{dot, ScalarMatrix, ScalarVector};
use crate::scalar::{Scalar, ScalarError, ScalarField, Sign};

struct Ray {
    v: ScalarVector,
    tight: BTreeSet<usize>,
}

/// Extreme rays of the pointed cone `{y : A y ≥ 0}` where `A` has rows
/// `constraints` (all of length `k`) and rank `k`. Constraints are inserted
/// in index order; adjacency uses the rank test on common tight constraints.
pub fn extreme_rays(field: &ScalarField, k: usize, constraints: &[ScalarVector]) -> Result<Vec<ScalarVector>, ScalarError> {
    let mut lineality: Vec<ScalarVector> = (0..k).map(|i| crate::linalg::unit_vector(k, i)).collect();
    let mut rays: Vec<Ray> = Vec::new();
    let mut processed: Vec<usize> = Vec::new();

    for (ci, a) in constraints.iter().enumerate() {
        if let Some(pos) = lineality.iter().position(|l| !dot(a, l).is_zero()) {
            let mut l0 = lineality.remove(pos);
            let mut al0 = dot(a, &l0);
            if field.sign(&al0)? == Sign::Negative {
                l0 = l0.iter().map(|x| -x).collect();
                al0 = -al0;
            }
            let project = |v: &ScalarVector| -> Result<ScalarVector, ScalarError> {
                let f = dot(a, v).checked_div(&al0)?;
                if f.is_zero() {
                    return Ok(v.clone());
                }
                Ok(v.iter().zip(&l0).map(|(x, y)| x - &f * y).collect())
            };
            for l in lineality.iter_mut() {
                *l = project(l)?;
            }
            for r in rays.iter_mut() {
                r.v = project(&r.v)?;
                r.tight.insert(ci);
            }
            rays.push(Ray {
                v: l0,
                tight: processed.iter().copied().collect(),
            });
            processed.push(ci);
            continue;
        }

        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut next = Vec::new();
        let mut values = Vec::with_capacity(rays.len());
        for r in rays.drain(..) {
            let val = dot(a, &r.v);
            values.push(val);
            next.push(r);
        }
        let mut kept: Vec<Ray> = Vec::new();
        let mut kept_vals: Vec<Scalar> = Vec::new();
        for (mut r, val) in next.into_iter().zip(values) {
            match field.sign(&val)? {
                Sign::Zero => {
                    r.tight.insert(ci);
                    kept.push(r);
                }
                Sign::Positive => {
                    pos.push(kept.len());
                    kept.push(r);
                    kept_vals.push(val);
                    continue;
                }
                Sign::Negative => {
                    neg.push(kept.len());
                    kept.push(r);
                    kept_vals.push(val);
                    continue;
                }
            }
            kept_vals.push(Scalar::zero());
        }

        let target_rank = k - lineality.len();
        let mut created = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common: BTreeSet<usize> = kept[p].tight.intersection(&kept[n].tight).copied().collect();
                if common.len() + 2 < target_rank {
                    continue;
                }
                let rows: Vec<ScalarVector> = common.iter().map(|&i| constraints[i].clone()).collect();
                let rank = if rows.is_empty() {
                    0
                } else {
                    ScalarMatrix::from_rows(rows).expect("rectangular").rank()
                };
                if rank + 2 != target_rank {
                    continue;
                }
                // (a·p) n − (a·n) p, both coefficients positive
                let ap = &kept_vals[p];
                let an = &kept_vals[n];
                let v: ScalarVector = kept[n]
                    .v
                    .iter()
                    .zip(&kept[p].v)
                    .map(|(x, y)| ap * x - an * y)
                    .collect();
                let mut tight = common;
                tight.insert(ci);
                created.push(Ray { v, tight });
            }
        }
        let negs: BTreeSet<usize> = neg.into_iter().collect();
        rays = kept
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !negs.contains(i))
            .map(|(_, r)| r)
            .chain(created)
            .collect();
        processed.push(ci);
    }
    debug_assert!(lineality.is_empty(), "constraint matrix must have full column rank");
    Ok(rays.into_iter().map(|r| r.v).collect())
}

//! Affine chart presentations of the cones of a calibrated quantum fan.
//!
//! The chart of a cone σ with rays `I` is the linear and lattice data of
//! `[C^I × T^J / Z^{N−d} × E(ker h̄_σ)]`: a completion `J`, a basis
//! subfamily `Ĩ ⊂ I`, a permutation χ, the calibration `φ = ψ⁻¹ h P_χ` and
//! a basis of `ker h̄_σ`. Chart coordinates are labelled by the calibration
//! indices `I` (sorted) followed by `J` (sorted). The exponential map is never
//! evaluated; coordinates are only tagged additive or multiplicative.

mod glue;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use thiserror::Error;

pub use glue::{
    bundle_transitions, completion_transition, face_restriction, gluing, verify_cocycle, BundleTransition,
    CompletionTransition, FaceRestriction, Region, Transition,
};
pub(crate) use glue::{lattice_transition, linear_transition};

use crate::calibration::{Calibration, XiLattice};
use crate::cone::ConeError;
use crate::fan::CalibratedFan;
use crate::linalg::{rank_of, IntMatrix, LinalgError, ScalarMatrix, ScalarVector};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ChartError {
    #[error("cone {0} has no completion J among non-virtual columns")]
    NoCompletion(usize),
    #[error("invalid chart choice: {0}")]
    InvalidChoice(String),
    #[error("charts present different cones ({0} and {1})")]
    DifferentCones(usize, usize),
    #[error("charts of cone {0} use different completions; use completion_transition")]
    DifferentCompletions(usize),
    #[error("diagram identity fails: {0}")]
    DiagramFailure(String),
    #[error("cone {tau} is not a face of cone {sigma}")]
    NotAFace { sigma: usize, tau: usize },
    #[error("cones {0} and {1} do not meet in a common face of the fan")]
    NoCommonFace(usize, usize),
    #[error("transition identity fails: {0}")]
    TransitionFailure(String),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Optional overrides of the canonical choices.
#[derive(Clone, Debug, Default)]
pub struct ChartChoice {
    pub i_tilde: Option<Vec<usize>>,
    pub completion: Option<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct Chart {
    pub cone_id: usize,
    pub i_set: Vec<usize>,
    pub j_set: Vec<usize>,
    pub i_tilde: Vec<usize>,
    /// `chi[m] = χ(m)`, a permutation of `0..N`
    pub chi: Vec<usize>,
    /// calibration indices labelling the chart coordinates: `I` then `J`
    pub labels: Vec<usize>,
    /// `h̄_σ`: columns `h(e_ℓ)` for the labels, `d × p`
    pub h_bar: ScalarMatrix,
    /// `ψ`: columns `h(e_{χ(0)}), …, h(e_{χ(d−1)})`
    pub psi: ScalarMatrix,
    /// `p × d` embedding of `C^Ĩ ⊕ C^J` into the chart coordinates
    pub emb: ScalarMatrix,
    /// `φ = emb · ψ⁻¹ · h · P_χ`, `p × N`
    pub phi: ScalarMatrix,
    pub ker_basis: Vec<ScalarVector>,
    pub xi: XiLattice,
    /// labels of the multiplicative (T) coordinates
    pub multiplicative: Vec<usize>,
    pub p_chi: IntMatrix,
    h: ScalarMatrix,
}

/// Lexicographically least subset of `candidates` (in order) whose columns
/// are independent and, together with `fixed`, reach rank `target`.
fn greedy_extend(cal: &Calibration, fixed: &[ScalarVector], candidates: &[usize], target: usize) -> Vec<usize> {
    let d = cal.d();
    let mut vecs = fixed.to_vec();
    let mut chosen = Vec::new();
    for &i in candidates {
        if vecs.len() == target {
            break;
        }
        let mut trial = vecs.clone();
        trial.push(cal.column(i));
        if rank_of(d, &trial) == trial.len() {
            vecs = trial;
            chosen.push(i);
        }
    }
    chosen
}

/// Lexicographically least basis subfamily `Ĩ ⊂ I` of the span of σ.
pub fn choose_basis_subfamily(cal: &Calibration, i_set: &[usize]) -> Vec<usize> {
    let k = rank_of(cal.d(), &cal.columns(i_set));
    greedy_extend(cal, &[], i_set, k)
}

/// Lexicographically least `J` outside `I ∪ 𝓘` with
/// `C^d = Vect(σ) ⊕ Vect(v_j, j ∈ J)`.
pub fn choose_completion(cal: &Calibration, cone_id: usize, i_set: &[usize], i_tilde: &[usize]) -> Result<Vec<usize>, ChartError> {
    let d = cal.d();
    let candidates: Vec<usize> = cal.non_virtual().into_iter().filter(|j| !i_set.contains(j)).collect();
    let j = greedy_extend(cal, &cal.columns(i_tilde), &candidates, d);
    if i_tilde.len() + j.len() < d {
        return Err(ChartError::NoCompletion(cone_id));
    }
    Ok(j)
}

/// The permutation with fewest moved points sending `0..k` onto `Ĩ`,
/// `k..d` onto `J` and `d..N` onto the rest; unmatched positions of each
/// segment are paired with unmatched targets in increasing order.
pub fn chi_permutation(n: usize, d: usize, i_tilde: &[usize], j_set: &[usize]) -> Vec<usize> {
    let k = i_tilde.len();
    let taken: BTreeSet<usize> = i_tilde.iter().chain(j_set).copied().collect();
    let rest: Vec<usize> = (0..n).filter(|i| !taken.contains(i)).collect();
    let segments: [(std::ops::Range<usize>, Vec<usize>); 3] =
        [(0..k, i_tilde.to_vec()), (k..d, j_set.to_vec()), (d..n, rest)];
    let mut chi = vec![usize::MAX; n];
    for (range, targets) in segments {
        let targets: BTreeSet<usize> = targets.into_iter().collect();
        let mut free_pos = Vec::new();
        let mut free_tgt: BTreeSet<usize> = targets.clone();
        for p in range {
            if targets.contains(&p) {
                chi[p] = p;
                free_tgt.remove(&p);
            } else {
                free_pos.push(p);
            }
        }
        for (p, t) in free_pos.into_iter().zip(free_tgt) {
            chi[p] = t;
        }
    }
    chi
}

pub fn invert_permutation(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

/// Chart of cone `cone_id` with the canonical choices.
pub fn build_chart(cf: &CalibratedFan, cone_id: usize) -> Result<Chart, ChartError> {
    build_chart_with(cf, cone_id, &ChartChoice::default())
}

pub fn build_chart_with(cf: &CalibratedFan, cone_id: usize, choice: &ChartChoice) -> Result<Chart, ChartError> {
    let cal = &cf.cal;
    let d = cal.d();
    let n = cal.n();
    let i_set: Vec<usize> = cf.fan.cone(cone_id).rays.iter().copied().collect();
    let k = rank_of(d, &cal.columns(&i_set));
    let i_tilde = match &choice.i_tilde {
        None => choose_basis_subfamily(cal, &i_set),
        Some(t) => {
            let mut t = t.clone();
            t.sort_unstable();
            t.dedup();
            if t.len() != k || t.iter().any(|i| !i_set.contains(i)) || rank_of(d, &cal.columns(&t)) != k {
                return Err(ChartError::InvalidChoice(format!("{:?} is not a basis subfamily of {:?}", t, i_set)));
            }
            t
        }
    };
    let j_set = match &choice.completion {
        None => choose_completion(cal, cone_id, &i_set, &i_tilde)?,
        Some(j) => {
            let mut j = j.clone();
            j.sort_unstable();
            j.dedup();
            let mut all = i_tilde.clone();
            all.extend(&j);
            if j.len() != d - k
                || j.iter().any(|x| i_set.contains(x) || cal.is_virtual(*x) || *x >= n)
                || rank_of(d, &cal.columns(&all)) != d
            {
                return Err(ChartError::InvalidChoice(format!("{:?} is not a completion of cone {}", j, cone_id)));
            }
            j
        }
    };
    assemble(cal, cone_id, i_set, i_tilde, j_set)
}

/// Chart data for rays `i_set` with the given basis subfamily and completion.
pub(crate) fn assemble(cal: &Calibration, cone_id: usize, i_set: Vec<usize>, i_tilde: Vec<usize>, j_set: Vec<usize>) -> Result<Chart, ChartError> {
    let d = cal.d();
    let n = cal.n();
    let chi = chi_permutation(n, d, &i_tilde, &j_set);
    let labels: Vec<usize> = i_set.iter().chain(&j_set).copied().collect();
    let p = labels.len();
    let h = cal.matrix().clone();
    let h_bar = h.select_columns(&labels);
    let psi = h.select_columns(&chi[..d]);
    let mut emb = ScalarMatrix::zeros(p, d);
    for m in 0..d {
        let pos = labels.iter().position(|&l| l == chi[m]).expect("χ(m) is a label for m < d");
        emb.set(pos, m, Scalar::one());
    }
    let p_chi = IntMatrix::permutation(&chi);
    let h_p = h.select_columns(&chi);
    let phi = emb.mul(&psi.solve_matrix(&h_p)?)?;
    let ker_basis = h_bar.kernel_basis();
    Ok(Chart {
        cone_id,
        i_set,
        multiplicative: j_set.clone(),
        j_set,
        i_tilde,
        chi,
        labels,
        h_bar,
        psi,
        emb,
        phi,
        ker_basis,
        xi: cal.xi_lattice(),
        p_chi,
        h,
    })
}

/// Charts of every cone of the fan, indexed by cone id.
pub fn build_atlas(cf: &CalibratedFan) -> Result<Vec<Chart>, ChartError> {
    (0..cf.fan.len()).map(|id| build_chart(cf, id)).collect()
}

impl Chart {
    pub fn dim(&self) -> usize {
        self.i_tilde.len()
    }

    pub fn d(&self) -> usize {
        self.h.rows()
    }

    pub fn n(&self) -> usize {
        self.h.cols()
    }

    pub fn num_coords(&self) -> usize {
        self.labels.len()
    }

    pub fn calibration_matrix(&self) -> &ScalarMatrix {
        &self.h
    }

    pub fn label_position(&self, label: usize) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// `h · P_χ`.
    pub fn h_p_chi(&self) -> ScalarMatrix {
        self.h.select_columns(&self.chi)
    }

    /// `h̄_σ · φ = h · P_χ`, exactly.
    pub fn verify_invariant(&self) -> bool {
        self.h_bar.mul(&self.phi).is_ok_and(|m| m == self.h_p_chi())
    }

    /// Whether `v` (chart coordinates) lies in `ker h̄_σ`.
    pub fn in_kernel(&self, v: &[Scalar]) -> bool {
        self.h_bar.mul_vec(v).is_ok_and(|w| w.iter().all(Scalar::is_zero))
    }

    /// `emb · ψ⁻¹ · v` for `v ∈ C^d`: the chart vector over `Ĩ ∪ J` mapping to `v`.
    pub fn lift(&self, v: &[Scalar]) -> Result<ScalarVector, ChartError> {
        Ok(self.emb.mul_vec(&self.psi.solve(v)?)?)
    }

    /// The simplicial reduction: no kernel, `h̄_σ` invertible, `φ = h̄_σ⁻¹ h P_χ`
    /// and the first `d` columns of `φ` form a permutation matrix.
    pub fn matches_standard_presentation(&self) -> bool {
        if !self.ker_basis.is_empty() || self.h_bar.rows() != self.h_bar.cols() {
            return false;
        }
        let Ok(inv) = self.h_bar.inverse() else { return false };
        if inv.mul(&self.h_p_chi()).ok().as_ref() != Some(&self.phi) {
            return false;
        }
        let d = self.d();
        let first = self.phi.select_columns(&(0..d).collect::<Vec<_>>());
        first.to_int().is_some_and(|m| {
            (0..d).all(|c| {
                let col = m.col(c);
                col.iter().filter(|x| **x == BigInt::from(1)).count() == 1 && col.iter().filter(|x| **x != BigInt::from(0)).count() == 1
            }) && m.is_unimodular()
        })
    }
}

/// Matrix-level form of the choice-independence lemma: for each lattice
/// generator `e_m`, `φ e_m − φ′ P_χ′⁻¹ P_χ e_m ∈ ker h̄_σ`. Both charts must
/// present the same cone with the same completion.
pub fn verify_choice_independence(a: &Chart, b: &Chart) -> Result<bool, ChartError> {
    if a.cone_id != b.cone_id || a.i_set != b.i_set {
        return Err(ChartError::DifferentCones(a.cone_id, b.cone_id));
    }
    if a.j_set != b.j_set {
        return Err(ChartError::DifferentCompletions(a.cone_id));
    }
    let b_inv = invert_permutation(&b.chi);
    let ker = if a.ker_basis.is_empty() {
        None
    } else {
        Some(ScalarMatrix::from_columns(a.num_coords(), &a.ker_basis)?)
    };
    for m in 0..a.n() {
        let target = b_inv[a.chi[m]];
        let diff: ScalarVector = a.phi.col(m).iter().zip(b.phi.col(target)).map(|(x, y)| x - y).collect();
        let ok = match &ker {
            None => diff.iter().all(Scalar::is_zero),
            Some(kb) => kb.spans(&diff),
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The 6-tuple of a presented calibrated quantum torus at matrix level:
/// `L φ = h H`, `H e_i = e_{s(i)}` on virtual indices, and `H` maps
/// non-virtual indices into the non-virtual span.
#[derive(Clone, Debug)]
pub struct PresentedTorus {
    pub h: ScalarMatrix,
    pub virtual_set: BTreeSet<usize>,
    pub phi_cal: ScalarMatrix,
    pub virtual_image: BTreeSet<usize>,
    pub l: ScalarMatrix,
    pub big_h: IntMatrix,
    /// `(i, s(i))` for `i` in `virtual_image`
    pub s: Vec<(usize, usize)>,
}

impl PresentedTorus {
    pub fn verify(&self) -> Result<(), ChartError> {
        let lhs = self.l.mul(&self.phi_cal)?;
        let rhs = self.h.mul(&self.big_h.to_scalar())?;
        if lhs != rhs {
            return Err(ChartError::DiagramFailure("L·φ ≠ h·H".into()));
        }
        if !self.big_h.is_unimodular() {
            return Err(ChartError::DiagramFailure("H is not unimodular".into()));
        }
        let n = self.big_h.rows();
        let images: BTreeSet<usize> = self.s.iter().map(|&(_, t)| t).collect();
        if images != self.virtual_set || self.s.len() != self.virtual_image.len() {
            return Err(ChartError::DiagramFailure("s is not a bijection onto the virtual set".into()));
        }
        for &(i, t) in &self.s {
            let col = self.big_h.col(i);
            if (0..n).any(|r| col[r] != BigInt::from((r == t) as i64)) {
                return Err(ChartError::DiagramFailure(format!("H(e_{}) ≠ e_{}", i, t)));
            }
        }
        for i in (0..self.big_h.cols()).filter(|i| !self.virtual_image.contains(i)) {
            let col = self.big_h.col(i);
            if self.virtual_set.iter().any(|&r| col[r] != BigInt::from(0)) {
                return Err(ChartError::DiagramFailure(format!("H(e_{}) leaves the non-virtual span", i)));
            }
        }
        Ok(())
    }
}

/// The presented torus of a chart: `L = h̄_σ`, `H = P_χ`, `𝓘′ = χ⁻¹(𝓘)`,
/// `s = χ` restricted to `𝓘′`; both identities are verified.
pub fn torus_presentation(cf: &CalibratedFan, chart: &Chart) -> Result<PresentedTorus, ChartError> {
    let inv = invert_permutation(&chart.chi);
    let virtual_set = cf.cal.virtual_set().clone();
    let virtual_image: BTreeSet<usize> = virtual_set.iter().map(|&i| inv[i]).collect();
    let s = virtual_image.iter().map(|&i| (i, chart.chi[i])).collect();
    let t = PresentedTorus {
        h: chart.h.clone(),
        virtual_set,
        phi_cal: chart.phi.clone(),
        virtual_image,
        l: chart.h_bar.clone(),
        big_h: chart.p_chi.clone(),
        s,
    };
    t.verify()?;
    Ok(t)
}

/// Image-group data of a chart once the calibration is forgotten:
/// generators of `h̄_σ⁻¹(Γ) = φ(Z^N) + ker h̄_σ`, with the lattice part taken
/// modulo `Ξ`, and the band rank `rk Ξ`.
#[derive(Clone, Debug)]
pub struct NonCalChart {
    pub cone_id: usize,
    pub lattice_generators: Vec<ScalarVector>,
    pub kernel: Vec<ScalarVector>,
    pub band_rank: usize,
}

pub fn forget_calibration(chart: &Chart) -> Result<NonCalChart, ChartError> {
    let n = chart.n();
    // ker φ = P_χ⁻¹ Ξ, a saturated sublattice; complete it to a basis of Z^N
    let rows: Vec<Vec<BigInt>> = chart
        .xi
        .basis
        .iter()
        .map(|x| (0..n).map(|m| x[chart.chi[m]].clone()).collect())
        .collect();
    let r = rows.len();
    let complement: Vec<Vec<BigInt>> = if r == 0 {
        IntMatrix::identity(n).to_rows()
    } else {
        let x = IntMatrix::from_big_rows(rows, n);
        let (_, _, v) = x.snf();
        let v_inv = v
            .to_scalar()
            .inverse()?
            .to_int()
            .expect("inverse of a unimodular matrix is integral");
        (r..n).map(|i| v_inv.row(i)).collect()
    };
    let lattice_generators = complement
        .iter()
        .map(|c| {
            let cs: ScalarVector = c.iter().cloned().map(Scalar::from_bigint).collect();
            chart.phi.mul_vec(&cs)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(NonCalChart {
        cone_id: chart.cone_id,
        lattice_generators,
        kernel: chart.ker_basis.clone(),
        band_rank: chart.xi.rank,
    })
}

#[cfg(test)]
mod tests;

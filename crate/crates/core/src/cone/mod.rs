//! Polyhedral cones over Q(α): dual description, extreme rays, faces.

mod dd;
mod vector;

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

pub use vector::{add_vectors, is_zero_vector, neg_vector, normalize_ray, positively_proportional, primitive, proportional, scale_vector};

use crate::linalg::{dot, rank_of, LinalgError, ScalarMatrix, ScalarVector};
use crate::scalar::{Scalar, ScalarError, ScalarField, Sign};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ConeError {
    #[error("generator {0} is the zero vector")]
    ZeroGenerator(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("cone is not strongly convex")]
    NotStronglyConvex,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Face of a cone, given by the generators lying on it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Face {
    pub dim: usize,
    pub generators: BTreeSet<usize>,
}

#[derive(Debug, Clone)]
struct ConeData {
    /// generator indices forming a basis of the linear span
    span_basis: Vec<usize>,
    /// inner facet normals in R^d, sorted by tight set
    facets: Vec<ScalarVector>,
    facet_tight: Vec<BTreeSet<usize>>,
    /// basis of the orthogonal complement of the span
    equations: Vec<ScalarVector>,
    strongly_convex: bool,
}

/// Cone generated by finitely many nonzero vectors of R^d.
#[derive(Clone)]
pub struct Cone {
    field: ScalarField,
    dim: usize,
    generators: Vec<ScalarVector>,
    data: OnceLock<ConeData>,
}

impl Cone {
    pub fn new(field: &ScalarField, dim: usize, generators: Vec<ScalarVector>) -> Result<Self, ConeError> {
        for (i, g) in generators.iter().enumerate() {
            if g.len() != dim {
                return Err(ConeError::DimensionMismatch(format!(
                    "generator {} has length {}, expected {}",
                    i,
                    g.len(),
                    dim
                )));
            }
            if is_zero_vector(g) {
                return Err(ConeError::ZeroGenerator(i));
            }
        }
        Ok(Cone {
            field: field.clone(),
            dim,
            generators,
            data: OnceLock::new(),
        })
    }

    /// The cone `{0}`.
    pub fn zero(field: &ScalarField, dim: usize) -> Self {
        Cone::new(field, dim, Vec::new()).expect("no generators")
    }

    pub fn from_int(field: &ScalarField, dim: usize, generators: &[Vec<i64>]) -> Result<Self, ConeError> {
        Cone::new(field, dim, generators.iter().map(|g| crate::linalg::int_vector(g)).collect())
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[ScalarVector] {
        &self.generators
    }

    fn data(&self) -> Result<&ConeData, ConeError> {
        if let Some(d) = self.data.get() {
            return Ok(d);
        }
        let d = self.compute()?;
        // a concurrent writer computed the same value
        let _ = self.data.set(d);
        Ok(self.data.get().expect("just set"))
    }

    fn compute(&self) -> Result<ConeData, ConeError> {
        let f = &self.field;
        let mut span_basis = Vec::new();
        let mut basis_vecs: Vec<ScalarVector> = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            let mut trial = basis_vecs.clone();
            trial.push(g.clone());
            if rank_of(self.dim, &trial) == trial.len() {
                basis_vecs = trial;
                span_basis.push(i);
            }
        }
        let k = span_basis.len();
        let equations = if self.generators.is_empty() {
            (0..self.dim).map(|i| crate::linalg::unit_vector(self.dim, i)).collect()
        } else {
            let g = ScalarMatrix::from_rows(self.generators.clone())?;
            g.kernel_basis()
                .into_iter()
                .map(|v| normalize_ray(f, &v))
                .collect::<Result<Vec<_>, _>>()?
        };
        if k == 0 {
            return Ok(ConeData {
                span_basis,
                facets: Vec::new(),
                facet_tight: Vec::new(),
                equations,
                strongly_convex: true,
            });
        }
        let b = ScalarMatrix::from_columns(self.dim, &basis_vecs)?;
        let coords: Vec<ScalarVector> = self
            .generators
            .iter()
            .map(|g| b.solve(g))
            .collect::<Result<_, _>>()?;
        let dual_rays = dd::extreme_rays(f, k, &coords)?;
        let bt = b.transpose();
        let mut facets: Vec<(BTreeSet<usize>, ScalarVector)> = Vec::new();
        for y in &dual_rays {
            let n = normalize_ray(f, &bt.solve(y)?)?;
            let tight = self.tight_set(&n);
            facets.push((tight, n));
        }
        facets.sort_by(|a, b| a.0.cmp(&b.0));
        let normals_span: Vec<ScalarVector> = dual_rays;
        let strongly_convex = rank_of(k, &normals_span) == k;
        let (facet_tight, facets) = facets.into_iter().unzip();
        Ok(ConeData {
            span_basis,
            facets,
            facet_tight,
            equations,
            strongly_convex,
        })
    }

    fn tight_set(&self, n: &[Scalar]) -> BTreeSet<usize> {
        self.generators
            .iter()
            .enumerate()
            .filter(|(_, g)| dot(n, g).is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    /// Dimension of the linear span.
    pub fn dimension(&self) -> Result<usize, ConeError> {
        Ok(self.data()?.span_basis.len())
    }

    pub fn is_full_dimensional(&self) -> Result<bool, ConeError> {
        Ok(self.dimension()? == self.dim)
    }

    /// Irredundant facet normals `n` (inequalities `⟨n, x⟩ ≥ 0`), sorted by the
    /// set of generators they vanish on.
    pub fn facets(&self) -> Result<&[ScalarVector], ConeError> {
        Ok(&self.data()?.facets)
    }

    /// Generators on each facet, aligned with [`Cone::facets`].
    pub fn facet_generator_sets(&self) -> Result<&[BTreeSet<usize>], ConeError> {
        Ok(&self.data()?.facet_tight)
    }

    /// Basis of the orthogonal complement of the linear span.
    pub fn equations(&self) -> Result<&[ScalarVector], ConeError> {
        Ok(&self.data()?.equations)
    }

    /// Full inequality description: facet normals followed by each equation
    /// as an opposite pair.
    pub fn dual_description(&self) -> Result<Vec<ScalarVector>, ConeError> {
        let d = self.data()?;
        let mut out = d.facets.clone();
        for e in &d.equations {
            out.push(e.clone());
            out.push(neg_vector(e));
        }
        Ok(out)
    }

    /// Generators of the dual cone `{y : ⟨y, x⟩ ≥ 0 for x in the cone}`.
    pub fn dual(&self) -> Result<Cone, ConeError> {
        Cone::new(&self.field, self.dim, self.dual_description()?)
    }

    pub fn is_strongly_convex(&self) -> Result<bool, ConeError> {
        Ok(self.data()?.strongly_convex)
    }

    fn require_strongly_convex(&self) -> Result<&ConeData, ConeError> {
        let d = self.data()?;
        if !d.strongly_convex {
            return Err(ConeError::NotStronglyConvex);
        }
        Ok(d)
    }

    /// `⟨n, x⟩ ≥ 0` for all facets and `x` in the span.
    pub fn contains(&self, x: &[Scalar]) -> Result<bool, ConeError> {
        if x.len() != self.dim {
            return Err(ConeError::DimensionMismatch("point length".into()));
        }
        let d = self.data()?;
        if d.equations.iter().any(|e| !dot(e, x).is_zero()) {
            return Ok(false);
        }
        for n in &d.facets {
            if self.field.sign(&dot(n, x))? == Sign::Negative {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `x` lies in the relative interior.
    pub fn contains_relative_interior(&self, x: &[Scalar]) -> Result<bool, ConeError> {
        if !self.contains(x)? {
            return Ok(false);
        }
        for n in &self.data()?.facets {
            if self.field.sign(&dot(n, x))? != Sign::Positive {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn contains_cone(&self, other: &Cone) -> Result<bool, ConeError> {
        for g in &other.generators {
            if !self.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Set equality.
    pub fn same_as(&self, other: &Cone) -> Result<bool, ConeError> {
        Ok(self.dim == other.dim && self.contains_cone(other)? && other.contains_cone(self)?)
    }

    /// Indices of generators spanning distinct extreme rays; among positive
    /// multiples of one ray the lowest index is kept.
    pub fn extreme_rays(&self) -> Result<Vec<usize>, ConeError> {
        let d = self.require_strongly_convex()?;
        let k = d.span_basis.len();
        let mut out: Vec<usize> = Vec::new();
        'gens: for (i, g) in self.generators.iter().enumerate() {
            for &j in &out {
                if positively_proportional(&self.field, g, &self.generators[j])? {
                    continue 'gens;
                }
            }
            let tight: Vec<ScalarVector> = d
                .facets
                .iter()
                .filter(|n| dot(n, g).is_zero())
                .cloned()
                .collect();
            if rank_of(self.dim, &tight) + 1 == k {
                // a generator could duplicate a later-listed extreme ray only
                // if an earlier index was already kept, handled above
                out.push(i);
            }
        }
        Ok(out)
    }

    pub fn extreme_ray_vectors(&self) -> Result<Vec<ScalarVector>, ConeError> {
        Ok(self
            .extreme_rays()?
            .into_iter()
            .map(|i| self.generators[i].clone())
            .collect())
    }

    /// All faces, including `{0}` and the cone itself, sorted by dimension
    /// then generator set.
    pub fn faces(&self) -> Result<Vec<Face>, ConeError> {
        let d = self.require_strongly_convex()?;
        let all: BTreeSet<usize> = (0..self.generators.len()).collect();
        let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        let mut queue = VecDeque::from([all]);
        while let Some(f) = queue.pop_front() {
            if !seen.insert(f.clone()) {
                continue;
            }
            for t in &d.facet_tight {
                let g: BTreeSet<usize> = f.intersection(t).copied().collect();
                if !seen.contains(&g) {
                    queue.push_back(g);
                }
            }
        }
        let mut faces: Vec<Face> = seen
            .into_iter()
            .map(|s| {
                let vecs: Vec<ScalarVector> = s.iter().map(|&i| self.generators[i].clone()).collect();
                Face {
                    dim: rank_of(self.dim, &vecs),
                    generators: s,
                }
            })
            .collect();
        faces.sort();
        Ok(faces)
    }

    /// The face spanned by the given generator subset.
    pub fn face_cone(&self, generators: &BTreeSet<usize>) -> Cone {
        Cone::new(
            &self.field,
            self.dim,
            generators.iter().map(|&i| self.generators[i].clone()).collect(),
        )
        .expect("generators of a valid cone")
    }

    /// Whether `self` is a face of `sigma`.
    pub fn is_face_of(&self, sigma: &Cone) -> Result<bool, ConeError> {
        if self.dim != sigma.dim {
            return Err(ConeError::DimensionMismatch("ambient dimensions differ".into()));
        }
        if !sigma.contains_cone(self)? {
            return Ok(false);
        }
        let d = sigma.data()?;
        let tight: Vec<&ScalarVector> = d
            .facets
            .iter()
            .filter(|n| self.generators.iter().all(|g| dot(n, g).is_zero()))
            .collect();
        for g in &sigma.generators {
            if tight.iter().all(|n| dot(n, g).is_zero()) && !self.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The intersection, generated by its extreme rays (or by a generating
    /// set when it is not strongly convex).
    pub fn intersect(&self, other: &Cone) -> Result<Cone, ConeError> {
        if self.dim != other.dim {
            return Err(ConeError::DimensionMismatch("ambient dimensions differ".into()));
        }
        let mut gens = self.dual_description()?;
        gens.extend(other.dual_description()?);
        let dual_sum = Cone::new(&self.field, self.dim, gens)?;
        dual_sum.dual()?.simplified()
    }

    /// Same cone with normalized, deduplicated generators: the extreme rays
    /// when strongly convex.
    pub fn simplified(&self) -> Result<Cone, ConeError> {
        let mut gens: Vec<ScalarVector> = Vec::new();
        let source = if self.is_strongly_convex()? {
            self.extreme_ray_vectors()?
        } else {
            self.generators.clone()
        };
        for g in source {
            let n = normalize_ray(&self.field, &g)?;
            if !gens.contains(&n) {
                gens.push(n);
            }
        }
        gens.sort_by(|a, b| format!("{:?}", a).cmp(&format!("{:?}", b)));
        Cone::new(&self.field, self.dim, gens)
    }

    /// Extreme rays linearly independent.
    pub fn is_simplicial(&self) -> Result<bool, ConeError> {
        let rays = self.extreme_ray_vectors()?;
        Ok(rank_of(self.dim, &rays) == rays.len())
    }

    /// Sum of the generators, a relative interior point.
    pub fn interior_point(&self) -> ScalarVector {
        self.generators
            .iter()
            .fold(vec![Scalar::zero(); self.dim], |acc, g| add_vectors(&acc, g))
    }

    /// `(f_0, …, f_k)`: number of faces of each dimension.
    pub fn f_vector(&self) -> Result<Vec<usize>, ConeError> {
        let faces = self.faces()?;
        let k = self.dimension()?;
        let mut f = vec![0; k + 1];
        for face in faces {
            f[face.dim] += 1;
        }
        Ok(f)
    }
}

impl fmt::Debug for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cone{:?}", self.generators)
    }
}

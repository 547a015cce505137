//! Posture datasets, PCA synergy fitting, synergy matrices and the
//! orthogonal-projection approximation of postures.
//!
//! A [`SynergyModel`] is the full eigen-decomposition of a posture dataset's
//! sample covariance. Truncating it to the leading `n_s` eigenvectors gives a
//! [`SynergyMatrix`] `S`, which approximates a posture by projecting it onto
//! the span of `S` (around the dataset mean in [`Centering::Centered`] mode).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::dataio;
use crate::error::{check_len, Error, Result};

/// Eigenvalues down to this (negative) value are rounding noise and get clamped to 0.
pub const EIGENVALUE_CLAMP: f64 = 1e-12;

/// Iteration cap handed to the symmetric eigensolver.
pub const MAX_EIGEN_ITERATIONS: usize = 10_000;

/// `n × d` matrix of joint angles, one posture per row.
#[derive(Debug, Clone, PartialEq)]
pub struct PostureSequence {
    data: DMatrix<f64>,
    joint_names: Vec<String>,
    provenance: String,
}

impl PostureSequence {
    pub fn new(data: DMatrix<f64>, joint_names: Vec<String>, provenance: impl Into<String>) -> Result<Self> {
        check_len(data.ncols(), joint_names.len())?;
        Ok(PostureSequence {
            data,
            joint_names,
            provenance: provenance.into(),
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], joint_names: Vec<String>, provenance: impl Into<String>) -> Result<Self> {
        let d = joint_names.len();
        for row in rows {
            check_len(d, row.len())?;
        }
        let data = DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]);
        Self::new(data, joint_names, provenance)
    }

    /// Row-wise concatenation; every part must share the same joint names.
    pub fn concat(parts: &[PostureSequence], provenance: impl Into<String>) -> Result<Self> {
        let first = parts.first().ok_or(Error::TooFewSamples(0))?;
        let d = first.ncols();
        for p in parts {
            check_len(d, p.ncols())?;
            if p.joint_names != first.joint_names {
                return Err(Error::Schema("joint names differ between sequences".into()));
            }
        }
        let n: usize = parts.iter().map(|p| p.nrows()).sum();
        let mut data = DMatrix::zeros(n, d);
        let mut r = 0;
        for p in parts {
            data.rows_mut(r, p.nrows()).copy_from(&p.data);
            r += p.nrows();
        }
        Self::new(data, first.joint_names.clone(), provenance)
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn joint_names(&self) -> &[String] {
        &self.joint_names
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.ncols()
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.data.row(i).iter().copied().collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.nrows()).map(|i| self.row(i))
    }

    /// Rows `start..end` as a new sequence.
    pub fn slice_rows(&self, start: usize, end: usize) -> Result<Self> {
        if start > end || end > self.nrows() {
            return Err(Error::IndexOutOfBounds {
                index: end,
                width: self.nrows(),
            });
        }
        Self::new(
            self.data.rows(start, end - start).into_owned(),
            self.joint_names.clone(),
            self.provenance.clone(),
        )
    }

    /// Selected columns, in subset order.
    pub fn extract_subvector(&self, subset: &JointSubset) -> Result<Self> {
        subset.check_within(self.ncols())?;
        let data = self.data.select_columns(subset.indices());
        let names = subset.indices().iter().map(|&i| self.joint_names[i].clone()).collect();
        Self::new(data, names, self.provenance.clone())
    }

    /// Columns picked by joint name, e.g. to retarget a wider glove recording.
    pub fn select_columns<S: AsRef<str>>(&self, names: &[S]) -> Result<Self> {
        let mut cols = Vec::with_capacity(names.len());
        for name in names {
            let name = name.as_ref();
            let idx = self
                .joint_names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::UnknownJoint(name.to_string()))?;
            cols.push(idx);
        }
        let data = self.data.select_columns(&cols);
        Self::new(
            data,
            names.iter().map(|n| n.as_ref().to_string()).collect(),
            self.provenance.clone(),
        )
    }

    fn check_finite(&self) -> Result<()> {
        for j in 0..self.ncols() {
            for i in 0..self.nrows() {
                if !self.data[(i, j)].is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(())
    }
}

/// Ordered, strictly increasing joint indices `s_1 < ... < s_f`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct JointSubset(Vec<usize>);

impl JointSubset {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() || indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSubset);
        }
        Ok(JointSubset(indices))
    }

    pub fn full(d: usize) -> Self {
        assert!(d > 0, "full subset of zero joints");
        JointSubset((0..d).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.binary_search(&index).is_ok()
    }

    pub fn check_within(&self, width: usize) -> Result<()> {
        match self.0.last() {
            Some(&last) if last >= width => Err(Error::IndexOutOfBounds { index: last, width }),
            _ => Ok(()),
        }
    }

    /// Indices of `0..width` not in the subset.
    pub fn complement(&self, width: usize) -> Vec<usize> {
        (0..width).filter(|i| !self.contains(*i)).collect()
    }

    pub fn gather(&self, full: &[f64]) -> Result<DVector<f64>> {
        self.check_within(full.len())?;
        Ok(DVector::from_iterator(self.len(), self.0.iter().map(|&i| full[i])))
    }
}

impl TryFrom<Vec<usize>> for JointSubset {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        JointSubset::new(v)
    }
}

impl From<JointSubset> for Vec<usize> {
    fn from(s: JointSubset) -> Self {
        s.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Centering {
    /// Project deviations from the dataset mean.
    #[default]
    Centered,
    /// Project raw postures through the origin.
    Uncentered,
}

impl fmt::Display for Centering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Centering::Centered => "centered",
            Centering::Uncentered => "uncentered",
        })
    }
}

impl FromStr for Centering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "centered" => Ok(Centering::Centered),
            "uncentered" => Ok(Centering::Uncentered),
            other => Err(Error::Schema(format!("unknown centering {other:?}"))),
        }
    }
}

/// Eigen-decomposition of a posture dataset's covariance over a joint subset.
#[derive(Debug, Clone, PartialEq)]
pub struct SynergyModel {
    subset: JointSubset,
    joint_names: Vec<String>,
    mean: DVector<f64>,
    eigenvectors: DMatrix<f64>,
    eigenvalues: DVector<f64>,
    centering: Centering,
    source_hash: String,
}

impl SynergyModel {
    /// Reassembles a model from stored parts, re-checking every invariant.
    ///
    /// `orthonormal_tol` bounds `|VᵀV − I|` element-wise.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        subset: JointSubset,
        joint_names: Vec<String>,
        mean: DVector<f64>,
        eigenvectors: DMatrix<f64>,
        eigenvalues: DVector<f64>,
        centering: Centering,
        source_hash: String,
        orthonormal_tol: f64,
    ) -> Result<Self> {
        let f = subset.len();
        check_len(f, joint_names.len())?;
        check_len(f, mean.len())?;
        check_len(f, eigenvalues.len())?;
        check_len(f, eigenvectors.nrows())?;
        check_len(f, eigenvectors.ncols())?;
        if mean
            .iter()
            .chain(eigenvectors.iter())
            .chain(eigenvalues.iter())
            .any(|v| !v.is_finite())
        {
            return Err(Error::Schema("non-finite value in synergy".into()));
        }
        if let Some(&neg) = eigenvalues.iter().find(|v| **v < 0.0) {
            return Err(Error::NegativeEigenvalue(neg));
        }
        if eigenvalues.as_slice().windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Schema("eigenvalues not sorted descending".into()));
        }
        if centering == Centering::Uncentered && mean.iter().any(|v| *v != 0.0) {
            return Err(Error::Schema("uncentered synergy must have a zero mean".into()));
        }
        let dev = orthonormality_error(&eigenvectors);
        if dev > orthonormal_tol {
            return Err(Error::NotOrthonormal(dev));
        }
        Ok(SynergyModel {
            subset,
            joint_names,
            mean,
            eigenvectors,
            eigenvalues,
            centering,
            source_hash,
        })
    }

    /// Records which joints of a wider hand this model was fitted on.
    pub fn with_subset(mut self, subset: JointSubset) -> Result<Self> {
        check_len(self.subset.len(), subset.len())?;
        self.subset = subset;
        Ok(self)
    }

    pub fn subset(&self) -> &JointSubset {
        &self.subset
    }

    pub fn joint_names(&self) -> &[String] {
        &self.joint_names
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    /// Columns are the principal directions `a_1..a_f`.
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn centering(&self) -> Centering {
        self.centering
    }

    pub fn source_hash(&self) -> &str {
        &self.source_hash
    }

    /// Dimension `f` of the joint subspace.
    pub fn dim(&self) -> usize {
        self.subset.len()
    }

    /// The leading `n_s` principal directions.
    pub fn synergy_matrix(&self, n_s: usize) -> Result<SynergyMatrix> {
        let f = self.dim();
        if n_s == 0 || n_s > f {
            return Err(Error::ComponentsOutOfRange { n_s, f });
        }
        Ok(SynergyMatrix {
            basis: self.eigenvectors.columns(0, n_s).into_owned(),
            mean: self.mean.clone(),
            subset: self.subset.clone(),
            centering: self.centering,
        })
    }

    fn total_variance(&self) -> Result<f64> {
        let total: f64 = self.eigenvalues.iter().sum();
        if total > 0.0 {
            Ok(total)
        } else {
            Err(Error::DegenerateVariance)
        }
    }

    /// `λ_i / Σλ` for every component.
    pub fn contribution_ratios(&self) -> Result<Vec<f64>> {
        let total = self.total_variance()?;
        Ok(self.eigenvalues.iter().map(|l| l / total).collect())
    }

    /// Share of variance explained by the first `k` components.
    pub fn cumulative_contribution(&self, k: usize) -> Result<f64> {
        let total = self.total_variance()?;
        let f = self.dim();
        if k == 0 || k > f {
            return Err(Error::ComponentsOutOfRange { n_s: k, f });
        }
        let head: f64 = self.eigenvalues.iter().take(k).sum();
        Ok(head / total)
    }

    /// Smallest `k` whose cumulative contribution reaches `threshold`.
    pub fn min_components_for_ratio(&self, threshold: f64) -> Result<usize> {
        if !(threshold > 0.0 && threshold <= 1.0) {
            return Err(Error::Schema(format!("ratio threshold {threshold} outside (0, 1]")));
        }
        let f = self.dim();
        for k in 1..=f {
            if self.cumulative_contribution(k)? >= threshold {
                return Ok(k);
            }
        }
        Ok(f)
    }
}

/// Max element-wise `|VᵀV − I|`.
pub fn orthonormality_error(v: &DMatrix<f64>) -> f64 {
    let gram = v.tr_mul(v);
    let mut worst = 0.0_f64;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).abs());
        }
    }
    worst
}

/// Principal component analysis of a posture sequence.
///
/// Covariance is `MᵀM / (n − 1)` with `M` the (optionally centered) data.
/// Components are sorted by descending eigenvalue (ties keep solver order),
/// and each eigenvector is signed so its largest-magnitude entry is positive.
pub fn fit_pca(seq: &PostureSequence, centering: Centering) -> Result<SynergyModel> {
    let n = seq.nrows();
    let f = seq.ncols();
    if n < 2 {
        return Err(Error::TooFewSamples(n));
    }
    if f == 0 {
        return Err(Error::InvalidSubset);
    }
    seq.check_finite()?;

    let mean = match centering {
        Centering::Centered => DVector::from_iterator(f, seq.data.column_iter().map(|c| c.sum() / n as f64)),
        Centering::Uncentered => DVector::zeros(f),
    };
    let mut centered = seq.data.clone();
    for (j, mut col) in centered.column_iter_mut().enumerate() {
        col.add_scalar_mut(-mean[j]);
    }
    let mut cov = centered.tr_mul(&centered) / (n as f64 - 1.0);
    // exact symmetry for the solver
    let sym = (&cov + cov.transpose()) * 0.5;
    cov.copy_from(&sym);

    let eig = SymmetricEigen::try_new(cov, f64::EPSILON, MAX_EIGEN_ITERATIONS)
        .ok_or(Error::NoConvergence(MAX_EIGEN_ITERATIONS))?;

    let mut order: Vec<usize> = (0..f).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });

    let mut eigenvalues = DVector::zeros(f);
    let mut eigenvectors = DMatrix::zeros(f, f);
    for (k, &src) in order.iter().enumerate() {
        let mut lambda = eig.eigenvalues[src];
        if lambda < 0.0 {
            if lambda < -EIGENVALUE_CLAMP {
                return Err(Error::NegativeEigenvalue(lambda));
            }
            lambda = 0.0;
        }
        eigenvalues[k] = lambda;
        let col = eig.eigenvectors.column(src);
        let pivot = col
            .iter()
            .enumerate()
            .fold(
                (0usize, 0.0_f64),
                |best, (i, v)| if v.abs() > best.1 { (i, v.abs()) } else { best },
            )
            .0;
        let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
        eigenvectors.set_column(k, &(col * sign));
    }

    Ok(SynergyModel {
        subset: JointSubset::full(f),
        joint_names: seq.joint_names.clone(),
        mean,
        eigenvectors,
        eigenvalues,
        centering,
        source_hash: dataio::sequence_hash(seq),
    })
}

/// `S = [a_1 … a_{n_s}]` together with the affine origin it projects around.
#[derive(Debug, Clone, PartialEq)]
pub struct SynergyMatrix {
    basis: DMatrix<f64>,
    mean: DVector<f64>,
    subset: JointSubset,
    centering: Centering,
}

impl SynergyMatrix {
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn subset(&self) -> &JointSubset {
        &self.subset
    }

    pub fn centering(&self) -> Centering {
        self.centering
    }

    pub fn n_s(&self) -> usize {
        self.basis.ncols()
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// `S·Sᵀ`.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    /// Synergy-space coordinates `z = Sᵀ(p − mean)`.
    ///
    /// The mean is zero for uncentered models, which makes this `Sᵀp`.
    pub fn coefficients(&self, p: &[f64]) -> Result<DVector<f64>> {
        check_len(self.dim(), p.len())?;
        let dev = DVector::from_iterator(self.dim(), p.iter().zip(self.mean.iter()).map(|(a, m)| a - m));
        Ok(self.basis.tr_mul(&dev))
    }

    /// Posture `mean + S·z` for synergy coordinates `z`.
    pub fn decode(&self, z: &[f64]) -> Result<DVector<f64>> {
        check_len(self.n_s(), z.len())?;
        let z = DVector::from_column_slice(z);
        Ok(&self.mean + &self.basis * z)
    }

    /// Orthogonal projection of a subvector posture onto the synergy span.
    pub fn project(&self, p: &[f64]) -> Result<DVector<f64>> {
        let z = self.coefficients(p)?;
        self.decode(z.as_slice())
    }

    /// Row-wise [`SynergyMatrix::project`].
    pub fn approximate_sequence(&self, seq: &PostureSequence) -> Result<PostureSequence> {
        check_len(self.dim(), seq.ncols())?;
        let mut data = seq.data.clone();
        for i in 0..seq.nrows() {
            let row: Vec<f64> = seq.data.row(i).iter().copied().collect();
            let approx = self.project(&row)?;
            for (j, v) in approx.iter().enumerate() {
                data[(i, j)] = *v;
            }
        }
        PostureSequence::new(data, seq.joint_names.clone(), seq.provenance.clone())
    }
}

/// Summed squared residual between two equally shaped sequences, divided by
/// `n − 1` to match the covariance normalization.
///
/// With a centered PCA basis fitted on `original`, this equals the sum of the
/// discarded eigenvalues.
pub fn reconstruction_mse(original: &PostureSequence, approx: &PostureSequence) -> Result<f64> {
    check_len(original.nrows(), approx.nrows())?;
    check_len(original.ncols(), approx.ncols())?;
    let n = original.nrows();
    if n < 2 {
        return Err(Error::TooFewSamples(n));
    }
    let ss: f64 = original
        .data
        .iter()
        .zip(approx.data.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(ss / (n as f64 - 1.0))
}

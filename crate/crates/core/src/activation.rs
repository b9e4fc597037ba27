//! Activation families σ(x, w), activation matrices over sample sets and
//! parameter grids, the product extension onto a tagged grid, and
//! singular-value diagnostics.
//!
//! An activation matrix discretizes the feature-side linear map: applying it
//! to the weight vector of a measure on the grid yields the sample values of
//! the represented function.

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::spaces::{
    DensityVector, DiscreteMeasure, ParameterGrid, ProbabilityWeights, SampleFunction,
};
use serde::{Deserialize, Serialize};

/// A point of the evaluation set, a vector in R^d.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub coords: Vec<f64>,
}

impl SamplePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyInput("sample point coordinates"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Invalid("non-finite sample coordinate".into()));
        }
        Ok(Self { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// A grid atom w = (θ, b), optionally carrying the [0, 1] coordinate of a
/// product-extended grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterPoint {
    pub theta: Vec<f64>,
    pub bias: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tag: Option<f64>,
}

impl ParameterPoint {
    pub fn new(theta: Vec<f64>, bias: f64) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::EmptyInput("parameter direction"));
        }
        if theta.iter().any(|c| !c.is_finite()) || !bias.is_finite() {
            return Err(Error::Invalid("non-finite parameter coordinate".into()));
        }
        Ok(Self {
            theta,
            bias,
            tag: None,
        })
    }

    pub fn with_tag(mut self, tag: f64) -> Self {
        self.tag = Some(tag);
        self
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }
}

/// The scalar nonlinearity families the laboratory ships with, plus a
/// tabulated escape hatch for arbitrary σ and the product extension over a
/// tagged grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum ActivationFamily {
    Relu,
    Tanh,
    Gaussian {
        bandwidth: f64,
    },
    /// σ given directly as a dense (sample, grid-atom) value table; no
    /// pointwise evaluator exists.
    Tabulated {
        rows: usize,
        cols: usize,
        values: Vec<f64>,
    },
    /// Extension of several families onto a grid tagged with i/n; evaluating
    /// at tag i/n dispatches to the i-th part.
    Product {
        parts: Vec<ActivationFamily>,
    },
}

impl ActivationFamily {
    pub fn gaussian(bandwidth: f64) -> Result<Self> {
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(Error::Invalid(format!(
                "gaussian bandwidth must be positive, got {bandwidth}"
            )));
        }
        Ok(Self::Gaussian { bandwidth })
    }

    pub fn tabulated(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyInput("tabulated activation table"));
        }
        if values.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "tabulated table needs {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite tabulated value".into()));
        }
        Ok(Self::Tabulated { rows, cols, values })
    }

    /// Parse a tabulated family from CSV text: header row `n,m`, then n rows
    /// of m comma-separated decimals.
    pub fn tabulated_from_csv(text: &str) -> Result<Self> {
        let (rows, cols, values) = parse_matrix_csv(text)?;
        Self::tabulated(rows, cols, values)
    }
}

/// σ(x, w) for a pointwise family: relu/tanh evaluate g(x·θ − b), gaussian
/// evaluates exp(−(x·θ−b)²/bandwidth²), and product families dispatch on the
/// grid tag. Tabulated families refuse this entry point.
pub fn eval_activation(
    family: &ActivationFamily,
    x: &SamplePoint,
    w: &ParameterPoint,
) -> Result<f64> {
    if x.dim() != w.dim() {
        return Err(Error::Dimension(format!(
            "sample has dimension {}, parameter direction has dimension {}",
            x.dim(),
            w.dim()
        )));
    }
    match family {
        ActivationFamily::Relu => Ok(preactivation(x, w).max(0.0)),
        ActivationFamily::Tanh => Ok(preactivation(x, w).tanh()),
        ActivationFamily::Gaussian { bandwidth } => {
            if *bandwidth <= 0.0 || !bandwidth.is_finite() {
                return Err(Error::Invalid("gaussian bandwidth must be positive".into()));
            }
            let z = preactivation(x, w);
            Ok((-(z * z) / (bandwidth * bandwidth)).exp())
        }
        ActivationFamily::Tabulated { .. } => Err(Error::UnsupportedFamily),
        ActivationFamily::Product { parts } => {
            let idx = product_part_index(parts.len(), w)?;
            let untagged = ParameterPoint {
                theta: w.theta.clone(),
                bias: w.bias,
                tag: None,
            };
            eval_activation(&parts[idx], x, &untagged)
        }
    }
}

fn preactivation(x: &SamplePoint, w: &ParameterPoint) -> f64 {
    linalg::dot(&x.coords, &w.theta) - w.bias
}

/// Resolve the tag i/n of an extended atom to the part index i−1.
fn product_part_index(n_parts: usize, w: &ParameterPoint) -> Result<usize> {
    let tag = w
        .tag
        .ok_or_else(|| Error::Invalid("product family requires a tagged parameter point".into()))?;
    let scaled = tag * n_parts as f64;
    let i = scaled.round();
    if (scaled - i).abs() > 1e-9 || i < 1.0 || i > n_parts as f64 {
        return Err(Error::Invalid(format!(
            "tag {tag} does not address any of the {n_parts} extended parts"
        )));
    }
    Ok(i as usize - 1)
}

/// Dense matrix A with A[k][j] = σ(x_k, w_j).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ActivationMatrix {
    n: usize,
    m: usize,
    entries: Vec<f64>,
}

impl ActivationMatrix {
    pub fn new(n: usize, m: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::EmptyInput("activation matrix"));
        }
        if entries.len() != n * m {
            return Err(Error::Dimension(format!(
                "activation matrix needs {} entries, got {}",
                n * m,
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite activation entry".into()));
        }
        Ok(Self { n, m, entries })
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn entry(&self, k: usize, j: usize) -> f64 {
        self.entries[k * self.m + j]
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.entries[k * self.m..(k + 1) * self.m]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|k| self.entry(k, j)).collect()
    }

    /// Restriction to a subset of grid atoms, in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> Result<ActivationMatrix> {
        if indices.is_empty() {
            return Err(Error::EmptyInput("column selection"));
        }
        let mut entries = Vec::with_capacity(self.n * indices.len());
        for k in 0..self.n {
            for &j in indices {
                if j >= self.m {
                    return Err(Error::Dimension(format!(
                        "column index {j} out of range for {} columns",
                        self.m
                    )));
                }
                entries.push(self.entry(k, j));
            }
        }
        ActivationMatrix::new(self.n, indices.len(), entries)
    }

    /// Sample values of f = Aμ.
    pub fn apply_measure(&self, mu: &DiscreteMeasure) -> Result<SampleFunction> {
        if mu.len() != self.m {
            return Err(Error::Dimension(format!(
                "measure has {} weights, matrix has {} columns",
                mu.len(),
                self.m
            )));
        }
        let values = (0..self.n)
            .map(|k| linalg::dot(self.row(k), mu.weights()))
            .collect();
        SampleFunction::new(values)
    }

    /// Sample values of the π-weighted action (Ah)(x_k) = Σ_j π_j A[k][j] h_j.
    pub fn apply_density(
        &self,
        h: &DensityVector,
        pi: &ProbabilityWeights,
    ) -> Result<SampleFunction> {
        if h.len() != self.m || pi.len() != self.m {
            return Err(Error::Alignment(format!(
                "density/weights of lengths {}/{} against {} columns",
                h.len(),
                pi.len(),
                self.m
            )));
        }
        let values = (0..self.n)
            .map(|k| {
                self.row(k)
                    .iter()
                    .zip(h.values())
                    .zip(pi.weights())
                    .map(|((a, hj), pj)| a * hj * pj)
                    .sum()
            })
            .collect();
        SampleFunction::new(values)
    }

    /// CSV encoding: header row `n,m`, then n rows of m decimals.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{},{}\n", self.n, self.m);
        for k in 0..self.n {
            let row: Vec<String> = self.row(k).iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub(crate) fn as_mat(&self) -> Mat {
        Mat {
            rows: self.n,
            cols: self.m,
            data: self.entries.clone(),
        }
    }
}

/// Parse the repository's matrix CSV format. Returns (n, m, row-major values).
pub fn parse_matrix_csv(text: &str) -> Result<(usize, usize, Vec<f64>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or(Error::EmptyInput("csv text"))?;
    let dims: Vec<&str> = header.split(',').map(str::trim).collect();
    if dims.len() != 2 {
        return Err(Error::Invalid(format!(
            "csv header must be `n,m`, got `{header}`"
        )));
    }
    let n: usize = dims[0]
        .parse()
        .map_err(|_| Error::Invalid(format!("bad row count `{}`", dims[0])))?;
    let m: usize = dims[1]
        .parse()
        .map_err(|_| Error::Invalid(format!("bad column count `{}`", dims[1])))?;
    let mut values = Vec::with_capacity(n * m);
    for line in lines {
        for field in line.split(',') {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("bad csv value `{field}`")))?;
            values.push(v);
        }
    }
    if values.len() != n * m {
        return Err(Error::Dimension(format!(
            "csv declares {}x{} = {} values, found {}",
            n,
            m,
            n * m,
            values.len()
        )));
    }
    Ok((n, m, values))
}

/// Assemble A[k][j] = σ(x_k, w_j) over the sample set and grid. Tabulated
/// families contribute their table verbatim (the table is the definition).
pub fn assemble_matrix(
    family: &ActivationFamily,
    samples: &[SamplePoint],
    grid: &ParameterGrid,
) -> Result<ActivationMatrix> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("samples"));
    }
    if grid.size() == 0 {
        return Err(Error::EmptyInput("grid"));
    }
    let n = samples.len();
    let m = grid.size();
    match family {
        ActivationFamily::Tabulated { rows, cols, values } => {
            if *rows != n || *cols != m {
                return Err(Error::Dimension(format!(
                    "tabulated table is {rows}x{cols}, expected {n}x{m}"
                )));
            }
            ActivationMatrix::new(n, m, values.clone())
        }
        ActivationFamily::Product { parts } => {
            // Tabulated parts index their table by the atom's position within
            // its tag group, which matches the layout extend_product builds.
            let mut group_pos = vec![0usize; parts.len()];
            let mut entries = vec![0.0; n * m];
            for (j, w) in grid.atoms().iter().enumerate() {
                let part = product_part_index(parts.len(), w)?;
                let pos = group_pos[part];
                group_pos[part] += 1;
                match &parts[part] {
                    ActivationFamily::Tabulated { rows, cols, values } => {
                        if *rows != n {
                            return Err(Error::Dimension(format!(
                                "tabulated part is {rows}x{cols}, expected {n} rows"
                            )));
                        }
                        if pos >= *cols {
                            return Err(Error::Dimension(format!(
                                "tabulated part has {cols} columns, tag group needs more"
                            )));
                        }
                        for (k, row) in values.chunks(*cols).enumerate() {
                            entries[k * m + j] = row[pos];
                        }
                    }
                    other => {
                        let untagged = ParameterPoint {
                            theta: w.theta.clone(),
                            bias: w.bias,
                            tag: None,
                        };
                        for (k, x) in samples.iter().enumerate() {
                            entries[k * m + j] = eval_activation(other, x, &untagged)?;
                        }
                    }
                }
            }
            ActivationMatrix::new(n, m, entries)
        }
        _ => {
            let mut entries = Vec::with_capacity(n * m);
            for x in samples {
                for w in grid.atoms() {
                    entries.push(eval_activation(family, x, w)?);
                }
            }
            ActivationMatrix::new(n, m, entries)
        }
    }
}

/// Extend n families over a shared untagged grid onto the tagged grid
/// {(w, i/n)}: the extended family evaluates as σ(x, (w, i/n)) = σ_i(x, w).
/// Atoms are ordered by part, so assembling the extended matrix yields the
/// column-concatenation of the per-family matrices.
pub fn extend_product(
    families: &[ActivationFamily],
    grid: &ParameterGrid,
) -> Result<(ActivationFamily, ParameterGrid)> {
    if families.is_empty() {
        return Err(Error::EmptyInput("families"));
    }
    if grid.atoms().iter().any(|w| w.tag.is_some()) {
        return Err(Error::Invalid("grid is already tagged".into()));
    }
    if families
        .iter()
        .any(|f| matches!(f, ActivationFamily::Product { .. }))
    {
        return Err(Error::Invalid("cannot nest product extensions".into()));
    }
    let n = families.len();
    let mut atoms = Vec::with_capacity(n * grid.size());
    for i in 1..=n {
        let tag = i as f64 / n as f64;
        for w in grid.atoms() {
            atoms.push(w.clone().with_tag(tag));
        }
    }
    let extended = ActivationFamily::Product {
        parts: families.to_vec(),
    };
    Ok((extended, ParameterGrid::new(atoms)?))
}

/// Nonincreasing, nonnegative singular values of A, of length min(n, m);
/// a finite-dimensional decay diagnostic for the feature-side operator.
pub fn spectrum(a: &ActivationMatrix) -> Vec<f64> {
    linalg::singular_values(&a.as_mat())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(coords: &[f64]) -> SamplePoint {
        SamplePoint::new(coords.to_vec()).unwrap()
    }

    fn pp(theta: &[f64], bias: f64) -> ParameterPoint {
        ParameterPoint::new(theta.to_vec(), bias).unwrap()
    }

    #[test]
    fn relu_eval_matches_hand_values() {
        let x = sp(&[1.0]);
        assert_eq!(
            eval_activation(&ActivationFamily::Relu, &x, &pp(&[2.0], 1.0)).unwrap(),
            1.0
        );
        assert_eq!(
            eval_activation(&ActivationFamily::Relu, &x, &pp(&[-1.0], 0.0)).unwrap(),
            0.0
        );
    }

    #[test]
    fn tanh_at_zero_preactivation_is_zero() {
        let x = sp(&[0.0]);
        assert_eq!(
            eval_activation(&ActivationFamily::Tanh, &x, &pp(&[3.0], 0.0)).unwrap(),
            0.0
        );
    }

    #[test]
    fn gaussian_eval_uses_bandwidth() {
        let fam = ActivationFamily::gaussian(2.0).unwrap();
        let v = eval_activation(&fam, &sp(&[1.0]), &pp(&[1.0], 0.0)).unwrap();
        assert!((v - (-0.25f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let e = eval_activation(&ActivationFamily::Relu, &sp(&[1.0, 2.0]), &pp(&[1.0], 0.0));
        assert!(matches!(e, Err(Error::Dimension(_))));
    }

    #[test]
    fn tabulated_refuses_pointwise_eval() {
        let fam = ActivationFamily::tabulated(1, 1, vec![1.0]).unwrap();
        assert!(matches!(
            eval_activation(&fam, &sp(&[1.0]), &pp(&[1.0], 0.0)),
            Err(Error::UnsupportedFamily)
        ));
    }

    #[test]
    fn assemble_single_sample_relu() {
        let grid = ParameterGrid::new(vec![pp(&[2.0], 1.0), pp(&[-1.0], 0.0)]).unwrap();
        let a = assemble_matrix(&ActivationFamily::Relu, &[sp(&[1.0])], &grid).unwrap();
        assert_eq!(a.rows(), 1);
        assert_eq!(a.cols(), 2);
        assert_eq!(a.row(0), &[1.0, 0.0]);
    }

    #[test]
    fn dirac_weights_pick_out_columns() {
        let grid =
            ParameterGrid::new(vec![pp(&[1.0], 0.0), pp(&[2.0], 0.5), pp(&[-1.0], 1.0)]).unwrap();
        let samples = vec![sp(&[0.3]), sp(&[-0.7])];
        let a = assemble_matrix(&ActivationFamily::Tanh, &samples, &grid).unwrap();
        for j in 0..3 {
            let mut w = vec![0.0; 3];
            w[j] = 1.0;
            let f = a.apply_measure(&DiscreteMeasure::new(w).unwrap()).unwrap();
            assert_eq!(f.values(), a.column(j).as_slice());
        }
    }

    #[test]
    fn assembled_entries_match_independent_evaluator() {
        // Second, deliberately separate scalar implementation of tanh(x·θ−b).
        let mut rng = crate::rng::SplitMix64::new(99);
        let samples: Vec<SamplePoint> = (0..3)
            .map(|_| sp(&[rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)]))
            .collect();
        let atoms: Vec<ParameterPoint> = (0..5)
            .map(|_| {
                pp(
                    &[rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)],
                    rng.uniform(-1.0, 1.0),
                )
            })
            .collect();
        let grid = ParameterGrid::new(atoms.clone()).unwrap();
        let a = assemble_matrix(&ActivationFamily::Tanh, &samples, &grid).unwrap();
        for (k, x) in samples.iter().enumerate() {
            for (j, w) in atoms.iter().enumerate() {
                let mut acc = 0.0;
                for (xi, ti) in x.coords.iter().zip(&w.theta) {
                    acc += xi * ti;
                }
                acc -= w.bias;
                assert_eq!(a.entry(k, j), acc.tanh());
            }
        }
    }

    #[test]
    fn extend_single_family_is_identity() {
        let grid = ParameterGrid::new(vec![pp(&[1.5], 0.2), pp(&[-0.4], 0.9)]).unwrap();
        let (ext, tagged) = extend_product(&[ActivationFamily::Relu], &grid).unwrap();
        assert_eq!(tagged.size(), 2);
        let x = sp(&[0.7]);
        for (w, tw) in grid.atoms().iter().zip(tagged.atoms()) {
            assert_eq!(tw.tag, Some(1.0));
            let lhs = eval_activation(&ext, &x, tw).unwrap();
            let rhs = eval_activation(&ActivationFamily::Relu, &x, w).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn extend_two_families_dispatches_on_tag() {
        let grid = ParameterGrid::new(vec![pp(&[0.8], -0.1)]).unwrap();
        let fams = [ActivationFamily::Relu, ActivationFamily::Tanh];
        let (ext, tagged) = extend_product(&fams, &grid).unwrap();
        let x = sp(&[1.1]);
        assert_eq!(tagged.atoms()[0].tag, Some(0.5));
        assert_eq!(tagged.atoms()[1].tag, Some(1.0));
        let at_half = eval_activation(&ext, &x, &tagged.atoms()[0]).unwrap();
        let at_one = eval_activation(&ext, &x, &tagged.atoms()[1]).unwrap();
        assert_eq!(
            at_half,
            eval_activation(&ActivationFamily::Relu, &x, grid.atoms().first().unwrap()).unwrap()
        );
        assert_eq!(
            at_one,
            eval_activation(&ActivationFamily::Tanh, &x, grid.atoms().first().unwrap()).unwrap()
        );
    }

    #[test]
    fn extended_matrix_is_block_concatenation() {
        let mut rng = crate::rng::SplitMix64::new(4);
        let samples: Vec<SamplePoint> = (0..3).map(|_| sp(&[rng.uniform(-1.0, 1.0)])).collect();
        let atoms: Vec<ParameterPoint> = (0..4)
            .map(|_| pp(&[rng.uniform(-1.0, 1.0)], rng.uniform(-1.0, 1.0)))
            .collect();
        let grid = ParameterGrid::new(atoms).unwrap();
        let fams = [
            ActivationFamily::Relu,
            ActivationFamily::Tanh,
            ActivationFamily::gaussian(1.3).unwrap(),
        ];
        let (ext, tagged) = extend_product(&fams, &grid).unwrap();
        let big = assemble_matrix(&ext, &samples, &tagged).unwrap();
        for (i, fam) in fams.iter().enumerate() {
            let part = assemble_matrix(fam, &samples, &grid).unwrap();
            for k in 0..3 {
                for j in 0..4 {
                    assert_eq!(big.entry(k, i * 4 + j), part.entry(k, j));
                }
            }
        }
    }

    #[test]
    fn spectrum_of_identity_and_rank_one() {
        let id = ActivationMatrix::new(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let sv = spectrum(&id);
        assert!((sv[0] - 1.0).abs() < 1e-12 && (sv[1] - 1.0).abs() < 1e-12);
        let ones = ActivationMatrix::new(2, 2, vec![1.0; 4]).unwrap();
        let sv = spectrum(&ones);
        assert!((sv[0] - 2.0).abs() < 1e-12);
        assert!(sv[1].abs() < 1e-12);
    }

    #[test]
    fn spectrum_is_sorted_and_nonnegative() {
        let mut rng = crate::rng::SplitMix64::new(11);
        let entries: Vec<f64> = (0..4 * 8).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let a = ActivationMatrix::new(4, 8, entries).unwrap();
        let sv = spectrum(&a);
        assert_eq!(sv.len(), 4);
        for w in sv.windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert!(sv.iter().all(|&s| s >= 0.0));
    }

    #[test]
    fn csv_round_trip() {
        let a = ActivationMatrix::new(2, 3, vec![1.0, -0.5, 0.25, 3.5, 0.0, -2.0]).unwrap();
        let text = a.to_csv();
        let (n, m, values) = parse_matrix_csv(&text).unwrap();
        assert_eq!((n, m), (2, 3));
        assert_eq!(values, vec![1.0, -0.5, 0.25, 3.5, 0.0, -2.0]);
        let fam = ActivationFamily::tabulated_from_csv(&text).unwrap();
        let grid =
            ParameterGrid::new(vec![pp(&[0.0], 0.0), pp(&[1.0], 0.0), pp(&[2.0], 0.0)]).unwrap();
        let b = assemble_matrix(&fam, &[sp(&[0.0]), sp(&[1.0])], &grid).unwrap();
        assert_eq!(b.row(0), a.row(0));
        assert_eq!(b.row(1), a.row(1));
    }

    #[test]
    fn empty_inputs_are_rejected() {
        let grid = ParameterGrid::new(vec![pp(&[1.0], 0.0)]).unwrap();
        assert!(matches!(
            assemble_matrix(&ActivationFamily::Relu, &[], &grid),
            Err(Error::EmptyInput(_))
        ));
        assert!(matches!(
            extend_product(&[], &grid),
            Err(Error::EmptyInput(_))
        ));
    }
}

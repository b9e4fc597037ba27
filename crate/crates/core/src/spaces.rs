//! Data model for the discretized feature spaces: signed measures on grids,
//! block densities against probability weights, singular partitions, and the
//! block isometry between a partitioned grid and its global measure space.

use crate::activation::ParameterPoint;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Finite stand-in for the parameter space: an ordered list of distinct atoms.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParameterGrid {
    atoms: Vec<ParameterPoint>,
}

impl ParameterGrid {
    pub fn new(atoms: Vec<ParameterPoint>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyInput("grid atoms"));
        }
        let dim = atoms[0].dim();
        let tagged = atoms[0].tag.is_some();
        for w in &atoms {
            if w.dim() != dim {
                return Err(Error::Dimension("grid atoms of mixed dimension".into()));
            }
            if w.tag.is_some() != tagged {
                return Err(Error::Invalid(
                    "grid mixes tagged and untagged atoms".into(),
                ));
            }
        }
        for i in 0..atoms.len() {
            for j in (i + 1)..atoms.len() {
                if atoms[i] == atoms[j] {
                    return Err(Error::Invalid(format!("grid atoms {i} and {j} coincide")));
                }
            }
        }
        Ok(Self { atoms })
    }

    pub fn size(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[ParameterPoint] {
        &self.atoms
    }
}

/// Signed atomic weights aligned to a grid's atom order; the desk-scale
/// surrogate for a signed measure on the parameter space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiscreteMeasure {
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Invalid("non-finite measure weight".into()));
        }
        Ok(Self { weights })
    }

    pub fn zeros(m: usize) -> Self {
        Self {
            weights: vec![0.0; m],
        }
    }

    /// Unit mass on a single atom.
    pub fn dirac(m: usize, atom: usize) -> Result<Self> {
        if atom >= m {
            return Err(Error::Dimension(format!("atom {atom} out of range {m}")));
        }
        let mut weights = vec![0.0; m];
        weights[atom] = 1.0;
        Ok(Self { weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Nonnegative weights summing to one over a block of atoms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProbabilityWeights {
    weights: Vec<f64>,
}

impl ProbabilityWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyInput("probability weights"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Invalid(
                "probability weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Invalid(format!(
                "probability weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { weights })
    }

    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::EmptyInput("probability weights"));
        }
        Ok(Self {
            weights: vec![1.0 / m as f64; m],
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Values of a density against one block's probability weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DensityVector {
    values: Vec<f64>,
}

impl DensityVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite density value".into()));
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// A hypothesis-space element identified with its values on the sample set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SampleFunction {
    values: Vec<f64>,
}

impl SampleFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite sample value".into()));
        }
        Ok(Self { values })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, c: f64) -> SampleFunction {
        SampleFunction {
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn plus(&self, other: &SampleFunction) -> Result<SampleFunction> {
        if self.len() != other.len() {
            return Err(Error::Dimension(
                "adding sample functions of different length".into(),
            ));
        }
        Ok(SampleFunction {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

/// Disjoint grid blocks with per-block probability weights: a finite singular
/// family of grid-supported probability measures. Weights are strictly
/// positive on their atoms, so supports equal blocks and the family is
/// singular. A partition need not cover the whole grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SingularPartition {
    grid_size: usize,
    blocks: Vec<Vec<usize>>,
    weights: Vec<ProbabilityWeights>,
}

impl SingularPartition {
    pub fn new(
        grid_size: usize,
        blocks: Vec<Vec<usize>>,
        weights: Vec<ProbabilityWeights>,
    ) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::EmptyInput("partition blocks"));
        }
        if blocks.len() != weights.len() {
            return Err(Error::Alignment(format!(
                "{} blocks against {} weight vectors",
                blocks.len(),
                weights.len()
            )));
        }
        let mut seen = vec![false; grid_size];
        for (i, (block, pi)) in blocks.iter().zip(&weights).enumerate() {
            if block.is_empty() {
                return Err(Error::EmptyInput("partition block"));
            }
            if block.len() != pi.len() {
                return Err(Error::Alignment(format!(
                    "block {i} has {} atoms but {} weights",
                    block.len(),
                    pi.len()
                )));
            }
            if pi.weights().iter().any(|&w| w <= 0.0) {
                return Err(Error::Invalid(format!(
                    "block {i} carries a zero weight; supports must equal blocks"
                )));
            }
            for &atom in block {
                if atom >= grid_size {
                    return Err(Error::Dimension(format!(
                        "block {i} references atom {atom} beyond grid size {grid_size}"
                    )));
                }
                if seen[atom] {
                    return Err(Error::Invalid(format!(
                        "atom {atom} appears in two blocks; blocks must be disjoint"
                    )));
                }
                seen[atom] = true;
            }
        }
        Ok(Self {
            grid_size,
            blocks,
            weights,
        })
    }

    /// Uniform weights over blocks assigned round-robin across the grid.
    pub fn round_robin(grid_size: usize, n_blocks: usize) -> Result<Self> {
        if n_blocks == 0 || n_blocks > grid_size {
            return Err(Error::Invalid(format!(
                "cannot split {grid_size} atoms into {n_blocks} blocks"
            )));
        }
        let mut blocks = vec![Vec::new(); n_blocks];
        for atom in 0..grid_size {
            blocks[atom % n_blocks].push(atom);
        }
        let weights = blocks
            .iter()
            .map(|b| ProbabilityWeights::uniform(b.len()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(grid_size, blocks, weights)
    }

    /// Uniform weights over contiguous index ranges.
    pub fn contiguous(grid_size: usize, n_blocks: usize) -> Result<Self> {
        if n_blocks == 0 || n_blocks > grid_size {
            return Err(Error::Invalid(format!(
                "cannot split {grid_size} atoms into {n_blocks} blocks"
            )));
        }
        let base = grid_size / n_blocks;
        let extra = grid_size % n_blocks;
        let mut blocks = Vec::with_capacity(n_blocks);
        let mut next = 0;
        for i in 0..n_blocks {
            let len = base + usize::from(i < extra);
            blocks.push((next..next + len).collect::<Vec<_>>());
            next += len;
        }
        let weights = blocks
            .iter()
            .map(|b| ProbabilityWeights::uniform(b.len()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(grid_size, blocks, weights)
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_weights(&self) -> &[ProbabilityWeights] {
        &self.weights
    }

    /// True when every grid atom belongs to some block, the finite analogue
    /// of maximality for the singular family.
    pub fn covers_grid(&self) -> bool {
        self.blocks.iter().map(Vec::len).sum::<usize>() == self.grid_size
    }

    /// First uncovered atom, if any.
    pub fn first_uncovered(&self) -> Option<usize> {
        let mut seen = vec![false; self.grid_size];
        for block in &self.blocks {
            for &a in block {
                seen[a] = true;
            }
        }
        seen.iter().position(|s| !s)
    }
}

/// An element of a p-direct sum of block feature spaces: one coefficient
/// vector per block, each measured either in the total-variation norm (no
/// weights) or in the L^p norm against its block weights.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockMeasure {
    pub components: Vec<BlockComponent>,
    pub p: u8,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockComponent {
    pub values: Vec<f64>,
    pub weights: Option<ProbabilityWeights>,
}

impl BlockMeasure {
    pub fn new(components: Vec<BlockComponent>, p: u8) -> Result<Self> {
        if !(p == 1 || p == 2) {
            return Err(Error::UnsupportedExponent(p as u32));
        }
        for (i, c) in components.iter().enumerate() {
            if let Some(w) = &c.weights {
                if w.len() != c.values.len() {
                    return Err(Error::Alignment(format!(
                        "component {i} has {} values but {} weights",
                        c.values.len(),
                        w.len()
                    )));
                }
            }
        }
        Ok(Self { components, p })
    }

    /// Conjugate index q of the ambient direct sum; `None` encodes q = ∞.
    pub fn conjugate_exponent(&self) -> Option<u8> {
        match self.p {
            1 => None,
            _ => Some(2),
        }
    }
}

/// Total-variation norm of an atomic measure: the sum of absolute weights.
pub fn tv_norm(mu: &DiscreteMeasure) -> f64 {
    mu.weights().iter().map(|w| w.abs()).sum()
}

/// (Σ_j π_j |h_j|^p)^{1/p} for p in {1, 2}.
pub fn lp_norm(h: &DensityVector, pi: &ProbabilityWeights, p: u8) -> Result<f64> {
    if h.len() != pi.len() {
        return Err(Error::Alignment(format!(
            "density of length {} against {} weights",
            h.len(),
            pi.len()
        )));
    }
    match p {
        1 => Ok(h
            .values()
            .iter()
            .zip(pi.weights())
            .map(|(v, w)| w * v.abs())
            .sum()),
        2 => Ok(h
            .values()
            .iter()
            .zip(pi.weights())
            .map(|(v, w)| w * v * v)
            .sum::<f64>()
            .sqrt()),
        other => Err(Error::UnsupportedExponent(other as u32)),
    }
}

/// Direct-sum norm (Σ_i ‖v_i‖^p)^{1/p}, each block measured in its own norm.
pub fn block_norm(v: &BlockMeasure) -> Result<f64> {
    let mut acc = 0.0;
    for c in &v.components {
        let norm = match &c.weights {
            Some(pi) => lp_norm(&DensityVector::new(c.values.clone())?, pi, v.p)?,
            None => match v.p {
                1 => c.values.iter().map(|x| x.abs()).sum(),
                2 => c.values.iter().map(|x| x * x).sum::<f64>().sqrt(),
                other => return Err(Error::UnsupportedExponent(other as u32)),
            },
        };
        acc += match v.p {
            1 => norm,
            _ => norm * norm,
        };
    }
    Ok(match v.p {
        1 => acc,
        _ => acc.sqrt(),
    })
}

/// Assemble the global measure with block densities: the weight at atom j of
/// block i is π_i[j] · h_i[j], atoms outside every block get weight zero.
/// The total variation of the result equals Σ_i ‖h_i‖_{L¹(π_i)} exactly.
pub fn measure_from_blocks(
    partition: &SingularPartition,
    densities: &[DensityVector],
) -> Result<DiscreteMeasure> {
    if densities.len() != partition.n_blocks() {
        return Err(Error::Alignment(format!(
            "{} densities against {} blocks",
            densities.len(),
            partition.n_blocks()
        )));
    }
    let mut weights = vec![0.0; partition.grid_size()];
    for ((block, pi), h) in partition
        .blocks()
        .iter()
        .zip(partition.block_weights())
        .zip(densities)
    {
        if h.len() != block.len() {
            return Err(Error::Alignment(format!(
                "density of length {} against block of {} atoms",
                h.len(),
                block.len()
            )));
        }
        for ((&atom, &p), &v) in block.iter().zip(pi.weights()).zip(h.values()) {
            weights[atom] = p * v;
        }
    }
    DiscreteMeasure::new(weights)
}

/// Invert `measure_from_blocks`: recover per-block densities h_i[j] =
/// μ[atom]/π_i[j]. Any nonzero weight outside every block means μ is not
/// absolutely continuous with respect to the family.
pub fn split_to_blocks(
    mu: &DiscreteMeasure,
    partition: &SingularPartition,
) -> Result<Vec<DensityVector>> {
    if mu.len() != partition.grid_size() {
        return Err(Error::Dimension(format!(
            "measure of length {} against grid size {}",
            mu.len(),
            partition.grid_size()
        )));
    }
    let mut covered = vec![false; partition.grid_size()];
    for block in partition.blocks() {
        for &a in block {
            covered[a] = true;
        }
    }
    for (atom, (&w, &c)) in mu.weights().iter().zip(&covered).enumerate() {
        if w != 0.0 && !c {
            return Err(Error::NotAbsolutelyContinuous { atom, weight: w });
        }
    }
    partition
        .blocks()
        .iter()
        .zip(partition.block_weights())
        .map(|(block, pi)| {
            let values = block
                .iter()
                .zip(pi.weights())
                .map(|(&atom, &p)| mu.weights()[atom] / p)
                .collect();
            DensityVector::new(values)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn dv(values: &[f64]) -> DensityVector {
        DensityVector::new(values.to_vec()).unwrap()
    }

    fn pw(weights: &[f64]) -> ProbabilityWeights {
        ProbabilityWeights::new(weights.to_vec()).unwrap()
    }

    #[test]
    fn tv_norm_hand_values() {
        assert_eq!(
            tv_norm(&DiscreteMeasure::new(vec![1.0, -2.0, 0.5]).unwrap()),
            3.5
        );
        assert_eq!(tv_norm(&DiscreteMeasure::zeros(4)), 0.0);
    }

    #[test]
    fn tv_norm_matches_reversed_summation() {
        let mut rng = SplitMix64::new(5);
        let w: Vec<f64> = (0..20).map(|_| rng.uniform(-3.0, 3.0)).collect();
        let forward = tv_norm(&DiscreteMeasure::new(w.clone()).unwrap());
        let backward: f64 = w.iter().rev().map(|x| x.abs()).sum();
        assert!((forward - backward).abs() <= 1e-12);
    }

    #[test]
    fn lp_norm_hand_values() {
        let h = dv(&[2.0, 2.0]);
        let pi = pw(&[0.5, 0.5]);
        assert!((lp_norm(&h, &pi, 2).unwrap() - 2.0).abs() < 1e-15);
        assert!((lp_norm(&h, &pi, 1).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(
            lp_norm(&h, &pi, 3),
            Err(Error::UnsupportedExponent(3))
        ));
    }

    #[test]
    fn l1_le_l2_on_random_draws() {
        let mut rng = SplitMix64::new(17);
        for _ in 0..100 {
            let m = rng.int_in(1, 12);
            let raw: Vec<f64> = (0..m).map(|_| rng.uniform(0.05, 1.0)).collect();
            let total: f64 = raw.iter().sum();
            let pi = pw(&raw.iter().map(|x| x / total).collect::<Vec<_>>());
            let h = dv(&(0..m).map(|_| rng.uniform(-4.0, 4.0)).collect::<Vec<_>>());
            let l1 = lp_norm(&h, &pi, 1).unwrap();
            let l2 = lp_norm(&h, &pi, 2).unwrap();
            assert!(l1 <= l2 + 1e-12, "{l1} > {l2}");
        }
    }

    #[test]
    fn block_norm_hand_values() {
        let comp = |v: &[f64]| BlockComponent {
            values: v.to_vec(),
            weights: None,
        };
        // Components with TV norms 3 and 4.
        let v1 = BlockMeasure::new(vec![comp(&[3.0]), comp(&[-4.0])], 2).unwrap();
        assert!((block_norm(&v1).unwrap() - 5.0).abs() < 1e-15);
        let v2 = BlockMeasure::new(vec![comp(&[3.0]), comp(&[-4.0])], 1).unwrap();
        assert!((block_norm(&v2).unwrap() - 7.0).abs() < 1e-15);
        for p in [1u8, 2] {
            let single = BlockMeasure::new(vec![comp(&[1.0, -2.0])], p).unwrap();
            let expect = if p == 1 { 3.0 } else { 5.0f64.sqrt() };
            assert!((block_norm(&single).unwrap() - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn measure_from_blocks_hand_values() {
        // One block over the whole grid, uniform weights, constant density m.
        let m = 6;
        let part = SingularPartition::contiguous(m, 1).unwrap();
        let h = dv(&vec![m as f64; m]);
        let mu = measure_from_blocks(&part, &[h]).unwrap();
        assert_eq!(mu.weights(), vec![1.0; m].as_slice());
        assert!((tv_norm(&mu) - m as f64).abs() < 1e-12);

        // Two singleton blocks.
        let part = SingularPartition::new(2, vec![vec![0], vec![1]], vec![pw(&[1.0]), pw(&[1.0])])
            .unwrap();
        let mu = measure_from_blocks(&part, &[dv(&[2.0]), dv(&[-3.0])]).unwrap();
        assert_eq!(mu.weights(), &[2.0, -3.0]);
        assert_eq!(tv_norm(&mu), 5.0);
    }

    #[test]
    fn split_hand_values_and_error() {
        let part = SingularPartition::new(2, vec![vec![0], vec![1]], vec![pw(&[1.0]), pw(&[1.0])])
            .unwrap();
        let mu = DiscreteMeasure::new(vec![2.0, -3.0]).unwrap();
        let hs = split_to_blocks(&mu, &part).unwrap();
        assert_eq!(hs[0].values(), &[2.0]);
        assert_eq!(hs[1].values(), &[-3.0]);

        let zero = DiscreteMeasure::zeros(2);
        let hs = split_to_blocks(&zero, &part).unwrap();
        assert!(hs.iter().all(|h| h.values().iter().all(|&v| v == 0.0)));

        let part = SingularPartition::new(3, vec![vec![0], vec![1]], vec![pw(&[1.0]), pw(&[1.0])])
            .unwrap();
        let stray = DiscreteMeasure::new(vec![0.0, 0.0, 0.7]).unwrap();
        assert!(matches!(
            split_to_blocks(&stray, &part),
            Err(Error::NotAbsolutelyContinuous { atom: 2, .. })
        ));
    }

    #[test]
    fn partition_rejects_overlap_and_zero_weight() {
        assert!(SingularPartition::new(
            3,
            vec![vec![0, 1], vec![1]],
            vec![pw(&[0.5, 0.5]), pw(&[1.0])]
        )
        .is_err());
        assert!(ProbabilityWeights::new(vec![1.0, 0.0]).is_ok());
        assert!(SingularPartition::new(2, vec![vec![0, 1]], vec![pw(&[1.0, 0.0])]).is_err());
    }

    /// Deterministic random partition over a grid of size m covering a subset.
    pub(crate) fn random_partition(
        rng: &mut SplitMix64,
        m: usize,
        cover_all: bool,
    ) -> SingularPartition {
        let n_blocks = rng.int_in(1, m.min(6));
        let mut assignment: Vec<Option<usize>> = (0..m)
            .map(|_| {
                if cover_all || rng.next_f64() < 0.8 {
                    Some(rng.int_in(0, n_blocks - 1))
                } else {
                    None
                }
            })
            .collect();
        // Every block must be nonempty; force one atom per block.
        for b in 0..n_blocks {
            if !assignment.iter().any(|a| *a == Some(b)) {
                let spot = rng.int_in(0, m - 1);
                assignment[spot] = Some(b);
            }
        }
        let mut blocks = vec![Vec::new(); n_blocks];
        for (atom, assigned) in assignment.iter().enumerate() {
            if let Some(b) = assigned {
                blocks[*b].push(atom);
            }
        }
        blocks.retain(|b| !b.is_empty());
        let weights = blocks
            .iter()
            .map(|b| {
                let raw: Vec<f64> = b.iter().map(|_| rng.uniform(0.1, 1.0)).collect();
                let total: f64 = raw.iter().sum();
                ProbabilityWeights::new(raw.iter().map(|x| x / total).collect()).unwrap()
            })
            .collect();
        SingularPartition::new(m, blocks, weights).unwrap()
    }

    #[test]
    fn theta_isometry_and_round_trip_are_exact() {
        let mut rng = SplitMix64::new(2024);
        for _ in 0..50 {
            let m = rng.int_in(2, 24);
            let part = random_partition(&mut rng, m, false);
            let densities: Vec<DensityVector> = part
                .blocks()
                .iter()
                .map(|b| dv(&b.iter().map(|_| rng.uniform(-5.0, 5.0)).collect::<Vec<_>>()))
                .collect();
            let mu = measure_from_blocks(&part, &densities).unwrap();
            // Isometry: tv equals the sum of block L¹ norms.
            let block_l1: f64 = densities
                .iter()
                .zip(part.block_weights())
                .map(|(h, pi)| lp_norm(h, pi, 1).unwrap())
                .sum();
            assert!((tv_norm(&mu) - block_l1).abs() <= 1e-12);
            // Round trip densities -> measure -> densities.
            let back = split_to_blocks(&mu, &part).unwrap();
            for (h, b) in densities.iter().zip(&back) {
                for (x, y) in h.values().iter().zip(b.values()) {
                    assert!((x - y).abs() <= 1e-12);
                }
            }
            // Round trip measure -> densities -> measure, exact.
            let again = measure_from_blocks(&part, &back).unwrap();
            assert_eq!(mu.weights(), again.weights());
        }
    }

    #[test]
    fn json_schema_round_trip() {
        let part = SingularPartition::new(
            4,
            vec![vec![0, 2], vec![1]],
            vec![pw(&[0.25, 0.75]), pw(&[1.0])],
        )
        .unwrap();
        let text = serde_json::to_string(&part).unwrap();
        assert!(text.contains("\"blocks\":[[0,2],[1]]"));
        assert!(text.contains("\"weights\":[[0.25,0.75],[1.0]]"));
        let back: SingularPartition = serde_json::from_str(&text).unwrap();
        assert_eq!(back.blocks(), part.blocks());

        let mu = DiscreteMeasure::new(vec![1.0, -0.5]).unwrap();
        assert_eq!(serde_json::to_string(&mu).unwrap(), "[1.0,-0.5]");
    }
}

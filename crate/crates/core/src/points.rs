//! Rank-1 lattice point sets, random shifts, and the tent transform.
//!
//! A rank-1 lattice with generating vector `z` and `n` points has nodes
//! `t_k = frac(k z / n)` for `k = 0..n-1`. Published generating vectors are
//! usually extensible: a vector stated for a large modulus is reused at a
//! smaller `n` by reducing each component mod `n`. Construction here performs
//! that reduction and rejects components that collapse to zero, which would
//! pin a whole coordinate at the origin.
//!
//! Random shifts are sampled with the portable, seedable ChaCha8 generator
//! (`rand_chacha`), drawing one 53-bit uniform `f64` in `[0,1)` per
//! coordinate, so shifted point sets are reproducible across platforms from
//! the integer seed alone.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Largest supported lattice size. Keeps `k * z_j` inside `u64`.
const MAX_N: u64 = 1 << 31;

/// Integer generating vector of a rank-1 lattice rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingVector {
    n: u64,
    components: Vec<u64>,
}

impl GeneratingVector {
    /// Builds a generating vector for modulus `n`, reducing every component
    /// mod `n`. A component that reduces to zero is rejected: the node set
    /// would degenerate in that coordinate.
    pub fn new(n: u64, components: &[u64]) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::InvalidConfig(format!(
                "lattice size n = {n} outside 1..={MAX_N}"
            )));
        }
        if components.is_empty() {
            return Err(Error::InvalidConfig(
                "generating vector needs at least one component".into(),
            ));
        }
        let mut reduced = Vec::with_capacity(components.len());
        for (index, &value) in components.iter().enumerate() {
            let r = value % n;
            if r == 0 && n > 1 {
                return Err(Error::GeneratingVectorComponent { index, value, n });
            }
            reduced.push(r);
        }
        Ok(Self {
            n,
            components: reduced,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of coordinates.
    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[u64] {
        &self.components
    }

    /// The same vector reduced for a different modulus.
    pub fn rescaled(&self, n: u64) -> Result<Self> {
        Self::new(n, &self.components)
    }

    /// Stable fingerprint of `(n, z)` for provenance columns.
    pub fn fingerprint(&self) -> String {
        let mut canon = format!("n={}", self.n);
        for c in &self.components {
            let _ = write!(canon, ",{c}");
        }
        crate::report::short_hash(&canon)
    }
}

/// How a point set was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    PlainLattice,
    Shifted,
    ShiftedTent,
}

/// A finite multiset of nodes in `[0,1]^s`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    n: usize,
    s: usize,
    nodes: Vec<f64>,
    provenance: Provenance,
}

impl PointSet {
    /// Wraps raw nodes (row-major, `n * s` entries, all in `[0,1]`).
    pub fn from_rows(n: usize, s: usize, nodes: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if nodes.len() != n * s {
            return Err(Error::DimensionMismatch {
                context: "PointSet::from_rows",
                expected: n * s,
                actual: nodes.len(),
            });
        }
        if let Some(&bad) = nodes.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidConfig(format!(
                "node coordinate {bad} outside [0,1]"
            )));
        }
        Ok(Self {
            n,
            s,
            nodes,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dimension(&self) -> usize {
        self.s
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// The `k`-th node.
    pub fn node(&self, k: usize) -> &[f64] {
        &self.nodes[k * self.s..(k + 1) * self.s]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.nodes.chunks_exact(self.s)
    }

    /// First pair of bitwise-identical rows, if any. Detection uses the
    /// stored binary representation: rules whose Gram matrix would be
    /// exactly singular are reported, nearby-but-distinct nodes are not.
    pub fn find_duplicate(&self) -> Option<(usize, usize)> {
        let mut seen: HashMap<Vec<u64>, usize> = HashMap::with_capacity(self.n);
        for (k, row) in self.rows().enumerate() {
            let key: Vec<u64> = row.iter().map(|v| v.to_bits()).collect();
            if let Some(&first) = seen.get(&key) {
                return Some((first, k));
            }
            seen.insert(key, k);
        }
        None
    }

    /// Keeps every `stride`-th node, preserving order. Used to extract the
    /// nested sub-lattices of an extensible rule.
    pub fn strided(&self, stride: usize) -> Result<Self> {
        if stride == 0 || self.n % stride != 0 {
            return Err(Error::InvalidConfig(format!(
                "stride {stride} does not divide the point count {}",
                self.n
            )));
        }
        let mut nodes = Vec::with_capacity(self.n / stride * self.s);
        for k in (0..self.n).step_by(stride) {
            nodes.extend_from_slice(self.node(k));
        }
        Self::from_rows(self.n / stride, self.s, nodes, self.provenance)
    }
}

/// Nodes `t_k = frac(k z / n)` of the rank-1 lattice rule.
///
/// Each coordinate is computed as `((k * z_j) mod n) / n`, so the stored
/// values are exact dyadic/rational grid points with no accumulated rounding.
pub fn generate_lattice(gv: &GeneratingVector) -> PointSet {
    let n = gv.n() as usize;
    let s = gv.dimension();
    let mut nodes = Vec::with_capacity(n * s);
    let nf = gv.n() as f64;
    for k in 0..gv.n() {
        for &z in gv.components() {
            nodes.push((k * z % gv.n()) as f64 / nf);
        }
    }
    PointSet {
        n,
        s,
        nodes,
        provenance: Provenance::PlainLattice,
    }
}

/// Uniform shift in `[0,1)^s`, reproducible from the seed.
pub fn sample_shift(seed: u64, s: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..s).map(|_| rng.gen::<f64>()).collect()
}

/// Adds `shift` to every node modulo 1.
///
/// Shifting is only meaningful before the tent transform; a tented input is
/// rejected so the provenance tag stays truthful.
pub fn apply_shift(points: &PointSet, shift: &[f64]) -> Result<PointSet> {
    if shift.len() != points.dimension() {
        return Err(Error::DimensionMismatch {
            context: "apply_shift",
            expected: points.dimension(),
            actual: shift.len(),
        });
    }
    if points.provenance() == Provenance::ShiftedTent {
        return Err(Error::InvalidConfig(
            "random shift must be applied before the tent transform".into(),
        ));
    }
    if let Some(&bad) = shift.iter().find(|v| !(0.0..1.0).contains(*v)) {
        return Err(Error::InvalidConfig(format!(
            "shift coordinate {bad} outside [0,1)"
        )));
    }
    let s = points.dimension();
    let nodes = points
        .nodes
        .iter()
        .enumerate()
        .map(|(i, &x)| (x + shift[i % s]).fract())
        .collect();
    Ok(PointSet {
        n: points.n,
        s,
        nodes,
        provenance: Provenance::Shifted,
    })
}

/// Tent (baker's) transform `phi(t) = 1 - |2t - 1|`, applied componentwise.
pub fn tent_transform(points: &PointSet) -> PointSet {
    let nodes = points
        .nodes
        .iter()
        .map(|&x| 1.0 - (2.0 * x - 1.0).abs())
        .collect();
    PointSet {
        n: points.n,
        s: points.s,
        nodes,
        provenance: Provenance::ShiftedTent,
    }
}

/// Parses the text form of a generating vector.
///
/// Accepted grammar, one component per data line:
///
/// ```text
/// # comment (also allowed after values)
/// 1
/// 182667
/// ```
///
/// or the two-column form `index value` with 1-based indices:
///
/// ```text
/// 1 1
/// 2 182667
/// ```
pub fn parse_generating_vector(text: &str, source_name: &str) -> Result<Vec<u64>> {
    let mut values = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse = |f: &str| -> Result<u64> {
            f.parse::<u64>().map_err(|_| Error::GeneratingVectorFile {
                source_name: source_name.to_string(),
                msg: format!("line {}: `{f}` is not a nonnegative integer", lineno + 1),
            })
        };
        match fields.as_slice() {
            [value] => values.push(parse(value)?),
            [index, value] => {
                let idx = parse(index)?;
                if idx != values.len() as u64 + 1 {
                    return Err(Error::GeneratingVectorFile {
                        source_name: source_name.to_string(),
                        msg: format!(
                            "line {}: index {idx} out of order (expected {})",
                            lineno + 1,
                            values.len() + 1
                        ),
                    });
                }
                values.push(parse(value)?);
            }
            _ => {
                return Err(Error::GeneratingVectorFile {
                    source_name: source_name.to_string(),
                    msg: format!("line {}: expected 1 or 2 fields", lineno + 1),
                })
            }
        }
    }
    if values.is_empty() {
        return Err(Error::GeneratingVectorFile {
            source_name: source_name.to_string(),
            msg: "no components found".into(),
        });
    }
    Ok(values)
}

/// Loads the first `s` components of a stored vector and reduces them for
/// lattice size `n`.
pub fn load_generating_vector(path: &Path, s: usize, n: u64) -> Result<GeneratingVector> {
    let text = std::fs::read_to_string(path)?;
    let name = path.display().to_string();
    generating_vector_from_text(&text, &name, s, n)
}

/// As [`load_generating_vector`], from an in-memory string.
pub fn generating_vector_from_text(
    text: &str,
    source_name: &str,
    s: usize,
    n: u64,
) -> Result<GeneratingVector> {
    let values = parse_generating_vector(text, source_name)?;
    if values.len() < s {
        return Err(Error::GeneratingVectorFile {
            source_name: source_name.to_string(),
            msg: format!("{} components stored, {s} requested", values.len()),
        });
    }
    GeneratingVector::new(n, &values[..s])
}

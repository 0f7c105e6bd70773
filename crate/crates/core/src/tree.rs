//! Tree structure of a frequency set and its shift index set.
//!
//! A frequency set `S` of `k` vectors in `R^l` is split by its first `l - 1`
//! coordinates into parents, each carrying the set of last coordinates of its
//! children. Parents are ordered by increasing child count (ties broken
//! lexicographically by prefix). Parent `i` owns the index window
//! `Q_i = [#Z_{i-1}, #Z_i)` and the shift index set is
//!
//! ```text
//! K(S) = union_i K(S'_i) x Q_i,     S'_i = parents i, i+1, ... (ordered suffix)
//! ```
//!
//! with `K(S) = {0, .., #S - 1}` in one dimension. Each suffix is itself a
//! frequency set in `R^{l-1}` with its own tree, so a node owns one subtree per
//! parent.

use std::cmp::Ordering;
use std::ops::Range;

use crate::error::{Error, Result};

/// Coordinates closer than this are treated as equal when grouping.
pub const GROUP_TOL: f64 = 1e-9;

/// A non-empty set of pairwise distinct vectors in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySet {
    dim: usize,
    vectors: Vec<Vec<f64>>,
}

impl FrequencySet {
    pub fn new(vectors: Vec<Vec<f64>>) -> Result<Self> {
        let dim = vectors.first().map(Vec::len).ok_or(Error::InvalidFrequencySet)?;
        if dim == 0 || vectors.iter().any(|v| v.len() != dim || v.iter().any(|x| !x.is_finite())) {
            return Err(Error::InvalidFrequencySet);
        }
        let mut sorted: Vec<&Vec<f64>> = vectors.iter().collect();
        sorted.sort_by(|a, b| lex_cmp(a, b));
        if sorted.windows(2).any(|w| approx_eq(w[0], w[1])) {
            return Err(Error::InvalidFrequencySet);
        }
        Ok(Self { dim, vectors })
    }

    pub fn from_integer(vectors: &[Vec<i64>]) -> Result<Self> {
        Self::new(
            vectors
                .iter()
                .map(|v| v.iter().map(|&x| x as f64).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }
}

/// Shift indices `j_s`, one per frequency vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ShiftIndexSet(pub Vec<Vec<usize>>);

impl ShiftIndexSet {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vec<usize>> {
        self.0.iter()
    }

    pub fn position(&self, index: &[usize]) -> Option<usize> {
        self.0.iter().position(|j| j.as_slice() == index)
    }

    /// Same elements irrespective of order.
    pub fn same_set(&self, other: &ShiftIndexSet) -> bool {
        let mut a = self.0.clone();
        let mut b = other.0.clone();
        a.sort();
        b.sort();
        a == b
    }
}

/// A parent node: a prefix in `R^{l-1}` and the last coordinates of its children.
#[derive(Debug, Clone, PartialEq)]
pub struct Parent {
    pub prefix: Vec<f64>,
    /// `(last coordinate, position of the full vector in the node's vector list)`,
    /// sorted by coordinate.
    pub children: Vec<(f64, usize)>,
    /// The window `Q_i` of last shift coordinates owned by this parent.
    pub window: Range<usize>,
}

#[derive(Debug, Clone, PartialEq)]
struct Split {
    parents: Vec<Parent>,
    suffixes: Vec<FrequencyTree>,
}

/// Tree over a frequency set, recursively including every suffix subtree.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTree {
    dim: usize,
    vectors: Vec<Vec<f64>>,
    indices: ShiftIndexSet,
    split: Option<Split>,
}

/// One level of the tree: the ordered parents `M^{l-1}` and their child sets `Z^l_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    /// 1-based level number.
    pub level: usize,
    pub parents: Vec<Vec<f64>>,
    pub child_values: Vec<Vec<f64>>,
    pub windows: Vec<Range<usize>>,
    /// `N_l = #M^l`.
    pub size: usize,
}

impl FrequencyTree {
    pub fn build(fs: &FrequencySet) -> Self {
        Self::build_node(fs.vectors.clone())
    }

    fn build_node(vectors: Vec<Vec<f64>>) -> Self {
        let dim = vectors[0].len();
        let n = vectors.len();
        if dim == 1 {
            let indices = ShiftIndexSet((0..n).map(|i| vec![i]).collect());
            return Self {
                dim,
                vectors,
                indices,
                split: None,
            };
        }

        // group by prefix
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| lex_cmp(&vectors[a], &vectors[b]));
        let mut parents: Vec<Parent> = Vec::new();
        for idx in order {
            let v = &vectors[idx];
            let prefix = &v[..dim - 1];
            let last = v[dim - 1];
            match parents.last_mut() {
                Some(p) if approx_eq(&p.prefix, prefix) => p.children.push((last, idx)),
                _ => parents.push(Parent {
                    prefix: prefix.to_vec(),
                    children: vec![(last, idx)],
                    window: 0..0,
                }),
            }
        }
        // stable: equal counts keep lexicographic order
        parents.sort_by_key(|p| p.children.len());
        let mut prev = 0;
        for p in &mut parents {
            p.window = prev..p.children.len();
            prev = p.children.len();
        }

        let suffixes: Vec<FrequencyTree> = (0..parents.len())
            .map(|i| Self::build_node(parents[i..].iter().map(|p| p.prefix.clone()).collect()))
            .collect();

        let mut indices = Vec::with_capacity(n);
        for (p, sub) in parents.iter().zip(&suffixes) {
            for head in sub.indices.iter() {
                for j in p.window.clone() {
                    let mut idx = head.clone();
                    idx.push(j);
                    indices.push(idx);
                }
            }
        }

        Self {
            dim,
            vectors,
            indices: ShiftIndexSet(indices),
            split: Some(Split { parents, suffixes }),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Frequency vectors in the order they were supplied.
    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// `K(S)` in construction order.
    pub fn shift_index_set(&self) -> &ShiftIndexSet {
        &self.indices
    }

    /// Ordered parents of the top split (`None` in one dimension).
    pub fn parents(&self) -> Option<&[Parent]> {
        self.split.as_ref().map(|s| s.parents.as_slice())
    }

    /// Subtree over the ordered suffix starting at parent `i`.
    pub fn suffix(&self, i: usize) -> Option<&FrequencyTree> {
        self.split.as_ref().and_then(|s| s.suffixes.get(i))
    }

    /// Values of a one-dimensional node, in vector order.
    pub fn values_1d(&self) -> Option<Vec<f64>> {
        (self.dim == 1).then(|| self.vectors.iter().map(|v| v[0]).collect())
    }

    /// Per-level view `l = 1..d`. Level `l` describes the full projection
    /// `M^{l-1}` with children in `M^l`.
    pub fn levels(&self) -> Vec<Level> {
        let mut out = Vec::with_capacity(self.dim);
        let mut node = self;
        loop {
            match &node.split {
                Some(split) => {
                    out.push(Level {
                        level: node.dim,
                        parents: split.parents.iter().map(|p| p.prefix.clone()).collect(),
                        child_values: split
                            .parents
                            .iter()
                            .map(|p| p.children.iter().map(|c| c.0).collect())
                            .collect(),
                        windows: split.parents.iter().map(|p| p.window.clone()).collect(),
                        size: node.len(),
                    });
                    node = &split.suffixes[0];
                }
                None => {
                    let n = node.len();
                    out.push(Level {
                        level: 1,
                        parents: vec![Vec::new()],
                        child_values: vec![node.vectors.iter().map(|v| v[0]).collect()],
                        windows: vec![0..n],
                        size: n,
                    });
                    break;
                }
            }
        }
        out.reverse();
        out
    }

    /// `#K^l` predicted by the telescoping sum
    /// `N_{l-1} #Z_1 + sum_{i>=2} (N_{l-1} - i + 1)(#Z_i - #Z_{i-1})`.
    pub fn telescoped_count(level: &Level) -> usize {
        if level.level == 1 {
            return level.size;
        }
        let n = level.parents.len();
        let counts: Vec<usize> = level.child_values.iter().map(Vec::len).collect();
        let mut total = n * counts[0];
        for i in 1..n {
            total += (n - i) * (counts[i] - counts[i - 1]);
        }
        total
    }
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

pub(crate) fn approx_eq(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= GROUP_TOL)
}

/// The frequency set of the worked four-dimensional example with `k = 10`.
pub fn example_m4() -> FrequencySet {
    let raw: [[i64; 4]; 10] = [
        [1, 1, 1, 1],
        [2, 1, 1, 1],
        [3, 1, 1, 1],
        [4, 1, 1, 1],
        [2, 2, 1, 1],
        [3, 2, 1, 1],
        [4, 2, 1, 1],
        [2, 2, 1, 2],
        [3, 2, 2, 1],
        [4, 3, 1, 1],
    ];
    FrequencySet::from_integer(&raw.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
        .expect("distinct vectors")
}

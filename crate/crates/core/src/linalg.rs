//! Sparse exact linear algebra over the rationals.
//!
//! Vectors are keyed by basis index. An [`Echelon`] keeps rows whose pivot is
//! their smallest index, each with a companion "tag" vector recording how the
//! row was assembled from inserted vectors; that is what turns elimination
//! into preimages and kernels.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::Rational;

pub type SparseVec = BTreeMap<usize, Rational>;

pub fn axpy(y: &mut SparseVec, a: &Rational, x: &SparseVec) {
    if a.is_zero() {
        return;
    }
    for (&i, v) in x {
        let e = y.entry(i).or_insert_with(Rational::zero);
        *e += a * v;
        if e.is_zero() {
            y.remove(&i);
        }
    }
}

pub fn unit(i: usize) -> SparseVec {
    let mut v = SparseVec::new();
    v.insert(i, Rational::one());
    v
}

fn scale(v: &mut SparseVec, a: &Rational) {
    for x in v.values_mut() {
        *x *= a;
    }
}

#[derive(Debug, Clone)]
struct Row {
    vec: SparseVec,
    tag: SparseVec,
}

/// Incrementally built row-echelon basis of a subspace.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, Row>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Reduces `v` against the basis. Returns the remainder and the tag
    /// combination `c` such that `v = remainder + Σ c_k (inserted vector k)`.
    pub fn reduce(&self, v: &SparseVec) -> (SparseVec, SparseVec) {
        let mut rem = v.clone();
        let mut tag = SparseVec::new();
        let mut cursor = 0usize;
        loop {
            let next = rem
                .range(cursor..)
                .find(|(i, _)| self.rows.contains_key(i))
                .map(|(&i, c)| (i, c.clone()));
            let Some((i, c)) = next else { break };
            let row = &self.rows[&i];
            axpy(&mut rem, &-c.clone(), &row.vec);
            axpy(&mut tag, &c, &row.tag);
            cursor = i + 1;
        }
        (rem, tag)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Inserts `v` labelled with `tag`. If `v` reduces to zero, returns the
    /// relation `tag - (combination of earlier tags)`, which lies in the
    /// kernel of the map that sent tags to vectors.
    pub fn insert(&mut self, v: &SparseVec, tag: SparseVec) -> Option<SparseVec> {
        let (mut rem, comb) = self.reduce(v);
        let mut tag = tag;
        axpy(&mut tag, &-Rational::one(), &comb);
        if rem.is_empty() {
            return Some(tag);
        }
        let (&pivot, lead) = rem.iter().next().unwrap();
        let inv = lead.recip();
        scale(&mut rem, &inv);
        scale(&mut tag, &inv);
        self.rows.insert(pivot, Row { vec: rem, tag });
        None
    }

    /// Inserts without caring about tags.
    pub fn push(&mut self, v: &SparseVec) -> bool {
        self.insert(v, SparseVec::new()).is_none()
    }

    /// Fully reduced basis vectors, ordered by pivot.
    pub fn basis(&self) -> Vec<SparseVec> {
        let mut out: Vec<SparseVec> = Vec::with_capacity(self.rows.len());
        let pivots: Vec<usize> = self.rows.keys().copied().collect();
        for (k, p) in pivots.iter().enumerate() {
            let mut v = self.rows[p].vec.clone();
            for q in &pivots[k + 1..] {
                if let Some(c) = v.get(q).cloned() {
                    axpy(&mut v, &-c, &self.rows[q].vec);
                }
            }
            out.push(v);
        }
        // later rows may still carry earlier pivots' columns: a second pass fixes that
        for k in (0..out.len()).rev() {
            for j in 0..k {
                if let Some(c) = out[j].get(&pivots[k]).cloned() {
                    let row = out[k].clone();
                    axpy(&mut out[j], &-c, &row);
                }
            }
        }
        out
    }
}

/// Column-wise description of a linear map: `columns[j]` is the image of
/// basis vector `j`.
#[derive(Debug, Clone, Default)]
pub struct ColumnMatrix {
    pub rows: usize,
    pub columns: Vec<SparseVec>,
}

impl ColumnMatrix {
    pub fn new(rows: usize, columns: Vec<SparseVec>) -> Self {
        ColumnMatrix { rows, columns }
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (&j, c) in v {
            axpy(&mut out, c, &self.columns[j]);
        }
        out
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &ColumnMatrix) -> ColumnMatrix {
        ColumnMatrix {
            rows: self.rows,
            columns: rhs.columns.iter().map(|c| self.apply(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    /// Image echelon (tags = source coordinates) and kernel basis, inserting
    /// columns in the given order.
    pub fn eliminate(&self, order: impl IntoIterator<Item = usize>) -> (Echelon, Vec<SparseVec>) {
        let mut ech = Echelon::new();
        let mut kernel = Vec::new();
        for j in order {
            if let Some(k) = ech.insert(&self.columns[j], unit(j)) {
                kernel.push(k);
            }
        }
        (ech, kernel)
    }

    pub fn rank(&self) -> usize {
        self.eliminate(0..self.cols()).0.rank()
    }

    /// Kernel basis in reduced echelon form.
    pub fn kernel(&self) -> Vec<SparseVec> {
        let (_, ker) = self.eliminate(0..self.cols());
        let mut e = Echelon::new();
        for k in &ker {
            e.push(k);
        }
        e.basis()
    }
}

/// Basis of `ker / im` inside a common ambient space: kernel vectors are
/// reduced modulo the image and echelonised among themselves.
pub fn quotient_basis(kernel: &[SparseVec], image: &[SparseVec]) -> Vec<SparseVec> {
    let mut im = Echelon::new();
    for v in image {
        im.push(v);
    }
    let mut q = Echelon::new();
    for k in kernel {
        let (rem, _) = im.reduce(k);
        if !rem.is_empty() {
            q.push(&rem);
        }
    }
    q.basis()
        .into_iter()
        .map(|v| im.reduce(&v).0)
        .collect()
}

use std::fmt;

use serde::{Serialize, Serializer};

use crate::symexpr::Direction;

/// One of the three cylindrical frame directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FrameIndex {
    R,
    Theta,
    Z,
}

impl FrameIndex {
    pub const ALL: [FrameIndex; 3] = [FrameIndex::R, FrameIndex::Theta, FrameIndex::Z];

    pub fn direction(self) -> Direction {
        match self {
            FrameIndex::R => Direction::R,
            FrameIndex::Theta => Direction::Theta,
            FrameIndex::Z => Direction::Z,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            FrameIndex::R => "r",
            FrameIndex::Theta => "θ",
            FrameIndex::Z => "z",
        }
    }
}

impl fmt::Display for FrameIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Ordered lower-index tuple `(i1, ..., in)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexList(pub Vec<FrameIndex>);

impl IndexList {
    pub fn new(indices: Vec<FrameIndex>) -> Self {
        IndexList(indices)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[FrameIndex] {
        &self.0
    }

    pub fn count(&self, which: FrameIndex) -> u32 {
        self.0.iter().filter(|&&i| i == which).count() as u32
    }

    pub fn chi_theta(&self) -> u32 {
        self.count(FrameIndex::Theta)
    }

    pub fn chi_r(&self) -> u32 {
        self.count(FrameIndex::R)
    }

    pub fn chi_z(&self) -> u32 {
        self.count(FrameIndex::Z)
    }

    /// The compound multi-index of this list, when the theta count is even.
    pub fn multi_index(&self) -> Option<MultiIndexM> {
        let th = self.chi_theta();
        th.is_multiple_of(2).then(|| MultiIndexM::new(th / 2, self.chi_r(), self.chi_z()))
    }

    pub fn with(&self, pos: usize, idx: FrameIndex) -> IndexList {
        let mut v = self.0.clone();
        v[pos] = idx;
        IndexList(v)
    }

    pub fn pushed(&self, idx: FrameIndex) -> IndexList {
        let mut v = self.0.clone();
        v.push(idx);
        IndexList(v)
    }

    /// All `3^n` lists of length `n`, in lexicographic order.
    pub fn all_of_length(n: usize) -> Vec<IndexList> {
        let mut out = vec![IndexList(Vec::new())];
        for _ in 0..n {
            out = out
                .iter()
                .flat_map(|l| FrameIndex::ALL.iter().map(move |&i| l.pushed(i)))
                .collect();
        }
        out
    }

    /// Every distinct ordering of `2 m_c` thetas, `m_r` r's and `m_z` z's.
    pub fn orderings(m: MultiIndexM) -> Vec<IndexList> {
        IndexList::all_of_length(m.weight() as usize)
            .into_iter()
            .filter(|l| l.multi_index() == Some(m))
            .collect()
    }
}

impl fmt::Display for IndexList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for IndexList {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `(m_c, m_r, m_z)` indexing `D^M = d_z^{m_z} d_r^{m_r} (d_r / r)^{m_c}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct MultiIndexM {
    pub m_c: u32,
    pub m_r: u32,
    pub m_z: u32,
}

impl MultiIndexM {
    pub const ZERO: MultiIndexM = MultiIndexM {
        m_c: 0,
        m_r: 0,
        m_z: 0,
    };

    pub fn new(m_c: u32, m_r: u32, m_z: u32) -> Self {
        MultiIndexM { m_c, m_r, m_z }
    }

    /// `|M| = 2 m_c + m_r + m_z`.
    pub fn weight(&self) -> u32 {
        2 * self.m_c + self.m_r + self.m_z
    }

    /// `(m_r, m_z)`.
    pub fn reduced(&self) -> MultiIndexL {
        MultiIndexL::new(self.m_r, self.m_z)
    }

    pub fn checked_sub(&self, other: &MultiIndexM) -> Option<MultiIndexM> {
        Some(MultiIndexM::new(
            self.m_c.checked_sub(other.m_c)?,
            self.m_r.checked_sub(other.m_r)?,
            self.m_z.checked_sub(other.m_z)?,
        ))
    }

    /// Componentwise `<=` sub-indices, including zero and `self`.
    pub fn sub_indices(&self) -> Vec<MultiIndexM> {
        let mut v = Vec::new();
        for c in 0..=self.m_c {
            for r in 0..=self.m_r {
                for z in 0..=self.m_z {
                    v.push(MultiIndexM::new(c, r, z));
                }
            }
        }
        v
    }

    /// All multi-indices of the given weight.
    pub fn with_weight(w: u32) -> Vec<MultiIndexM> {
        let mut v = Vec::new();
        for c in 0..=w / 2 {
            for r in 0..=(w - 2 * c) {
                v.push(MultiIndexM::new(c, r, w - 2 * c - r));
            }
        }
        v
    }

    /// All multi-indices with `1 <= |M| <= max_weight`.
    pub fn up_to_weight(max_weight: u32) -> Vec<MultiIndexM> {
        (1..=max_weight)
            .flat_map(MultiIndexM::with_weight)
            .collect()
    }
}

impl fmt::Display for MultiIndexM {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.m_c, self.m_r, self.m_z)
    }
}

/// `(l_r, l_z)` indexing `d_z^{l_z} d_r^{l_r}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct MultiIndexL {
    pub l_r: u32,
    pub l_z: u32,
}

impl MultiIndexL {
    pub fn new(l_r: u32, l_z: u32) -> Self {
        MultiIndexL { l_r, l_z }
    }

    pub fn weight(&self) -> u32 {
        self.l_r + self.l_z
    }
}

impl fmt::Display for MultiIndexL {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.l_r, self.l_z)
    }
}

/// `(2k - 1)!!` with `(-1)!! = 1`.
pub fn odd_double_factorial(k: u32) -> u64 {
    (1..=k as u64).map(|j| 2 * j - 1).product()
}

use crate::linalg::{self, CMat, CVec, C64};

/// Linear image of an algebra element on which a norm is a fixed formula.
#[derive(Clone, Debug, PartialEq)]
pub enum Feature {
    L2(CVec),
    L1(CVec),
    /// Max modulus.
    Sup(CVec),
    /// Max operator norm over blocks.
    Blocks(Vec<CMat>),
    /// Max of the four entry norms of a 2×2 lift.
    Entries(Box<[Feature; 4]>),
}

impl Feature {
    pub fn norm(&self) -> f64 {
        match self {
            Feature::L2(v) => v.norm(),
            Feature::L1(v) => v.iter().map(|z| z.norm()).sum(),
            Feature::Sup(v) => v.iter().map(|z| z.norm()).fold(0.0, f64::max),
            Feature::Blocks(b) => b.iter().map(linalg::op_norm).fold(0.0, f64::max),
            Feature::Entries(e) => e.iter().map(Feature::norm).fold(0.0, f64::max),
        }
    }

    fn zip(&self, other: &Feature, f: &impl Fn(C64, C64) -> C64) -> Feature {
        let vz = |a: &CVec, b: &CVec| a.zip_map(b, |x, y| f(x, y));
        match (self, other) {
            (Feature::L2(a), Feature::L2(b)) => Feature::L2(vz(a, b)),
            (Feature::L1(a), Feature::L1(b)) => Feature::L1(vz(a, b)),
            (Feature::Sup(a), Feature::Sup(b)) => Feature::Sup(vz(a, b)),
            (Feature::Blocks(a), Feature::Blocks(b)) => {
                Feature::Blocks(a.iter().zip(b).map(|(x, y)| x.zip_map(y, |p, q| f(p, q))).collect())
            }
            (Feature::Entries(a), Feature::Entries(b)) => {
                Feature::Entries(Box::new(std::array::from_fn(|k| a[k].zip(&b[k], f))))
            }
            _ => panic!("features of different norm kinds cannot be combined"),
        }
    }

    pub fn add(&self, other: &Feature) -> Feature {
        self.zip(other, &|a, b| a + b)
    }

    pub fn sub(&self, other: &Feature) -> Feature {
        self.zip(other, &|a, b| a - b)
    }

    /// `‖self + other‖` without keeping the sum around.
    pub fn norm_of_sum(&self, other: &Feature) -> f64 {
        match (self, other) {
            (Feature::L2(a), Feature::L2(b)) => {
                a.iter().zip(b.iter()).map(|(x, y)| (x + y).norm_sqr()).sum::<f64>().sqrt()
            }
            (Feature::L1(a), Feature::L1(b)) => a.iter().zip(b.iter()).map(|(x, y)| (x + y).norm()).sum(),
            _ => self.add(other).norm(),
        }
    }

    /// `‖self − other‖`.
    pub fn distance(&self, other: &Feature) -> f64 {
        match (self, other) {
            (Feature::L2(a), Feature::L2(b)) => {
                a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
            }
            (Feature::L1(a), Feature::L1(b)) => a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).sum(),
            _ => self.sub(other).norm(),
        }
    }

    pub fn neg(&self) -> Feature {
        self.scale(C64::new(-1.0, 0.0))
    }

    pub fn scale(&self, z: C64) -> Feature {
        match self {
            Feature::L2(v) => Feature::L2(v * z),
            Feature::L1(v) => Feature::L1(v * z),
            Feature::Sup(v) => Feature::Sup(v * z),
            Feature::Blocks(b) => Feature::Blocks(b.iter().map(|m| m * z).collect()),
            Feature::Entries(e) => Feature::Entries(Box::new(std::array::from_fn(|k| e[k].scale(z)))),
        }
    }

    /// Apply a linear map to an `L2` feature (entrywise for lifts).
    pub fn map_l2(&self, u: &CMat) -> Feature {
        match self {
            Feature::L2(v) => Feature::L2(u * v),
            Feature::Entries(e) => Feature::Entries(Box::new(std::array::from_fn(|k| e[k].map_l2(u)))),
            _ => panic!("only Euclidean features can be transported"),
        }
    }

    /// All coordinates in one vector; used for rank tests.
    pub fn flatten(&self) -> CVec {
        match self {
            Feature::L2(v) | Feature::L1(v) | Feature::Sup(v) => v.clone(),
            Feature::Blocks(b) => {
                let n: usize = b.iter().map(|m| m.len()).sum();
                CVec::from_iterator(n, b.iter().flat_map(|m| m.iter().copied()))
            }
            Feature::Entries(e) => {
                let parts: Vec<CVec> = e.iter().map(Feature::flatten).collect();
                let n: usize = parts.iter().map(|p| p.len()).sum();
                CVec::from_iterator(n, parts.iter().flat_map(|p| p.iter().copied()))
            }
        }
    }
}

use std::fmt;

use serde::{Deserialize, Serialize};

/// Exponent vector `α` of nonnegative integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    /// The unit index `e_axis` in `dim` dimensions.
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut e = vec![0; dim];
        e[axis] = 1;
        Self(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// `|α|`
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `α!` as a float (exact for the small orders used here).
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&a| factorial(a)).product()
    }

    /// `(-1)^{|α|}`
    pub fn sign(&self) -> f64 {
        if self.order() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Evaluates the monomial `z^α`.
    pub fn monomial(&self, z: &[f64]) -> f64 {
        debug_assert_eq!(z.len(), self.0.len());
        self.0
            .iter()
            .zip(z)
            .map(|(&a, &x)| x.powi(a as i32))
            .product()
    }

    /// Concatenation `(β, γ)`.
    pub fn concat(&self, other: &MultiIndex) -> MultiIndex {
        let mut e = self.0.clone();
        e.extend_from_slice(&other.0);
        MultiIndex(e)
    }

    /// Splits `α` into `(β, γ)` with `β` of length `m`.
    pub fn split_at(&self, m: usize) -> (MultiIndex, MultiIndex) {
        let (a, b) = self.0.split_at(m);
        (MultiIndex(a.to_vec()), MultiIndex(b.to_vec()))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// All indices in `dim` variables of exactly the given order, in
    /// lexicographically decreasing order of the leading exponent.
    pub fn of_order(dim: usize, order: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; dim];
        compositions(dim, order, 0, &mut cur, &mut out);
        out
    }

    /// All indices of order at most `k`, sorted by order.
    pub fn up_to(dim: usize, k: u32) -> Vec<MultiIndex> {
        (0..=k).flat_map(|o| Self::of_order(dim, o)).collect()
    }
}

fn compositions(dim: usize, remaining: u32, pos: usize, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if dim == 0 {
        if remaining == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    if pos == dim - 1 {
        cur[pos] = remaining;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for a in (0..=remaining).rev() {
        cur[pos] = a;
        compositions(dim, remaining - a, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

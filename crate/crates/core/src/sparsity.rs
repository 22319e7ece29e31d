//! Support sets, hard thresholding and index-set gather/scatter.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{NstError, Result};

/// Sorted, duplicate-free index set inside `0..ambient`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SupportSet {
    indices: Vec<usize>,
    ambient: usize,
}

impl SupportSet {
    /// Builds a support from arbitrary-order indices; duplicates or
    /// out-of-range entries are rejected.
    pub fn new(mut indices: Vec<usize>, ambient: usize) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(NstError::InvalidConfig("duplicate support index".into()));
        }
        if let Some(&last) = indices.last() {
            if last >= ambient {
                return Err(NstError::DimensionMismatch {
                    expected: ambient,
                    found: last + 1,
                });
            }
        }
        Ok(Self { indices, ambient })
    }

    pub fn empty(ambient: usize) -> Self {
        Self {
            indices: Vec::new(),
            ambient,
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self {
            indices: (0..ambient).collect(),
            ambient,
        }
    }

    #[inline]
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    #[inline]
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn complement(&self) -> SupportSet {
        let mut mask = vec![true; self.ambient];
        for &i in &self.indices {
            mask[i] = false;
        }
        SupportSet {
            indices: (0..self.ambient).filter(|&i| mask[i]).collect(),
            ambient: self.ambient,
        }
    }

    pub fn union(&self, other: &SupportSet) -> SupportSet {
        let mut idx: Vec<usize> = self.indices.iter().chain(&other.indices).copied().collect();
        idx.sort_unstable();
        idx.dedup();
        SupportSet {
            indices: idx,
            ambient: self.ambient.max(other.ambient),
        }
    }

    /// Indices of nonzero entries of `x`.
    pub fn of_nonzeros(x: &[f64]) -> SupportSet {
        SupportSet {
            indices: (0..x.len()).filter(|&i| x[i] != 0.0).collect(),
            ambient: x.len(),
        }
    }
}

// Larger magnitude first; equal magnitudes resolved by smaller index.
fn by_magnitude(x: &[f64]) -> impl Fn(&usize, &usize) -> Ordering + '_ {
    move |&i, &j| x[j].abs().total_cmp(&x[i].abs()).then(i.cmp(&j))
}

/// Indices of the `s` largest-magnitude entries of `x`, ties going to the
/// smaller index. Always returns exactly `s` indices, zeros included.
pub fn select_support(x: &[f64], s: usize) -> Result<SupportSet> {
    if s > x.len() {
        return Err(NstError::SparsityTooLarge { s, len: x.len() });
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    if s > 0 && s < x.len() {
        order.select_nth_unstable_by(s - 1, by_magnitude(x));
    }
    order.truncate(s);
    order.sort_unstable();
    Ok(SupportSet {
        indices: order,
        ambient: x.len(),
    })
}

/// Keeps the `s` largest-magnitude entries of `x` and zeroes the rest.
pub fn hard_threshold(x: &[f64], s: usize) -> Result<Vec<f64>> {
    let t = select_support(x, s)?;
    Ok(restrict(x, &t))
}

/// `x` with every entry outside `t` set to zero.
pub fn restrict(x: &[f64], t: &SupportSet) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for &i in t.indices() {
        out[i] = x[i];
    }
    out
}

/// `x_T`: the entries of `x` listed by `t`.
pub fn gather(x: &[f64], t: &SupportSet) -> Result<Vec<f64>> {
    if x.len() != t.ambient() {
        return Err(NstError::DimensionMismatch {
            expected: t.ambient(),
            found: x.len(),
        });
    }
    Ok(t.indices().iter().map(|&i| x[i]).collect())
}

/// Places `vals` at the positions of `t` inside a zero vector of length `ambient`.
pub fn scatter(vals: &[f64], t: &SupportSet, ambient: usize) -> Result<Vec<f64>> {
    if vals.len() != t.len() {
        return Err(NstError::DimensionMismatch {
            expected: t.len(),
            found: vals.len(),
        });
    }
    if ambient != t.ambient() {
        return Err(NstError::DimensionMismatch {
            expected: t.ambient(),
            found: ambient,
        });
    }
    let mut out = vec![0.0; ambient];
    for (&i, &v) in t.indices().iter().zip(vals) {
        out[i] = v;
    }
    Ok(out)
}

/// Number of nonzero entries.
pub fn l0(x: &[f64]) -> usize {
    x.iter().filter(|v| **v != 0.0).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn largest_two() {
        let t = select_support(&[3.0, -1.0, 0.5, 0.0], 2).unwrap();
        assert_eq!(t.indices(), &[0, 1]);
        assert_eq!(hard_threshold(&[3.0, -1.0, 0.5, 0.0], 2).unwrap(), vec![3.0, -1.0, 0.0, 0.0]);
    }

    #[test]
    fn tie_goes_to_smaller_index() {
        assert_eq!(select_support(&[1.0, -1.0], 1).unwrap().indices(), &[0]);
        assert_eq!(select_support(&[0.0, 2.0, -2.0, 2.0], 2).unwrap().indices(), &[1, 2]);
    }

    #[test]
    fn least_squares_start_of_single_equation() {
        // x⁰ = A*(AA*)⁻¹b for A = [2, 1], b = 2
        assert_eq!(select_support(&[0.8, 0.4], 1).unwrap().indices(), &[0]);
        assert_eq!(hard_threshold(&[0.8, 0.4], 1).unwrap(), vec![0.8, 0.0]);
    }

    #[test]
    fn zeros_fill_support() {
        let t = select_support(&[0.0, 5.0, 0.0, 0.0], 3).unwrap();
        assert_eq!(t.indices(), &[0, 1, 2]);
    }

    #[test]
    fn too_large_sparsity() {
        assert_eq!(
            select_support(&[1.0], 2).unwrap_err(),
            NstError::SparsityTooLarge { s: 2, len: 1 }
        );
        assert!(hard_threshold(&[1.0], 2).is_err());
    }

    #[test]
    fn gather_scatter_examples() {
        let t = SupportSet::new(vec![2, 0], 3).unwrap();
        assert_eq!(gather(&[5.0, 6.0, 7.0], &t).unwrap(), vec![5.0, 7.0]);
        assert_eq!(scatter(&[5.0, 7.0], &t, 3).unwrap(), vec![5.0, 0.0, 7.0]);
        assert!(scatter(&[5.0], &t, 3).is_err());
        assert!(gather(&[5.0, 6.0], &t).is_err());
    }

    #[test]
    fn support_validation() {
        assert!(SupportSet::new(vec![1, 1], 3).is_err());
        assert!(SupportSet::new(vec![3], 3).is_err());
    }

    fn sorted_reference(x: &[f64], s: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..x.len()).collect();
        order.sort_by(|&i, &j| x[j].abs().total_cmp(&x[i].abs()).then(i.cmp(&j)));
        let mut top: Vec<usize> = order[..s].to_vec();
        top.sort_unstable();
        top
    }

    fn vec_and_s() -> impl Strategy<Value = (Vec<f64>, usize)> {
        // Small integer-valued entries make ties common.
        prop::collection::vec(-4i32..=4, 1..40)
            .prop_flat_map(|v| {
                let len = v.len();
                (Just(v.into_iter().map(f64::from).collect::<Vec<_>>()), 0..=len)
            })
    }

    proptest! {
        #[test]
        fn partial_selection_matches_full_sort((x, s) in vec_and_s()) {
            let t = select_support(&x, s).unwrap();
            prop_assert_eq!(t.len(), s);
            prop_assert_eq!(t.indices().to_vec(), sorted_reference(&x, s));
        }

        #[test]
        fn best_s_term_approximation(
            (x, s) in vec_and_s(),
            y in prop::collection::vec(-5.0f64..5.0, 40),
        ) {
            let ht = hard_threshold(&x, s).unwrap();
            let err = crate::linalg::dist2(&ht, &x);
            // Any s-sparse competitor: y restricted to some s indices.
            let competitor = hard_threshold(&y[..x.len()], s).unwrap();
            prop_assert!(err <= crate::linalg::dist2(&competitor, &x) + 1e-12);
            prop_assert!(l0(&ht) <= s);
        }

        #[test]
        fn split_reassembles_exactly(
            x in prop::collection::vec(-10.0f64..10.0, 1..30),
            picks in prop::collection::vec(any::<bool>(), 30),
        ) {
            let n = x.len();
            let t = SupportSet::new((0..n).filter(|&i| picks[i]).collect(), n).unwrap();
            let tc = t.complement();
            prop_assert_eq!(tc.complement(), t.clone());
            let a = scatter(&gather(&x, &t).unwrap(), &t, n).unwrap();
            let b = scatter(&gather(&x, &tc).unwrap(), &tc, n).unwrap();
            let sum: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p + q).collect();
            prop_assert_eq!(sum, x.clone());
            let v = gather(&x, &t).unwrap();
            prop_assert_eq!(gather(&scatter(&v, &t, n).unwrap(), &t).unwrap(), v);
        }
    }
}

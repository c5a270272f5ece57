//! Moment systems `Σ_i a_i ∏_j b_ij^{ℓ_j}` and the cancellation argument.
//!
//! All moments with exponents below `|I|` vanish exactly when every class of
//! equal tuples has coefficient sum zero. [`MomentSystem::find_nonzero_moment`]
//! turns a nonzero class sum into an explicit exponent tuple whose moment is
//! nonzero, each exponent bounded by the number of distinct values in its
//! coordinate.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, FieldValue};

/// Systems up to this many terms are grouped by pairwise comparison instead of hashing.
const LINEAR_GROUPING_MAX: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentSystem {
    spec: FieldSpec,
    a: Vec<FieldValue>,
    b: Vec<Vec<FieldValue>>,
    s: usize,
}

impl MomentSystem {
    pub fn new(spec: FieldSpec, a: Vec<FieldValue>, b: Vec<Vec<FieldValue>>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidSpec(format!(
                "{} coefficients but {} tuples",
                a.len(),
                b.len()
            )));
        }
        let s = b.first().map_or(0, Vec::len);
        if b.iter().any(|t| t.len() != s) {
            return Err(Error::InvalidSpec("tuples have different lengths".into()));
        }
        if !b.is_empty() && s == 0 {
            return Err(Error::InvalidSpec(
                "tuples must have length at least 1".into(),
            ));
        }
        for v in a.iter().chain(b.iter().flatten()) {
            if v.spec() != spec {
                return Err(Error::SpecMismatch(spec.to_string(), v.spec().to_string()));
            }
        }
        Ok(MomentSystem { spec, a, b, s })
    }

    /// Replaces the coefficients, keeping the tuples.
    pub fn set_coefficients(&mut self, a: Vec<FieldValue>) -> Result<()> {
        if a.len() != self.b.len() {
            return Err(Error::InvalidSpec(format!(
                "{} coefficients but {} tuples",
                a.len(),
                self.b.len()
            )));
        }
        if let Some(v) = a.iter().find(|v| v.spec() != self.spec) {
            return Err(Error::SpecMismatch(
                self.spec.to_string(),
                v.spec().to_string(),
            ));
        }
        self.a = a;
        Ok(())
    }

    /// The `s = 1` system `Σ a_i x_i^ℓ`.
    pub fn univariate(spec: FieldSpec, a: Vec<FieldValue>, x: Vec<FieldValue>) -> Result<Self> {
        MomentSystem::new(spec, a, x.into_iter().map(|v| vec![v]).collect())
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Tuple length `s`.
    pub fn width(&self) -> usize {
        self.s
    }

    /// `Σ_i a_i ∏_j b_ij^{e_j}`.
    pub fn moment(&self, exponents: &[u64]) -> FieldValue {
        let mut total = self.spec.zero();
        for (a, t) in self.a.iter().zip(&self.b) {
            let mut term = a.clone();
            for (b, &e) in t.iter().zip(exponents) {
                if term.is_zero() {
                    break;
                }
                if e > 0 {
                    term *= &b.pow(e);
                }
            }
            total += term;
        }
        total
    }

    /// Groups indices by tuple; one `(tuple, Σ a_i)` per class in first-occurrence order.
    pub fn class_sums(&self) -> Vec<(Vec<FieldValue>, FieldValue)> {
        let (classes, _) = self.classes();
        classes
    }

    fn classes(&self) -> (Vec<(Vec<FieldValue>, FieldValue)>, Vec<usize>) {
        let mut index: HashMap<&[FieldValue], usize> = HashMap::new();
        let mut classes: Vec<(Vec<FieldValue>, FieldValue)> = Vec::new();
        let mut class_of = Vec::with_capacity(self.len());
        let linear = self.len() <= LINEAR_GROUPING_MAX;
        for (a, t) in self.a.iter().zip(&self.b) {
            let next = classes.len();
            let c = if linear {
                classes.iter().position(|(u, _)| u == t).unwrap_or(next)
            } else {
                *index.entry(t.as_slice()).or_insert(next)
            };
            if c == next {
                classes.push((t.clone(), self.spec.zero()));
            }
            classes[c].1 += a;
            class_of.push(c);
        }
        (classes, class_of)
    }

    pub fn all_class_sums_zero(&self) -> bool {
        self.class_sums().iter().all(|(_, s)| s.is_zero())
    }

    /// Whether every moment with all exponents in `0..bound` vanishes.
    pub fn verify_moments(&self, bound: u64, cap: u64) -> Result<bool> {
        if self.is_empty() || bound == 0 {
            return Ok(true);
        }
        let grid = (bound as u128)
            .checked_pow(self.s as u32)
            .unwrap_or(u128::MAX);
        if grid > cap as u128 {
            return Err(Error::budget("moment grid", grid, cap));
        }
        // powers[i][j][e] = b_ij^e
        let powers: Vec<Vec<Vec<FieldValue>>> = self
            .b
            .iter()
            .map(|t| {
                t.iter()
                    .map(|x| {
                        let mut row = Vec::with_capacity(bound as usize);
                        let mut acc = self.spec.one();
                        for _ in 0..bound {
                            row.push(acc.clone());
                            acc *= x;
                        }
                        row
                    })
                    .collect()
            })
            .collect();
        let mut e = vec![0usize; self.s];
        loop {
            let mut total = self.spec.zero();
            for (a, pw) in self.a.iter().zip(&powers) {
                let mut term = a.clone();
                for (j, &ej) in e.iter().enumerate() {
                    term *= &pw[j][ej];
                }
                total += term;
            }
            if !total.is_zero() {
                return Ok(false);
            }
            let mut j = 0;
            loop {
                if j == self.s {
                    return Ok(true);
                }
                e[j] += 1;
                if (e[j] as u64) < bound {
                    break;
                }
                e[j] = 0;
                j += 1;
            }
        }
    }

    /// Exponents with a nonzero moment, or `None` when all class sums vanish.
    /// Exponent `j` is below the number of distinct values in coordinate `j`.
    pub fn find_nonzero_moment(&self) -> Option<Vec<u64>> {
        let (classes, class_of) = self.classes();
        let hot: Vec<bool> = class_of.iter().map(|&c| !classes[c].1.is_zero()).collect();
        if !hot.iter().any(|&h| h) {
            return None;
        }
        let all: Vec<usize> = (0..self.len()).collect();
        Some(self.nonzero_from(&all, 0, &hot))
    }

    /// Requires some index in `terms` to belong to a class with nonzero sum;
    /// returns exponents for coordinates `coord..` whose partial moment over
    /// `terms` is nonzero.
    fn nonzero_from(&self, terms: &[usize], coord: usize, hot: &[bool]) -> Vec<u64> {
        if coord == self.s {
            return Vec::new();
        }
        let mut groups: Vec<(&FieldValue, Vec<usize>)> = Vec::new();
        for &i in terms {
            let x = &self.b[i][coord];
            match groups.iter_mut().find(|(v, _)| *v == x) {
                Some((_, members)) => members.push(i),
                None => groups.push((x, vec![i])),
            }
        }
        let chosen = groups
            .iter()
            .find(|(_, members)| members.iter().any(|&i| hot[i]))
            .expect("caller guarantees a nonzero class");
        let tail = self.nonzero_from(&chosen.1, coord + 1, hot);
        // Group moments: the chosen one is nonzero, so the Vandermonde system in
        // the distinct group values has a nonzero entry below groups.len().
        let group_moments: Vec<FieldValue> = groups
            .iter()
            .map(|(_, members)| {
                let mut total = self.spec.zero();
                for &i in members {
                    let mut term = self.a[i].clone();
                    for (j, &e) in tail.iter().enumerate() {
                        if e > 0 {
                            term *= &self.b[i][coord + 1 + j].pow(e);
                        }
                    }
                    total += term;
                }
                total
            })
            .collect();
        for e in 0..groups.len() as u64 {
            let mut total = self.spec.zero();
            for ((x, _), gm) in groups.iter().zip(&group_moments) {
                total += x.pow(e) * gm;
            }
            if !total.is_zero() {
                let mut out = vec![e];
                out.extend(tail);
                return out;
            }
        }
        unreachable!("a Vandermonde system with a nonzero right-hand entry has a nonzero moment")
    }

    /// The cancellation theorem on this instance: if all moments below `|I|`
    /// vanish then every class sum is zero.
    pub fn cancellation_conclusion_check(&self, cap: u64) -> Result<bool> {
        if self.verify_moments(self.len() as u64, cap)? {
            Ok(self.all_class_sums_zero())
        } else {
            Ok(true)
        }
    }
}

/// The shifted univariate variant: if `Σ a_i x_i^j = 0` for `1 ≤ j ≤ n` then
/// `Σ a_i f(x_i) = 0` for every `f` with `f(0) = 0`, i.e. every class with a
/// nonzero value has zero coefficient sum. Returns whether that implication
/// holds on this instance.
pub fn shifted_conclusion_check(
    spec: FieldSpec,
    a: &[FieldValue],
    x: &[FieldValue],
) -> Result<bool> {
    let sys = MomentSystem::univariate(spec, a.to_vec(), x.to_vec())?;
    let n = a.len() as u64;
    let hypothesis = (1..=n).all(|j| sys.moment(&[j]).is_zero());
    if !hypothesis {
        return Ok(true);
    }
    Ok(sys
        .class_sums()
        .iter()
        .all(|(t, s)| t[0].is_zero() || s.is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    fn sys(a: &[i64], b: &[&[i64]]) -> MomentSystem {
        MomentSystem::new(
            q(),
            a.iter().map(|&v| q().from_i64(v)).collect(),
            b.iter()
                .map(|t| t.iter().map(|&v| q().from_i64(v)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn documented_examples() {
        let s = sys(&[1, -1], &[&[3], &[3]]);
        assert_eq!(s.class_sums(), vec![(vec![q().from_i64(3)], q().zero())]);
        assert!(s.verify_moments(2, 1000).unwrap());
        let s = sys(&[2, 5], &[&[1], &[-1]]);
        assert_eq!(
            s.class_sums()
                .iter()
                .map(|c| c.1.clone())
                .collect::<Vec<_>>(),
            vec![q().from_i64(2), q().from_i64(5)]
        );
        assert!(!sys(&[1, 1], &[&[1], &[-1]])
            .verify_moments(2, 1000)
            .unwrap());
        assert!(sys(&[1, 1, -2], &[&[1, 0], &[1, 0], &[1, 0]])
            .verify_moments(3, 1000)
            .unwrap());
        let empty = MomentSystem::new(q(), vec![], vec![]).unwrap();
        assert!(empty.class_sums().is_empty());
        assert!(empty.cancellation_conclusion_check(10).unwrap());
    }

    #[test]
    fn nonzero_moment_is_found_and_bounded() {
        let s = sys(
            &[1, -1, 2, -2, 3],
            &[&[0, 1], &[0, 2], &[1, 1], &[1, 2], &[0, 1]],
        );
        let e = s.find_nonzero_moment().unwrap();
        assert!(!s.moment(&e).is_zero());
        assert!(e[0] < 2 && e[1] < 2);
        assert_eq!(
            sys(&[1, -1], &[&[5, 5], &[5, 5]]).find_nonzero_moment(),
            None
        );
    }

    #[test]
    fn zero_base_uses_zero_to_the_zero_equals_one() {
        let s = sys(&[1, 1], &[&[0], &[1]]);
        let e = s.find_nonzero_moment().unwrap();
        assert!(!s.moment(&e).is_zero());
        assert_eq!(s.moment(&[0]), q().from_i64(2));
    }

    #[test]
    fn shifted_hypothesis_with_zero_points() {
        let zero = q().zero();
        // 1·0 + 1·1 − 1·1: positive moments vanish; the class at 0 need not cancel.
        let a = [q().from_i64(1), q().from_i64(1), q().from_i64(-1)];
        let x = [zero.clone(), q().from_i64(1), q().from_i64(1)];
        assert!(shifted_conclusion_check(q(), &a, &x).unwrap());
        let s = MomentSystem::univariate(q(), a.to_vec(), x.to_vec()).unwrap();
        assert!(!s.verify_moments(3, 100).unwrap());
    }

    #[test]
    fn budget() {
        let s = sys(&[1, 1], &[&[1, 2, 3], &[1, 2, 3]]);
        assert!(s.verify_moments(100, 1000).unwrap_err().is_budget());
    }
}

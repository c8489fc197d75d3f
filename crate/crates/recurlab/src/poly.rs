//! Dense integer polynomials with exact (big-integer) evaluation. Small
//! helper type shared by the family-membership and semigroup-criterion
//! modules; coefficients are stored ascending, trailing zeros trimmed.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntPoly {
    coeffs: Vec<i64>,
}

impl IntPoly {
    /// Coefficients ascending: c0 + c1 x + c2 x^2 + ...
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0);
        }
        IntPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> i64 {
        *self.coeffs.last().unwrap()
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn eval_big(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::from(0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + BigInt::from(c);
        }
        acc
    }

    pub fn eval_u64(&self, x: u64) -> BigInt {
        self.eval_big(&BigInt::from(x))
    }

    /// Formal derivative.
    pub fn derivative(&self) -> IntPoly {
        if self.is_constant() {
            return IntPoly::new(vec![0]);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c.checked_mul(i as i64).expect("derivative overflow"))
            .collect();
        IntPoly::new(coeffs)
    }

    /// A point beyond which the polynomial is strictly increasing, assuming
    /// a positive leading coefficient (Cauchy bound on the derivative's
    /// roots). Returns None for constants or non-positive leading terms.
    pub fn increasing_from(&self) -> Option<u64> {
        if self.is_constant() || self.leading() <= 0 {
            return None;
        }
        if self.degree() == 1 {
            return Some(1);
        }
        let d = self.derivative();
        let lead = d.leading() as u128;
        let max_low = d.coeffs[..d.coeffs.len() - 1]
            .iter()
            .map(|c| c.unsigned_abs() as u128)
            .max()
            .unwrap_or(0);
        let bound = 2 + max_low / lead + u128::from(max_low % lead != 0);
        Some(u64::try_from(bound).unwrap_or(u64::MAX))
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 && self.degree() > 0 {
                continue;
            }
            if !first {
                write!(f, " {} ", if c < 0 { "-" } else { "+" })?;
            } else if c < 0 {
                write!(f, "-")?;
            }
            let a = c.unsigned_abs();
            match i {
                0 => write!(f, "{a}")?,
                _ => {
                    if a != 1 {
                        write!(f, "{a}")?;
                    }
                    write!(f, "x")?;
                    if i > 1 {
                        write!(f, "^{i}")?;
                    }
                }
            }
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_degree() {
        // 9 + 12x + 4x^2 = (2x+3)^2
        let p = IntPoly::new(vec![9, 12, 4]);
        assert_eq!(p.degree(), 2);
        assert_eq!(p.eval_u64(1), BigInt::from(25));
        assert_eq!(p.eval_u64(10), BigInt::from(529));
        assert_eq!(p.eval_big(&BigInt::from(-3)), BigInt::from(9));
    }

    #[test]
    fn trailing_zeros_trim() {
        let p = IntPoly::new(vec![1, 2, 0, 0]);
        assert_eq!(p.degree(), 1);
        assert_eq!(IntPoly::new(vec![]).degree(), 0);
        assert_eq!(IntPoly::new(vec![0, 0]).coeffs(), &[0]);
    }

    #[test]
    fn derivative_rule() {
        let p = IntPoly::new(vec![6, 0, 5, 0, 1]); // x^4 + 5x^2 + 6
        assert_eq!(p.derivative().coeffs(), &[0, 10, 0, 4]);
    }

    #[test]
    fn increasing_tail_is_sound() {
        for coeffs in [
            vec![6, 0, 5, 0, 1],
            vec![-100, -50, 1],
            vec![3, 2],
            vec![0, -40, 0, 2],
        ] {
            let p = IntPoly::new(coeffs);
            let n0 = p.increasing_from().unwrap();
            let mut prev = p.eval_u64(n0);
            for n in n0 + 1..n0 + 200 {
                let cur = p.eval_u64(n);
                assert!(cur > prev, "{p} not increasing at {n}");
                prev = cur;
            }
        }
        assert_eq!(IntPoly::new(vec![5]).increasing_from(), None);
        assert_eq!(IntPoly::new(vec![5, -1]).increasing_from(), None);
    }

    #[test]
    fn display_reads_naturally() {
        assert_eq!(IntPoly::new(vec![9, 12, 4]).to_string(), "4x^2 + 12x + 9");
        assert_eq!(IntPoly::new(vec![0, -1, 1]).to_string(), "x^2 - x");
        assert_eq!(IntPoly::new(vec![-7]).to_string(), "-7");
    }
}

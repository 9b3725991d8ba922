use std::fmt;

use crate::scalar::Scalar;

/// A power product `x_1^b_1 * ... * x_n^b_n`, stored densely.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    exponents: Vec<u32>,
    degree: u32,
}

impl Term {
    pub fn new(exponents: Vec<u32>) -> Self {
        let degree = exponents.iter().sum();
        Self { exponents, degree }
    }

    /// The term `1` in `n` variables.
    pub fn one(n: usize) -> Self {
        Self::new(vec![0; n])
    }

    /// The variable `x_var` (0-based) in `n` variables.
    pub fn var(n: usize, var: usize) -> Self {
        let mut e = vec![0; n];
        e[var] = 1;
        Self::new(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn nvars(&self) -> usize {
        self.exponents.len()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    /// `x_var * self`.
    pub fn mul_var(&self, var: usize) -> Self {
        let mut e = self.exponents.clone();
        e[var] += 1;
        Self {
            exponents: e,
            degree: self.degree + 1,
        }
    }

    /// True when `self` divides `other`.
    pub fn divides(&self, other: &Term) -> bool {
        self.degree <= other.degree
            && self
                .exponents
                .iter()
                .zip(&other.exponents)
                .all(|(a, b)| a <= b)
    }

    /// Formal partial derivative with respect to `x_var`: returns the integer
    /// coefficient and the lowered term, or `None` when the variable is absent.
    pub fn formal_partial(&self, var: usize) -> Option<(u32, Term)> {
        let b = self.exponents[var];
        if b == 0 {
            return None;
        }
        let mut e = self.exponents.clone();
        e[var] -= 1;
        Some((
            b,
            Term {
                exponents: e,
                degree: self.degree - 1,
            },
        ))
    }

    /// Evaluates the term at a point given as a coordinate slice.
    pub fn eval<T: Scalar>(&self, point: impl IntoIterator<Item = T>) -> T {
        let mut acc = T::one();
        for (&b, x) in self.exponents.iter().zip(point) {
            if b > 0 {
                acc *= x.powi(b as i32);
            }
        }
        acc
    }

    /// Renders the term with the given variable names.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        TermDisplay { term: self, names }
    }
}

struct TermDisplay<'a> {
    term: &'a Term,
    names: &'a [String],
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.term.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for (i, &b) in self.term.exponents.iter().enumerate() {
            if b == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            match self.names.get(i) {
                Some(name) => f.write_str(name)?,
                None => write!(f, "x{}", i + 1)?,
            }
            if b > 1 {
                write!(f, "^{b}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_with(&[]).fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_of_x2y() {
        // d/dx (x^2 y) = 2 * x y
        let t = Term::new(vec![2, 1]);
        assert_eq!(t.formal_partial(0), Some((2, Term::new(vec![1, 1]))));
    }

    #[test]
    fn partial_of_absent_variable_is_zero() {
        let t = Term::new(vec![3, 0]);
        assert_eq!(t.formal_partial(1), None);
    }

    #[test]
    fn partial_composed_with_eval() {
        // d/dy (y^2) at (2.05, 1.98) = 2 * 1.98
        let t = Term::new(vec![0, 2]);
        let (c, d) = t.formal_partial(1).unwrap();
        let v = c as f64 * d.eval([2.05, 1.98]);
        assert!((v - 3.96).abs() < 1e-14);
    }

    #[test]
    fn divisibility() {
        let x = Term::new(vec![1, 0]);
        let xy = Term::new(vec![1, 1]);
        assert!(x.divides(&xy));
        assert!(xy.divides(&xy));
        assert!(!xy.divides(&x));
    }

    #[test]
    fn display() {
        let names = vec!["x".to_string(), "y".to_string()];
        assert_eq!(
            Term::new(vec![2, 1]).display_with(&names).to_string(),
            "x^2*y"
        );
        assert_eq!(Term::one(2).to_string(), "1");
        assert_eq!(Term::new(vec![0, 3]).to_string(), "x2^3");
    }
}

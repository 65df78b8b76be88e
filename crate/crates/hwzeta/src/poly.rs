//! Sparse multivariate (Laurent) polynomials over F_p in the
//! coefficient variables Lambda_1..Lambda_N.  Exponents are signed so
//! the same type covers the monomial-rescaled Laurent matrices used by
//! the invertibility checks; ordinary matrix entries keep all
//! exponents nonnegative.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{internal, Result};
use crate::field::{FieldCtx, FieldElement};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseModPoly {
    p: u64,
    nvars: usize,
    terms: BTreeMap<Vec<i32>, u64>,
}

impl SparseModPoly {
    pub fn zero(p: u64, nvars: usize) -> SparseModPoly {
        SparseModPoly {
            p,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(p: u64, nvars: usize, c: u64) -> SparseModPoly {
        let mut poly = Self::zero(p, nvars);
        poly.add_term(vec![0; nvars], c);
        poly
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, u64)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn coefficient(&self, exps: &[i32]) -> u64 {
        self.terms.get(exps).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, exps: Vec<i32>, c: u64) {
        debug_assert_eq!(exps.len(), self.nvars);
        let c = c % self.p;
        if c == 0 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Occupied(mut o) => {
                let v = (*o.get() + c) % self.p;
                if v == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
        }
    }

    pub fn add(&self, other: &SparseModPoly) -> SparseModPoly {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &SparseModPoly) -> SparseModPoly {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e.clone(), self.p - c);
        }
        out
    }

    pub fn scale(&self, c: u64) -> SparseModPoly {
        let mut out = SparseModPoly::zero(self.p, self.nvars);
        for (e, v) in self.terms() {
            out.add_term(e.clone(), v * (c % self.p) % self.p);
        }
        out
    }

    pub fn mul(&self, other: &SparseModPoly) -> SparseModPoly {
        let mut out = SparseModPoly::zero(self.p, self.nvars);
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                let e: Vec<i32> = ea.iter().zip(eb).map(|(&x, &y)| x + y).collect();
                out.add_term(e, ca * cb % self.p);
            }
        }
        out
    }

    /// Multiplies by the monomial Lambda^shift (entries may be negative).
    pub fn mul_monomial(&self, shift: &[i32], c: u64) -> SparseModPoly {
        let mut out = SparseModPoly::zero(self.p, self.nvars);
        for (e, v) in self.terms() {
            let e: Vec<i32> = e.iter().zip(shift).map(|(&x, &y)| x + y).collect();
            out.add_term(e, v * (c % self.p) % self.p);
        }
        out
    }

    /// Partial derivative with respect to variable `var`.
    pub fn derivative(&self, var: usize) -> SparseModPoly {
        let mut out = SparseModPoly::zero(self.p, self.nvars);
        for (e, c) in self.terms() {
            let k = e[var];
            if k == 0 {
                continue;
            }
            let factor = (k.rem_euclid(self.p as i32)) as u64;
            if factor == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.add_term(e2, c * factor % self.p);
        }
        out
    }

    /// Iterated derivative (d/dLambda_var)^order.
    pub fn derivative_pow(&self, var: usize, order: u32) -> SparseModPoly {
        let mut cur = self.clone();
        for _ in 0..order {
            cur = cur.derivative(var);
        }
        cur
    }

    /// Evaluates at a point of F_q^N, lifting the F_p coefficients via
    /// the prime subfield.  All exponents must be nonnegative.
    pub fn evaluate(&self, ctx: &FieldCtx, point: &[FieldElement]) -> Result<FieldElement> {
        if point.len() != self.nvars {
            return internal(format!(
                "evaluation point has {} entries, polynomial has {} variables",
                point.len(),
                self.nvars
            ));
        }
        let mut acc = ctx.zero();
        for (e, c) in self.terms() {
            let mut term = ctx.from_prime(c);
            for (j, &ej) in e.iter().enumerate() {
                if ej < 0 {
                    return internal("evaluation of a Laurent monomial with negative exponent");
                }
                if ej > 0 {
                    term = ctx.mul(&term, &ctx.pow(&point[j], ej as u64));
                }
            }
            acc = ctx.add(&acc, &term);
        }
        Ok(acc)
    }

    /// Maximum per-variable exponent over all terms.
    pub fn max_exponent(&self) -> i32 {
        self.terms
            .keys()
            .flat_map(|e| e.iter().copied())
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for SparseModPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (j, &ej) in e.iter().enumerate() {
                if ej != 0 {
                    write!(f, "*L{}^{}", j + 1, ej)?;
                }
            }
        }
        Ok(())
    }
}

//! Exact arithmetic in F_p, F_q = F_{p^a} and extensions F_{q^k}.
//!
//! Elements are coefficient vectors over F_p reduced modulo a monic
//! irreducible modulus that is chosen deterministically per (p, m):
//! the lexicographically smallest monic irreducible of degree m, with
//! coefficients compared leading-first and the constant coefficient
//! last.  The modulus is echoed in reports so runs are reproducible.

use crate::error::{input, internal, Error, Result};

/// Default bound on the field size p^m; overridable per context.
pub const DEFAULT_SIZE_GUARD: u64 = 1 << 20;

/// Immutable description of F_{p^m}.  Safe to share across workers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldCtx {
    p: u64,
    m: usize,
    /// Monic modulus, ascending powers, length m+1.
    modulus: Vec<u64>,
}

/// An element of some `FieldCtx`: its reduced coefficient vector
/// (length m, entries in [0, p-1], ascending powers).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement {
    pub coeffs: Vec<u64>,
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn checked_pow(p: u64, m: usize, guard: u64) -> Result<u64> {
    let mut acc: u64 = 1;
    for _ in 0..m {
        acc = acc
            .checked_mul(p)
            .filter(|&v| v <= guard)
            .ok_or_else(|| Error::GuardExceeded(format!("{p}^{m} exceeds guard {guard}")))?;
    }
    Ok(acc)
}

// ---- dense polynomial helpers over F_p (used for modulus search) ----

fn ptrim(mut f: Vec<u64>) -> Vec<u64> {
    while f.last() == Some(&0) {
        f.pop();
    }
    f
}

fn pmulmod(p: u64, a: &[u64], b: &[u64], f: &[u64]) -> Vec<u64> {
    // f monic of degree >= 1
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    let deg = f.len() - 1;
    for i in (deg..prod.len()).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for j in 0..deg {
            let t = (c * f[j]) % p;
            prod[i - deg + j] = (prod[i - deg + j] + p * p - t) % p;
        }
    }
    prod.truncate(deg);
    prod
}

fn ppow_xq(p: u64, e: u64, f: &[u64]) -> Vec<u64> {
    // computes x^(p^e) mod f by repeated p-th powering of x
    let deg = f.len() - 1;
    let mut cur = vec![0u64; deg.max(2)];
    if deg == 1 {
        // x mod f is a constant
        cur = vec![(p - f[0] % p) % p];
    } else {
        cur[1] = 1;
        cur.truncate(deg);
    }
    for _ in 0..e {
        // cur <- cur^p by square-and-multiply
        let mut acc = vec![1u64];
        acc.resize(deg, 0);
        let mut base = cur.clone();
        let mut exp = p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = pmulmod(p, &acc, &base, f);
            }
            base = pmulmod(p, &base, &base, f);
            exp >>= 1;
        }
        cur = acc;
    }
    cur
}

fn pgcd(p: u64, a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    let (mut a, mut b) = (ptrim(a), ptrim(b));
    while !b.is_empty() {
        // a mod b
        let db = b.len() - 1;
        let lead_inv = mod_inv(p, b[db]);
        while a.len() > db {
            let da = a.len() - 1;
            let c = (a[da] * lead_inv) % p;
            if c != 0 {
                for j in 0..=db {
                    let t = (c * b[j]) % p;
                    a[da - db + j] = (a[da - db + j] + p * p - t) % p;
                }
            }
            a = ptrim(a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a
}

/// Inverse of a nonzero residue modulo the prime p.
pub fn prime_inv(p: u64, a: u64) -> u64 {
    mod_inv(p, a % p)
}

fn mod_inv(p: u64, a: u64) -> u64 {
    // p prime, a nonzero mod p
    let mut result = 1u64;
    let mut base = a % p;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = (result * base) % p;
        }
        base = (base * base) % p;
        exp >>= 1;
    }
    result
}

fn is_irreducible(p: u64, f: &[u64]) -> bool {
    let m = f.len() - 1;
    if m == 1 {
        return true;
    }
    // x^(p^m) == x (mod f), and gcd(x^(p^(m/l)) - x, f) = 1 for prime l | m
    let xq = ppow_xq(p, m as u64, f);
    let mut want_x = vec![0u64; m];
    want_x[1] = 1;
    if ptrim(xq) != ptrim(want_x.clone()) {
        return false;
    }
    let mut mm = m;
    let mut ell = 2usize;
    let mut primes = Vec::new();
    while ell * ell <= mm {
        if mm % ell == 0 {
            primes.push(ell);
            while mm % ell == 0 {
                mm /= ell;
            }
        }
        ell += 1;
    }
    if mm > 1 {
        primes.push(mm);
    }
    for l in primes {
        let mut g = ppow_xq(p, (m / l) as u64, f);
        g.resize(m.max(2), 0);
        g[1] = (g[1] + p - 1) % p;
        let gcd = pgcd(p, g, f.to_vec());
        if gcd.len() != 1 {
            return false;
        }
    }
    true
}

impl FieldCtx {
    /// Builds F_{p^m} with the deterministically chosen modulus.
    pub fn new(p: u64, m: usize) -> Result<FieldCtx> {
        FieldCtx::with_guard(p, m, DEFAULT_SIZE_GUARD)
    }

    pub fn with_guard(p: u64, m: usize, guard: u64) -> Result<FieldCtx> {
        if !is_prime(p) {
            return input(format!("p = {p} is not prime"));
        }
        if m < 1 {
            return input("extension degree m must be >= 1");
        }
        checked_pow(p, m, guard)?;
        // Scan monic candidates in lexicographic coefficient order,
        // leading coefficient first, constant coefficient last.
        let total = {
            let mut t = 1u64;
            for _ in 0..m {
                t *= p;
            }
            t
        };
        for idx in 0..total {
            let mut f = vec![0u64; m + 1];
            f[m] = 1;
            let mut rest = idx;
            for i in 0..m {
                // big-endian digit order: first digit is c_{m-1}
                let digit_pos = m - 1 - i;
                let weight = {
                    let mut w = 1u64;
                    for _ in 0..digit_pos {
                        w *= p;
                    }
                    w
                };
                f[digit_pos] = rest / weight;
                rest %= weight;
            }
            if is_irreducible(p, &f) {
                return Ok(FieldCtx { p, m, modulus: f });
            }
        }
        internal(format!("no irreducible polynomial of degree {m} over F_{p}"))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> u64 {
        let mut acc = 1u64;
        for _ in 0..self.m {
            acc *= self.p;
        }
        acc
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            coeffs: vec![0; self.m],
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_prime(1)
    }

    /// The canonical inclusion of F_p.
    pub fn from_prime(&self, c: u64) -> FieldElement {
        let mut coeffs = vec![0; self.m];
        coeffs[0] = c % self.p;
        FieldElement { coeffs }
    }

    /// The class of x; only meaningful as a field generator for m >= 2.
    pub fn gen(&self) -> FieldElement {
        let mut coeffs = vec![0; self.m];
        if self.m >= 2 {
            coeffs[1] = 1;
        } else {
            coeffs[0] = 0; // x == 0 in F_p[x]/(x)
        }
        FieldElement { coeffs }
    }

    pub fn element(&self, coeffs: Vec<u64>) -> Result<FieldElement> {
        if coeffs.len() != self.m {
            return input(format!(
                "coefficient vector length {} != field degree {}",
                coeffs.len(),
                self.m
            ));
        }
        Ok(FieldElement {
            coeffs: coeffs.into_iter().map(|c| c % self.p).collect(),
        })
    }

    pub fn is_zero(&self, x: &FieldElement) -> bool {
        x.coeffs.iter().all(|&c| c == 0)
    }

    /// Returns Some(c) when x lies in the prime subfield.
    pub fn as_prime(&self, x: &FieldElement) -> Option<u64> {
        if x.coeffs[1..].iter().all(|&c| c == 0) {
            Some(x.coeffs[0])
        } else {
            None
        }
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| (x + y) % self.p)
                .collect(),
        }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| (x + self.p - y) % self.p)
                .collect(),
        }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        self.sub(&self.zero(), a)
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let prod = pmulmod(self.p, &a.coeffs, &b.coeffs, &self.modulus);
        let mut coeffs = prod;
        coeffs.resize(self.m, 0);
        FieldElement { coeffs }
    }

    pub fn pow(&self, a: &FieldElement, mut e: u64) -> FieldElement {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if self.is_zero(a) {
            return internal("inversion of zero".to_string());
        }
        Ok(self.pow(a, self.order() - 2))
    }

    /// x -> x^p by repeated-squaring exponentiation.
    pub fn frobenius(&self, a: &FieldElement) -> FieldElement {
        self.pow(a, self.p)
    }

    pub fn frobenius_iter(&self, a: &FieldElement, times: usize) -> FieldElement {
        let mut x = a.clone();
        for _ in 0..times {
            x = self.frobenius(&x);
        }
        x
    }

    /// The element at position `idx` of the enumeration order used by
    /// `all_elements` (base-p digits, leading coefficient varies
    /// slowest).
    pub fn element_by_index(&self, idx: u64) -> FieldElement {
        let mut coeffs = vec![0u64; self.m];
        let mut rest = idx;
        for i in (0..self.m).rev() {
            let weight = {
                let mut w = 1u64;
                for _ in 0..i {
                    w *= self.p;
                }
                w
            };
            coeffs[i] = rest / weight;
            rest %= weight;
        }
        FieldElement { coeffs }
    }

    /// Inverse of `element_by_index`.
    pub fn index_of(&self, x: &FieldElement) -> u64 {
        let mut idx = 0u64;
        for &c in x.coeffs.iter().rev() {
            idx = idx * self.p + c;
        }
        idx
    }

    /// All p^m elements exactly once, in lexicographic coefficient
    /// order (leading coefficient varies slowest).
    pub fn all_elements(&self) -> Vec<FieldElement> {
        (0..self.order())
            .map(|idx| self.element_by_index(idx))
            .collect()
    }

    /// A square root in F_{p^m} with p odd (Tonelli-Shanks), or None
    /// for quadratic nonresidues.
    pub fn sqrt(&self, a: &FieldElement) -> Option<FieldElement> {
        assert!(self.p != 2, "sqrt is only implemented for odd characteristic");
        if self.is_zero(a) {
            return Some(self.zero());
        }
        let q = self.order();
        if self.pow(a, (q - 1) / 2) != self.one() {
            return None;
        }
        let r = if q % 4 == 3 {
            self.pow(a, (q + 1) / 4)
        } else {
            // Q - 1 = 2^s * t with t odd
            let mut t = q - 1;
            let mut s = 0u32;
            while t % 2 == 0 {
                t /= 2;
                s += 1;
            }
            let z = (1..q)
                .map(|i| self.element_by_index(i))
                .find(|z| self.pow(z, (q - 1) / 2) != self.one())
                .expect("a nonresidue exists in every odd-order field");
            let mut c = self.pow(&z, t);
            let mut r = self.pow(a, (t + 1) / 2);
            let mut x = self.pow(a, t);
            let mut m = s;
            while x != self.one() {
                let mut i = 0u32;
                let mut y = x.clone();
                while y != self.one() {
                    y = self.mul(&y, &y);
                    i += 1;
                }
                let mut b = c.clone();
                for _ in 0..m - i - 1 {
                    b = self.mul(&b, &b);
                }
                r = self.mul(&r, &b);
                c = self.mul(&b, &b);
                x = self.mul(&x, &c);
                m = i;
            }
            r
        };
        debug_assert_eq!(self.mul(&r, &r), *a);
        Some(r)
    }

    /// Evaluates a polynomial with F_p coefficients (ascending) at x.
    pub fn eval_prime_poly(&self, poly: &[u64], x: &FieldElement) -> FieldElement {
        let mut acc = self.zero();
        for &c in poly.iter().rev() {
            acc = self.mul(&acc, x);
            acc = self.add(&acc, &self.from_prime(c));
        }
        acc
    }
}

/// A fixed field embedding F_{p^s} -> F_{p^t} with s | t, realized by
/// sending the source generator to the first root (in enumeration
/// order) of the source modulus in the target.
pub struct Embedding {
    src: FieldCtx,
    dst: FieldCtx,
    root: FieldElement,
}

impl Embedding {
    pub fn new(src: &FieldCtx, dst: &FieldCtx) -> Result<Embedding> {
        if src.p() != dst.p() {
            return input("embedding requires equal characteristic");
        }
        if dst.degree() % src.degree() != 0 {
            return input(format!(
                "incompatible degrees: {} does not divide {}",
                src.degree(),
                dst.degree()
            ));
        }
        let root = dst
            .all_elements()
            .into_iter()
            .find(|x| dst.is_zero(&dst.eval_prime_poly(src.modulus(), x)))
            .ok_or_else(|| {
                Error::Internal("source modulus has no root in target field".to_string())
            })?;
        Ok(Embedding {
            src: src.clone(),
            dst: dst.clone(),
            root,
        })
    }

    /// Like `new`, but finds the root in closed form for source
    /// degrees 1 and 2 instead of scanning the whole target field.
    /// Falls back to the scan for higher degrees.
    pub fn build(src: &FieldCtx, dst: &FieldCtx) -> Result<Embedding> {
        if src.p() != dst.p() {
            return input("embedding requires equal characteristic");
        }
        if dst.degree() % src.degree() != 0 {
            return input(format!(
                "incompatible degrees: {} does not divide {}",
                src.degree(),
                dst.degree()
            ));
        }
        let root = match src.degree() {
            // x + c: the root -c (irrelevant for mapping constants)
            1 => dst.from_prime(dst.p() - src.modulus()[0] % dst.p()),
            2 => quadratic_root(src.modulus(), dst)?,
            _ => {
                return Embedding::new(src, dst);
            }
        };
        if !dst.is_zero(&dst.eval_prime_poly(src.modulus(), &root)) {
            return internal("closed-form embedding root fails verification".to_string());
        }
        Ok(Embedding {
            src: src.clone(),
            dst: dst.clone(),
            root,
        })
    }

    pub fn map(&self, x: &FieldElement) -> FieldElement {
        self.dst.eval_prime_poly(&x.coeffs, &self.root)
    }

    pub fn src(&self) -> &FieldCtx {
        &self.src
    }

    pub fn dst(&self) -> &FieldCtx {
        &self.dst
    }
}

/// A root in `dst` of a monic quadratic x^2 + bx + c over F_p,
/// assumed irreducible over F_p with 2 | dst.degree().
fn quadratic_root(modulus: &[u64], dst: &FieldCtx) -> Result<FieldElement> {
    let p = dst.p();
    let (c, b) = (modulus[0] % p, modulus[1] % p);
    if p != 2 {
        // complete the square: x = y - b/2, y^2 = b^2/4 - c
        let inv2 = prime_inv(p, 2);
        let half_b = dst.from_prime(b * inv2 % p);
        let disc = dst.sub(&dst.mul(&half_b, &half_b), &dst.from_prime(c));
        let s = dst
            .sqrt(&disc)
            .ok_or_else(|| Error::Internal("quadratic splits in every even extension".into()))?;
        return Ok(dst.sub(&s, &half_b));
    }
    // char 2: the only irreducible monic quadratic over F_2 is
    // x^2 + x + 1, whose roots are the elements of order 3
    if b != 1 || c != 1 {
        return internal(format!("unexpected quadratic modulus over F_2: {modulus:?}"));
    }
    let q = dst.order();
    debug_assert_eq!((q - 1) % 3, 0);
    for idx in 2..q {
        let t = dst.pow(&dst.element_by_index(idx), (q - 1) / 3);
        if t != dst.one() {
            return Ok(t);
        }
    }
    internal("no element of order 3 found".to_string())
}

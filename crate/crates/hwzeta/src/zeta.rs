//! Independent ground truth: point counts N_k = #X_lambda(F_{q^k}),
//! the zeta series Z(t), the series P(t) of the zeta factorization,
//! the q^{-mu} rescaling with its integrality check, and reduction
//! mod p.
//!
//! Counting dispatches between exact strategies that are cross-checked
//! against each other in the tests: a closed-form count for quadratic
//! forms in odd characteristic, a class-function convolution for
//! diagonal forms, and direct enumeration of projective
//! representatives otherwise.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{input, internal, Error, Result};
use crate::field::{prime_inv, Embedding, FieldCtx, FieldElement};
use crate::instance::HypersurfaceSpec;

/// Default bound on the number of points visited by the enumeration
/// strategies.
pub const DEFAULT_ENUM_GUARD: u64 = 50_000_000;

/// Table-size bound for the diagonal-form strategy.
const DIAG_TABLE_GUARD: u64 = 1 << 24;

/// Field orders themselves are only bounded by u64 arithmetic.
const FIELD_GUARD: u64 = u64::MAX >> 1;

/// The spec's polynomial with coefficients embedded into F_{q^k};
/// zero-coefficient terms are dropped.
struct ExtInstance {
    ctx: FieldCtx,
    nvars: usize,
    terms: Vec<(Vec<u64>, FieldElement)>,
}

fn extend_instance(spec: &HypersurfaceSpec, k: usize) -> Result<ExtInstance> {
    let src = spec.field();
    let (ctx, map): (FieldCtx, Box<dyn Fn(&FieldElement) -> FieldElement>) = if k == 1 {
        (src.clone(), Box::new(|x: &FieldElement| x.clone()))
    } else {
        let dst = FieldCtx::with_guard(spec.p, spec.a * k, FIELD_GUARD)?;
        let emb = Embedding::build(src, &dst)?;
        (dst, Box::new(move |x: &FieldElement| emb.map(x)))
    };
    let terms: Vec<(Vec<u64>, FieldElement)> = spec
        .terms
        .iter()
        .filter(|t| !src.is_zero(&t.coeff))
        .map(|t| (t.exponents.clone(), map(&t.coeff)))
        .collect();
    if terms.is_empty() {
        return input("degenerate instance: f is the zero polynomial");
    }
    Ok(ExtInstance {
        ctx,
        nvars: spec.n + 1,
        terms,
    })
}

fn eval_f(inst: &ExtInstance, point: &[FieldElement]) -> FieldElement {
    let ctx = &inst.ctx;
    let mut acc = ctx.zero();
    'terms: for (exps, coeff) in &inst.terms {
        let mut term = coeff.clone();
        for (x, &e) in point.iter().zip(exps) {
            if e == 0 {
                continue;
            }
            if ctx.is_zero(x) {
                continue 'terms;
            }
            term = ctx.mul(&term, &ctx.pow(x, e));
        }
        acc = ctx.add(&acc, &term);
    }
    acc
}

/// Reference enumerator: scans the full affine box F_Q^{nvars}
/// single-threaded and returns the number of zeros of f (including
/// the origin).
pub fn count_affine_naive(spec: &HypersurfaceSpec, k: usize, guard: u64) -> Result<u64> {
    let inst = extend_instance(spec, k)?;
    let q = inst.ctx.order();
    let mut total: u128 = 1;
    for _ in 0..inst.nvars {
        total = total.saturating_mul(q as u128);
    }
    if total > guard as u128 {
        return Err(Error::GuardExceeded(format!(
            "naive enumeration of {total} points exceeds guard {guard}"
        )));
    }
    let elements = inst.ctx.all_elements();
    let mut idx = vec![0usize; inst.nvars];
    let mut point: Vec<FieldElement> = vec![inst.ctx.zero(); inst.nvars];
    let mut zeros = 0u64;
    loop {
        if inst.ctx.is_zero(&eval_f(&inst, &point)) {
            zeros += 1;
        }
        let mut i = inst.nvars;
        loop {
            if i == 0 {
                return Ok(zeros);
            }
            i -= 1;
            if idx[i] + 1 < elements.len() {
                idx[i] += 1;
                point[i] = elements[idx[i]].clone();
                break;
            }
            idx[i] = 0;
            point[i] = elements[0].clone();
        }
    }
}

/// Enumerates canonical projective representatives (first nonzero
/// coordinate 1) and counts zeros of f directly; parallel over the
/// first free coordinate.
fn count_projective_reps(inst: &ExtInstance, guard: u64) -> Result<BigInt> {
    let q = inst.ctx.order();
    let mut reps: u128 = 0;
    let mut pw: u128 = 1;
    for _ in 0..inst.nvars {
        reps += pw;
        pw = pw.saturating_mul(q as u128);
    }
    if reps > guard as u128 {
        return Err(Error::GuardExceeded(format!(
            "projective enumeration of {reps} points exceeds guard {guard}"
        )));
    }
    let elements = inst.ctx.all_elements();
    let mut count = 0u64;
    for lead in 0..inst.nvars {
        // chart: x_j = 0 for j < lead, x_lead = 1
        let free = inst.nvars - lead - 1;
        if free == 0 {
            let mut point = vec![inst.ctx.zero(); inst.nvars];
            point[lead] = inst.ctx.one();
            if inst.ctx.is_zero(&eval_f(inst, &point)) {
                count += 1;
            }
            continue;
        }
        let chart_count: u64 = (0..q)
            .into_par_iter()
            .map(|first| {
                let mut point = vec![inst.ctx.zero(); inst.nvars];
                point[lead] = inst.ctx.one();
                point[lead + 1] = inst.ctx.element_by_index(first);
                if free == 1 {
                    return u64::from(inst.ctx.is_zero(&eval_f(inst, &point)));
                }
                let rest = free - 1;
                let mut idx = vec![0usize; rest];
                let mut local = 0u64;
                loop {
                    if inst.ctx.is_zero(&eval_f(inst, &point)) {
                        local += 1;
                    }
                    let mut i = rest;
                    loop {
                        if i == 0 {
                            return local;
                        }
                        i -= 1;
                        if idx[i] + 1 < elements.len() {
                            idx[i] += 1;
                            point[lead + 2 + i] = elements[idx[i]].clone();
                            break;
                        }
                        idx[i] = 0;
                        point[lead + 2 + i] = elements[0].clone();
                    }
                }
            })
            .sum();
        count += chart_count;
    }
    Ok(BigInt::from(count))
}

/// Quadratic character of a nonzero element: +1 for squares, -1
/// otherwise.  Requires odd characteristic.
fn chi(ctx: &FieldCtx, x: &FieldElement) -> i32 {
    debug_assert!(!ctx.is_zero(x));
    if ctx.pow(x, (ctx.order() - 1) / 2) == ctx.one() {
        1
    } else {
        -1
    }
}

/// Closed-form affine zero count for d = 2 over odd characteristic:
/// diagonalize the symmetric Gram matrix by congruence and apply the
/// standard rank/discriminant formulas.
fn quadratic_form_zeros(inst: &ExtInstance) -> Result<BigInt> {
    let ctx = &inst.ctx;
    let nv = inst.nvars;
    let inv2 = ctx.from_prime(prime_inv(ctx.p(), 2));
    let mut m = vec![vec![ctx.zero(); nv]; nv];
    for (exps, coeff) in &inst.terms {
        let nz: Vec<usize> = (0..nv).filter(|&i| exps[i] > 0).collect();
        match nz.as_slice() {
            [i] => {
                debug_assert_eq!(exps[*i], 2);
                m[*i][*i] = ctx.add(&m[*i][*i], coeff);
            }
            [i, j] => {
                let half = ctx.mul(coeff, &inv2);
                m[*i][*j] = ctx.add(&m[*i][*j], &half);
                m[*j][*i] = ctx.add(&m[*j][*i], &half);
            }
            _ => return internal("quadratic-form path applied to a non-quadratic term"),
        }
    }
    // congruence diagonalization
    let mut diag = Vec::new();
    for col in 0..nv {
        if ctx.is_zero(&m[col][col]) {
            if let Some(j) = (col + 1..nv).find(|&j| !ctx.is_zero(&m[j][j])) {
                m.swap(col, j);
                for row in m.iter_mut() {
                    row.swap(col, j);
                }
            } else if let Some(r) = (col + 1..nv).find(|&r| !ctx.is_zero(&m[r][col])) {
                // all remaining diagonal entries vanish: row/col add
                // produces pivot 2*m[r][col] != 0
                for c in 0..nv {
                    let t = m[r][c].clone();
                    m[col][c] = ctx.add(&m[col][c], &t);
                }
                for row in m.iter_mut() {
                    let t = row[r].clone();
                    row[col] = ctx.add(&row[col], &t);
                }
            }
        }
        let pivot = m[col][col].clone();
        if ctx.is_zero(&pivot) {
            continue;
        }
        let pinv = ctx.inv(&pivot)?;
        for r in col + 1..nv {
            if ctx.is_zero(&m[r][col]) {
                continue;
            }
            let f = ctx.mul(&m[r][col], &pinv);
            for c in 0..nv {
                let t = ctx.mul(&f, &m[col][c]);
                m[r][c] = ctx.sub(&m[r][c], &t);
            }
            for row in m.iter_mut() {
                let t = ctx.mul(&f, &row[col]);
                row[r] = ctx.sub(&row[r], &t);
            }
        }
        diag.push(pivot);
    }
    let r = diag.len();
    if r == 0 {
        return internal("nonzero quadratic polynomial with zero Gram matrix");
    }
    let q = BigInt::from(ctx.order());
    let zeros = if r % 2 == 1 {
        q.pow(nv as u32 - 1)
    } else {
        let mut delta = ctx.one();
        for d in &diag {
            delta = ctx.mul(&delta, d);
        }
        if (r / 2) % 2 == 1 {
            delta = ctx.neg(&delta);
        }
        let eta = chi(ctx, &delta);
        let correction = (&q - 1) * q.pow((nv - 1 - r / 2) as u32);
        if eta > 0 {
            q.pow(nv as u32 - 1) + correction
        } else {
            q.pow(nv as u32 - 1) - correction
        }
    };
    Ok(zeros)
}

fn is_diagonal_form(inst: &ExtInstance) -> bool {
    inst.terms
        .iter()
        .all(|(exps, _)| exps.iter().filter(|&&e| e > 0).count() == 1)
}

fn factor_u64(mut n: u64) -> Vec<u64> {
    let mut primes = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            primes.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        primes.push(n);
    }
    primes
}

fn primitive_element(ctx: &FieldCtx) -> FieldElement {
    let q = ctx.order();
    let primes = factor_u64(q - 1);
    for idx in 1..q {
        let x = ctx.element_by_index(idx);
        if primes.iter().all(|&l| ctx.pow(&x, (q - 1) / l) != ctx.one()) {
            return x;
        }
    }
    unreachable!("the multiplicative group of a finite field is cyclic")
}

/// Affine zero count of a diagonal form sum_i c_i x_i^d by a
/// class-function convolution: the count of sum = s depends only on
/// the d-th-power class of s, so each variable is absorbed with
/// O(Q/g) work per class, g = gcd(d, Q-1).
fn diagonal_form_zeros(inst: &ExtInstance, d: u64) -> Result<BigInt> {
    let ctx = &inst.ctx;
    let q = ctx.order();
    if q > DIAG_TABLE_GUARD {
        return Err(Error::GuardExceeded(format!(
            "diagonal strategy table of size {q} exceeds guard {DIAG_TABLE_GUARD}"
        )));
    }
    let g = d.gcd(&(q - 1));
    if g > u8::MAX as u64 {
        return Err(Error::GuardExceeded(format!("class count {g} too large")));
    }
    let gamma = primitive_element(ctx);
    // class_tab[index_of(x)] = discrete log of x modulo g
    let mut class_tab = vec![0u8; q as usize];
    let mut y = ctx.one();
    for i in 0..q - 1 {
        class_tab[ctx.index_of(&y) as usize] = (i % g) as u8;
        y = ctx.mul(&y, &gamma);
    }
    if y != ctx.one() {
        return internal("primitive element has wrong order");
    }
    // evaluation points: 0, then one representative per class
    let mut points = vec![ctx.zero()];
    let mut rep = ctx.one();
    for _ in 0..g {
        points.push(rep.clone());
        rep = ctx.mul(&rep, &gamma);
    }
    // slot 0 = value at 0, slot 1+j = value on class j
    let slot = |x: &FieldElement| -> usize {
        if ctx.is_zero(x) {
            0
        } else {
            1 + class_tab[ctx.index_of(x) as usize] as usize
        }
    };
    let h = ctx.pow(&gamma, g); // generates the d-th powers
    let subgroup_size = (q - 1) / g;
    let mut t: Option<Vec<BigInt>> = None;
    let mut present = 0usize;
    for (exps, coeff) in &inst.terms {
        debug_assert_eq!(exps.iter().sum::<u64>(), d);
        present += 1;
        match &t {
            None => {
                let mut init = vec![BigInt::zero(); g as usize + 1];
                init[0] = BigInt::one();
                init[slot(coeff)] = BigInt::from(g);
                t = Some(init);
            }
            Some(prev) => {
                // values of coeff * x^d over nonzero x: the coset
                // coeff * <h>, each hit g times
                let mut values = Vec::with_capacity(subgroup_size as usize);
                let mut w = coeff.clone();
                for _ in 0..subgroup_size {
                    values.push(w.clone());
                    w = ctx.mul(&w, &h);
                }
                let next: Vec<BigInt> = points
                    .iter()
                    .map(|s| {
                        let acc = prev[slot(s)].clone(); // x = 0 term
                        let mut shifted = BigInt::zero();
                        for v in &values {
                            shifted += &prev[slot(&ctx.sub(s, v))];
                        }
                        acc + shifted * g
                    })
                    .collect();
                t = Some(next);
            }
        }
    }
    let at_zero = t.expect("at least one term")[0].clone();
    let missing = inst.nvars - present;
    Ok(at_zero * BigInt::from(q).pow(missing as u32))
}

/// Projective point count N_k = #X(F_{q^k}).
pub fn count_points(spec: &HypersurfaceSpec, k: usize, guard: u64) -> Result<BigInt> {
    let inst = extend_instance(spec, k)?;
    let q = inst.ctx.order();
    let n_points = if spec.d == 2 && spec.p != 2 {
        affine_to_projective(quadratic_form_zeros(&inst)?, q)?
    } else if is_diagonal_form(&inst) && q <= DIAG_TABLE_GUARD {
        affine_to_projective(diagonal_form_zeros(&inst, spec.d)?, q)?
    } else {
        count_projective_reps(&inst, guard)?
    };
    // N_k cannot exceed #P^n(F_{q^k})
    let q_big = BigInt::from(q);
    let ambient = (q_big.pow(inst.nvars as u32) - 1) / (&q_big - 1);
    if n_points > ambient || n_points.is_negative() {
        return internal(format!("point count {n_points} outside [0, {ambient}]"));
    }
    Ok(n_points)
}

/// Affine zero count (including the origin) to projective count; the
/// scalar orbit property makes the division exact.
fn affine_to_projective(affine: BigInt, q: u64) -> Result<BigInt> {
    let nonzero: BigInt = affine - 1;
    let (quot, rem) = nonzero.div_rem(&BigInt::from(q - 1));
    if !rem.is_zero() {
        return internal(format!(
            "nonzero affine zero count not divisible by q - 1 = {}",
            q - 1
        ));
    }
    Ok(quot)
}

/// N_1..N_K.
pub fn point_counts(spec: &HypersurfaceSpec, order: usize, guard: u64) -> Result<Vec<BigInt>> {
    (1..=order).map(|k| count_points(spec, k, guard)).collect()
}

// ---- series ----

/// Truncated power series with exact integer coefficients,
/// coefficient of t^m at index m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSeries {
    pub coeffs: Vec<BigInt>,
}

/// Truncated power series over F_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesModP {
    pub p: u64,
    pub coeffs: Vec<u64>,
}

/// Z(t) = exp(sum_k N_k t^k / k) to order counts.len(), via the
/// integer recurrence m z_m = sum_{k=1}^m N_k z_{m-k}.
pub fn zeta_series(counts: &[BigInt]) -> Result<ExactSeries> {
    let order = counts.len();
    let mut z = vec![BigInt::one()];
    for m in 1..=order {
        let mut s = BigInt::zero();
        for k in 1..=m {
            s += &counts[k - 1] * &z[m - k];
        }
        let (quot, rem) = s.div_rem(&BigInt::from(m));
        if !rem.is_zero() {
            return internal(format!(
                "zeta recurrence division by {m} is inexact (corrupted counts)"
            ));
        }
        z.push(quot);
    }
    Ok(ExactSeries { coeffs: z })
}

fn series_mul(a: &[BigInt], b: &[BigInt], order: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); order + 1];
    for (i, x) in a.iter().enumerate().take(order + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(order + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn series_inv(a: &[BigInt], order: usize) -> Vec<BigInt> {
    debug_assert!(a[0].is_one());
    let mut inv = vec![BigInt::zero(); order + 1];
    inv[0] = BigInt::one();
    for m in 1..=order {
        let mut s = BigInt::zero();
        for j in 1..=m {
            if j < a.len() {
                s += &a[j] * &inv[m - j];
            }
        }
        inv[m] = -s;
    }
    inv
}

/// P(t) with Z(t) = P(t)^{(-1)^n} / ((1-t)(1-qt)...(1-q^{n-1}t)).
pub fn p_series(z: &ExactSeries, q: u64, n: usize) -> ExactSeries {
    let order = z.coeffs.len() - 1;
    let mut w = z.coeffs.clone();
    for i in 0..n {
        let factor = vec![BigInt::one(), -BigInt::from(q).pow(i as u32)];
        w = series_mul(&w, &factor, order);
    }
    let coeffs = if n % 2 == 0 { w } else { series_inv(&w, order) };
    ExactSeries { coeffs }
}

/// P(q^{-mu} t) mod p.  Asserts the Ax integrality v_p(c_m) >= a*mu*m
/// before rescaling; a violation is reported as AX-VIOLATION.
pub fn scale_and_reduce(ps: &ExactSeries, q: u64, p: u64, mu: i64) -> Result<SeriesModP> {
    debug_assert!(mu >= 0);
    let q_big = BigInt::from(q);
    let p_big = BigInt::from(p);
    let mut coeffs = Vec::with_capacity(ps.coeffs.len());
    let mut scale = BigInt::one(); // q^{mu*m}
    for (m, c) in ps.coeffs.iter().enumerate() {
        let (quot, rem) = c.div_rem(&scale);
        if !rem.is_zero() {
            return internal(format!(
                "AX-VIOLATION: coefficient of t^{m} is not divisible by q^({mu}*{m})"
            ));
        }
        let r = quot.mod_floor(&p_big);
        coeffs.push(u64::try_from(r).expect("residue fits"));
        scale *= q_big.pow(mu as u32);
    }
    Ok(SeriesModP { p, coeffs })
}

impl SeriesModP {
    pub fn one(p: u64, order: usize) -> SeriesModP {
        let mut coeffs = vec![0; order + 1];
        coeffs[0] = 1;
        SeriesModP { p, coeffs }
    }

    pub fn from_poly(p: u64, poly: &[u64], order: usize) -> SeriesModP {
        let mut coeffs = vec![0u64; order + 1];
        for (i, &c) in poly.iter().enumerate().take(order + 1) {
            coeffs[i] = c % p;
        }
        SeriesModP { p, coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn mul(&self, other: &SeriesModP) -> SeriesModP {
        let order = self.order().min(other.order());
        let mut coeffs = vec![0u64; order + 1];
        for i in 0..=order {
            for j in 0..=order - i {
                coeffs[i + j] = (coeffs[i + j] + self.coeffs[i] * other.coeffs[j]) % self.p;
            }
        }
        SeriesModP { p: self.p, coeffs }
    }

    /// Multiplicative inverse; requires a unit constant term.
    pub fn inv(&self) -> Result<SeriesModP> {
        if self.coeffs[0] == 0 {
            return internal("series inverse of a non-unit");
        }
        let c0_inv = prime_inv(self.p, self.coeffs[0]);
        let order = self.order();
        let mut inv = vec![0u64; order + 1];
        inv[0] = c0_inv;
        for m in 1..=order {
            let mut s = 0u64;
            for j in 1..=m {
                s = (s + self.coeffs[j] * inv[m - j]) % self.p;
            }
            inv[m] = s * (self.p - 1) % self.p * c0_inv % self.p;
        }
        Ok(SeriesModP {
            p: self.p,
            coeffs: inv,
        })
    }

    /// Index of the first coefficient where the two series differ, up
    /// to the shorter truncation order.
    pub fn first_mismatch(&self, other: &SeriesModP) -> Option<usize> {
        let order = self.order().min(other.order());
        (0..=order).find(|&i| self.coeffs[i] % self.p != other.coeffs[i] % other.p)
    }
}

/// Default series order for an instance: |U^S_min| + 3.
pub fn default_order(spec: &HypersurfaceSpec) -> usize {
    let s = crate::lattice::IndexSubset::full(spec.n);
    crate::lattice::enumerate_u_min(&s, spec.n, spec.d).len() + 3
}

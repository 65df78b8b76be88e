//! The generalized Hasse-Witt matrices: symbolic entries over F_p,
//! evaluation at coefficient points, the twisted Frobenius product,
//! det(I - tM), and the one-by-one g_i polynomials of the d | n case.

use crate::error::{input, internal, Result};
use crate::field::{prime_inv, Embedding, FieldCtx, FieldElement};
use crate::instance::HypersurfaceSpec;
use crate::lattice::{enumerate_u_min, mu_of, pu_minus_v, solve_nu, IndexSubset};
use crate::poly::SparseModPoly;

/// Cofactor expansion is used up to this dimension; larger matrices go
/// through evaluation/interpolation.
const COFACTOR_LIMIT: usize = 6;

/// Symbolic matrix A^I(Lambda) reduced mod p, indexed by the sorted
/// points of U^I_min.
#[derive(Debug, Clone)]
pub struct SymbolicMatrix {
    pub i_set: IndexSubset,
    pub umin: Vec<Vec<u64>>,
    pub entries: Vec<Vec<SparseModPoly>>,
}

/// An evaluated matrix over F_q, same index set.
#[derive(Debug, Clone)]
pub struct EvalMatrix {
    pub umin: Vec<Vec<u64>>,
    pub entries: Vec<Vec<FieldElement>>,
}

fn sign_mod_p(p: u64, exponent: i64) -> u64 {
    if exponent.rem_euclid(2) == 0 {
        1
    } else {
        p - 1
    }
}

fn factorial_mod_p(p: u64, k: u64) -> u64 {
    let mut acc = 1u64;
    for i in 2..=k {
        acc = acc * (i % p) % p;
    }
    acc
}

/// The entry (-1)^{mu_I+1} sum_nu Lambda^nu / nu! over the solutions
/// of sum_j nu_j a_j^+ = p*u - v.
pub fn symbolic_entry(
    u: &[u64],
    v: &[u64],
    spec: &HypersurfaceSpec,
    i_set: &IndexSubset,
) -> Result<SparseModPoly> {
    let p = spec.p;
    let support = spec.support_plus();
    let mu = mu_of(i_set, spec.d);
    let sign = sign_mod_p(p, mu + 1);
    let mut poly = SparseModPoly::zero(p, support.len());
    for nu in solve_nu(&pu_minus_v(p, u, v), &support) {
        let mut denom = 1u64;
        for &nj in &nu {
            if nj > p - 1 {
                return internal(format!(
                    "exponent bound violated: nu_j = {nj} >= p = {p} for u,v in U^I_min"
                ));
            }
            denom = denom * factorial_mod_p(p, nj) % p;
        }
        let coeff = sign * prime_inv(p, denom) % p;
        poly.add_term(nu.iter().map(|&x| x as i32).collect(), coeff);
    }
    Ok(poly)
}

/// Builds the full |U^I_min| x |U^I_min| symbolic matrix.
pub fn symbolic_matrix(spec: &HypersurfaceSpec, i_set: &IndexSubset) -> Result<SymbolicMatrix> {
    let umin = enumerate_u_min(i_set, spec.n, spec.d);
    let mut entries = Vec::with_capacity(umin.len());
    for u in &umin {
        let mut row = Vec::with_capacity(umin.len());
        for v in &umin {
            row.push(symbolic_entry(u, v, spec, i_set)?);
        }
        entries.push(row);
    }
    Ok(SymbolicMatrix {
        i_set: *i_set,
        umin,
        entries,
    })
}

/// Entrywise evaluation at a coefficient point of F_q^N.
pub fn evaluate_matrix(
    m: &SymbolicMatrix,
    ctx: &FieldCtx,
    point: &[FieldElement],
) -> Result<EvalMatrix> {
    let mut entries = Vec::with_capacity(m.entries.len());
    for row in &m.entries {
        let mut out = Vec::with_capacity(row.len());
        for e in row {
            out.push(e.evaluate(ctx, point)?);
        }
        entries.push(out);
    }
    Ok(EvalMatrix {
        umin: m.umin.clone(),
        entries,
    })
}

pub fn mat_mul(ctx: &FieldCtx, a: &EvalMatrix, b: &EvalMatrix) -> EvalMatrix {
    let n = a.entries.len();
    let mut entries = vec![vec![ctx.zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if ctx.is_zero(&a.entries[i][k]) {
                continue;
            }
            for j in 0..n {
                let t = ctx.mul(&a.entries[i][k], &b.entries[k][j]);
                entries[i][j] = ctx.add(&entries[i][j], &t);
            }
        }
    }
    EvalMatrix {
        umin: a.umin.clone(),
        entries,
    }
}

/// The ordered product A^I(lambda^{p^{a-1}}) ... A^I(lambda), highest
/// twist leftmost.
pub fn frobenius_product(spec: &HypersurfaceSpec, i_set: &IndexSubset) -> Result<EvalMatrix> {
    let sym = symbolic_matrix(spec, i_set)?;
    frobenius_product_of(&sym, spec)
}

pub fn frobenius_product_of(sym: &SymbolicMatrix, spec: &HypersurfaceSpec) -> Result<EvalMatrix> {
    let ctx = spec.field();
    let lambda = spec.coeffs();
    let mut acc: Option<EvalMatrix> = None;
    for i in (0..spec.a).rev() {
        let twisted: Vec<FieldElement> = lambda
            .iter()
            .map(|x| ctx.frobenius_iter(x, i))
            .collect();
        let factor = evaluate_matrix(sym, ctx, &twisted)?;
        acc = Some(match acc {
            None => factor,
            Some(prev) => mat_mul(ctx, &prev, &factor),
        });
    }
    Ok(acc.expect("a >= 1"))
}

// ---- det(I - tM) ----

fn poly_add(ctx: &FieldCtx, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(|| ctx.zero());
            let y = b.get(i).cloned().unwrap_or_else(|| ctx.zero());
            ctx.add(&x, &y)
        })
        .collect()
}

fn poly_mul(ctx: &FieldCtx, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ctx.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if ctx.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            let t = ctx.mul(x, y);
            out[i + j] = ctx.add(&out[i + j], &t);
        }
    }
    out
}

fn poly_neg(ctx: &FieldCtx, a: &[FieldElement]) -> Vec<FieldElement> {
    a.iter().map(|x| ctx.neg(x)).collect()
}

fn det_poly_matrix(ctx: &FieldCtx, m: &[Vec<Vec<FieldElement>>]) -> Vec<FieldElement> {
    let n = m.len();
    if n == 0 {
        return vec![ctx.one()];
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut det: Vec<FieldElement> = Vec::new();
    for (col, entry) in m[0].iter().enumerate() {
        let minor: Vec<Vec<Vec<FieldElement>>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != col)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let mut term = poly_mul(ctx, entry, &det_poly_matrix(ctx, &minor));
        if col % 2 == 1 {
            term = poly_neg(ctx, &term);
        }
        det = poly_add(ctx, &det, &term);
    }
    det
}

pub(crate) fn det_field_matrix(ctx: &FieldCtx, m: &mut Vec<Vec<FieldElement>>) -> Result<FieldElement> {
    let n = m.len();
    let mut det = ctx.one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !ctx.is_zero(&m[r][col]));
        let Some(pr) = pivot else {
            return Ok(ctx.zero());
        };
        if pr != col {
            m.swap(pr, col);
            det = ctx.neg(&det);
        }
        let pv = m[col][col].clone();
        det = ctx.mul(&det, &pv);
        let inv = ctx.inv(&pv)?;
        for r in col + 1..n {
            if ctx.is_zero(&m[r][col]) {
                continue;
            }
            let f = ctx.mul(&m[r][col], &inv);
            for c in col..n {
                let t = ctx.mul(&f, &m[col][c]);
                m[r][c] = ctx.sub(&m[r][c], &t);
            }
        }
    }
    Ok(det)
}

/// det(I - tM) as an F_p polynomial in t (ascending coefficients).
/// Every coefficient is asserted to be Frobenius-fixed; a violation is
/// an internal error (it would signal an ordering bug in the product).
pub fn char_poly_rev(ctx: &FieldCtx, m: &EvalMatrix) -> Result<Vec<u64>> {
    let dim = m.entries.len();
    if dim == 0 {
        return Ok(vec![1]);
    }
    let coeffs: Vec<FieldElement> = if dim <= COFACTOR_LIMIT {
        // cofactor expansion over F_q[t]: entry delta_uv - t*m_uv
        let pm: Vec<Vec<Vec<FieldElement>>> = (0..dim)
            .map(|r| {
                (0..dim)
                    .map(|c| {
                        let c0 = if r == c { ctx.one() } else { ctx.zero() };
                        vec![c0, ctx.neg(&m.entries[r][c])]
                    })
                    .collect()
            })
            .collect();
        let mut d = det_poly_matrix(ctx, &pm);
        d.resize(dim + 1, ctx.zero());
        d
    } else {
        char_poly_by_interpolation(ctx, m)?
    };
    let mut out = Vec::with_capacity(coeffs.len());
    for c in &coeffs {
        match ctx.as_prime(c) {
            Some(v) => out.push(v),
            None => {
                return internal(
                    "det(I - tM) coefficient is not Frobenius-fixed".to_string(),
                )
            }
        }
    }
    if out[0] != 1 {
        return internal("det(I - tM) has constant term != 1".to_string());
    }
    Ok(out)
}

/// Interpolation route: evaluate det(I - t0*M) at dim+1 points of an
/// extension big enough to hold them, then Lagrange-interpolate.  The
/// returned coefficients live in `ctx`.
fn char_poly_by_interpolation(ctx: &FieldCtx, m: &EvalMatrix) -> Result<Vec<FieldElement>> {
    let dim = m.entries.len();
    let mut e = 1usize;
    while ctx.order().pow(e as u32) < dim as u64 + 1 {
        e += 1;
    }
    if e == 1 {
        return interpolated_det(ctx, &m.entries, dim);
    }
    let ext = FieldCtx::with_guard(ctx.p(), ctx.degree() * e, u64::MAX >> 1)?;
    let emb = Embedding::new(ctx, &ext)?;
    let lifted: Vec<Vec<FieldElement>> = m
        .entries
        .iter()
        .map(|row| row.iter().map(|x| emb.map(x)).collect())
        .collect();
    let result = interpolated_det(&ext, &lifted, dim)?;
    // coefficients must descend to F_p; re-lift them into the original
    // context so the caller's checks apply uniformly
    let mut out = Vec::with_capacity(result.len());
    for c in &result {
        match ext.as_prime(c) {
            Some(v) => out.push(ctx.from_prime(v)),
            None => {
                return internal(
                    "interpolated det(I - tM) coefficient is not in the prime field".to_string(),
                )
            }
        }
    }
    Ok(out)
}

/// det(I - tM) within a single field that holds dim+1 distinct points.
fn interpolated_det(
    ctx: &FieldCtx,
    entries: &[Vec<FieldElement>],
    dim: usize,
) -> Result<Vec<FieldElement>> {
    let points: Vec<FieldElement> = ctx.all_elements().into_iter().take(dim + 1).collect();
    let mut values = Vec::with_capacity(points.len());
    for t0 in &points {
        let mut mat: Vec<Vec<FieldElement>> = (0..dim)
            .map(|r| {
                (0..dim)
                    .map(|c| {
                        let tm = ctx.mul(t0, &entries[r][c]);
                        if r == c {
                            ctx.sub(&ctx.one(), &tm)
                        } else {
                            ctx.neg(&tm)
                        }
                    })
                    .collect()
            })
            .collect();
        values.push(det_field_matrix(ctx, &mut mat)?);
    }
    let mut result = vec![ctx.zero(); dim + 1];
    for (i, ti) in points.iter().enumerate() {
        let mut basis = vec![ctx.one()];
        let mut denom = ctx.one();
        for (j, tj) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            basis = poly_mul(ctx, &basis, &[ctx.neg(tj), ctx.one()]);
            denom = ctx.mul(&denom, &ctx.sub(ti, tj));
        }
        let scale = ctx.mul(&values[i], &ctx.inv(&denom)?);
        for (k, b) in basis.iter().enumerate() {
            let t = ctx.mul(&scale, b);
            result[k] = ctx.add(&result[k], &t);
        }
    }
    Ok(result)
}

/// The polynomials g_i of the d | n case: the single entry of the
/// one-by-one matrix A^{S\{i}}(Lambda).
pub fn g_polynomials(spec: &HypersurfaceSpec) -> Result<Vec<SparseModPoly>> {
    if spec.n as u64 % spec.d != 0 {
        return input(format!(
            "g polynomials require d | n (d = {}, n = {})",
            spec.d, spec.n
        ));
    }
    let mu = spec.mu();
    debug_assert_eq!(mu, (spec.n as u64 / spec.d) as i64);
    let p = spec.p;
    let support = spec.support_plus();
    let sign = sign_mod_p(p, mu);
    let mut out = Vec::with_capacity(spec.n + 1);
    for i in 0..=spec.n {
        // u^(i) = (1,...,1,0,1,...,1,mu) with zero in the i-th entry
        let mut u_i = vec![1i64; spec.n + 2];
        u_i[i] = 0;
        u_i[spec.n + 1] = mu;
        let target: Vec<i64> = u_i.iter().map(|&x| (p as i64 - 1) * x).collect();
        let mut poly = SparseModPoly::zero(p, support.len());
        for nu in solve_nu(&target, &support) {
            let mut denom = 1u64;
            for &nj in &nu {
                if nj > p - 1 {
                    return internal(format!(
                        "exponent bound violated in g_{i}: nu_j = {nj} >= p = {p}"
                    ));
                }
                denom = denom * factorial_mod_p(p, nj) % p;
            }
            poly.add_term(
                nu.iter().map(|&x| x as i32).collect(),
                sign * prime_inv(p, denom) % p,
            );
        }
        out.push(poly);
    }
    Ok(out)
}

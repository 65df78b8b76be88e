//! Theorem-level checkers: the main mod-p congruence between
//! det(I - tM) and the rescaled P-series, the d | n variant with the
//! g_i correction factors, the classical Hasse-Witt coefficient
//! oracle, the A-hypergeometric annihilation tests (Euler and box
//! operators), and the generic-invertibility suite for the
//! full-monomial arrangement.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{input, internal, Result};
use crate::field::{FieldCtx, FieldElement};
use crate::hwmatrix::{
    det_field_matrix, evaluate_matrix, frobenius_product, g_polynomials, symbolic_entry,
    symbolic_matrix, EvalMatrix,
};
use crate::instance::{render_coeff, HypersurfaceSpec};
use crate::lattice::{
    enumerate_u_min, mu_of_size, pu_minus_v, relation_lattice_basis, IndexSubset,
};
use crate::poly::SparseModPoly;
use crate::zeta::{p_series, point_counts, scale_and_reduce, zeta_series, SeriesModP};

/// Symbolic determinants are expanded by cofactors up to this
/// dimension; larger matrices skip the symbolic sub-checks.
const SYMBOLIC_DET_LIMIT: usize = 6;

/// All monomials of degree d in n+1 variables, first exponent largest
/// first (reverse-lexicographic descending).
pub fn full_monomial_support(n: usize, d: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = vec![0u64; n + 1];
    fill_support(n, d, 0, &mut cur, &mut out);
    out
}

fn fill_support(n: usize, remaining: u64, pos: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if pos == n {
        cur[pos] = remaining;
        out.push(cur.clone());
        return;
    }
    for v in (0..=remaining).rev() {
        cur[pos] = v;
        fill_support(n, remaining - v, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

// ---- reports ----

#[derive(Debug, Clone, Serialize)]
pub struct EchoTerm {
    pub exponents: Vec<u64>,
    pub coeff: String,
}

/// Instance echo carried by every report, including the field modulus
/// so runs are reproducible.
#[derive(Debug, Clone, Serialize)]
pub struct InstanceEcho {
    pub p: u64,
    pub a: usize,
    pub n: usize,
    pub d: u64,
    pub field_modulus: Vec<u64>,
    pub terms: Vec<EchoTerm>,
}

impl InstanceEcho {
    pub fn of(spec: &HypersurfaceSpec) -> InstanceEcho {
        InstanceEcho {
            p: spec.p,
            a: spec.a,
            n: spec.n,
            d: spec.d,
            field_modulus: spec.field().modulus().to_vec(),
            terms: spec
                .terms
                .iter()
                .map(|t| EchoTerm {
                    exponents: t.exponents.clone(),
                    coeff: render_coeff(&t.coeff),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub check: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    fn pass(check: &str, instance: Option<InstanceEcho>) -> Report {
        Report {
            check: check.to_string(),
            pass: true,
            instance,
            witness: None,
            notes: Vec::new(),
        }
    }

    fn fail(check: &str, instance: Option<InstanceEcho>, witness: Value) -> Report {
        Report {
            check: check.to_string(),
            pass: false,
            instance,
            witness: Some(witness),
            notes: Vec::new(),
        }
    }

    fn with_note(mut self, note: String) -> Report {
        self.notes.push(note);
        self
    }
}

fn reject_degenerate(spec: &HypersurfaceSpec) -> Result<()> {
    if spec.is_zero_poly() {
        return input("degenerate instance: f is identically zero (X = P^n)");
    }
    Ok(())
}

// ---- congruence checks ----

fn compare_series(
    check: &str,
    spec: &HypersurfaceSpec,
    lhs: &SeriesModP,
    rhs: &SeriesModP,
) -> Report {
    match lhs.first_mismatch(rhs) {
        None => Report::pass(check, Some(InstanceEcho::of(spec))),
        Some(i) => Report::fail(
            check,
            Some(InstanceEcho::of(spec)),
            json!({
                "first_mismatch_index": i,
                "matrix_side": lhs.coeffs[i],
                "point_count_side": rhs.coeffs[i],
            }),
        ),
    }
}

/// Rescaled, reduced P-series of the instance to order k.
fn reduced_p_series(spec: &HypersurfaceSpec, k: usize, guard: u64) -> Result<SeriesModP> {
    let counts = point_counts(spec, k, guard)?;
    let z = zeta_series(&counts)?;
    let ps = p_series(&z, spec.q(), spec.n);
    scale_and_reduce(&ps, spec.q(), spec.p, spec.mu())
}

/// d not dividing n: P(q^{-mu} t) = det(I - t A(lambda^{p^{a-1}})
/// ... A(lambda)) mod p, compared as series to order k.
pub fn check_main_congruence(spec: &HypersurfaceSpec, k: usize, guard: u64) -> Result<Report> {
    reject_degenerate(spec)?;
    if spec.n as u64 % spec.d == 0 {
        return input(format!(
            "d = {} divides n = {}: use the divisible-case check",
            spec.d, spec.n
        ));
    }
    let s = IndexSubset::full(spec.n);
    let det = crate::hwmatrix::char_poly_rev(spec.field(), &frobenius_product(spec, &s)?)?;
    let lhs = SeriesModP::from_poly(spec.p, &det, k);
    let rhs = reduced_p_series(spec, k, guard)?;
    Ok(compare_series("main-congruence", spec, &lhs, &rhs))
}

/// d | n: det(I - tM) / prod_i (1 - t g_i-product) = P(q^{-mu} t)
/// mod p as series to order k.
pub fn check_divisible_case(spec: &HypersurfaceSpec, k: usize, guard: u64) -> Result<Report> {
    reject_degenerate(spec)?;
    if spec.n as u64 % spec.d != 0 {
        return input(format!(
            "d = {} does not divide n = {}: use the main check",
            spec.d, spec.n
        ));
    }
    let ctx = spec.field();
    let s = IndexSubset::full(spec.n);
    let det = crate::hwmatrix::char_poly_rev(ctx, &frobenius_product(spec, &s)?)?;
    let mut lhs = SeriesModP::from_poly(spec.p, &det, k);
    let lambda = spec.coeffs();
    for gi in g_polynomials(spec)? {
        // the twisted scalar product g_i(lambda^{p^{a-1}}) ... g_i(lambda)
        let mut c = ctx.one();
        for r in 0..spec.a {
            let twisted: Vec<FieldElement> =
                lambda.iter().map(|x| ctx.frobenius_iter(x, r)).collect();
            c = ctx.mul(&c, &gi.evaluate(ctx, &twisted)?);
        }
        let Some(ci) = ctx.as_prime(&c) else {
            return internal("g_i product is not Frobenius-fixed");
        };
        let factor = SeriesModP::from_poly(spec.p, &[1, (spec.p - ci % spec.p) % spec.p], k);
        lhs = lhs.mul(&factor.inv()?);
    }
    let rhs = reduced_p_series(spec, k, guard)?;
    Ok(compare_series("divisible-congruence", spec, &lhs, &rhs))
}

// ---- classical Hasse-Witt oracle ----

type XPoly = BTreeMap<Vec<u64>, FieldElement>;

fn xp_mul(ctx: &FieldCtx, a: &XPoly, b: &XPoly) -> XPoly {
    let mut out = XPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let c = ctx.mul(ca, cb);
            if ctx.is_zero(&c) {
                continue;
            }
            let e: Vec<u64> = ea.iter().zip(eb).map(|(&x, &y)| x + y).collect();
            let entry = out.entry(e).or_insert_with(|| ctx.zero());
            *entry = ctx.add(entry, &c);
        }
    }
    out.retain(|_, c| !ctx.is_zero(c));
    out
}

/// The classical Hasse-Witt matrix for mu = 0 instances: the (u, v)
/// entry is the coefficient of x^{pu-v} in f^{p-1}, computed by direct
/// power expansion.  Used only as an independent oracle.
pub fn classical_hw_oracle(spec: &HypersurfaceSpec) -> Result<EvalMatrix> {
    if spec.mu() != 0 {
        return input(format!(
            "classical Hasse-Witt oracle requires mu = 0, got mu = {}",
            spec.mu()
        ));
    }
    let ctx = spec.field();
    let mut f = XPoly::new();
    for t in &spec.terms {
        if !ctx.is_zero(&t.coeff) {
            f.insert(t.exponents.clone(), t.coeff.clone());
        }
    }
    let mut power: XPoly = XPoly::new();
    power.insert(vec![0u64; spec.n + 1], ctx.one());
    for _ in 0..spec.p - 1 {
        power = xp_mul(ctx, &power, &f);
    }
    let umin = enumerate_u_min(&IndexSubset::full(spec.n), spec.n, spec.d);
    let entries: Vec<Vec<FieldElement>> = umin
        .iter()
        .map(|u| {
            umin.iter()
                .map(|v| {
                    let target = pu_minus_v(spec.p, u, v);
                    if target[..spec.n + 1].iter().any(|&x| x < 0) {
                        return ctx.zero();
                    }
                    let key: Vec<u64> = target[..spec.n + 1].iter().map(|&x| x as u64).collect();
                    power.get(&key).cloned().unwrap_or_else(|| ctx.zero())
                })
                .collect()
        })
        .collect();
    Ok(EvalMatrix { umin, entries })
}

/// Entrywise comparison of the evaluated symbolic matrix against the
/// classical coefficient-extraction oracle (mu = 0 only).
pub fn check_hw_oracle(spec: &HypersurfaceSpec) -> Result<Report> {
    reject_degenerate(spec)?;
    let oracle = classical_hw_oracle(spec)?;
    let ctx = spec.field();
    let sym = symbolic_matrix(spec, &IndexSubset::full(spec.n))?;
    let eval = evaluate_matrix(&sym, ctx, &spec.coeffs())?;
    for (r, (ra, rb)) in eval.entries.iter().zip(&oracle.entries).enumerate() {
        for (c, (ea, eb)) in ra.iter().zip(rb).enumerate() {
            if ea != eb {
                return Ok(Report::fail(
                    "hw-oracle",
                    Some(InstanceEcho::of(spec)),
                    json!({
                        "u": eval.umin[r],
                        "v": eval.umin[c],
                        "symbolic_evaluation": render_coeff(ea),
                        "oracle_coefficient": render_coeff(eb),
                    }),
                ));
            }
        }
    }
    Ok(Report::pass("hw-oracle", Some(InstanceEcho::of(spec))))
}

// ---- A-hypergeometric checks ----

/// Euler operators: for every monomial Lambda^nu of the entry and
/// every coordinate i, sum_j a^+_{ij} nu_j = (pu - v)_i mod p.
pub fn check_euler(
    spec: &HypersurfaceSpec,
    i_set: &IndexSubset,
    u: &[u64],
    v: &[u64],
) -> Result<Report> {
    let entry = symbolic_entry(u, v, spec, i_set)?;
    let support = spec.support_plus();
    let beta = pu_minus_v(spec.p, u, v);
    for (nu, _) in entry.terms() {
        for i in 0..spec.n + 2 {
            let lhs: i64 = nu
                .iter()
                .zip(&support)
                .map(|(&nj, a)| nj as i64 * a[i] as i64)
                .sum();
            if (lhs - beta[i]).rem_euclid(spec.p as i64) != 0 {
                return Ok(Report::fail(
                    "euler",
                    Some(InstanceEcho::of(spec)),
                    json!({ "u": u, "v": v, "nu": nu, "coordinate": i,
                            "lhs": lhs, "beta_i": beta[i] }),
                ));
            }
        }
    }
    Ok(Report::pass("euler", Some(InstanceEcho::of(spec))))
}

/// Box operator: d^{l+} entry - d^{l-} entry must vanish identically
/// mod p for every relation vector l.
pub fn check_box(
    spec: &HypersurfaceSpec,
    i_set: &IndexSubset,
    u: &[u64],
    v: &[u64],
    l: &[i64],
) -> Result<Report> {
    let support = spec.support_plus();
    if l.len() != support.len() {
        return input("relation vector has wrong length");
    }
    for i in 0..spec.n + 2 {
        let s: i64 = l
            .iter()
            .zip(&support)
            .map(|(&lj, a)| lj * a[i] as i64)
            .sum();
        if s != 0 {
            return input(format!("l = {l:?} is not a relation vector (coordinate {i})"));
        }
    }
    let entry = symbolic_entry(u, v, spec, i_set)?;
    let diff = box_residual(&entry, l);
    if diff.is_zero() {
        Ok(Report::pass("box", Some(InstanceEcho::of(spec))))
    } else {
        Ok(Report::fail(
            "box",
            Some(InstanceEcho::of(spec)),
            json!({ "u": u, "v": v, "l": l, "residual": diff.to_string() }),
        ))
    }
}

/// d^{l+} entry - d^{l-} entry.
fn box_residual(entry: &SparseModPoly, l: &[i64]) -> SparseModPoly {
    let mut plus = entry.clone();
    let mut minus = entry.clone();
    for (j, &lj) in l.iter().enumerate() {
        if lj > 0 {
            plus = plus.derivative_pow(j, lj as u32);
        } else if lj < 0 {
            minus = minus.derivative_pow(j, (-lj) as u32);
        }
    }
    plus.sub(&minus)
}

/// The index sets exercised by the aggregate hypergeometric checks:
/// S and every S \ {i}.
fn standard_index_sets(n: usize) -> Vec<IndexSubset> {
    let mut sets = vec![IndexSubset::full(n)];
    sets.extend((0..=n).map(|i| IndexSubset::full_minus(n, i)));
    sets
}

/// Euler check over every entry of A^S and every A^{S\{i}}.
pub fn check_euler_suite(spec: &HypersurfaceSpec) -> Result<Report> {
    for i_set in standard_index_sets(spec.n) {
        let umin = enumerate_u_min(&i_set, spec.n, spec.d);
        for u in &umin {
            for v in &umin {
                let r = check_euler(spec, &i_set, u, v)?;
                if !r.pass {
                    return Ok(r);
                }
            }
        }
    }
    Ok(Report::pass("euler", Some(InstanceEcho::of(spec))))
}

/// The box-operator test set: a relation-lattice basis plus all
/// pairwise sums of basis vectors.
pub fn box_test_vectors(spec: &HypersurfaceSpec) -> Result<Vec<Vec<i64>>> {
    let basis = relation_lattice_basis(&spec.support_plus())?;
    let mut vectors = basis.clone();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let sum: Vec<i64> = basis[i].iter().zip(&basis[j]).map(|(&x, &y)| x + y).collect();
            vectors.push(sum);
        }
    }
    Ok(vectors)
}

/// Box check over the test vectors and every entry of A^S and all
/// A^{S\{i}}.
pub fn check_box_suite(spec: &HypersurfaceSpec) -> Result<Report> {
    let vectors = box_test_vectors(spec)?;
    if vectors.is_empty() {
        return Ok(Report::pass("box", Some(InstanceEcho::of(spec)))
            .with_note("relation lattice is trivial; vacuous pass".to_string()));
    }
    for i_set in standard_index_sets(spec.n) {
        let umin = enumerate_u_min(&i_set, spec.n, spec.d);
        for u in &umin {
            for v in &umin {
                let entry = symbolic_entry(u, v, spec, &i_set)?;
                for l in &vectors {
                    let diff = box_residual(&entry, l);
                    if !diff.is_zero() {
                        return Ok(Report::fail(
                            "box",
                            Some(InstanceEcho::of(spec)),
                            json!({ "u": u, "v": v, "l": l, "residual": diff.to_string() }),
                        ));
                    }
                }
            }
        }
    }
    Ok(Report::pass("box", Some(InstanceEcho::of(spec))))
}

// ---- generic invertibility (full-monomial arrangement) ----

/// The arranged instance: terms ordered so that the first mu_I terms
/// are the coordinate blocks and the next |U^I_min| terms are the
/// distinguished monomials divisible by the tail product.
pub struct Hyp71Arrangement {
    /// Coefficients all 1 over F_p; only the support order matters.
    pub spec: HypersurfaceSpec,
    /// The relabeled index set {0, ..., h-1}.
    pub i_set: IndexSubset,
    /// perm[old_coordinate] = new_coordinate.
    pub perm: Vec<usize>,
    pub mu: i64,
    pub umin: Vec<Vec<u64>>,
    /// For each u in umin (sorted), the 1-based index k_u of its
    /// distinguished monomial.
    pub k_of_u: Vec<usize>,
}

/// Arranges `support` (interpreted in relabeled coordinates where I
/// becomes {0..h-1}) and verifies the factorization hypothesis: every
/// u in U^I_min is a block product times a unique distinguished
/// monomial.
pub fn hypothesis71_construct(
    n: usize,
    d: u64,
    i_set: &IndexSubset,
    p: u64,
    support: &[Vec<u64>],
) -> Result<Hyp71Arrangement> {
    let members = i_set.members();
    let h = members.len();
    if h == 0 {
        return input("the invertibility arrangement requires a nonempty index set");
    }
    // relabel: members of I to the front, in order
    let mut perm = vec![usize::MAX; n + 1];
    for (new, &old) in members.iter().enumerate() {
        perm[old] = new;
    }
    let mut next = h;
    for old in 0..=n {
        if perm[old] == usize::MAX {
            perm[old] = next;
            next += 1;
        }
    }
    let mu = mu_of_size(h as u64, d);
    let relabeled = IndexSubset::from_members(n, &(0..h).collect::<Vec<_>>());
    let umin = enumerate_u_min(&relabeled, n, d);

    let blocks: Vec<Vec<u64>> = (1..=mu as usize)
        .map(|j| {
            let mut e = vec![0u64; n + 1];
            for k in (j - 1) * d as usize..j * d as usize {
                e[k] = 1;
            }
            e
        })
        .collect();
    let block_sum: Vec<u64> = (0..=n)
        .map(|i| blocks.iter().map(|b| b[i]).sum())
        .collect();
    // tail product x_{mu*d} ... x_{h-1}
    let tail_lo = mu as usize * d as usize;
    let divisible_by_tail = |e: &[u64]| (tail_lo..h).all(|i| e[i] >= 1);

    let mut distinguished: Vec<Vec<u64>> = support
        .iter()
        .filter(|e| divisible_by_tail(e))
        .cloned()
        .collect();
    distinguished.sort();
    distinguished.dedup();

    // factor each u and locate its distinguished monomial
    let mut k_of_u = Vec::with_capacity(umin.len());
    let mut used = vec![false; distinguished.len()];
    for u in &umin {
        let w: Vec<i64> = (0..=n)
            .map(|i| u[i] as i64 - block_sum[i] as i64)
            .collect();
        if w.iter().any(|&x| x < 0) {
            return input(format!(
                "u = {u:?} is not divisible by the block product; arrangement fails"
            ));
        }
        let w: Vec<u64> = w.iter().map(|&x| x as u64).collect();
        let Some(k) = distinguished.iter().position(|e| *e == w) else {
            return input(format!(
                "support is missing the distinguished monomial {w:?} needed for u = {u:?}"
            ));
        };
        if used[k] {
            return internal("distinguished monomial factors two minimal points");
        }
        used[k] = true;
        k_of_u.push(k + 1);
    }
    if !used.iter().all(|&b| b) {
        return input("support contains extra tail-divisible monomials beyond U^I_min");
    }

    // assemble the ordered support: blocks, distinguished, the rest
    let mut terms: Vec<Vec<u64>> = Vec::with_capacity(support.len());
    terms.extend(blocks.iter().cloned());
    terms.extend(distinguished.iter().cloned());
    for e in support {
        if blocks.contains(e) || distinguished.contains(e) {
            continue;
        }
        terms.push(e.clone());
    }
    if terms.len() != support.len() {
        return input("arrangement requires the blocks to be present in the support");
    }
    let field = FieldCtx::new(p, 1)?;
    let spec = HypersurfaceSpec::new(
        p,
        1,
        n,
        d,
        terms.into_iter().map(|e| (e, field.one())).collect(),
    )?;
    Ok(Hyp71Arrangement {
        spec,
        i_set: relabeled,
        perm,
        mu,
        umin,
        k_of_u,
    })
}

/// Cofactor determinant of a matrix of sparse polynomials.
fn det_sparse(p: u64, nvars: usize, m: &[Vec<SparseModPoly>]) -> SparseModPoly {
    let k = m.len();
    if k == 0 {
        return SparseModPoly::constant(p, nvars, 1);
    }
    if k == 1 {
        return m[0][0].clone();
    }
    let mut det = SparseModPoly::zero(p, nvars);
    for (col, entry) in m[0].iter().enumerate() {
        if entry.is_zero() {
            continue;
        }
        let minor: Vec<Vec<SparseModPoly>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != col)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let term = entry.mul(&det_sparse(p, nvars, &minor));
        det = if col % 2 == 0 {
            det.add(&term)
        } else {
            det.sub(&term)
        };
    }
    det
}

/// Theorem-7.2 check for the full-monomial arrangement: (i) the
/// distinguished coefficient of det A^I equals 1 mod p; (ii)
/// Schwartz-Zippel finds a nonzero evaluation of det A^I over F_{p^6}.
pub fn check_generic_invertibility(
    n: usize,
    d: u64,
    i_set: &IndexSubset,
    p: u64,
    trials: usize,
    seed: u64,
) -> Result<Report> {
    let arr = hypothesis71_construct(n, d, i_set, p, &full_monomial_support(n, d))?;
    let sym = symbolic_matrix(&arr.spec, &arr.i_set)?;
    let dim = arr.umin.len();
    let nvars = arr.spec.num_terms();
    let mut notes = vec![format!("coordinate relabeling (old -> new): {:?}", arr.perm)];

    // (i) distinguished coefficient of the symbolic determinant
    if dim <= SYMBOLIC_DET_LIMIT {
        let det = det_sparse(p, nvars, &sym.entries);
        let mut target = vec![0i32; nvars];
        for t in target.iter_mut().take(arr.mu as usize) {
            *t = ((p - 1) as usize * dim) as i32;
        }
        for t in target.iter_mut().skip(arr.mu as usize).take(dim) {
            *t = (p - 1) as i32;
        }
        let c = det.coefficient(&target);
        if c != 1 {
            return Ok(Report::fail(
                "invertibility",
                Some(InstanceEcho::of(&arr.spec)),
                json!({ "sub_check": "distinguished-coefficient",
                        "expected": 1, "got": c, "exponent": target }),
            ));
        }
        notes.push("distinguished coefficient of det = 1".to_string());
    } else {
        notes.push(format!(
            "symbolic determinant skipped (dimension {dim} exceeds guard {SYMBOLIC_DET_LIMIT})"
        ));
    }

    // (ii) Schwartz-Zippel over F_{p^6}
    let ext = FieldCtx::with_guard(p, 6, u64::MAX >> 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let point: Vec<FieldElement> = (0..nvars)
            .map(|_| ext.element_by_index(rng.gen_range(0..ext.order())))
            .collect();
        let mut mat: Vec<Vec<FieldElement>> = Vec::with_capacity(dim);
        for row in &sym.entries {
            let mut out = Vec::with_capacity(dim);
            for e in row {
                out.push(e.evaluate(&ext, &point)?);
            }
            mat.push(out);
        }
        if !ext.is_zero(&det_field_matrix(&ext, &mut mat)?) {
            let mut r = Report::pass("invertibility", Some(InstanceEcho::of(&arr.spec)));
            r.notes = notes;
            return Ok(r);
        }
    }
    Ok(Report::fail(
        "invertibility",
        Some(InstanceEcho::of(&arr.spec)),
        json!({ "sub_check": "schwartz-zippel",
                "witness": format!("identically zero under Schwartz-Zippel sample of {trials} trials") }),
    ))
}

/// Computational content of the constant-term separation: in the
/// monomial-rescaled Laurent matrix D^I, the constant term of det D
/// equals the product of the diagonal constant terms, each of which is
/// 1 mod p.
pub fn constant_term_separation(
    n: usize,
    d: u64,
    i_set: &IndexSubset,
    p: u64,
) -> Result<Report> {
    let arr = hypothesis71_construct(n, d, i_set, p, &full_monomial_support(n, d))?;
    let sym = symbolic_matrix(&arr.spec, &arr.i_set)?;
    let dim = arr.umin.len();
    if dim > SYMBOLIC_DET_LIMIT {
        return Err(crate::error::Error::GuardExceeded(format!(
            "symbolic dimension {dim} exceeds guard {SYMBOLIC_DET_LIMIT}"
        )));
    }
    let nvars = arr.spec.num_terms();
    let mu = arr.mu as usize;
    // D_uv = (prod_j Lambda_j)^{-(p-1)} Lambda_{mu+k_u}^{-p}
    //        Lambda_{mu+k_v} A_uv
    let mut dmat: Vec<Vec<SparseModPoly>> = Vec::with_capacity(dim);
    for (r, row) in sym.entries.iter().enumerate() {
        let mut out = Vec::with_capacity(dim);
        for (c, a_uv) in row.iter().enumerate() {
            let mut shift = vec![0i32; nvars];
            for s in shift.iter_mut().take(mu) {
                *s -= (p - 1) as i32;
            }
            shift[mu + arr.k_of_u[r] - 1] -= p as i32;
            shift[mu + arr.k_of_u[c] - 1] += 1;
            out.push(a_uv.mul_monomial(&shift, 1));
        }
        dmat.push(out);
    }
    let zero_exp = vec![0i32; nvars];
    let mut diag_product = 1u64;
    for (r, row) in dmat.iter().enumerate() {
        for (c, e) in row.iter().enumerate() {
            let ct = e.coefficient(&zero_exp);
            if r == c {
                // Lemma: constant term (-(p-1)!)^{-(mu+1)} = 1 by Wilson
                if ct != 1 {
                    return Ok(Report::fail(
                        "constant-term-separation",
                        Some(InstanceEcho::of(&arr.spec)),
                        json!({ "diagonal_index": r, "expected": 1, "got": ct }),
                    ));
                }
                diag_product = diag_product * ct % p;
            } else if ct != 0 {
                return Ok(Report::fail(
                    "constant-term-separation",
                    Some(InstanceEcho::of(&arr.spec)),
                    json!({ "off_diagonal": [r, c], "constant_term": ct }),
                ));
            }
        }
    }
    let det = det_sparse(p, nvars, &dmat);
    let det_ct = det.coefficient(&zero_exp);
    if det_ct != diag_product {
        return Ok(Report::fail(
            "constant-term-separation",
            Some(InstanceEcho::of(&arr.spec)),
            json!({ "det_constant_term": det_ct, "diagonal_product": diag_product }),
        ));
    }
    Ok(
        Report::pass("constant-term-separation", Some(InstanceEcho::of(&arr.spec)))
            .with_note(format!("det D constant term = {det_ct} mod {p}")),
    )
}

/// Dispatches to the applicable congruence check for the instance.
pub fn check_congruence(spec: &HypersurfaceSpec, k: usize, guard: u64) -> Result<Report> {
    if spec.n as u64 % spec.d == 0 {
        check_divisible_case(spec, k, guard)
    } else {
        check_main_congruence(spec, k, guard)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::DEFAULT_ENUM_GUARD;

    fn spec_from(text: &str) -> HypersurfaceSpec {
        HypersurfaceSpec::parse(text).unwrap()
    }

    fn fermat_cubic(p: u64) -> HypersurfaceSpec {
        spec_from(&format!(
            r#"{{"p": {p}, "a": 1, "n": 2, "d": 3, "terms": [
                {{"exponents": [3,0,0], "coeff": "1"}},
                {{"exponents": [0,3,0], "coeff": "1"}},
                {{"exponents": [0,0,3], "coeff": "1"}}]}}"#
        ))
    }

    fn two_lines(p: u64, a: usize) -> HypersurfaceSpec {
        spec_from(&format!(
            r#"{{"p": {p}, "a": {a}, "n": 2, "d": 2, "terms": [
                {{"exponents": [0,1,1], "coeff": "1"}}]}}"#
        ))
    }

    fn full_spec(p: u64, a: usize, n: usize, d: u64, coeffs: &[u64]) -> HypersurfaceSpec {
        let f = FieldCtx::new(p, a).unwrap();
        let terms: Vec<(Vec<u64>, FieldElement)> = full_monomial_support(n, d)
            .into_iter()
            .zip(coeffs)
            .map(|(e, &c)| (e, f.element_by_index(c % f.order())))
            .collect();
        HypersurfaceSpec::new(p, a, n, d, terms).unwrap()
    }

    #[test]
    fn full_monomial_support_counts() {
        // C(n+d, d) monomials, all of degree d, all distinct
        for (n, d, want) in [(2usize, 2u64, 6usize), (3, 2, 10), (2, 3, 10), (4, 5, 126)] {
            let s = full_monomial_support(n, d);
            assert_eq!(s.len(), want);
            let mut dedup = s.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), want);
            for e in &s {
                assert_eq!(e.iter().sum::<u64>(), d);
            }
        }
        assert_eq!(full_monomial_support(1, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn hw_oracle_fermat_examples() {
        // p = 7: coefficient of (x0 x1 x2)^6 in f^6 = 6!/(2!2!2!) = 90 = 6 mod 7
        let spec = fermat_cubic(7);
        let m = classical_hw_oracle(&spec).unwrap();
        assert_eq!(spec.field().as_prime(&m.entries[0][0]), Some(6));
        // p = 2: no mixed monomial in f itself
        let spec = fermat_cubic(2);
        let m = classical_hw_oracle(&spec).unwrap();
        assert!(spec.field().is_zero(&m.entries[0][0]));
        assert!(check_hw_oracle(&fermat_cubic(7)).unwrap().pass);
        assert!(check_hw_oracle(&fermat_cubic(2)).unwrap().pass);
    }

    #[test]
    fn hw_oracle_supersingular_elliptic_curve() {
        // y^2 z - x^3 - x z^2 over F_3 is supersingular: entry 0
        let spec = spec_from(
            r#"{"p": 3, "a": 1, "n": 2, "d": 3, "terms": [
                {"exponents": [0,2,1], "coeff": "1"},
                {"exponents": [3,0,0], "coeff": "-1"},
                {"exponents": [1,0,2], "coeff": "-1"}]}"#,
        );
        let m = classical_hw_oracle(&spec).unwrap();
        assert!(spec.field().is_zero(&m.entries[0][0]));
        assert!(check_hw_oracle(&spec).unwrap().pass);
    }

    #[test]
    fn hw_oracle_rejects_positive_mu() {
        assert!(classical_hw_oracle(&two_lines(3, 1)).is_err());
    }

    #[test]
    fn hw_oracle_matches_on_random_cubics() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for p in [2u64, 3, 5] {
            for _ in 0..5 {
                let coeffs: Vec<u64> = (0..10).map(|_| rng.gen_range(0..p)).collect();
                if coeffs.iter().all(|&c| c == 0) {
                    continue;
                }
                let spec = full_spec(p, 1, 2, 3, &coeffs);
                assert!(check_hw_oracle(&spec).unwrap().pass, "p={p}");
            }
        }
    }

    #[test]
    fn main_congruence_classical_cases() {
        for p in [2u64, 5, 7] {
            let r = check_main_congruence(&fermat_cubic(p), 5, DEFAULT_ENUM_GUARD).unwrap();
            assert!(r.pass, "p={p}: {:?}", r.witness);
        }
    }

    #[test]
    fn main_congruence_rejects_wrong_parity_and_degenerate() {
        assert!(check_main_congruence(&two_lines(3, 1), 4, DEFAULT_ENUM_GUARD).is_err());
        let zero = spec_from(
            r#"{"p": 3, "a": 1, "n": 2, "d": 3, "terms": [
                {"exponents": [3,0,0], "coeff": "0"}]}"#,
        );
        assert!(check_main_congruence(&zero, 4, DEFAULT_ENUM_GUARD).is_err());
        assert!(check_divisible_case(&fermat_cubic(3), 4, DEFAULT_ENUM_GUARD).is_err());
    }

    #[test]
    fn divisible_case_two_lines() {
        for (p, a) in [(2u64, 1usize), (3, 1), (2, 2)] {
            let r = check_divisible_case(&two_lines(p, a), 5, DEFAULT_ENUM_GUARD).unwrap();
            assert!(r.pass, "p={p} a={a}: {:?}", r.witness);
        }
    }

    #[test]
    fn divisible_case_random_quadric_curves() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for p in [2u64, 3] {
            for _ in 0..3 {
                let coeffs: Vec<u64> = (0..6).map(|_| rng.gen_range(0..p)).collect();
                if coeffs.iter().all(|&c| c == 0) {
                    continue;
                }
                let spec = full_spec(p, 1, 2, 2, &coeffs);
                let r = check_divisible_case(&spec, 5, DEFAULT_ENUM_GUARD).unwrap();
                assert!(r.pass, "p={p} coeffs={coeffs:?}: {:?}", r.witness);
            }
        }
    }

    #[test]
    fn main_congruence_quadric_surface() {
        // n=3, d=2, mu=1: the generalized case with rescaling
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..3 {
            let coeffs: Vec<u64> = (0..10).map(|_| rng.gen_range(0..3)).collect();
            if coeffs.iter().all(|&c| c == 0) {
                continue;
            }
            let spec = full_spec(3, 1, 3, 2, &coeffs);
            let r = check_main_congruence(&spec, 4, DEFAULT_ENUM_GUARD).unwrap();
            assert!(r.pass, "coeffs={coeffs:?}: {:?}", r.witness);
        }
    }

    #[test]
    fn euler_suite_examples() {
        assert!(check_euler_suite(&fermat_cubic(7)).unwrap().pass);
        assert!(check_euler_suite(&two_lines(3, 1)).unwrap().pass);
        assert!(check_euler_suite(&full_spec(3, 1, 2, 2, &[1, 2, 1, 0, 1, 2]))
            .unwrap()
            .pass);
    }

    #[test]
    fn box_check_kernel_example() {
        // support x^2, y^2, xy with relation (1, 1, -2)
        let spec = spec_from(
            r#"{"p": 3, "a": 1, "n": 1, "d": 2, "terms": [
                {"exponents": [2,0], "coeff": "1"},
                {"exponents": [0,2], "coeff": "1"},
                {"exponents": [1,1], "coeff": "1"}]}"#,
        );
        let s = IndexSubset::full(1);
        let u = vec![1u64, 1, 1];
        let r = check_box(&spec, &s, &u, &u, &[1, 1, -2]).unwrap();
        assert!(r.pass);
        // non-relation vectors are rejected
        assert!(check_box(&spec, &s, &u, &u, &[1, 0, 0]).is_err());
        assert!(check_box_suite(&spec).unwrap().pass);
    }

    #[test]
    fn box_suite_vacuous_for_fermat() {
        let r = check_box_suite(&fermat_cubic(5)).unwrap();
        assert!(r.pass);
        assert!(!r.notes.is_empty());
    }

    #[test]
    fn box_suite_full_supports() {
        assert!(check_box_suite(&full_spec(3, 1, 2, 2, &[1, 2, 0, 1, 1, 2]))
            .unwrap()
            .pass);
        assert!(check_box_suite(&full_spec(2, 2, 2, 3, &[1, 2, 3, 0, 1, 2, 3, 0, 1, 2]))
            .unwrap()
            .pass);
    }

    #[test]
    fn hyp71_quadric_curve_arrangement() {
        let s = IndexSubset::full(2);
        let arr = hypothesis71_construct(2, 2, &s, 3, &full_monomial_support(2, 2)).unwrap();
        assert_eq!(arr.mu, 1);
        assert_eq!(arr.umin.len(), 3);
        // block x0 x1, then the three monomials divisible by x2
        assert_eq!(arr.spec.terms[0].exponents, vec![1, 1, 0]);
        let distinguished: Vec<Vec<u64>> = (1..4).map(|i| arr.spec.terms[i].exponents.clone()).collect();
        assert_eq!(
            distinguished,
            vec![vec![0, 0, 2], vec![0, 1, 1], vec![1, 0, 1]]
        );
        // k_u is a bijection onto the distinguished block
        let mut ks = arr.k_of_u.clone();
        ks.sort();
        assert_eq!(ks, vec![1, 2, 3]);
    }

    #[test]
    fn hyp71_single_point_case() {
        // n=4, d=5: mu = 0, single distinguished monomial x0..x4
        let s = IndexSubset::full(4);
        let arr = hypothesis71_construct(4, 5, &s, 2, &full_monomial_support(4, 5)).unwrap();
        assert_eq!(arr.mu, 0);
        assert_eq!(arr.umin, vec![vec![1, 1, 1, 1, 1, 1]]);
        assert_eq!(arr.spec.terms[0].exponents, vec![1, 1, 1, 1, 1]);
        assert_eq!(arr.k_of_u, vec![1]);
    }

    #[test]
    fn hyp71_missing_monomial_is_an_error() {
        let s = IndexSubset::full(2);
        let support: Vec<Vec<u64>> = full_monomial_support(2, 2)
            .into_iter()
            .filter(|e| *e != vec![0, 0, 2])
            .collect();
        assert!(hypothesis71_construct(2, 2, &s, 3, &support).is_err());
    }

    #[test]
    fn invertibility_acceptance_grid() {
        for (n, d) in [(2usize, 2u64), (3, 2), (2, 3)] {
            for p in [2u64, 3, 5] {
                let s = IndexSubset::full(n);
                let r = check_generic_invertibility(n, d, &s, p, 20, 42).unwrap();
                assert!(r.pass, "n={n} d={d} p={p}: {:?}", r.witness);
            }
        }
    }

    #[test]
    fn invertibility_proper_subset() {
        let i = IndexSubset::from_members(2, &[0, 2]);
        let r = check_generic_invertibility(2, 2, &i, 3, 20, 7).unwrap();
        assert!(r.pass, "{:?}", r.witness);
    }

    #[test]
    fn constant_term_separation_examples() {
        for p in [2u64, 3, 5] {
            let s = IndexSubset::full(2);
            let r = constant_term_separation(2, 2, &s, p).unwrap();
            assert!(r.pass, "p={p}: {:?}", r.witness);
            let r = constant_term_separation(2, 3, &s, p).unwrap();
            assert!(r.pass, "p={p} d=3: {:?}", r.witness);
        }
    }

    #[test]
    fn det_sparse_matches_hand_expansion() {
        let p = 5;
        let x = |j: usize| {
            let mut e = SparseModPoly::zero(p, 2);
            let mut exps = vec![0i32; 2];
            exps[j] = 1;
            e.add_term(exps, 1);
            e
        };
        // det [[x0, 1], [1, x1]] = x0 x1 - 1
        let one = SparseModPoly::constant(p, 2, 1);
        let det = det_sparse(p, 2, &[vec![x(0), one.clone()], vec![one, x(1)]]);
        assert_eq!(det.coefficient(&[1, 1]), 1);
        assert_eq!(det.coefficient(&[0, 0]), p - 1);
        assert_eq!(det.num_terms(), 2);
    }
}

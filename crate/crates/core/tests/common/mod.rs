//! Random small instances and the property checks shared by the property
//! suites and the acceptance harness.
#![allow(dead_code)]

use proptest::prelude::*;

use involutor_core::delta::{delta_apply, form_key};
use involutor_core::inverse_systems::{equations_upto, section_basis, spencer_apply, Section};
use involutor_core::jets::{all_jets, JetSystem};
use involutor_core::kernel::binomial;
use involutor_core::linalg::SVec;
use involutor_core::sequences::{
    compatibility_conditions, janet_bundle_dims, raw_syzygies, spencer_bundle_dims, TrackedBasis,
};
use involutor_core::{complete, DiffOp, MultiIndex, OpMatrix, Poly, Rat, RatFunc};

pub const CASES: u32 = 256;
pub const SEED: u64 = 20_240_611;

/// CASES cases from a fixed seed, so runs are reproducible.
pub fn config() -> ProptestConfig {
    ProptestConfig {
        cases: CASES,
        rng_seed: proptest::test_runner::RngSeed::Fixed(SEED),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn exps(n: usize, deg: usize) -> Vec<Vec<u16>> {
    MultiIndex::all_up_to(n, deg)
        .into_iter()
        .map(|m| m.0)
        .collect()
}

fn sparse_int() -> impl Strategy<Value = i64> {
    prop_oneof![3 => Just(0i64), 1 => -3i64..=3]
}

/// Polynomial coefficient of total degree at most `deg`.
pub fn coeff(n: usize, deg: usize) -> impl Strategy<Value = RatFunc> {
    let es = exps(n, deg);
    let len = es.len();
    (-3i64..=3, prop::collection::vec(sparse_int(), len - 1)).prop_map(move |(c0, cs)| {
        let terms = std::iter::once((es[0].clone(), Rat::from_integer(c0.into()))).chain(
            es[1..]
                .iter()
                .cloned()
                .zip(cs.into_iter().map(|c| Rat::from_integer(c.into()))),
        );
        RatFunc::from_poly(Poly::from_terms(n, terms))
    })
}

/// c·x1^k with a nonzero integer c and k ≤ `deg`.
pub fn monomial_coeff(n: usize, deg: usize) -> impl Strategy<Value = RatFunc> {
    (
        prop_oneof![1 => -3i64..=-1, 1 => 1i64..=3],
        prop_oneof![1 => Just(0u16), 1 => 0..=deg as u16],
    )
        .prop_map(move |(c, k)| {
            let mut e = vec![0u16; n];
            e[0] = k;
            RatFunc::from_poly(Poly::from_terms(n, vec![(e, Rat::from_integer(c.into()))]))
        })
}

fn sparse_coeff(n: usize, deg: usize) -> impl Strategy<Value = RatFunc> {
    prop_oneof![2 => Just(RatFunc::zero()), 1 => coeff(n, deg)]
}

pub fn diffop(n: usize, order: usize, deg: usize) -> impl Strategy<Value = DiffOp> {
    let mus = MultiIndex::all_up_to(n, order);
    let len = mus.len();
    prop::collection::vec(sparse_coeff(n, deg), len).prop_map(move |cs| {
        DiffOp::from_terms(n, mus.iter().cloned().zip(cs).filter(|(_, c)| !c.is_zero()))
    })
}

/// Like `diffop`, with monomial coefficients.
pub fn monomial_diffop(n: usize, order: usize, deg: usize) -> impl Strategy<Value = DiffOp> {
    let mus = MultiIndex::all_up_to(n, order);
    let len = mus.len();
    prop::collection::vec(
        prop_oneof![2 => Just(RatFunc::zero()), 1 => monomial_coeff(n, deg)],
        len,
    )
    .prop_map(move |cs| {
        DiffOp::from_terms(n, mus.iter().cloned().zip(cs).filter(|(_, c)| !c.is_zero()))
    })
}

/// An operator of the usual shapes whose coefficients are constants times
/// powers of x1 of degree at most `deg`; constant coefficients when n = 3.
pub fn monomial_operator(deg: usize) -> impl Strategy<Value = OpMatrix> {
    shape().prop_flat_map(move |(n, r, c, q)| {
        let deg = if n == 3 { 0 } else { deg };
        prop::collection::vec(prop::collection::vec(monomial_diffop(n, q, deg), c), r)
            .prop_map(move |rows| OpMatrix::from_rows(n, c, rows).expect("shape"))
    })
}

pub fn opmatrix(
    n: usize,
    rows: usize,
    cols: usize,
    order: usize,
    deg: usize,
) -> impl Strategy<Value = OpMatrix> {
    prop::collection::vec(prop::collection::vec(diffop(n, order, deg), cols), rows)
        .prop_map(move |r| OpMatrix::from_rows(n, cols, r).expect("shape"))
}

/// (n, rows, cols, order) with n ≤ 3, order ≤ 2 and up to two rows and columns.
pub fn shape() -> impl Strategy<Value = (usize, usize, usize, usize)> {
    (1usize..=3, 1usize..=2, 1usize..=2, 1usize..=2)
}

pub fn any_operator(deg: usize) -> impl Strategy<Value = OpMatrix> {
    shape().prop_flat_map(move |(n, r, c, q)| opmatrix(n, r, c, q, deg))
}

/// Jet order at which completion of D succeeds, minus the order of D.
pub fn completion_depth(d: &OpMatrix) -> Option<usize> {
    let s = JetSystem::from_opmatrix(d).autoreduce().ok()?;
    if s.is_empty() {
        return Some(0);
    }
    complete(&s)
        .ok()
        .map(|c| c.jet_order.saturating_sub(d.order()))
}

/// `monomial_operator` restricted to operators whose completion needs at
/// most `depth` prolongations beyond their order.
pub fn shallow_operator(deg: usize, depth: usize) -> impl Strategy<Value = OpMatrix> {
    monomial_operator(deg).prop_filter("completion too deep", move |d| {
        completion_depth(d).is_some_and(|k| k <= depth)
    })
}

/// A pair (A, B) of composable matrices, A·B defined.
pub fn composable(deg: usize) -> impl Strategy<Value = (OpMatrix, OpMatrix)> {
    (1usize..=3, 1usize..=2, 1usize..=2, 1usize..=2)
        .prop_flat_map(move |(n, a, b, c)| (opmatrix(n, a, b, 2, deg), opmatrix(n, b, c, 2, deg)))
}

pub fn vector_field_pair(deg: usize) -> impl Strategy<Value = (usize, Vec<RatFunc>, Vec<RatFunc>)> {
    (1usize..=3).prop_flat_map(move |n| {
        (
            Just(n),
            prop::collection::vec(coeff(n, deg), n),
            prop::collection::vec(coeff(n, deg), n),
        )
    })
}

/// A random element of Λ^s T* ⊗ S_p T* ⊗ E with p ≥ 2 and s ≤ n − 2.
pub fn cochain() -> impl Strategy<Value = (usize, usize, usize, SVec)> {
    (2usize..=3, 1usize..=2, 2usize..=4)
        .prop_flat_map(|(n, m, p)| (Just(n), Just(m), 0..=n - 2, Just(p)))
        .prop_flat_map(|(n, m, s, p)| {
            let forms = binomial(n as u64, s as u64) as usize;
            let keys: Vec<u128> = (0..forms)
                .flat_map(|f| {
                    (0..m).flat_map(move |k| {
                        MultiIndex::all_of_order(n, p)
                            .into_iter()
                            .map(move |mu| form_key(f, k, m, &mu))
                    })
                })
                .collect();
            let len = keys.len();
            (
                Just(n),
                Just(m),
                Just(s),
                prop::collection::vec(sparse_int(), len),
            )
                .prop_map(move |(n, m, s, cs)| {
                    let v = keys
                        .iter()
                        .zip(cs)
                        .filter(|(_, c)| *c != 0)
                        .map(|(k, c)| (*k, RatFunc::int(c)))
                        .collect();
                    (n, m, s, SVec::from_unsorted(v))
                })
        })
}

/// A random section of order q with polynomial values.
pub fn section(n: usize, m: usize, q: usize, deg: usize) -> impl Strategy<Value = Section> {
    let keys = all_jets(n, m, q);
    let len = keys.len();
    prop::collection::vec(sparse_coeff(n, deg), len).prop_map(move |cs| {
        let v = keys
            .iter()
            .copied()
            .zip(cs)
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Section::from_values(n, m, q, SVec::from_unsorted(v))
    })
}

/// A random section of order 2 or 3 with n ≤ 3 and m ≤ 2.
pub fn any_section() -> impl Strategy<Value = Section> {
    (1usize..=3, 1usize..=2, 2usize..=3).prop_flat_map(|(n, m, q)| section(n, m, q, 2))
}

pub fn check_adjoint_involution(d: &OpMatrix) -> Result<(), String> {
    if d.adjoint().adjoint() != *d {
        return Err(format!("ad(ad(D)) differs from D for {d}"));
    }
    Ok(())
}

pub fn check_adjoint_antihomomorphism(a: &OpMatrix, b: &OpMatrix) -> Result<(), String> {
    let lhs = a.compose(b).map_err(|e| e.to_string())?.adjoint();
    let rhs = b
        .adjoint()
        .compose(&a.adjoint())
        .map_err(|e| e.to_string())?;
    if lhs != rhs {
        return Err(format!(
            "ad(A∘B) differs from ad(B)∘ad(A) for A = {a}, B = {b}"
        ));
    }
    Ok(())
}

fn field_op(n: usize, xi: &[RatFunc]) -> DiffOp {
    DiffOp::from_terms(
        n,
        xi.iter()
            .enumerate()
            .map(|(i, c)| (MultiIndex::unit(n, i + 1), c.clone())),
    )
}

pub fn check_bracket(n: usize, xi: &[RatFunc], eta: &[RatFunc]) -> Result<(), String> {
    // [ξ,η]^i = ξ^j ∂_j η^i − η^j ∂_j ξ^i
    let bracket: Vec<RatFunc> = (0..n)
        .map(|i| {
            (0..n).fold(RatFunc::zero(), |acc, j| {
                acc.add(&xi[j].mul(&eta[i].derive(j + 1)))
                    .sub(&eta[j].mul(&xi[i].derive(j + 1)))
            })
        })
        .collect();
    let (a, b) = (field_op(n, xi).adjoint(), field_op(n, eta).adjoint());
    let lhs = a.mul(&b).sub(&b.mul(&a));
    let rhs = field_op(n, &bracket).adjoint().neg();
    if lhs != rhs {
        return Err(format!(
            "bracket identity fails for ξ = {xi:?}, η = {eta:?}"
        ));
    }
    Ok(())
}

pub fn check_delta_square(n: usize, m: usize, s: usize, v: &SVec) -> Result<(), String> {
    let once = delta_apply(v, n, m, s);
    let twice = delta_apply(&once, n, m, s + 1);
    if !twice.is_zero() {
        return Err(format!("δ∘δ ≠ 0 at n = {n}, m = {m}, s = {s}"));
    }
    Ok(())
}

fn alternating(v: &[usize]) -> i64 {
    v.iter()
        .enumerate()
        .map(|(r, &d)| if r % 2 == 0 { d as i64 } else { -(d as i64) })
        .sum()
}

/// Euler–Poincaré identities on the completion of D: Σ(−1)^r dim F_r = m − α
/// and Σ(−1)^r dim C_r = α.
pub fn check_euler(d: &OpMatrix) -> Result<(), String> {
    let s = JetSystem::from_opmatrix(d)
        .autoreduce()
        .map_err(|e| e.to_string())?;
    if s.is_empty() {
        return Ok(());
    }
    let done = complete(&s).map_err(|e| e.to_string())?;
    let sys = &done.system;
    let m = sys.m() as i64;
    let alpha = sys.characters().rank();
    let f = janet_bundle_dims(sys).map_err(|e| e.to_string())?;
    let c = spencer_bundle_dims(sys).map_err(|e| e.to_string())?;
    if alternating(&f) != m - alpha || alternating(&c) != alpha {
        return Err(format!(
            "Euler mismatch for {d}: F = {f:?}, C = {c:?}, α = {alpha}"
        ));
    }
    Ok(())
}

/// CC(D)∘D = 0, and every relation among the derivatives of the rows of D
/// up to two orders above D lies in the module generated by CC(D).
pub fn check_cc(d: &OpMatrix) -> Result<(), String> {
    let cc = compatibility_conditions(d).map_err(|e| e.to_string())?;
    if cc.nrows() > 0 && !cc.compose(d).map_err(|e| e.to_string())?.is_zero() {
        return Err(format!("CC∘D ≠ 0 for {d}"));
    }
    let probes = raw_syzygies(d, d.order() + 2);
    if cc.nrows() == 0 || cc.is_zero() {
        if probes.iter().any(|r| r.iter().any(|p| !p.is_zero())) {
            return Err(format!("a syzygy of {d} was missed: no CC reported"));
        }
        return Ok(());
    }
    let mut tb = TrackedBasis::new(&cc).map_err(|e| e.to_string())?;
    for p in probes {
        if !tb.contains(&p).map_err(|e| e.to_string())? {
            return Err(format!(
                "syzygy {} of {d} is not generated by the CC",
                involutor_core::text::render_row(&p)
            ));
        }
    }
    Ok(())
}

/// Sections of R_{q+1} are mapped by every d_i into sections of R_q.
pub fn check_spencer_lands(d: &OpMatrix, q: usize) -> Result<(), String> {
    let s = JetSystem::from_opmatrix(d);
    let rows = equations_upto(&s, q);
    for f in section_basis(&s, q + 1) {
        for g in spencer_apply(&f).map_err(|e| e.to_string())? {
            if !g.satisfies_all(&rows) {
                return Err(format!("d_i f leaves R_{q} for {d}"));
            }
        }
    }
    Ok(())
}

/// d_i(d_j f) = d_j(d_i f) on a section of order at least 2.
pub fn check_spencer_commute(f: &Section) -> Result<(), String> {
    let d = spencer_apply(f).map_err(|e| e.to_string())?;
    for i in 0..f.n() {
        let di = spencer_apply(&d[i]).map_err(|e| e.to_string())?;
        for j in 0..f.n() {
            let dj = spencer_apply(&d[j]).map_err(|e| e.to_string())?;
            if di[j] != dj[i] {
                return Err(format!("d_{}d_{} ≠ d_{}d_{}", j + 1, i + 1, i + 1, j + 1));
            }
        }
    }
    Ok(())
}

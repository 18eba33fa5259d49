//! Numeric evaluation of the q-chromatic function, the q-dichromate and the
//! Potts-type variant `B_r`, each by edge-subset expansion and, where one
//! exists, by the equivalent sum over vertex colourings.
//!
//! Vertex weights enter as component weights: a component `C` contributes
//! its total weight wherever the unweighted formulas use `|C|`, and a vertex
//! colour enters the field term multiplied by the vertex weight. Colours run
//! over `0..k`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::partitions::{check_brute_size, component_weights};
use crate::tree::WeightedTree;

/// Largest exponent (in bits of the result) any single power may reach.
const MAX_EXPONENT: u64 = 1 << 22;
/// Upper bound on `k^n` for the colouring sums.
const MAX_COLOURINGS: u64 = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    Subsets,
    Colourings,
}

/// Parameters of the evaluators. `x` stands for `e^{βJ} - 1`, so the
/// inverse temperature and coupling only enter through it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PottsParams {
    pub k: u32,
    pub q: u32,
    pub r: u32,
    pub x: i64,
    pub y: u32,
}

impl Default for PottsParams {
    fn default() -> Self {
        PottsParams { k: 2, q: 2, r: 2, x: 1, y: 2 }
    }
}

impl PottsParams {
    pub fn m(&self, t: &WeightedTree, mode: EvalMode) -> Result<BigInt> {
        eval_m(t, self.k, self.q, mode)
    }

    pub fn b(&self, t: &WeightedTree) -> Result<BigInt> {
        eval_b(t, self.x, self.y, self.q)
    }

    pub fn br(&self, t: &WeightedTree, mode: EvalMode) -> Result<BigInt> {
        eval_br(t, self.x, self.k, self.q, self.r, mode)
    }
}

fn small_weights(t: &WeightedTree) -> Result<Vec<u64>> {
    t.weights()
        .iter()
        .map(|w| u64::try_from(w).map_err(|_| Error::Resource("vertex weight too large to evaluate".into())))
        .collect()
}

fn checked_exponent(e: Option<u64>) -> Result<u64> {
    match e {
        Some(e) if e <= MAX_EXPONENT => Ok(e),
        _ => Err(Error::Resource("exponent exceeds evaluation limit".into())),
    }
}

fn pow(base: u32, exp: u64) -> Result<BigUint> {
    let exp = checked_exponent(Some(exp))?;
    Ok(BigUint::from(base).pow(u32::try_from(exp).expect("bounded by MAX_EXPONENT")))
}

/// `(k)_{q^m} = sum_{i<k} q^{i m}`.
pub fn q_integer(k: u32, q: u32, m: u64) -> Result<BigUint> {
    let mut s = BigUint::zero();
    for i in 0..u64::from(k) {
        s += pow(q, checked_exponent(i.checked_mul(m))?)?;
    }
    Ok(s)
}

fn check_colourings(t: &WeightedTree, k: u32) -> Result<()> {
    let total = u64::from(k).checked_pow(t.n() as u32);
    match total {
        Some(c) if c <= MAX_COLOURINGS => Ok(()),
        _ => Err(Error::Resource(format!("{k}^{} colourings exceed the enumeration limit", t.n()))),
    }
}

/// Calls `f` with every map `V -> 0..k`.
fn for_each_colouring(n: usize, k: u32, mut f: impl FnMut(&[u32]) -> Result<()>) -> Result<()> {
    if k == 0 {
        return Ok(());
    }
    let mut colour = vec![0u32; n];
    loop {
        f(&colour)?;
        let mut i = 0;
        loop {
            if i == n {
                return Ok(());
            }
            colour[i] += 1;
            if colour[i] < k {
                break;
            }
            colour[i] = 0;
            i += 1;
        }
    }
}

/// Sum over edge subsets `A` of `sign(|A|) * prod over components C of term(w(C))`.
fn subset_sum(
    t: &WeightedTree,
    edge_factor: impl Fn(usize) -> BigInt,
    component_term: impl Fn(u64) -> Result<BigUint>,
) -> Result<BigInt> {
    check_brute_size(t)?;
    small_weights(t)?;
    let m = t.edges().len();
    let mut total = BigInt::zero();
    for mask in 0..1u64 << m {
        let mut term = edge_factor(mask.count_ones() as usize);
        if term.is_zero() {
            continue;
        }
        for cw in component_weights(t, mask) {
            let cw = u64::try_from(&cw).map_err(|_| Error::Resource("component weight too large".into()))?;
            term *= BigInt::from(component_term(cw)?);
        }
        total += term;
    }
    Ok(total)
}

/// The q-chromatic function `M(k, q)`.
pub fn eval_m(t: &WeightedTree, k: u32, q: u32, mode: EvalMode) -> Result<BigInt> {
    match mode {
        EvalMode::Subsets => subset_sum(
            t,
            |a| if a % 2 == 0 { BigInt::one() } else { -BigInt::one() },
            |cw| q_integer(k, q, cw),
        ),
        EvalMode::Colourings => {
            check_colourings(t, k)?;
            let ws = small_weights(t)?;
            let mut total = BigUint::zero();
            for_each_colouring(t.n(), k, |s| {
                if t.edges().iter().any(|&(u, v)| s[u] == s[v]) {
                    return Ok(());
                }
                let mut e = Some(0u64);
                for (v, &w) in ws.iter().enumerate() {
                    e = e.and_then(|e| e.checked_add(u64::from(s[v]).checked_mul(w)?));
                }
                total += pow(q, checked_exponent(e)?)?;
                Ok(())
            })?;
            Ok(BigInt::from(total))
        }
    }
}

/// The q-dichromate `B(x, y, q)`; `y` plays the role of the state count.
pub fn eval_b(t: &WeightedTree, x: i64, y: u32, q: u32) -> Result<BigInt> {
    let x = BigInt::from(x);
    subset_sum(t, |a| num_traits::pow(x.clone(), a), |cw| q_integer(y, q, cw))
}

/// `B_r(x, k, q)`: subset expansion, or the Potts sum
/// `sum_σ (x+1)^{monochromatic edges} r^{sum_v q^{σ(v)} w(v)}`.
pub fn eval_br(t: &WeightedTree, x: i64, k: u32, q: u32, r: u32, mode: EvalMode) -> Result<BigInt> {
    match mode {
        EvalMode::Subsets => {
            let xb = BigInt::from(x);
            subset_sum(
                t,
                |a| num_traits::pow(xb.clone(), a),
                |cw| {
                    let mut s = BigUint::zero();
                    for i in 0..k {
                        let qi = u64::try_from(pow(q, u64::from(i))?)
                            .map_err(|_| Error::Resource("q^i too large".into()))?;
                        s += pow(r, checked_exponent(cw.checked_mul(qi))?)?;
                    }
                    Ok(s)
                },
            )
        }
        EvalMode::Colourings => {
            check_colourings(t, k)?;
            let ws = small_weights(t)?;
            let coupling: BigInt = BigInt::from(x) + 1;
            let mut q_pows = Vec::with_capacity(k as usize);
            for i in 0..k {
                q_pows.push(
                    u64::try_from(pow(q, u64::from(i))?).map_err(|_| Error::Resource("q^i too large".into()))?,
                );
            }
            let mut total = BigInt::zero();
            for_each_colouring(t.n(), k, |s| {
                let mono = t.edges().iter().filter(|&&(u, v)| s[u] == s[v]).count();
                let mut e = Some(0u64);
                for (v, &w) in ws.iter().enumerate() {
                    e = e.and_then(|e| e.checked_add(q_pows[s[v] as usize].checked_mul(w)?));
                }
                let field = pow(r, checked_exponent(e)?)?;
                total += num_traits::pow(coupling.clone(), mono) * BigInt::from(field);
                Ok(())
            })?;
            Ok(total)
        }
    }
}

// SPDX-License-Identifier: Apache-2.0

//! Floating-point cross-check of the symbolic engine: evaluate an expression
//! on random joint distributions and report its extremes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::expr::{Atom, EntropyExpression, Rational, VarSet, MAX_VARIABLES};
use super::IdentityError;

pub const MAX_ALPHABET: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumericSummary {
    pub trials: usize,
    pub min: f64,
    pub max: f64,
    /// `max |value|`, the residual for identities (expressions expected to be 0).
    pub max_abs: f64,
}

/// A joint distribution over `k` variables with a common alphabet.
#[derive(Debug, Clone)]
pub struct JointDistribution {
    k: usize,
    alphabet: usize,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(k: usize, alphabet: usize, weights: Vec<f64>) -> Self {
        assert_eq!(weights.len(), alphabet.pow(k as u32));
        let total: f64 = weights.iter().sum();
        assert!(total > 0.0);
        Self {
            k,
            alphabet,
            probs: weights.into_iter().map(|w| w / total).collect(),
        }
    }

    /// Independent coordinates with the given marginals.
    pub fn product(marginals: &[Vec<f64>]) -> Self {
        let k = marginals.len();
        let alphabet = marginals[0].len();
        let cells = alphabet.pow(k as u32);
        let weights = (0..cells)
            .map(|cell| {
                digits(cell, k, alphabet)
                    .enumerate()
                    .map(|(i, d)| marginals[i][d])
                    .product()
            })
            .collect();
        Self::new(k, alphabet, weights)
    }

    /// Shannon entropy (bits) of the marginal on the variables in `mask`.
    pub fn entropy(&self, mask: u32) -> f64 {
        if mask == 0 {
            return 0.0;
        }
        let mut marginal = vec![0.0f64; self.alphabet.pow(mask.count_ones())];
        for (cell, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let mut idx = 0usize;
            for (i, d) in digits(cell, self.k, self.alphabet).enumerate() {
                if mask >> i & 1 == 1 {
                    idx = idx * self.alphabet + d;
                }
            }
            marginal[idx] += p;
        }
        marginal.into_iter().filter(|&p| p > 0.0).map(|p| -p * p.log2()).sum()
    }
}

impl JointDistribution {
    /// Marginal on `mask`, indexed like [`Self::entropy`] builds it.
    fn marginal(&self, mask: u32) -> Vec<f64> {
        let mut out = vec![0.0f64; self.alphabet.pow(mask.count_ones())];
        for (cell, &p) in self.probs.iter().enumerate() {
            out[self.project(cell, mask)] += p;
        }
        out
    }

    fn project(&self, cell: usize, mask: u32) -> usize {
        let mut idx = 0usize;
        for (i, d) in digits(cell, self.k, self.alphabet).enumerate() {
            if mask >> i & 1 == 1 {
                idx = idx * self.alphabet + d;
            }
        }
        idx
    }

    /// `sum_cell p(cell) log2(prod num / prod den)` over marginals of the
    /// cell's projections.
    fn log_ratio(&self, num: &[u32], den: &[u32]) -> f64 {
        let nums: Vec<Vec<f64>> = num.iter().map(|&m| self.marginal(m)).collect();
        let dens: Vec<Vec<f64>> = den.iter().map(|&m| self.marginal(m)).collect();
        let mut total = 0.0;
        for (cell, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let mut r = 0.0;
            for (m, table) in num.iter().zip(&nums) {
                r += table[self.project(cell, *m)].log2();
            }
            for (m, table) in den.iter().zip(&dens) {
                r -= table[self.project(cell, *m)].log2();
            }
            total += p * r;
        }
        total
    }
}

/// Value of one atom computed from its definition as a sum over the joint
/// distribution, without going through entropy coordinates.
pub fn atom_value(atom: &Atom, vars: &[String], dist: &JointDistribution) -> f64 {
    let m = |s: &VarSet| mask_of(s, vars);
    match atom {
        Atom::C { target, given } => {
            let (t, g) = (m(target), m(given));
            dist.log_ratio(&[g], &[t | g])
        }
        Atom::I { left, right, given } => {
            let (l, r, g) = (m(left), m(right), m(given));
            dist.log_ratio(&[l | r | g, g], &[l | g, r | g])
        }
        Atom::J { left, right, given } => {
            let c = |target: &VarSet| {
                atom_value(
                    &Atom::C {
                        target: target.clone(),
                        given: given.clone(),
                    },
                    vars,
                    dist,
                )
            };
            c(left) + c(right) - c(&left.union(right).cloned().collect())
        }
    }
}

/// Like [`numeric_check`] but evaluating a term list atom by atom, so
/// terms that cancel symbolically are still computed separately.
pub fn numeric_terms_check(
    terms: &[(Rational, Atom)],
    trials: usize,
    alphabet: usize,
    seed: u64,
) -> Result<NumericSummary, IdentityError> {
    let vars: Vec<String> = terms
        .iter()
        .flat_map(|(_, a)| a.variables())
        .collect::<VarSet>()
        .into_iter()
        .collect();
    if vars.len() > MAX_VARIABLES {
        return Err(IdentityError::TooManyVariables(vars.len()));
    }
    check_alphabet(alphabet)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = NumericSummary {
        trials,
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        max_abs: 0.0,
    };
    let k = vars.len().max(1);
    for _ in 0..trials {
        let dist = random_distribution(&mut rng, k, alphabet);
        let v: f64 = terms
            .iter()
            .map(|(c, a)| *c.numer() as f64 / *c.denom() as f64 * atom_value(a, &vars, &dist))
            .sum();
        summary.min = summary.min.min(v);
        summary.max = summary.max.max(v);
        summary.max_abs = summary.max_abs.max(v.abs());
    }
    Ok(summary)
}

fn check_alphabet(alphabet: usize) -> Result<(), IdentityError> {
    if !(2..=MAX_ALPHABET).contains(&alphabet) {
        return Err(IdentityError::Parse(format!(
            "alphabet size must be 2..={MAX_ALPHABET}, got {alphabet}"
        )));
    }
    Ok(())
}

fn digits(mut cell: usize, k: usize, alphabet: usize) -> impl Iterator<Item = usize> {
    (0..k).map(move |_| {
        let d = cell % alphabet;
        cell /= alphabet;
        d
    })
}

/// Evaluate `expr` on a distribution whose coordinate `i` is `vars[i]`.
pub fn evaluate(expr: &EntropyExpression, vars: &[String], dist: &JointDistribution) -> f64 {
    expr.coordinates()
        .iter()
        .map(|(set, coeff)| {
            let mask = mask_of(set, vars);
            let c = *coeff.numer() as f64 / *coeff.denom() as f64;
            c * dist.entropy(mask)
        })
        .sum()
}

fn mask_of(set: &VarSet, vars: &[String]) -> u32 {
    set.iter()
        .map(|v| 1u32 << vars.iter().position(|w| w == v).expect("variable in order"))
        .fold(0, |a, b| a | b)
}

/// Draw one of several distribution families: dense random, sparse random,
/// and distributions with functional dependencies between coordinates.
pub fn random_distribution(rng: &mut ChaCha8Rng, k: usize, alphabet: usize) -> JointDistribution {
    let cells = alphabet.pow(k as u32);
    let family = rng.gen_range(0..4);
    let weights: Vec<f64> = match family {
        0 => (0..cells).map(|_| rng.gen::<f64>()).collect(),
        1 => (0..cells)
            .map(|_| if rng.gen_bool(0.25) { rng.gen::<f64>() } else { 0.0 })
            .collect(),
        2 => {
            // Last coordinate is a fixed function of the others.
            let table: Vec<usize> = (0..cells).map(|_| rng.gen_range(0..alphabet)).collect();
            (0..cells)
                .map(|cell| {
                    let last = digits(cell, k, alphabet).last().unwrap_or(0);
                    let rest = cell % (cells / alphabet).max(1);
                    if table[rest] == last {
                        rng.gen::<f64>() + 0.01
                    } else {
                        0.0
                    }
                })
                .collect()
        }
        _ => {
            // Spiky: a few heavy cells.
            (0..cells).map(|_| rng.gen::<f64>().powi(8)).collect()
        }
    };
    if weights.iter().all(|&w| w == 0.0) {
        return JointDistribution::new(k, alphabet, vec![1.0; cells]);
    }
    JointDistribution::new(k, alphabet, weights)
}

pub fn numeric_check(
    expr: &EntropyExpression,
    trials: usize,
    alphabet: usize,
    seed: u64,
) -> Result<NumericSummary, IdentityError> {
    let vars: Vec<String> = expr.variables().into_iter().collect();
    if vars.len() > MAX_VARIABLES {
        return Err(IdentityError::TooManyVariables(vars.len()));
    }
    check_alphabet(alphabet)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = NumericSummary {
        trials,
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        max_abs: 0.0,
    };
    let k = vars.len().max(1);
    for _ in 0..trials {
        let dist = random_distribution(&mut rng, k, alphabet);
        let v = evaluate(expr, &vars, &dist);
        summary.min = summary.min.min(v);
        summary.max = summary.max.max(v);
        summary.max_abs = summary.max_abs.max(v.abs());
    }
    Ok(summary)
}

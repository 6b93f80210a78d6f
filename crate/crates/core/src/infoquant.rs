//! Entropies and capacity quantities, all in nats.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{DensityMatrix, QuantumChannel, Stinespring, TlChannel, Traced};
use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_eigenvalues, random_pure_state, stream_rng, CMat, CVec};
use crate::qalg::GroupKind;
use crate::tlrep::TlRep;

/// Eigenvalues below this are an error; between it and zero they are clamped.
pub const NEGATIVE_EIGEN_TOL: f64 = 1e-10;
pub const DEFAULT_RANDOM_SAMPLES: usize = 2000;
pub const DEFAULT_DESCENT_ITERS: usize = 200;

const WITNESS_NORM_TOL: f64 = 1e-8;
const BISTOCHASTIC_TOL: f64 = 1e-10;

/// `−Σ λ ln λ` over the spectrum, dropping `λ < 1e-12`.
pub fn entropy_of_eigenvalues(ev: &[f64]) -> Result<f64> {
    if let Some(&min) = ev.iter().min_by(|a, b| a.total_cmp(b)) {
        if min < -NEGATIVE_EIGEN_TOL {
            return Err(Error::InvalidState(format!(
                "eigenvalue {min:e} below -{NEGATIVE_EIGEN_TOL:e}"
            )));
        }
    }
    Ok(crate::linalg::entropy_of_spectrum(ev))
}

pub fn von_neumann_entropy(rho: &CMat) -> Result<f64> {
    entropy_of_eigenvalues(&hermitian_eigenvalues(rho))
}

/// A finite ensemble `{(p_x, ρ_x)}`.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub items: Vec<(f64, DensityMatrix)>,
}

impl Ensemble {
    pub fn new(items: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        let first = items
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty ensemble".into()))?;
        let d = first.1.dim();
        let mut total = 0.0;
        for (p, rho) in &items {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::InvalidArgument(format!("probability {p} outside [0,1]")));
            }
            if rho.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: rho.dim(),
                });
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("probabilities sum to {total}")));
        }
        Ok(Ensemble { items })
    }

    pub fn average(&self) -> CMat {
        let d = self.items[0].1.dim();
        self.items
            .iter()
            .fold(CMat::zeros(d, d), |acc, (p, rho)| acc + &rho.rho * c(*p))
    }
}

/// How [`min_output_entropy`] searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MoeStrategy {
    /// The alternating-index witness when available, else `RandomPure` with defaults.
    Witness {
        seed: u64,
    },
    RandomPure {
        samples: usize,
        seed: u64,
    },
    /// Projected gradient on pure states from the best of `samples` random starts.
    Descent {
        iters: usize,
        samples: usize,
        seed: u64,
    },
}

/// Outcome of an MOE search. `best_entropy` is an upper bound on `H_min`.
#[derive(Debug, Clone, Serialize)]
pub struct MoeReport {
    pub best_entropy: f64,
    #[serde(skip)]
    pub argmin: DensityMatrix,
    pub strategy: MoeStrategy,
    /// The strategy actually run (differs from `strategy` after a fallback).
    pub strategy_used: MoeStrategy,
    /// `ln(θ(k,l,m) / [k+1])`.
    pub theory_lower: f64,
    pub theory_upper_hint: f64,
    /// `best_entropy` meets `theory_lower` within `1e-8`, so it equals `H_min`.
    pub certified: bool,
    pub label: &'static str,
}

/// Entropy of `Φ(|ψ⟩⟨ψ|)` computed from the `d_out × d_env` matrix `M = (V ψ)`.
pub fn pure_output_entropy(v: &Stinespring, psi: &CVec) -> Result<f64> {
    let m = output_amplitudes(v, psi);
    let small = if m.nrows() <= m.ncols() {
        &m * m.adjoint()
    } else {
        m.adjoint() * &m
    };
    von_neumann_entropy(&small)
}

fn output_amplitudes(v: &Stinespring, psi: &CVec) -> CMat {
    let w = &v.v * psi;
    CMat::from_fn(v.d_out, v.d_env, |b, e| w[b * v.d_env + e])
}

fn alternating(len: usize) -> Vec<usize> {
    (0..len).map(|i| i % 2).collect()
}

fn require_witness_group(channel: &TlChannel) -> Result<()> {
    if channel.group.kind != GroupKind::OnPlus || channel.group.n < 3 {
        return Err(Error::Unsupported(format!(
            "witness states need O_N^+ with N >= 3, got {}",
            channel.group
        )));
    }
    Ok(())
}

/// Reduced coordinates `B_k* |i⟩` of an ambient basis vector, which must lie in `H_k`.
fn reduced_index_vector(rep: &TlRep, k: usize, idx: &[usize]) -> Result<CVec> {
    let b = rep.basis(k)?;
    let n = rep.group().n;
    let row = idx.iter().fold(0usize, |acc, &d| acc * n + d);
    let v = CVec::from_fn(b.dim(), |j, _| c(b.b[(row, j)]));
    let norm = v.norm();
    if (norm - 1.0).abs() > WITNESS_NORM_TOL {
        return Err(Error::tolerance(
            format!("witness index {idx:?} in H_{k}"),
            (norm - 1.0).abs(),
            WITNESS_NORM_TOL,
        ));
    }
    Ok(v / c(norm))
}

/// `|m⟩⟨m|` with `m = (1,2,1,…)` of length `k`, in reduced coordinates.
pub fn moe_witness_state(rep: &TlRep, channel: &TlChannel) -> Result<DensityMatrix> {
    require_witness_group(channel)?;
    let v = reduced_index_vector(rep, channel.triple.k, &alternating(channel.triple.k))?;
    DensityMatrix::pure(&v)
}

/// Adjacent-distinct multi-indices of length `len` over `0..n`.
fn adjacent_distinct(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for p in &out {
            for d in 0..n {
                if p.last() != Some(&d) {
                    let mut q = p.clone();
                    q.push(d);
                    next.push(q);
                }
            }
        }
        out = next;
    }
    out
}

/// Uniform mixture of `|j n⟩` realizing the one-shot capacity bound.
///
/// For `Φ^{l,m̄}` (traced Right) `j` runs over adjacent-distinct indices of
/// length `l − r` not ending in the first letter, and `n = (1,2,1,…)` has
/// length `m − r`. For `Φ^{l̄,m}` (traced Left) the construction is mirrored:
/// the fixed alternating block comes first, reversed so that it ends in the
/// first letter, and `j` of length `m − r` must not start with it.
pub fn q1_witness_ensemble(rep: &TlRep, channel: &TlChannel) -> Result<DensityMatrix> {
    require_witness_group(channel)?;
    let t = channel.triple;
    let n = channel.group.n;
    let r = t.r();
    let indices: Vec<Vec<usize>> = match channel.traced {
        Traced::Right => {
            let tail = alternating(t.m - r);
            adjacent_distinct(n, t.l - r)
                .into_iter()
                .filter(|j| j.last() != Some(&0))
                .map(|j| [j, tail.clone()].concat())
                .collect()
        }
        Traced::Left => {
            let mut head = alternating(t.l - r);
            head.reverse();
            adjacent_distinct(n, t.m - r)
                .into_iter()
                .filter(|j| j.first() != Some(&0))
                .map(|j| [head.clone(), j].concat())
                .collect()
        }
    };
    let d = channel.d_a;
    let mut rho = CMat::zeros(d, d);
    for idx in &indices {
        let v = reduced_index_vector(rep, t.k, idx)?;
        rho += &v * v.adjoint();
    }
    let count = indices.len() as f64;
    DensityMatrix::single(rho / c(count))
}

/// `H(Φ(ρ)) − H(Φ̃(ρ))`.
pub fn coherent_information(channel: &TlChannel, rho: &DensityMatrix) -> Result<f64> {
    let out = channel.apply(rho)?;
    let env = channel.complementary().apply(rho)?;
    Ok(von_neumann_entropy(&out.rho)? - von_neumann_entropy(&env.rho)?)
}

/// `H(Φ(Σ p ρ)) − Σ p H(Φ(ρ))`, a lower bound on the Holevo capacity.
pub fn holevo_of_ensemble(channel: &dyn QuantumChannel, ensemble: &Ensemble) -> Result<f64> {
    let avg = channel.apply_matrix(&ensemble.average())?;
    let mut parts = 0.0;
    for (p, rho) in &ensemble.items {
        parts += p * von_neumann_entropy(&channel.apply_matrix(&rho.rho)?)?;
    }
    Ok(von_neumann_entropy(&avg)? - parts)
}

/// `ln(d_B/d_E) ≤ Q^(1) ≤ C ≤ min{ln d_A, ln d_B, ln(d_A d_B / d_E)}` for bistochastic channels.
#[derive(Debug, Clone, Serialize)]
pub struct CapacityBounds {
    pub q1_lower: f64,
    /// `[ln d_A, ln d_B, ln(d_A d_B / d_E)]`.
    pub c_upper_list: [f64; 3],
    pub c_upper: f64,
}

pub fn bistochastic_deviation(channel: &dyn QuantumChannel) -> Result<f64> {
    let (a, b) = (channel.d_in(), channel.d_out());
    let out = channel.apply_matrix(&(CMat::identity(a, a) / c(a as f64)))?;
    Ok((out - CMat::identity(b, b) / c(b as f64)).norm())
}

pub fn capacity_bounds(channel: &TlChannel) -> Result<CapacityBounds> {
    for (name, dev) in [
        ("bistochasticity", bistochastic_deviation(channel)?),
        (
            "bistochasticity of the complement",
            bistochastic_deviation(&channel.complementary())?,
        ),
    ] {
        if dev > BISTOCHASTIC_TOL {
            return Err(Error::tolerance(name, dev, BISTOCHASTIC_TOL));
        }
    }
    let (a, b, e) = (channel.d_a as f64, channel.d_b as f64, channel.d_e as f64);
    let list = [a.ln(), b.ln(), (a * b / e).ln()];
    Ok(CapacityBounds {
        q1_lower: (b / e).ln(),
        c_upper: list.iter().copied().fold(f64::INFINITY, f64::min),
        c_upper_list: list,
    })
}

/// `ln(θ(k,l,m) / [k+1])`, the representation-theoretic lower bound on `H_min`.
pub fn moe_theory_lower(channel: &TlChannel) -> f64 {
    let g = channel.group;
    (g.theta(channel.triple) / g.quantum_integer(channel.triple.k + 1)).ln()
}

/// Heuristic value `H_min` is expected near: `0` at top weight, `r ln N` for
/// `O_N^+` otherwise (capped at `ln d_B`), `ln d_B` when nothing better is known.
pub fn moe_upper_hint(channel: &TlChannel) -> f64 {
    let t = channel.triple;
    let ln_db = (channel.d_b as f64).ln();
    if t.r() == 0 {
        0.0
    } else if channel.group.kind == GroupKind::OnPlus {
        (t.r() as f64 * (channel.group.n as f64).ln()).min(ln_db)
    } else {
        ln_db
    }
}

fn random_search(v: &Stinespring, samples: usize, seed: u64) -> Result<(f64, CVec)> {
    let samples = samples.max(1);
    let results: Vec<Result<(f64, CVec)>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let psi = random_pure_state(v.d_in, &mut rng);
            Ok((pure_output_entropy(v, &psi)?, psi))
        })
        .collect();
    let mut best: Option<(f64, CVec)> = None;
    for r in results {
        let (h, psi) = r?;
        if best.as_ref().is_none_or(|(b, _)| h < *b) {
            best = Some((h, psi));
        }
    }
    Ok(best.expect("at least one sample"))
}

/// `Φ*(X) = V* (X ⊗ 1_E) V`.
fn adjoint_apply(v: &Stinespring, x: &CMat) -> CMat {
    let lifted = x.kronecker(&CMat::identity(v.d_env, v.d_env));
    v.v.adjoint() * lifted * &v.v
}

fn neg_log(rho: &CMat) -> CMat {
    let (vals, vecs) = crate::linalg::hermitian_eigen(rho);
    let d = vals.iter().map(|&l| c(-(l.max(1e-12)).ln()));
    let diag = CMat::from_diagonal(&CVec::from_iterator(vals.len(), d));
    &vecs * diag * vecs.adjoint()
}

fn descent(v: &Stinespring, start: CVec, iters: usize) -> Result<(f64, CVec)> {
    let mut psi = start;
    let mut h = pure_output_entropy(v, &psi)?;
    let mut step = 0.5;
    for _ in 0..iters {
        let m = output_amplitudes(v, &psi);
        let out = &m * m.adjoint();
        let g = adjoint_apply(v, &neg_log(&out));
        let gpsi = &g * &psi;
        let along = psi.dotc(&gpsi);
        let grad = gpsi - &psi * along;
        if grad.norm() < 1e-13 {
            break;
        }
        let cand = &psi - grad * c(step);
        let cand = &cand / c(cand.norm());
        let hc = pure_output_entropy(v, &cand)?;
        if hc < h {
            psi = cand;
            h = hc;
        } else {
            step *= 0.5;
            if step < 1e-12 {
                break;
            }
        }
    }
    Ok((h, psi))
}

/// Best-effort minimum output entropy; the result is an upper bound on `H_min`.
pub fn min_output_entropy(rep: &TlRep, channel: &TlChannel, strategy: MoeStrategy) -> Result<MoeReport> {
    let v = &channel.stinespring;
    let (best, psi, used) = match strategy {
        MoeStrategy::Witness { seed } => match moe_witness_state(rep, channel) {
            Ok(w) => {
                let psi = principal_vector(&w);
                (pure_output_entropy(v, &psi)?, psi, strategy)
            }
            Err(Error::Unsupported(_)) => {
                let (h, psi) = random_search(v, DEFAULT_RANDOM_SAMPLES, seed)?;
                (
                    h,
                    psi,
                    MoeStrategy::RandomPure {
                        samples: DEFAULT_RANDOM_SAMPLES,
                        seed,
                    },
                )
            }
            Err(e) => return Err(e),
        },
        MoeStrategy::RandomPure { samples, seed } => {
            let (h, psi) = random_search(v, samples, seed)?;
            (h, psi, strategy)
        }
        MoeStrategy::Descent { iters, samples, seed } => {
            let (_, start) = random_search(v, samples, seed)?;
            let (h, psi) = descent(v, start, iters)?;
            (h, psi, strategy)
        }
    };
    let theory_lower = moe_theory_lower(channel);
    Ok(MoeReport {
        best_entropy: best,
        argmin: DensityMatrix::pure(&psi)?,
        strategy,
        strategy_used: used,
        theory_lower,
        theory_upper_hint: moe_upper_hint(channel),
        certified: (best - theory_lower).abs() <= 1e-8,
        label: "upper bound on H_min",
    })
}

fn principal_vector(rho: &DensityMatrix) -> CVec {
    let (_, vecs) = crate::linalg::hermitian_eigen(&rho.rho);
    vecs.column(vecs.ncols() - 1).into_owned()
}

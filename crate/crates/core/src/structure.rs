//! PPT and entanglement-breaking tests, Haar twirls, degradability and range checks.

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{compose, KrausMap, QuantumChannel, TlChannel, Traced};
use crate::error::{Error, Result};
use crate::linalg::{c, check_square, hermitian_eigenvalues, random_su2, stream_rng, CMat, CVec, Factor};
use crate::qalg::{AdmissibleTriple, GroupKind};
use crate::tlrep::TlRep;

/// Minimum eigenvalues at or above `-PPT_ACCEPT` count as PPT.
pub const PPT_ACCEPT: f64 = 1e-10;
/// Minimum eigenvalues below `-PPT_REJECT` count as not PPT.
pub const PPT_REJECT: f64 = 1e-8;

const ORTHONORMAL_TOL: f64 = 1e-10;
const SCHMIDT_TOL: f64 = 1e-8;

/// Transpose the chosen tensor factor of a `d1·d2` square matrix.
pub fn partial_transpose(m: &CMat, d1: usize, d2: usize, factor: Factor) -> Result<CMat> {
    check_square(m, d1 * d2)?;
    Ok(CMat::from_fn(d1 * d2, d1 * d2, |row, col| {
        let (i, a) = (row / d2, row % d2);
        let (j, b) = (col / d2, col % d2);
        match factor {
            Factor::First => m[(j * d2 + a, i * d2 + b)],
            Factor::Second => m[(i * d2 + b, j * d2 + a)],
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PptVerdict {
    Ppt,
    NotPpt,
    /// Minimum eigenvalue inside the band `[-PPT_REJECT, -PPT_ACCEPT)`.
    Indeterminate,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PPTReport {
    pub min_eigenvalue: f64,
    pub is_ppt: bool,
    pub tol: f64,
}

impl PPTReport {
    pub fn verdict(&self) -> PptVerdict {
        if self.min_eigenvalue >= -PPT_ACCEPT {
            PptVerdict::Ppt
        } else if self.min_eigenvalue < -PPT_REJECT {
            PptVerdict::NotPpt
        } else {
            PptVerdict::Indeterminate
        }
    }
}

/// Normalized Choi matrix with the output factor transposed.
pub fn partially_transposed_choi(channel: &dyn QuantumChannel) -> Result<CMat> {
    partial_transpose(
        &channel.choi_matrix(true),
        channel.d_out(),
        channel.d_in(),
        Factor::First,
    )
}

pub fn ppt_check(channel: &dyn QuantumChannel, tol: f64) -> Result<PPTReport> {
    let pt = partially_transposed_choi(channel)?;
    let min_eigenvalue = hermitian_eigenvalues(&pt)[0];
    Ok(PPTReport {
        min_eigenvalue,
        is_ppt: min_eigenvalue >= -tol,
        tol,
    })
}

/// Determinant `ac − |b|²` of the compression of the partially transposed
/// Choi matrix onto `span{v1, v2}`. Negative values certify non-PPT.
pub fn ebt_submatrix_witness(channel: &dyn QuantumChannel, v1: &CVec, v2: &CVec) -> Result<f64> {
    let d = channel.d_out() * channel.d_in();
    for v in [v1, v2] {
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.len(),
            });
        }
    }
    let dev = (v1.norm() - 1.0)
        .abs()
        .max((v2.norm() - 1.0).abs())
        .max(v1.dotc(v2).norm());
    if dev > ORTHONORMAL_TOL {
        return Err(Error::InvalidArgument(format!(
            "witness vectors are not orthonormal (deviation {dev:e})"
        )));
    }
    let pt = partially_transposed_choi(channel)?;
    let a = v1.dotc(&(&pt * v1)).re;
    let cc = v2.dotc(&(&pt * v2)).re;
    let b = v1.dotc(&(&pt * v2));
    Ok(a * cc - b.norm_sqr())
}

/// Basis vector `|b a⟩` of `H_out ⊗ H_in` in weight coordinates.
fn ket(channel: &TlChannel, b: usize, a: usize) -> CVec {
    let mut v = CVec::zeros(channel.d_b * channel.d_a);
    v[b * channel.d_a + a] = c(1.0);
    v
}

/// The pair of weight vectors used to exhibit a negative 2×2 minor.
///
/// `None` where the channel is PPT (`k = 0` traced right, `k = l − m` traced left).
pub fn ebt_witness_vectors(channel: &TlChannel) -> Result<Option<(CVec, CVec)>> {
    if channel.group.kind != GroupKind::Su2 {
        return Err(Error::Unsupported("weight witnesses are defined for SU(2)".into()));
    }
    let AdmissibleTriple { k, l, m } = channel.triple;
    let pair = match channel.traced {
        Traced::Right if k == 0 => None,
        Traced::Right if k > l => Some(((l, 0), (0, l))),
        Traced::Right => Some(((l, 0), (l - k, k))),
        Traced::Left if l >= m && k == l - m => None,
        Traced::Left if k > m => Some(((m, 0), (0, m))),
        Traced::Left => Some(((m, 0), (m - k, k))),
    };
    Ok(pair.map(|((b1, a1), (b2, a2))| (ket(channel, b1, a1), ket(channel, b2, a2))))
}

/// The top-weight vector of `H_l ⊆ H_m ⊗ H_{l−m}` split as `e ⊗ f`.
pub fn top_weight_product(rep: &TlRep, l: usize, m: usize) -> Result<(CVec, CVec)> {
    let k = l
        .checked_sub(m)
        .ok_or_else(|| Error::InvalidArgument(format!("need l >= m, got l={l}, m={m}")))?;
    let alpha = rep.cg_isometry_matrix(AdmissibleTriple::new(l, m, k)?)?;
    let (dm, dk) = (rep.dim(m)?, rep.dim(k)?);
    let top = crate::linalg::RMat::from_fn(dm, dk, |a, b| alpha[(a * dk + b, 0)]);
    let svd = top.svd(true, true);
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let second = order.get(1).map_or(0.0, |&i| svd.singular_values[i]);
    if second > SCHMIDT_TOL {
        return Err(Error::tolerance(
            "Schmidt rank of the top-weight vector",
            second,
            SCHMIDT_TOL,
        ));
    }
    let i = order[0];
    let s = svd.singular_values[i];
    let u = svd.u.as_ref().expect("u requested").column(i) * s;
    let vt = svd.v_t.as_ref().expect("v_t requested").row(i).transpose();
    Ok((u.map(c), vt.map(c)))
}

#[derive(Debug, Clone)]
pub struct HaarAverage {
    pub state: CMat,
    /// Frobenius distance to the normalized Choi matrix of `Φ^{l̄,m}_{l−m}`.
    pub distance: f64,
    pub samples: usize,
}

/// Monte-Carlo twirl of a product vector, compared against the Choi matrix
/// of `Φ^{l̄,m}_{l−m}`. Each rotated input-leg factor is followed by the
/// conjugation `J_{l−m}`, so the average is comparable with the literal Choi
/// matrix and is still a mixture of product states.
pub fn haar_average_state(rep: &TlRep, l: usize, m: usize, samples: usize, seed: u64) -> Result<HaarAverage> {
    if rep.group().kind != GroupKind::Su2 {
        return Err(Error::Unsupported("Haar averaging is implemented for SU(2)".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    let k = l.saturating_sub(m);
    let (e, f) = top_weight_product(rep, l, m)?;
    let j = crate::linalg::to_complex(&rep.conjugation(k)?);
    let terms: Vec<Result<CVec>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let g = random_su2(&mut stream_rng(seed, i as u64));
            let ge = rep.su2_rep(m, &g)? * &e;
            let gf = &j * (rep.su2_rep(k, &g)? * &f);
            Ok(ge.kronecker(&gf))
        })
        .collect();
    let d = e.len() * f.len();
    let mut state = CMat::zeros(d, d);
    for v in terms {
        let v = v?;
        state += &v * v.adjoint();
    }
    state /= c(samples as f64);
    let channel = TlChannel::build(rep, AdmissibleTriple::new(k, l, m)?, Traced::Left)?;
    let distance = (&state - channel.choi_matrix(true)).norm();
    Ok(HaarAverage {
        state,
        distance,
        samples,
    })
}

/// Largest entry of `Choi(Φ^{m,\overline{l−m}}_l ∘ Φ^{l,m̄}_{l+m}) − Choi(Φ^{m,l̄}_{l+m})`.
pub fn verify_degrading_identity(rep: &TlRep, l: usize, m: usize) -> Result<f64> {
    if rep.group().kind != GroupKind::Su2 {
        return Err(Error::Unsupported("the degrading identity is stated for SU(2)".into()));
    }
    if l < m {
        return Err(Error::InvalidArgument(format!("need l >= m, got l={l}, m={m}")));
    }
    let first = TlChannel::build(rep, AdmissibleTriple::new(l + m, l, m)?, Traced::Right)?;
    let degrader = TlChannel::build(rep, AdmissibleTriple::new(l, m, l - m)?, Traced::Right)?;
    let target = TlChannel::build(rep, AdmissibleTriple::new(l + m, m, l)?, Traced::Right)?;
    let composite = compose(&KrausMap::new(degrader.kraus())?, &first)?;
    let diff = composite.choi_matrix(false) - target.choi_matrix(false);
    Ok(diff.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Dimension of `{Φ(X)}` over all matrices `X`, from the superoperator's singular values.
pub fn range_dimension(channel: &dyn QuantumChannel, tol: f64) -> usize {
    let s = channel.superoperator().singular_values();
    s.iter().filter(|&&x| x > tol).count()
}

pub fn purity(rho: &CMat) -> f64 {
    (rho * rho).trace().re
}

//! CPTP maps: Stinespring and Kraus forms, Temperley-Lieb channels and their
//! complements, composition, tensor products, Choi matrices.
//!
//! Stinespring isometries always order their codomain as (output, environment).
//! Choi matrices live on `C^{d_out} ⊗ C^{d_in}`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, check_square, hermitian_eigenvalues, mul, partial_trace, to_complex, CMat, Factor, RMat};
use crate::qalg::{AdmissibleTriple, GroupSpec};
use crate::tlrep::{LabeledOperator, SpaceDescriptor, TlRep};

const STATE_TOL: f64 = 1e-10;
const COMPLETENESS_TOL: f64 = 1e-8;

/// Which tensor factor of `H_l ⊗ H_m` a Temperley-Lieb channel discards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Traced {
    /// Trace out `H_l`, output on `H_m`.
    Left,
    /// Trace out `H_m`, output on `H_l`.
    Right,
}

impl Traced {
    pub fn flip(self) -> Self {
        match self {
            Traced::Left => Traced::Right,
            Traced::Right => Traced::Left,
        }
    }
}

impl fmt::Display for Traced {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Traced::Left => "left",
            Traced::Right => "right",
        })
    }
}

impl FromStr for Traced {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "left" | "l" => Ok(Traced::Left),
            "right" | "r" => Ok(Traced::Right),
            other => Err(Error::InvalidArgument(format!(
                "traced must be 'left' or 'right', got '{other}'"
            ))),
        }
    }
}

/// A validated density matrix with its tensor-factor dimensions.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub rho: CMat,
    pub dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(rho: CMat, dims: Vec<usize>) -> Result<Self> {
        let d: usize = dims.iter().product();
        check_square(&rho, d)?;
        let herm = (&rho - rho.adjoint()).norm();
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = rho.trace();
        if (tr - c(1.0)).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min = hermitian_eigenvalues(&rho).first().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(DensityMatrix { rho, dims })
    }

    pub fn single(rho: CMat) -> Result<Self> {
        let d = rho.nrows();
        Self::new(rho, vec![d])
    }

    /// Diagonal state from a probability vector.
    pub fn diagonal(p: &[f64]) -> Result<Self> {
        let v = nalgebra::DVector::from_iterator(p.len(), p.iter().map(|&x| c(x)));
        Self::single(CMat::from_diagonal(&v))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityMatrix {
            rho: CMat::identity(d, d) / c(d as f64),
            dims: vec![d],
        }
    }

    pub fn pure(psi: &crate::linalg::CVec) -> Result<Self> {
        let n = psi.norm();
        if (n - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidState(format!("vector norm {n} is not 1")));
        }
        Self::single(psi * psi.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }
}

/// Common interface of every CPTP map in the crate.
pub trait QuantumChannel {
    fn d_in(&self) -> usize;
    fn d_out(&self) -> usize;
    /// Apply to an operator on `C^{d_in}` (any operator, not only states).
    fn apply_matrix(&self, rho: &CMat) -> Result<CMat>;
    fn kraus(&self) -> Vec<CMat>;

    fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let out = self.apply_matrix(&rho.rho)?;
        Ok(DensityMatrix {
            dims: vec![out.nrows()],
            rho: out,
        })
    }

    /// `W` with `W[(b,a), κ] = K_κ[b,a]`, so the unnormalized Choi matrix is `W W*`.
    fn choi_factor(&self) -> CMat {
        let ops = self.kraus();
        let (dout, din) = (self.d_out(), self.d_in());
        CMat::from_fn(dout * din, ops.len(), |row, kappa| ops[kappa][(row / din, row % din)])
    }

    /// Choi matrix `Σ Φ(e_ij) ⊗ e_ij`, divided by `d_in` when `normalized`.
    fn choi_matrix(&self, normalized: bool) -> CMat {
        let w = self.choi_factor();
        let m = mul(&w, &w.adjoint());
        if normalized {
            m / c(self.d_in() as f64)
        } else {
            m
        }
    }

    /// Superoperator matrix acting on row-major vectorized inputs.
    fn superoperator(&self) -> CMat {
        let (din, dout) = (self.d_in(), self.d_out());
        let mut s = CMat::zeros(dout * dout, din * din);
        for k in self.kraus() {
            s += k.kronecker(&k.map(|z| z.conj()));
        }
        s
    }
}

/// A Stinespring isometry `V: C^{d_in} → C^{d_out} ⊗ C^{d_env}`.
#[derive(Debug, Clone)]
pub struct Stinespring {
    pub v: CMat,
    pub d_in: usize,
    pub d_out: usize,
    pub d_env: usize,
}

impl Stinespring {
    pub fn new(v: CMat, d_in: usize, d_out: usize, d_env: usize) -> Result<Self> {
        if v.ncols() != d_in || v.nrows() != d_out * d_env {
            return Err(Error::DimensionMismatch {
                expected: d_out * d_env,
                found: v.nrows(),
            });
        }
        Ok(Stinespring { v, d_in, d_out, d_env })
    }

    pub fn isometry_deviation(&self) -> f64 {
        (self.v.adjoint() * &self.v - CMat::identity(self.d_in, self.d_in)).norm()
    }

    /// Same isometry with output and environment swapped.
    pub fn complement(&self) -> Stinespring {
        let (o, e) = (self.d_out, self.d_env);
        let v = CMat::from_fn(o * e, self.d_in, |row, a| {
            let (ee, b) = (row / o, row % o);
            self.v[(b * e + ee, a)]
        });
        Stinespring {
            v,
            d_in: self.d_in,
            d_out: e,
            d_env: o,
        }
    }

    /// `V1 ⊗ V2` with codomain regrouped to `(out1, out2, env1, env2)`.
    pub fn tensor(&self, other: &Stinespring) -> Stinespring {
        let (o1, e1, o2, e2) = (self.d_out, self.d_env, other.d_out, other.d_env);
        let d_in = self.d_in * other.d_in;
        let mut v = CMat::zeros(o1 * o2 * e1 * e2, d_in);
        for a1 in 0..self.d_in {
            for a2 in 0..other.d_in {
                let col = a1 * other.d_in + a2;
                for b1 in 0..o1 {
                    for x1 in 0..e1 {
                        let z1 = self.v[(b1 * e1 + x1, a1)];
                        if z1 == c(0.0) {
                            continue;
                        }
                        for b2 in 0..o2 {
                            for x2 in 0..e2 {
                                let z2 = other.v[(b2 * e2 + x2, a2)];
                                let row = ((b1 * o2 + b2) * e1 + x1) * e2 + x2;
                                v[(row, col)] = z1 * z2;
                            }
                        }
                    }
                }
            }
        }
        Stinespring {
            v,
            d_in,
            d_out: o1 * o2,
            d_env: e1 * e2,
        }
    }

    /// `W[(b,a), e] = V[(b,e), a]`; the unnormalized Choi matrix is `W W*`.
    pub fn stinespring_choi_factor(&self) -> CMat {
        let (o, e, i) = (self.d_out, self.d_env, self.d_in);
        CMat::from_fn(o * i, e, |row, ee| self.v[((row / i) * e + ee, row % i)])
    }
}

impl QuantumChannel for Stinespring {
    fn d_in(&self) -> usize {
        self.d_in
    }

    fn d_out(&self) -> usize {
        self.d_out
    }

    fn apply_matrix(&self, rho: &CMat) -> Result<CMat> {
        check_square(rho, self.d_in)?;
        let big = &self.v * rho * self.v.adjoint();
        partial_trace(&big, self.d_out, self.d_env, Factor::First)
    }

    fn kraus(&self) -> Vec<CMat> {
        (0..self.d_env)
            .map(|e| CMat::from_fn(self.d_out, self.d_in, |b, a| self.v[(b * self.d_env + e, a)]))
            .collect()
    }

    fn choi_factor(&self) -> CMat {
        self.stinespring_choi_factor()
    }
}

/// A CPTP map given by Kraus operators `K_i: C^{d_in} → C^{d_out}`.
#[derive(Debug, Clone)]
pub struct KrausMap {
    pub ops: Vec<CMat>,
    pub d_in: usize,
    pub d_out: usize,
}

impl KrausMap {
    pub fn new(ops: Vec<CMat>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty Kraus list".into()))?;
        let (d_out, d_in) = (first.nrows(), first.ncols());
        for k in &ops {
            if k.nrows() != d_out || k.ncols() != d_in {
                return Err(Error::DimensionMismatch {
                    expected: d_out,
                    found: k.nrows(),
                });
            }
        }
        let map = KrausMap { ops, d_in, d_out };
        let dev = map.completeness_deviation();
        if dev > COMPLETENESS_TOL {
            return Err(Error::tolerance("Kraus completeness", dev, COMPLETENESS_TOL));
        }
        Ok(map)
    }

    pub fn identity(d: usize) -> Self {
        KrausMap {
            ops: vec![CMat::identity(d, d)],
            d_in: d,
            d_out: d,
        }
    }

    pub fn unitary(u: CMat) -> Result<Self> {
        Self::new(vec![u])
    }

    /// `‖Σ K* K − I‖_F`.
    pub fn completeness_deviation(&self) -> f64 {
        let mut s = CMat::zeros(self.d_in, self.d_in);
        for k in &self.ops {
            s += k.adjoint() * k;
        }
        (s - CMat::identity(self.d_in, self.d_in)).norm()
    }
}

impl QuantumChannel for KrausMap {
    fn d_in(&self) -> usize {
        self.d_in
    }

    fn d_out(&self) -> usize {
        self.d_out
    }

    fn apply_matrix(&self, rho: &CMat) -> Result<CMat> {
        check_square(rho, self.d_in)?;
        let mut out = CMat::zeros(self.d_out, self.d_out);
        for k in &self.ops {
            out += k * rho * k.adjoint();
        }
        Ok(out)
    }

    fn kraus(&self) -> Vec<CMat> {
        self.ops.clone()
    }
}

/// A Temperley-Lieb channel `Φ_k^{l̄,m}` (traced Left) or `Φ_k^{l,m̄}` (traced Right).
#[derive(Debug, Clone)]
pub struct TlChannel {
    pub group: GroupSpec,
    pub triple: AdmissibleTriple,
    pub traced: Traced,
    pub stinespring: Stinespring,
    pub d_a: usize,
    pub d_b: usize,
    pub d_e: usize,
}

impl TlChannel {
    /// Build from a representation context (reuses its cached bases).
    pub fn build(rep: &TlRep, triple: AdmissibleTriple, traced: Traced) -> Result<Self> {
        let alpha = rep.cg_isometry_matrix(triple)?;
        let group = *rep.group();
        let d_a = group.dim(triple.k)?;
        let d_l = group.dim(triple.l)?;
        let d_m = group.dim(triple.m)?;
        let right = Stinespring {
            v: to_complex(&alpha),
            d_in: d_a,
            d_out: d_l,
            d_env: d_m,
        };
        let stinespring = match traced {
            Traced::Right => right,
            Traced::Left => right.complement(),
        };
        Ok(TlChannel {
            group,
            triple,
            traced,
            d_a,
            d_b: stinespring.d_out,
            d_e: stinespring.d_env,
            stinespring,
        })
    }

    /// The complementary channel: same isometry, the other factor traced.
    pub fn complementary(&self) -> TlChannel {
        TlChannel {
            group: self.group,
            triple: self.triple,
            traced: self.traced.flip(),
            stinespring: self.stinespring.complement(),
            d_a: self.d_a,
            d_b: self.d_e,
            d_e: self.d_b,
        }
    }

    /// Label of the output irrep.
    pub fn output_label(&self) -> usize {
        match self.traced {
            Traced::Left => self.triple.m,
            Traced::Right => self.triple.l,
        }
    }

    /// Label of the traced-out irrep.
    pub fn environment_label(&self) -> usize {
        match self.traced {
            Traced::Left => self.triple.l,
            Traced::Right => self.triple.m,
        }
    }

    pub fn name(&self) -> String {
        let t = self.triple;
        match self.traced {
            Traced::Left => format!("Phi_{}^(bar {}, {})", t.k, t.l, t.m),
            Traced::Right => format!("Phi_{}^({}, bar {})", t.k, t.l, t.m),
        }
    }
}

impl QuantumChannel for TlChannel {
    fn d_in(&self) -> usize {
        self.d_a
    }

    fn d_out(&self) -> usize {
        self.d_b
    }

    fn apply_matrix(&self, rho: &CMat) -> Result<CMat> {
        self.stinespring.apply_matrix(rho)
    }

    fn kraus(&self) -> Vec<CMat> {
        self.stinespring.kraus()
    }

    fn choi_factor(&self) -> CMat {
        self.stinespring.stinespring_choi_factor()
    }
}

pub fn build_channel(group: &GroupSpec, triple: AdmissibleTriple, traced: Traced) -> Result<TlChannel> {
    TlChannel::build(&TlRep::new(*group), triple, traced)
}

pub fn apply(channel: &dyn QuantumChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    channel.apply(rho)
}

pub fn complementary(channel: &TlChannel) -> TlChannel {
    channel.complementary()
}

/// `second ∘ first` as a Kraus list.
pub fn compose(second: &KrausMap, first: &dyn QuantumChannel) -> Result<KrausMap> {
    if second.d_in != first.d_out() {
        return Err(Error::DimensionMismatch {
            expected: first.d_out(),
            found: second.d_in,
        });
    }
    let inner = first.kraus();
    let mut ops = Vec::with_capacity(inner.len() * second.ops.len());
    for s in &second.ops {
        for k in &inner {
            ops.push(s * k);
        }
    }
    KrausMap::new(ops)
}

/// `Φ1 ⊗ Φ2` as a Stinespring isometry; `max_dim` caps the codomain dimension.
pub fn tensor(ch1: &TlChannel, ch2: &TlChannel, max_dim: usize) -> Result<Stinespring> {
    let needed = ch1.stinespring.v.nrows() * ch2.stinespring.v.nrows();
    if needed > max_dim {
        return Err(Error::cap("tensor product isometry", needed, max_dim));
    }
    Ok(ch1.stinespring.tensor(&ch2.stinespring))
}

/// Choi matrix on `C^{d_B} ⊗ C^{d_A}` as a labeled operator.
pub fn choi(channel: &TlChannel, normalized: bool) -> LabeledOperator {
    let space = SpaceDescriptor::Tensor(vec![
        SpaceDescriptor::Irrep {
            k: channel.output_label(),
            dim: channel.d_b,
        },
        SpaceDescriptor::Irrep {
            k: channel.triple.k,
            dim: channel.d_a,
        },
    ]);
    LabeledOperator {
        matrix: channel.choi_matrix(normalized),
        domain: space.clone(),
        codomain: space,
    }
}

/// Factor `X` of the covariant projector predicted for the Choi matrix of `channel`.
///
/// The normalized Choi matrix should equal `X X* / d_env` with
/// `X = (1 ⊗ J_k) α_l^{m,k}` for `Φ_k^{l̄,m}` and
/// `X = (1 ⊗ J_k) S α_m^{k,l}` for `Φ_k^{l,m̄}`, where `S` swaps the two tensor
/// factors and `J_k` is [`TlRep::conjugation`]. The twist is needed because
/// the Choi matrix intertwines the conjugate representation on the input leg.
pub fn covariant_choi_factor(rep: &TlRep, channel: &TlChannel) -> Result<CMat> {
    let t = channel.triple;
    let (d_out, d_k) = (channel.d_b, channel.d_a);
    let raw = match channel.traced {
        Traced::Left => rep
            .cg_isometry_matrix(AdmissibleTriple::new(t.l, t.m, t.k)?)?
            .as_ref()
            .clone(),
        Traced::Right => {
            let beta = rep.cg_isometry_matrix(AdmissibleTriple::new(t.m, t.k, t.l)?)?;
            RMat::from_fn(d_out * d_k, beta.ncols(), |row, col| {
                beta[((row % d_k) * d_out + row / d_k, col)]
            })
        }
    };
    let j = rep.conjugation(t.k)?;
    // (1 ⊗ J) acts on each contiguous block of d_k rows
    let mut out = RMat::zeros(d_out * d_k, raw.ncols());
    for o in 0..d_out {
        out.rows_mut(o * d_k, d_k).copy_from(&(&j * raw.rows(o * d_k, d_k)));
    }
    Ok(to_complex(&out))
}

/// `ρ_i^{k1,k2} = α α* / [i+1]` for `α = α_i^{k1,k2}`.
pub fn covariant_state(rep: &TlRep, i: usize, k1: usize, k2: usize) -> Result<DensityMatrix> {
    let t = AdmissibleTriple::new(i, k1, k2)?;
    let alpha: Arc<RMat> = rep.cg_isometry_matrix(t)?;
    let a = to_complex(&alpha);
    let d_i = alpha.ncols() as f64;
    let rho = &a * a.adjoint() / c(d_i);
    Ok(DensityMatrix {
        rho,
        dims: vec![rep.dim(k1)?, rep.dim(k2)?],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gram_distance, random_density, random_pure_state, random_unitary, stream_rng};

    fn reps() -> Vec<TlRep> {
        vec![
            TlRep::new(GroupSpec::su2()),
            TlRep::new(GroupSpec::on_plus(2).unwrap()),
            TlRep::new(GroupSpec::on_plus(3).unwrap()),
        ]
    }

    fn all_channels(rep: &TlRep, max: usize) -> Vec<TlChannel> {
        let mut out = Vec::new();
        for t in AdmissibleTriple::all_up_to(max) {
            for traced in [Traced::Left, Traced::Right] {
                out.push(TlChannel::build(rep, t, traced).unwrap());
            }
        }
        out
    }

    #[test]
    fn section_six_vector() {
        let rep = TlRep::new(GroupSpec::su2());
        let ch = TlChannel::build(&rep, AdmissibleTriple::new(1, 2, 1).unwrap(), Traced::Left).unwrap();
        assert_eq!((ch.d_a, ch.d_b, ch.d_e), (2, 2, 3));
        let out = ch.apply(&DensityMatrix::diagonal(&[1.0, 0.0]).unwrap()).unwrap();
        let want = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0 / 3.0), c(2.0 / 3.0)]));
        assert!((out.rho - want).norm() < 1e-10);
    }

    #[test]
    fn example_spectra() {
        let rep = TlRep::new(GroupSpec::su2());
        let t = AdmissibleTriple::new(3, 3, 2).unwrap();
        let rho = DensityMatrix::diagonal(&[0.25, 0.75, 0.0, 0.0]).unwrap();
        let right = TlChannel::build(&rep, t, Traced::Right).unwrap();
        let mut ev = hermitian_eigenvalues(&right.apply(&rho).unwrap().rho);
        ev.reverse();
        for (g, w) in ev.iter().zip([0.45, 0.4, 0.15, 0.0]) {
            assert!((g - w).abs() < 1e-8, "{ev:?}");
        }
        let left = right.complementary();
        let ev = hermitian_eigenvalues(&left.apply(&rho).unwrap().rho);
        for (g, w) in ev.iter().zip([0.2, 0.3, 0.5]) {
            assert!((g - w).abs() < 1e-8, "{ev:?}");
        }
    }

    #[test]
    fn bistochastic_and_trace_preserving() {
        let mut rng = stream_rng(21, 0);
        for rep in reps() {
            for ch in all_channels(&rep, 3) {
                assert!(ch.stinespring.isometry_deviation() < 1e-8);
                let out = ch.apply(&DensityMatrix::maximally_mixed(ch.d_a)).unwrap();
                let want = CMat::identity(ch.d_b, ch.d_b) / c(ch.d_b as f64);
                assert!((out.rho - want).norm() < 1e-10, "{}", ch.name());
                let rho = random_density(ch.d_a, &mut rng);
                let tr = ch.apply_matrix(&rho).unwrap().trace();
                assert!((tr - c(1.0)).norm() < 1e-10);
                let min = hermitian_eigenvalues(&ch.choi_matrix(true))[0];
                assert!(min >= -1e-10);
            }
        }
    }

    #[test]
    fn identity_channel_case() {
        let rep = TlRep::new(GroupSpec::on_plus(3).unwrap());
        let ch = TlChannel::build(&rep, AdmissibleTriple::new(2, 2, 0).unwrap(), Traced::Right).unwrap();
        let mut rng = stream_rng(22, 0);
        let rho = random_density(8, &mut rng);
        let out = ch.apply_matrix(&rho).unwrap();
        assert!((out - &rho).norm() < 1e-10);
        let c0 = ch.choi_matrix(true);
        assert!((hermitian_eigenvalues(&c0)[63] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn complement_is_an_involution() {
        let rep = TlRep::new(GroupSpec::su2());
        let t = AdmissibleTriple::new(3, 3, 2).unwrap();
        let ch = TlChannel::build(&rep, t, Traced::Right).unwrap();
        let cc = ch.complementary();
        assert_eq!(cc.traced, Traced::Left);
        let back = cc.complementary();
        assert_eq!(back.traced, Traced::Right);
        assert!((back.stinespring.v - &ch.stinespring.v).norm() == 0.0);
    }

    #[test]
    fn complementary_spectra_agree_on_pure_inputs() {
        let mut rng = stream_rng(23, 0);
        for rep in reps() {
            for ch in all_channels(&rep, 3) {
                let psi = random_pure_state(ch.d_a, &mut rng);
                let rho = DensityMatrix::pure(&psi).unwrap();
                let a = hermitian_eigenvalues(&ch.apply(&rho).unwrap().rho);
                let b = hermitian_eigenvalues(&ch.complementary().apply(&rho).unwrap().rho);
                let top = |v: &[f64]| {
                    let mut v: Vec<f64> = v.iter().copied().filter(|x| *x > 1e-9).collect();
                    v.sort_by(|x, y| y.total_cmp(x));
                    v
                };
                let (ta, tb) = (top(&a), top(&b));
                assert_eq!(ta.len(), tb.len());
                for (x, y) in ta.iter().zip(&tb) {
                    assert!((x - y).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn choi_matches_twisted_covariant_projector() {
        for rep in reps() {
            for ch in all_channels(&rep, 3) {
                let x = covariant_choi_factor(&rep, &ch).unwrap();
                let w = ch.choi_factor();
                let env = ch.d_e as f64;
                let dist = gram_distance(&(w / c((ch.d_a as f64).sqrt())), &(x / c(env.sqrt())));
                assert!(dist < 1e-8, "{} {}", rep.group(), ch.name());
            }
        }
    }

    #[test]
    fn compose_and_identity() {
        let rep = TlRep::new(GroupSpec::su2());
        let ch = TlChannel::build(&rep, AdmissibleTriple::new(1, 2, 1).unwrap(), Traced::Left).unwrap();
        let same = compose(&KrausMap::identity(ch.d_b), &ch).unwrap();
        assert!((same.choi_matrix(false) - ch.choi_matrix(false)).norm() < 1e-12);
        let mut rng = stream_rng(24, 0);
        let u = random_unitary(ch.d_b, &mut rng);
        let rotated = compose(&KrausMap::unitary(u).unwrap(), &ch).unwrap();
        let rho = random_density(ch.d_a, &mut rng);
        let a = hermitian_eigenvalues(&ch.apply_matrix(&rho).unwrap());
        let b = hermitian_eigenvalues(&rotated.apply_matrix(&rho).unwrap());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
        assert!(compose(&KrausMap::identity(5), &ch).is_err());
    }

    #[test]
    fn tensor_factorizes_on_products() {
        let rep = TlRep::new(GroupSpec::on_plus(3).unwrap());
        let c1 = TlChannel::build(&rep, AdmissibleTriple::new(1, 1, 2).unwrap(), Traced::Left).unwrap();
        let c2 = TlChannel::build(&rep, AdmissibleTriple::new(2, 1, 1).unwrap(), Traced::Right).unwrap();
        let t = tensor(&c1, &c2, 1 << 20).unwrap();
        assert!(t.isometry_deviation() < 1e-10);
        let mut rng = stream_rng(25, 0);
        let r1 = random_density(c1.d_a, &mut rng);
        let r2 = random_density(c2.d_a, &mut rng);
        let joint = t.apply_matrix(&r1.kronecker(&r2)).unwrap();
        let sep = c1.apply_matrix(&r1).unwrap().kronecker(&c2.apply_matrix(&r2).unwrap());
        assert!((joint - sep).norm() < 1e-10);
        let psi = random_pure_state(c1.d_a * c2.d_a, &mut rng);
        let out = t.apply_matrix(&(&psi * psi.adjoint())).unwrap();
        assert!((out.trace() - c(1.0)).norm() < 1e-10);
        assert!(tensor(&c1, &c2, 10).is_err());
    }

    #[test]
    fn covariant_states() {
        for rep in reps() {
            for k in 0..=2 {
                let rho = covariant_state(&rep, 0, k, k).unwrap();
                let d = rep.dim(k).unwrap();
                let red = partial_trace(&rho.rho, d, d, Factor::First).unwrap();
                assert!((red - CMat::identity(d, d) / c(d as f64)).norm() < 1e-10);
            }
            let rho = covariant_state(&rep, 3, 1, 2).unwrap();
            let purity = (&rho.rho * &rho.rho).trace().re;
            assert!((purity - 1.0 / rep.group().quantum_integer(4)).abs() < 1e-10);
        }
        let rep = TlRep::new(GroupSpec::su2());
        assert!(covariant_state(&rep, 1, 1, 1).is_err());
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::diagonal(&[0.5, 0.6]).is_err());
        assert!(DensityMatrix::diagonal(&[1.5, -0.5]).is_err());
        assert!(DensityMatrix::new(CMat::identity(2, 2) / c(2.0), vec![3]).is_err());
        assert!("up".parse::<Traced>().is_err());
        assert_eq!("Left".parse::<Traced>().unwrap(), Traced::Left);
    }
}

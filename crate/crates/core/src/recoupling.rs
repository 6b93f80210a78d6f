//! Tetrahedral nets, 6j-symbols and spectra of tensor-product channel outputs.

use serde::Serialize;

use crate::channels::{TlChannel, Traced};
use crate::error::{Error, Result};
use crate::infoquant::{entropy_of_eigenvalues, min_output_entropy, MoeStrategy};
use crate::linalg::{c, hermitian_eigen, to_complex, CMat, RMat};
use crate::qalg::{is_admissible, AdmissibleTriple, GroupKind, GroupSpec};
use crate::tlrep::TlRep;

/// Eigenvalues closer than this are merged into one cluster.
pub const CLUSTER_GAP: f64 = 1e-7;
const ALIGNMENT_TOL: f64 = 1e-6;

/// Labels `[a b i; c d j]` with `(a,d,i)`, `(b,c,i)`, `(a,b,j)`, `(d,c,j)` admissible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Sextuple {
    pub a: usize,
    pub b: usize,
    pub i: usize,
    pub c: usize,
    pub d: usize,
    pub j: usize,
}

impl Sextuple {
    pub fn new(a: usize, b: usize, i: usize, c: usize, d: usize, j: usize) -> Result<Self> {
        for (x, y, z) in [(i, a, d), (i, b, c), (j, a, b), (j, d, c)] {
            AdmissibleTriple::new(x, y, z)?;
        }
        Ok(Sextuple { a, b, i, c, d, j })
    }

    pub fn is_valid(a: usize, b: usize, i: usize, c: usize, d: usize, j: usize) -> bool {
        is_admissible(i, a, d) && is_admissible(i, b, c) && is_admissible(j, a, b) && is_admissible(j, d, c)
    }
}

impl std::fmt::Display for Sextuple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{} {} {}; {} {} {}]",
            self.a, self.b, self.i, self.c, self.d, self.j
        )
    }
}

/// Where diagrams are evaluated.
///
/// The F-twisted realization of SU(2) has zigzag sign `(-1)^j` while loops are
/// positive, so planar isotopy fails there. Every scalar invariant here depends
/// only on `q`, so SU(2) diagrams are evaluated in the `F = I`, `N = 2`
/// realization, which has the same `q` and a trivial zigzag.
pub enum Realization<'a> {
    Borrowed(&'a TlRep),
    Owned(Box<TlRep>),
}

impl std::ops::Deref for Realization<'_> {
    type Target = TlRep;
    fn deref(&self) -> &TlRep {
        match self {
            Realization::Borrowed(r) => r,
            Realization::Owned(r) => r,
        }
    }
}

pub fn diagram_realization(rep: &TlRep) -> Result<Realization<'_>> {
    match rep.group().kind {
        GroupKind::OnPlus => Ok(Realization::Borrowed(rep)),
        GroupKind::Su2 => Ok(Realization::Owned(Box::new(TlRep::with_max_ambient(
            GroupSpec::on_plus(2)?,
            rep.max_ambient(),
        )))),
    }
}

fn vertex(rep: &TlRep, k: usize, l: usize, m: usize) -> Result<RMat> {
    rep.three_vertex_matrix(AdmissibleTriple::new(k, l, m)?)
}

/// `(1_b ⊗ (A_0^{j,j})* ⊗ 1_c)(A_a^{b,j} ⊗ A_d^{j,c})`, a map `H_a⊗H_d → H_b⊗H_c`.
pub fn h_diagram(rep: &TlRep, a: usize, b: usize, c: usize, d: usize, j: usize) -> Result<RMat> {
    let left = vertex(rep, a, b, j)?;
    let right = vertex(rep, d, j, c)?;
    let cup = vertex(rep, 0, j, j)?;
    let (da, db, dc, dd, dj) = (rep.dim(a)?, rep.dim(b)?, rep.dim(c)?, rep.dim(d)?, rep.dim(j)?);
    let cap = RMat::from_fn(dj, dj, |x, y| cup[(x * dj + y, 0)]);
    // rows (x, u), columns w: the left vertex with its H_j leg last
    let lr = RMat::from_fn(da * db, dj, |row, w| left[((row % db) * dj + w, row / db)]);
    // rows w, columns (v, y)
    let rr = RMat::from_fn(dj, dc * dd, |w, col| right[(w * dc + col / dd, col % dd)]);
    let joined = (lr * cap) * rr;
    let out = RMat::from_fn(db * dc, da * dd, |row, col| {
        let (u, v) = (row / dc, row % dc);
        let (x, y) = (col / dd, col % dd);
        joined[(x * db + u, v * dd + y)]
    });
    Ok(out)
}

/// `A_i^{b,c} (A_i^{a,d})*`, a map `H_a⊗H_d → H_b⊗H_c` through `H_i`.
pub fn vertex_diagram(rep: &TlRep, a: usize, d: usize, i: usize, b: usize, c: usize) -> Result<RMat> {
    Ok(vertex(rep, i, b, c)? * vertex(rep, i, a, d)?.transpose())
}

/// Dense evaluation of the tetrahedral net.
pub fn tet_net(rep: &TlRep, s: Sextuple) -> Result<f64> {
    tet_in(&*diagram_realization(rep)?, s)
}

/// `Tet·[i+1] / (θ(a,d,i) θ(b,c,i))`.
pub fn six_j(rep: &TlRep, s: Sextuple) -> Result<f64> {
    six_j_in(&*diagram_realization(rep)?, s)
}

fn tet_in(d: &TlRep, s: Sextuple) -> Result<f64> {
    Sextuple::new(s.a, s.b, s.i, s.c, s.d, s.j)?;
    tet_with(d, s, &h_diagram(d, s.a, s.b, s.c, s.d, s.j)?)
}

/// Closes `h = H_j(a,b,c,d)` with the two `i` vertices.
fn tet_with(d: &TlRep, s: Sextuple, h: &RMat) -> Result<f64> {
    let top = vertex(d, s.i, s.b, s.c)?;
    let bottom = vertex(d, s.i, s.a, s.d)?;
    Ok((top.transpose() * h * bottom).trace())
}

fn six_j_in(d: &TlRep, s: Sextuple) -> Result<f64> {
    Sextuple::new(s.a, s.b, s.i, s.c, s.d, s.j)?;
    six_j_with(d, s, &h_diagram(d, s.a, s.b, s.c, s.d, s.j)?)
}

fn six_j_with(d: &TlRep, s: Sextuple, h: &RMat) -> Result<f64> {
    let g = d.group();
    let tet = tet_with(d, s, h)?;
    let t1 = AdmissibleTriple::new(s.i, s.a, s.d)?;
    let t2 = AdmissibleTriple::new(s.i, s.b, s.c)?;
    Ok(tet * g.quantum_integer(s.i + 1) / (g.theta(t1) * g.theta(t2)))
}

fn tet_or_zero(d: &TlRep, a: usize, b: usize, i: usize, c: usize, d_: usize, j: usize) -> Result<f64> {
    if Sextuple::is_valid(a, b, i, c, d_, j) {
        tet_in(d, Sextuple { a, b, i, c, d: d_, j })
    } else {
        Ok(0.0)
    }
}

fn six_j_or_zero(d: &TlRep, a: usize, b: usize, i: usize, c: usize, d_: usize, j: usize) -> Result<f64> {
    if Sextuple::is_valid(a, b, i, c, d_, j) {
        six_j_in(d, Sextuple { a, b, i, c, d: d_, j })
    } else {
        Ok(0.0)
    }
}

fn max_abs(m: &RMat) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Largest entry of `H_j − Σ_i {a b i; c d j} A_i^{b,c}(A_i^{a,d})*`, in the diagram realization.
pub fn six_j_expansion_residual(rep: &TlRep, a: usize, b: usize, c: usize, d: usize, j: usize) -> Result<f64> {
    let rep = &*diagram_realization(rep)?;
    let h = h_diagram(rep, a, b, c, d, j)?;
    let mut diff = h.clone();
    for i in 0..=(a + d) {
        if Sextuple::is_valid(a, b, i, c, d, j) {
            let coeff = six_j_with(rep, Sextuple { a, b, i, c, d, j }, &h)?;
            diff -= vertex_diagram(rep, a, d, i, b, c)? * coeff;
        }
    }
    Ok(max_abs(&diff))
}

/// Largest entry of `A_j^{a,b}(A_j^{d,c})* − Σ_i {a b i; c d j} H'_i`, where
/// `H'_i = (1_a ⊗ (A_0^{i,i})* ⊗ 1_b)(A_d^{a,i} ⊗ A_c^{i,b})` is the rotated ladder.
pub fn rotated_expansion_residual(rep: &TlRep, a: usize, b: usize, c: usize, d: usize, j: usize) -> Result<f64> {
    let rep = &*diagram_realization(rep)?;
    let mut diff = vertex_diagram(rep, d, c, j, a, b)?;
    let hj = h_diagram(rep, a, b, c, d, j)?;
    for i in 0..=(a + d) {
        if Sextuple::is_valid(a, b, i, c, d, j) {
            let coeff = six_j_with(rep, Sextuple { a, b, i, c, d, j }, &hj)?;
            diff -= h_diagram(rep, d, a, b, c, i)? * coeff;
        }
    }
    Ok(max_abs(&diff))
}

/// Largest entry of `H_j A_i^{a,d} − (Tet/θ(i,b,c)) A_i^{b,c}`, in the diagram realization.
pub fn tet_lemma_residual(rep: &TlRep, s: Sextuple) -> Result<f64> {
    let rep = &*diagram_realization(rep)?;
    let lhs = h_diagram(rep, s.a, s.b, s.c, s.d, s.j)? * vertex(rep, s.i, s.a, s.d)?;
    let theta = rep.group().theta(AdmissibleTriple::new(s.i, s.b, s.c)?);
    let rhs = vertex(rep, s.i, s.b, s.c)? * (tet_in(rep, s)? / theta);
    Ok(max_abs(&(lhs - rhs)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpectrumSource {
    Formula,
    BruteForce,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub l: usize,
    pub eigenvalue: f64,
    pub multiplicity: usize,
}

/// Spectrum of `X_i = (Φ^{l̄1,m1}_{k1} ⊗ Φ^{l2,m̄2}_{k2})(ρ_i^{k1,k2})` grouped by irrep label.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub entries: Vec<SpectrumEntry>,
    pub source: SpectrumSource,
    pub total_trace: f64,
    /// Set when the eigenvalue clusters do not line up with the irreducible summands.
    pub flagged: bool,
}

impl SpectrumReport {
    pub fn eigenvalues_with_multiplicity(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.eigenvalue, e.multiplicity))
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn entropy(&self) -> Result<f64> {
        entropy_of_eigenvalues(&self.eigenvalues_with_multiplicity())
    }
}

fn output_labels(m1: usize, l2: usize) -> Vec<usize> {
    (0..=m1.min(l2)).map(|r| m1 + l2 - 2 * r).collect()
}

fn check_inputs(i: usize, t1: AdmissibleTriple, t2: AdmissibleTriple) -> Result<()> {
    AdmissibleTriple::new(i, t1.k, t2.k)?;
    Ok(())
}

/// Eigenvalues of `X_i` from the recoupling formula.
pub fn tensor_output_spectrum_formula(
    rep: &TlRep,
    i: usize,
    t1: AdmissibleTriple,
    t2: AdmissibleTriple,
) -> Result<SpectrumReport> {
    check_inputs(i, t1, t2)?;
    let d = &*diagram_realization(rep)?;
    let g = rep.group();
    let qi = |n: usize| g.quantum_integer(n);
    let th = |k: usize, l: usize, m: usize| -> Result<f64> { Ok(g.theta(AdmissibleTriple::new(k, l, m)?)) };
    let (k1, l1, m1) = (t1.k, t1.l, t1.m);
    let (k2, l2, m2) = (t2.k, t2.l, t2.m);

    // the j-dependent factor is shared by every l
    let mut rungs = Vec::new();
    for t in 0..=k1.min(k2) {
        let j = 2 * t;
        let outer = six_j_or_zero(d, k1, k2, j, k2, k1, i)?;
        if outer == 0.0 {
            continue;
        }
        let left = tet_or_zero(d, l1, m1, m1, j, k1, k1)?;
        let right = tet_or_zero(d, k2, j, l2, l2, m2, k2)?;
        if left == 0.0 || right == 0.0 {
            continue;
        }
        rungs.push((j, outer * left * right / (th(j, m1, m1)? * th(j, l2, l2)?)));
    }

    let mut entries = Vec::new();
    for l in output_labels(m1, l2) {
        let pref =
            qi(k1 + 1) * qi(k2 + 1) * th(l, m1, l2)? / (qi(l + 1) * th(k1, l1, m1)? * th(k2, l2, m2)? * th(i, k1, k2)?);
        let mut sum = 0.0;
        for &(j, w) in &rungs {
            sum += w * six_j_or_zero(d, m1, m1, l, l2, l2, j)?;
        }
        entries.push(SpectrumEntry {
            l,
            eigenvalue: pref * sum,
            multiplicity: rep.dim(l)?,
        });
    }
    Ok(finish(entries, SpectrumSource::Formula, false))
}

/// The closed form for `i = 0`, `k1 = k2 = k`.
pub fn bell_output_eigenvalues(rep: &TlRep, t1: AdmissibleTriple, t2: AdmissibleTriple) -> Result<Vec<(usize, f64)>> {
    if t1.k != t2.k {
        return Err(Error::InvalidArgument(format!(
            "the Bell-state formula needs k1 = k2, got {} and {}",
            t1.k, t2.k
        )));
    }
    let d = &*diagram_realization(rep)?;
    let g = rep.group();
    let th = |k: usize, l: usize, m: usize| -> Result<f64> { Ok(g.theta(AdmissibleTriple::new(k, l, m)?)) };
    let (k, l1, m1, l2, m2) = (t1.k, t1.l, t1.m, t2.l, t2.m);
    let mut out = Vec::new();
    for l in output_labels(m1, l2) {
        let value = if is_admissible(l, l1, m2) {
            let tet = tet_or_zero(d, m1, l1, l, m2, l2, k)?;
            g.quantum_integer(k + 1) * tet * tet / (th(k, l1, m1)? * th(k, l2, m2)? * th(l, m1, l2)? * th(l, l1, m2)?)
        } else {
            0.0
        };
        out.push((l, value));
    }
    Ok(out)
}

fn finish(entries: Vec<SpectrumEntry>, source: SpectrumSource, flagged: bool) -> SpectrumReport {
    let total_trace = entries.iter().map(|e| e.eigenvalue * e.multiplicity as f64).sum();
    SpectrumReport {
        entries,
        source,
        total_trace,
        flagged,
    }
}

/// `X_i` as a dense matrix on `H_{m1} ⊗ H_{l2}`.
///
/// Each column `ψ` of the covariant isometry is pushed through `V1 Ψ V2ᵀ`, so
/// the product isometry is never formed. The cap bounds the
/// `(d_{m1} d_{l2}) × (d_{E1} d_{E2})` amplitude matrix.
pub fn tensor_output_state(rep: &TlRep, i: usize, t1: AdmissibleTriple, t2: AdmissibleTriple) -> Result<CMat> {
    check_inputs(i, t1, t2)?;
    let ch1 = TlChannel::build(rep, t1, Traced::Left)?;
    let ch2 = TlChannel::build(rep, t2, Traced::Right)?;
    let (v1, v2) = (&ch1.stinespring, &ch2.stinespring);
    let needed = v1.v.nrows() * v2.v.nrows();
    if needed > rep.max_ambient() {
        return Err(Error::cap("tensor output amplitudes", needed, rep.max_ambient()));
    }
    let alpha = rep.cg_isometry_matrix(AdmissibleTriple::new(i, t1.k, t2.k)?)?;
    let (o1, e1, o2, e2) = (v1.d_out, v1.d_env, v2.d_out, v2.d_env);
    let d2 = v2.d_in;
    let v2t = v2.v.transpose();
    let mut x = CMat::zeros(o1 * o2, o1 * o2);
    for col in 0..alpha.ncols() {
        let psi = CMat::from_fn(v1.d_in, d2, |p, q| c(alpha[(p * d2 + q, col)]));
        let w = &v1.v * psi * &v2t;
        let r = CMat::from_fn(o1 * o2, e1 * e2, |row, env| {
            let (b1, b2) = (row / o2, row % o2);
            let (x1, x2) = (env / e2, env % e2);
            w[(b1 * e1 + x1, b2 * e2 + x2)]
        });
        x += &r * r.adjoint();
    }
    Ok(x / c(alpha.ncols() as f64))
}

/// Eigenvalues of `X_i` by dense diagonalization, clustered and matched to irrep labels.
pub fn tensor_output_spectrum_bruteforce(
    rep: &TlRep,
    i: usize,
    t1: AdmissibleTriple,
    t2: AdmissibleTriple,
) -> Result<SpectrumReport> {
    let x = tensor_output_state(rep, i, t1, t2)?;
    let (vals, vecs) = hermitian_eigen(&x);

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for idx in 0..vals.len() {
        match clusters.last_mut() {
            Some(cl) if vals[idx] - vals[*cl.last().expect("nonempty")] < CLUSTER_GAP => cl.push(idx),
            _ => clusters.push(vec![idx]),
        }
    }

    let (m1, l2) = (t1.m, t2.l);
    let mut flagged = false;
    let mut entries = Vec::new();
    for l in output_labels(m1, l2) {
        let alpha = to_complex(rep.cg_isometry_matrix(AdmissibleTriple::new(l, m1, l2)?)?.as_ref());
        let dl = alpha.ncols();
        let mut best: Option<(f64, &Vec<usize>)> = None;
        for cl in &clusters {
            let basis = CMat::from_fn(vecs.nrows(), cl.len(), |r, col| vecs[(r, cl[col])]);
            let captured = (basis.adjoint() * &alpha).norm_squared();
            if best.is_none_or(|(w, _)| captured > w) {
                best = Some((captured, cl));
            }
        }
        let (captured, cl) = best.expect("at least one cluster");
        if (captured - dl as f64).abs() > ALIGNMENT_TOL {
            flagged = true;
        }
        let mean = cl.iter().map(|&k| vals[k]).sum::<f64>() / cl.len() as f64;
        entries.push(SpectrumEntry {
            l,
            eigenvalue: mean,
            multiplicity: dl,
        });
    }
    Ok(finish(entries, SpectrumSource::BruteForce, flagged))
}

/// Largest eigenvalue gap between the two reports, label by label.
pub fn spectrum_mismatch(a: &SpectrumReport, b: &SpectrumReport) -> Result<f64> {
    if a.entries.len() != b.entries.len() {
        return Err(Error::DimensionMismatch {
            expected: a.entries.len(),
            found: b.entries.len(),
        });
    }
    let mut worst = 0.0f64;
    for (x, y) in a.entries.iter().zip(&b.entries) {
        if x.l != y.l || x.multiplicity != y.multiplicity {
            return Err(Error::InvalidState(format!(
                "label mismatch: ({}, {}) vs ({}, {})",
                x.l, x.multiplicity, y.l, y.multiplicity
            )));
        }
        worst = worst.max((x.eigenvalue - y.eigenvalue).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Serialize)]
pub struct AdditivityRecord {
    pub h_xi: f64,
    pub moe1: f64,
    pub moe2: f64,
    /// `h_xi − moe1 − moe2`; negative would witness non-additivity.
    pub gap: f64,
}

pub fn additivity_probe(
    rep: &TlRep,
    i: usize,
    t1: AdmissibleTriple,
    t2: AdmissibleTriple,
    strategy: MoeStrategy,
) -> Result<AdditivityRecord> {
    let h_xi = tensor_output_spectrum_formula(rep, i, t1, t2)?.entropy()?;
    let ch1 = TlChannel::build(rep, t1, Traced::Left)?;
    let ch2 = TlChannel::build(rep, t2, Traced::Right)?;
    let moe1 = min_output_entropy(rep, &ch1, strategy)?.best_entropy;
    let moe2 = min_output_entropy(rep, &ch2, strategy)?.best_entropy;
    Ok(AdditivityRecord {
        h_xi,
        moe1,
        moe2,
        gap: h_xi - moe1 - moe2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalg::GroupSpec;

    fn t(k: usize, l: usize, m: usize) -> AdmissibleTriple {
        AdmissibleTriple::new(k, l, m).unwrap()
    }

    fn reps() -> Vec<TlRep> {
        vec![TlRep::new(GroupSpec::su2()), TlRep::new(GroupSpec::on_plus(3).unwrap())]
    }

    #[test]
    fn sextuple_domain() {
        assert!(Sextuple::new(1, 1, 0, 1, 1, 0).is_ok());
        assert!(Sextuple::new(1, 1, 1, 1, 1, 0).is_err());
        assert!(!Sextuple::is_valid(0, 1, 0, 1, 0, 0));
    }

    #[test]
    fn trivial_rung_reduces_to_theta() {
        for rep in reps() {
            let g = rep.group();
            for tr in AdmissibleTriple::all_up_to(3) {
                let s = Sextuple::new(tr.l, tr.l, tr.k, tr.m, tr.m, 0).unwrap();
                let tet = tet_net(&rep, s).unwrap();
                assert!((tet - g.theta(tr)).abs() < 1e-9 * g.theta(tr), "{g} {tr}");
                let sj = six_j(&rep, s).unwrap();
                assert!((sj - g.quantum_integer(tr.k + 1) / g.theta(tr)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn expansions_and_lemma() {
        for rep in reps() {
            for a in 0..=2 {
                for b in 0..=2 {
                    for c in 0..=2 {
                        for d in 0..=2 {
                            for j in 0..=2 {
                                if !(is_admissible(j, a, b) && is_admissible(j, d, c)) {
                                    continue;
                                }
                                assert!(six_j_expansion_residual(&rep, a, b, c, d, j).unwrap() < 1e-8);
                                assert!(rotated_expansion_residual(&rep, a, b, c, d, j).unwrap() < 1e-8);
                                for i in 0..=a + d {
                                    if let Ok(s) = Sextuple::new(a, b, i, c, d, j) {
                                        assert!(tet_lemma_residual(&rep, s).unwrap() < 1e-8);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn six_j_solves_the_basis_change() {
        // least-squares fit of the ladder in the vertex basis, labels ≤ 1
        for rep in reps() {
            let d = diagram_realization(&rep).unwrap();
            for (a, b, c, dd, j) in [(1, 1, 1, 1, 0), (1, 1, 1, 1, 2), (1, 0, 1, 0, 1), (1, 1, 0, 0, 0)] {
                let is: Vec<usize> = (0..=a + dd)
                    .filter(|&i| Sextuple::is_valid(a, b, i, c, dd, j))
                    .collect();
                let h = h_diagram(&d, a, b, c, dd, j).unwrap();
                let basis = RMat::from_fn(h.len(), is.len(), |r, col| {
                    vertex_diagram(&d, a, dd, is[col], b, c).unwrap().as_slice()[r]
                });
                let target = RMat::from_column_slice(h.len(), 1, h.as_slice());
                let x = basis.clone().svd(true, true).solve(&target, 1e-12).unwrap();
                for (col, &i) in is.iter().enumerate() {
                    let sj = six_j(&rep, Sextuple::new(a, b, i, c, dd, j).unwrap()).unwrap();
                    assert!((x[(col, 0)] - sj).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn formula_matches_brute_force() {
        for rep in reps() {
            for t1 in AdmissibleTriple::all_up_to(2) {
                for t2 in AdmissibleTriple::all_up_to(2) {
                    for i in 0..=t1.k + t2.k {
                        if !is_admissible(i, t1.k, t2.k) {
                            continue;
                        }
                        let f = tensor_output_spectrum_formula(&rep, i, t1, t2).unwrap();
                        let b = tensor_output_spectrum_bruteforce(&rep, i, t1, t2).unwrap();
                        assert!(!b.flagged);
                        assert!((f.total_trace - 1.0).abs() < 1e-8);
                        assert!(f.entries.iter().all(|e| e.eigenvalue >= -1e-10));
                        assert!(spectrum_mismatch(&f, &b).unwrap() < 1e-8, "{i} {t1} {t2}");
                        for e in &f.entries {
                            assert_eq!(e.multiplicity, rep.dim(e.l).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn bell_state_closed_form() {
        for rep in reps() {
            for t1 in AdmissibleTriple::all_up_to(2) {
                for t2 in AdmissibleTriple::all_up_to(2).into_iter().filter(|x| x.k == t1.k) {
                    let f = tensor_output_spectrum_formula(&rep, 0, t1, t2).unwrap();
                    let closed = bell_output_eigenvalues(&rep, t1, t2).unwrap();
                    for (e, (l, v)) in f.entries.iter().zip(closed) {
                        assert_eq!(e.l, l);
                        assert!((e.eigenvalue - v).abs() < 1e-8);
                    }
                }
            }
        }
        let rep = TlRep::new(GroupSpec::su2());
        assert!(bell_output_eigenvalues(&rep, t(1, 1, 2), t(0, 1, 1)).is_err());
    }

    #[test]
    fn su2_fusion_example() {
        let rep = TlRep::new(GroupSpec::su2());
        let b = tensor_output_spectrum_bruteforce(&rep, 0, t(1, 2, 1), t(1, 1, 2)).unwrap();
        let labels: Vec<(usize, usize)> = b.entries.iter().map(|e| (e.l, e.multiplicity)).collect();
        assert_eq!(labels, vec![(2, 3), (0, 1)]);
        assert!((b.total_trace - 1.0).abs() < 1e-8);
    }

    #[test]
    fn additivity_gap_shrinks_with_n() {
        let mut last = f64::INFINITY;
        for n in [3, 4, 5] {
            let rep = TlRep::new(GroupSpec::on_plus(n).unwrap());
            let r = additivity_probe(&rep, 0, t(1, 2, 1), t(1, 1, 2), MoeStrategy::Witness { seed: 0 }).unwrap();
            assert!(r.h_xi >= 0.0);
            assert!(r.gap > 0.0);
            assert!(r.gap < last);
            last = r.gap;
        }
    }
}

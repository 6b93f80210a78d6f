//! Dense realization of the Temperley-Lieb category for `O_N^+` and `SU(2)`.
//!
//! Irreps are stored as orthonormal bases `B_k` of `H_k ⊂ (C^N)^{⊗k}`, built
//! by a compressed Wenzl recursion. Three-vertices are contracted leg-wise
//! against those bases so the `N^{l+m}` ambient space is never materialized.
//!
//! Both supported parameter matrices are real, so the whole layer works in
//! `f64`; complex wrappers are provided for the public operator types.
//!
//! For `SU(2)` each `B_k` is rotated into the weight basis: column `j` is the
//! normalized symmetric vector with `j` copies of `e_2`, with positive
//! entries. `O_N^+` bases carry no canonical choice and are left as produced.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::linalg::{c, symmetric_eigen, to_complex, CMat, RMat};
use crate::qalg::{AdmissibleTriple, GroupKind, GroupSpec};

/// Default cap on any ambient leg-space dimension `N^k` that gets materialized.
pub const DEFAULT_MAX_AMBIENT: usize = 250_000;

const ISOMETRY_TOL: f64 = 1e-8;

/// Description of the space a [`LabeledOperator`] acts on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpaceDescriptor {
    /// `(C^N)^{⊗legs}`.
    Ambient {
        legs: usize,
        n: usize,
    },
    /// `H_k ≅ C^{dim}` in its reduced basis.
    Irrep {
        k: usize,
        dim: usize,
    },
    Tensor(Vec<SpaceDescriptor>),
}

impl SpaceDescriptor {
    pub fn dim(&self) -> usize {
        match self {
            SpaceDescriptor::Ambient { legs, n } => n.pow(*legs as u32),
            SpaceDescriptor::Irrep { dim, .. } => *dim,
            SpaceDescriptor::Tensor(parts) => parts.iter().map(|p| p.dim()).product(),
        }
    }
}

/// A dense complex matrix together with its domain and codomain.
#[derive(Debug, Clone)]
pub struct LabeledOperator {
    pub matrix: CMat,
    pub domain: SpaceDescriptor,
    pub codomain: SpaceDescriptor,
}

impl LabeledOperator {
    pub fn new(matrix: CMat, domain: SpaceDescriptor, codomain: SpaceDescriptor) -> Result<Self> {
        if matrix.ncols() != domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                found: matrix.ncols(),
            });
        }
        if matrix.nrows() != codomain.dim() {
            return Err(Error::DimensionMismatch {
                expected: codomain.dim(),
                found: matrix.nrows(),
            });
        }
        Ok(LabeledOperator {
            matrix,
            domain,
            codomain,
        })
    }
}

/// Orthonormal basis of `H_k` inside `(C^N)^{⊗k}`, one column per basis vector.
#[derive(Debug, Clone)]
pub struct IrrepBasis {
    pub k: usize,
    pub n: usize,
    pub b: RMat,
}

impl IrrepBasis {
    pub fn dim(&self) -> usize {
        self.b.ncols()
    }

    /// The Jones-Wenzl projector `p_k = B B*` on the ambient space.
    pub fn projector(&self) -> RMat {
        &self.b * self.b.transpose()
    }
}

/// The action `F e_i = sign[i] e_{perm[i]}` of the parameter matrix.
#[derive(Debug, Clone)]
pub struct FAction {
    pub perm: Vec<usize>,
    pub sign: Vec<f64>,
}

impl FAction {
    pub fn of(group: &GroupSpec) -> Self {
        match group.kind {
            GroupKind::OnPlus => FAction {
                perm: (0..group.n).collect(),
                sign: vec![1.0; group.n],
            },
            GroupKind::Su2 => FAction {
                perm: vec![1, 0],
                sign: vec![-1.0, 1.0],
            },
        }
    }

    /// `F^{⊗k}` applied to each column of `x` (rows indexed by `k` legs).
    pub fn apply_tensor_power(&self, x: &RMat, k: usize) -> RMat {
        let n = self.perm.len();
        let mut out = RMat::zeros(x.nrows(), x.ncols());
        for row in 0..x.nrows() {
            let (target, s) = self.map_index(row, k, n);
            for col in 0..x.ncols() {
                out[(target, col)] = s * x[(row, col)];
            }
        }
        out
    }

    fn map_index(&self, mut idx: usize, k: usize, n: usize) -> (usize, f64) {
        let mut digits = vec![0usize; k];
        for d in digits.iter_mut().rev() {
            *d = idx % n;
            idx /= n;
        }
        let mut s = 1.0;
        let mut out = 0usize;
        for &d in &digits {
            s *= self.sign[d];
            out = out * n + self.perm[d];
        }
        (out, s)
    }
}

fn ambient(n: usize, legs: usize, cap: usize, what: &str) -> Result<usize> {
    match n.checked_pow(legs as u32) {
        Some(d) if d <= cap => Ok(d),
        Some(d) => Err(Error::cap(what, d, cap)),
        None => Err(Error::cap(what, usize::MAX, cap)),
    }
}

/// The cup `∪_F = Σ_i e_i ⊗ F e_i` as an `N² × 1` column.
pub fn cup_matrix(group: &GroupSpec) -> RMat {
    let f = FAction::of(group);
    let n = group.n;
    let mut v = RMat::zeros(n * n, 1);
    for i in 0..n {
        v[(i * n + f.perm[i], 0)] = f.sign[i];
    }
    v
}

pub fn cup_vector(group: &GroupSpec) -> LabeledOperator {
    LabeledOperator {
        matrix: to_complex(&cup_matrix(group)),
        domain: SpaceDescriptor::Irrep { k: 0, dim: 1 },
        codomain: SpaceDescriptor::Ambient { legs: 2, n: group.n },
    }
}

/// Nested cups `∪^r = Σ_i |i_1…i_r⟩ ⊗ F e_{i_r} ⊗ … ⊗ F e_{i_1}` as an `N^{2r} × 1` column.
pub fn nested_cup_matrix(group: &GroupSpec, r: usize) -> RMat {
    let n = group.n;
    let f = FAction::of(group);
    let nr = n.pow(r as u32);
    let mut v = RMat::zeros(nr * nr, 1);
    for i in 0..nr {
        let (rho, s) = reflected_index(&f, i, r, n);
        v[(i * nr + rho, 0)] = s;
    }
    v
}

/// Index of `F e_{i_r} ⊗ … ⊗ F e_{i_1}` and its sign, for multi-index `i` of length `r`.
fn reflected_index(f: &FAction, mut i: usize, r: usize, n: usize) -> (usize, f64) {
    let mut out = 0usize;
    let mut s = 1.0;
    // digits of i from least significant = i_r first, which is the leading output digit
    for _ in 0..r {
        let d = i % n;
        i /= n;
        out = out * n + f.perm[d];
        s *= f.sign[d];
    }
    (out, s)
}

/// Builder and cache for irrep bases and Clebsch-Gordan isometries of one group.
///
/// Everything cached is immutable and shared through `Arc`, so a context can
/// be used from many threads at once.
#[derive(Debug)]
pub struct TlRep {
    group: GroupSpec,
    max_ambient: usize,
    f: FAction,
    bases: RwLock<HashMap<usize, Arc<IrrepBasis>>>,
    isometries: RwLock<HashMap<AdmissibleTriple, Arc<RMat>>>,
    vertices: RwLock<HashMap<AdmissibleTriple, Arc<RMat>>>,
}

impl TlRep {
    pub fn new(group: GroupSpec) -> Self {
        Self::with_max_ambient(group, DEFAULT_MAX_AMBIENT)
    }

    pub fn with_max_ambient(group: GroupSpec, max_ambient: usize) -> Self {
        TlRep {
            group,
            max_ambient,
            f: FAction::of(&group),
            bases: RwLock::new(HashMap::new()),
            isometries: RwLock::new(HashMap::new()),
            vertices: RwLock::new(HashMap::new()),
        }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn max_ambient(&self) -> usize {
        self.max_ambient
    }

    pub fn f_action(&self) -> &FAction {
        &self.f
    }

    pub fn dim(&self, k: usize) -> Result<usize> {
        self.group.dim(k)
    }

    /// Orthonormal basis of `H_k`, built on first use.
    pub fn basis(&self, k: usize) -> Result<Arc<IrrepBasis>> {
        if let Some(b) = self.bases.read().expect("basis cache poisoned").get(&k) {
            return Ok(b.clone());
        }
        ambient(self.group.n, k, self.max_ambient, &format!("basis of H_{k}"))?;
        let built = if k <= 1 {
            self.base_case(k)
        } else {
            let prev = self.basis(k - 1)?;
            self.wenzl_step(&prev.b, k)?
        };
        let mut cache = self.bases.write().expect("basis cache poisoned");
        Ok(cache.entry(k).or_insert_with(|| Arc::new(built)).clone())
    }

    fn base_case(&self, k: usize) -> IrrepBasis {
        let n = self.group.n;
        let b = if k == 0 {
            RMat::identity(1, 1)
        } else {
            RMat::identity(n, n)
        };
        IrrepBasis { k, n, b }
    }

    /// One step of the Wenzl recursion, restricted to the range of `1 ⊗ p_{k-1}`.
    fn wenzl_step(&self, prev: &RMat, k: usize) -> Result<IrrepBasis> {
        let n = self.group.n;
        let dp = prev.ncols();
        let rest = n.pow(k as u32 - 2);
        let tail = rest * n;
        // G = (∪* ⊗ 1)(1 ⊗ B_{k-1}), columns indexed (a, j)
        let g = RMat::from_fn(rest, n * dp, |row, col| {
            let (a, j) = (col / dp, col % dp);
            self.f.sign[a] * prev[(self.f.perm[a] * rest + row, j)]
        });
        let coef = self.group.quantum_integer(k - 1) / self.group.quantum_integer(k);
        let m = RMat::identity(n * dp, n * dp) - (g.transpose() * &g) * coef;
        let (vals, vecs) = symmetric_eigen(&m);
        let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > 0.5).collect();
        let expected = self.group.dim(k)?;
        if keep.len() != expected {
            return Err(Error::RankMismatch {
                k,
                expected,
                found: keep.len(),
            });
        }
        let u = vecs.select_columns(&keep);
        let mut b = RMat::zeros(n * tail, expected);
        for a in 0..n {
            let block = prev * u.rows(a * dp, dp);
            b.rows_mut(a * tail, tail).copy_from(&block);
        }
        if self.group.kind == GroupKind::Su2 {
            b = weight_basis(b, k);
        }
        Ok(IrrepBasis { k, n, b })
    }

    /// Reduced three-vertex `Â = (B_l ⊗ B_m)* (ι ⊗ ∪^r ⊗ ι) B_k`, size `d_l d_m × d_k`.
    pub fn three_vertex_matrix(&self, t: AdmissibleTriple) -> Result<RMat> {
        if let Some(a) = self.vertices.read().expect("vertex cache poisoned").get(&t) {
            return Ok(a.as_ref().clone());
        }
        let built = self.build_vertex(t)?;
        self.vertices
            .write()
            .expect("vertex cache poisoned")
            .entry(t)
            .or_insert_with(|| Arc::new(built.clone()));
        Ok(built)
    }

    fn build_vertex(&self, t: AdmissibleTriple) -> Result<RMat> {
        let (k, l, m, r) = (t.k, t.l, t.m, t.r());
        let n = self.group.n;
        let bl = self.basis(l)?;
        let bm = self.basis(m)?;
        let bk = self.basis(k)?;
        let (dl, dm, dk) = (bl.dim(), bm.dim(), bk.dim());
        let nr = n.pow(r as u32);
        let nlr = n.pow((l - r) as u32);
        let nmr = n.pow((m - r) as u32);

        let lmat = RMat::from_fn(nlr, nr * dl, |u, col| bl.b[(u * nr + col / dl, col % dl)]);
        let kmat = RMat::from_fn(nlr, nmr * dk, |u, col| bk.b[(u * nmr + col / dk, col % dk)]);
        let x = lmat.transpose() * kmat;

        let reflected: Vec<(usize, f64)> = (0..nr).map(|i| reflected_index(&self.f, i, r, n)).collect();
        let mmat = RMat::from_fn(nr * nmr, dm, |row, b| {
            let (i, v) = (row / nmr, row % nmr);
            let (rho, s) = reflected[i];
            s * bm.b[(rho * nmr + v, b)]
        });
        let y = RMat::from_fn(dl * dk, nr * nmr, |row, col| {
            let (a, cc) = (row / dk, row % dk);
            let (i, v) = (col / nmr, col % nmr);
            x[(i * dl + a, v * dk + cc)]
        });
        let z = y * mmat;
        let out = RMat::from_fn(dl * dm, dk, |row, cc| z[((row / dm) * dk + cc, row % dm)]);
        if out.norm() < 1e-12 {
            return Err(Error::InvalidState(format!(
                "three-vertex {t} vanished; basis is numerically degenerate"
            )));
        }
        Ok(out)
    }

    /// Normalized isometry `α_k^{l,m} = ([k+1]/θ(k,l,m))^{1/2} Â`, cached.
    pub fn cg_isometry_matrix(&self, t: AdmissibleTriple) -> Result<Arc<RMat>> {
        if let Some(a) = self.isometries.read().expect("isometry cache poisoned").get(&t) {
            return Ok(a.clone());
        }
        let a = self.three_vertex_matrix(t)?;
        let scale = (self.group.quantum_integer(t.k + 1) / self.group.theta(t)).sqrt();
        let alpha = a * scale;
        let dk = alpha.ncols();
        let dev = (alpha.transpose() * &alpha - RMat::identity(dk, dk)).norm();
        if dev > ISOMETRY_TOL {
            return Err(Error::tolerance(format!("isometry check for {t}"), dev, ISOMETRY_TOL));
        }
        let alpha = Arc::new(alpha);
        self.isometries
            .write()
            .expect("isometry cache poisoned")
            .entry(t)
            .or_insert_with(|| alpha.clone());
        Ok(alpha)
    }

    pub fn three_vertex(&self, t: AdmissibleTriple) -> Result<LabeledOperator> {
        let m = self.three_vertex_matrix(t)?;
        self.vertex_operator(t, &m)
    }

    pub fn cg_isometry(&self, t: AdmissibleTriple) -> Result<LabeledOperator> {
        let m = self.cg_isometry_matrix(t)?;
        self.vertex_operator(t, &m)
    }

    fn vertex_operator(&self, t: AdmissibleTriple, m: &RMat) -> Result<LabeledOperator> {
        let irrep = |k| -> Result<SpaceDescriptor> { Ok(SpaceDescriptor::Irrep { k, dim: self.dim(k)? }) };
        LabeledOperator::new(
            to_complex(m),
            irrep(t.k)?,
            SpaceDescriptor::Tensor(vec![irrep(t.l)?, irrep(t.m)?]),
        )
    }

    /// `J_k = B_k* R_k B_k` with `R_k |i_1…i_k⟩ = F e_{i_k} ⊗ … ⊗ F e_{i_1}`.
    ///
    /// This is the map the nested cup `∪^k` induces on `H_k`; it identifies the
    /// conjugate representation with `H_k` and is an orthogonal matrix.
    pub fn conjugation(&self, k: usize) -> Result<RMat> {
        let b = self.basis(k)?;
        let n = self.group.n;
        let mut rb = RMat::zeros(b.b.nrows(), b.b.ncols());
        for row in 0..b.b.nrows() {
            let (target, s) = reflected_index(&self.f, row, k, n);
            for col in 0..b.b.ncols() {
                rb[(target, col)] = s * b.b[(row, col)];
            }
        }
        Ok(b.b.transpose() * rb)
    }

    /// `π_m(g) = B_m* g^{⊗m} B_m` for `g ∈ SU(2)`.
    pub fn su2_rep(&self, m: usize, g: &CMat) -> Result<CMat> {
        if self.group.kind != GroupKind::Su2 {
            return Err(Error::Unsupported("su2_rep needs the SU(2) group".into()));
        }
        if g.nrows() != 2 || g.ncols() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: g.nrows(),
            });
        }
        let unit_dev = (g * g.adjoint() - CMat::identity(2, 2)).norm();
        let det_dev = (g.determinant() - c(1.0)).norm();
        if unit_dev > 1e-10 || det_dev > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "matrix is not special unitary (unitarity {unit_dev:e}, det {det_dev:e})"
            )));
        }
        let b = to_complex(&self.basis(m)?.b);
        let mut x = b.clone();
        for leg in 0..m {
            x = apply_on_leg(&x, g, leg, m, 2);
        }
        Ok(b.adjoint() * x)
    }
}

/// Apply a single-leg operator `g` (size `n × n`) to leg `leg` of every column of `x`.
pub fn apply_on_leg(x: &CMat, g: &CMat, leg: usize, legs: usize, n: usize) -> CMat {
    let inner = n.pow((legs - leg - 1) as u32);
    let outer = x.nrows() / (inner * n);
    let mut out = CMat::zeros(x.nrows(), x.ncols());
    for col in 0..x.ncols() {
        for o in 0..outer {
            for i in 0..inner {
                for a in 0..n {
                    let mut acc = c(0.0);
                    for b in 0..n {
                        acc += g[(a, b)] * x[((o * n + b) * inner + i, col)];
                    }
                    out[((o * n + a) * inner + i, col)] = acc;
                }
            }
        }
    }
    out
}

/// Rotate an `SU(2)` basis of `H_k` into weight vectors ordered by the number of `e_2` legs.
fn weight_basis(b: RMat, k: usize) -> RMat {
    let weights: Vec<f64> = (0..b.nrows()).map(|i| i.count_ones() as f64).collect();
    let wb = RMat::from_fn(b.nrows(), b.ncols(), |i, j| weights[i] * b[(i, j)]);
    let (_, v) = symmetric_eigen(&(b.transpose() * wb));
    let mut out = b * v;
    debug_assert!(out.ncols() == k + 1);
    for j in 0..out.ncols() {
        if out.column(j).sum() < 0.0 {
            out.column_mut(j).neg_mut();
        }
    }
    out
}

pub fn jones_wenzl_basis(k: usize, group: &GroupSpec, max_ambient: usize) -> Result<IrrepBasis> {
    let rep = TlRep::with_max_ambient(*group, max_ambient);
    Ok((*rep.basis(k)?).clone())
}

pub fn three_vertex(t: AdmissibleTriple, group: &GroupSpec) -> Result<LabeledOperator> {
    TlRep::new(*group).three_vertex(t)
}

pub fn cg_isometry(t: AdmissibleTriple, group: &GroupSpec) -> Result<LabeledOperator> {
    TlRep::new(*group).cg_isometry(t)
}

pub fn su2_rep(m: usize, g: &CMat) -> Result<LabeledOperator> {
    let rep = TlRep::new(GroupSpec::su2());
    let d = m + 1;
    LabeledOperator::new(
        rep.su2_rep(m, g)?,
        SpaceDescriptor::Irrep { k: m, dim: d },
        SpaceDescriptor::Irrep { k: m, dim: d },
    )
}

/// Markov trace on `H_k`. For Kac-type `F` it is the ordinary trace.
pub fn markov_trace(m: &CMat) -> crate::linalg::C64 {
    m.trace()
}

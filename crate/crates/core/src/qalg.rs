//! Scalar layer: quantum parameter, quantum integers, theta nets and
//! admissibility of label triples.
//!
//! Every factorial-bearing quantity is accumulated in the log domain; the
//! quantum factorials overflow `f64` quickly once `N >= 5`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for rounding a quantum integer to an irrep dimension.
pub const DIM_ROUNDING_TOL: f64 = 1e-6;

/// Which Kac-type free orthogonal quantum group the category is realized in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupKind {
    /// `O_N^+` with parameter matrix `F = 1_N`.
    OnPlus,
    /// `SU(2)`, i.e. `O_F^+` with `F = [[0, 1], [-1, 0]]`.
    Su2,
}

/// The group a channel family is built from. Fixes `N`, `q` and the loop value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub kind: GroupKind,
    /// Dimension of the fundamental representation.
    pub n: usize,
    /// Quantum parameter in `(0, 1]`, `q + 1/q = loop_value`.
    pub q: f64,
    /// `Tr(F* F)`, the value of a closed loop.
    pub loop_value: f64,
}

impl GroupSpec {
    pub fn on_plus(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("O_N^+ needs N >= 2, got {n}")));
        }
        Ok(GroupSpec {
            kind: GroupKind::OnPlus,
            n,
            q: quantum_parameter(n),
            loop_value: n as f64,
        })
    }

    pub fn su2() -> Self {
        GroupSpec {
            kind: GroupKind::Su2,
            n: 2,
            q: 1.0,
            loop_value: 2.0,
        }
    }

    /// `sgn(d)` in the snake equations: `+1` for `O_N^+`, `-1` for `SU(2)`.
    pub fn snake_sign(&self) -> f64 {
        match self.kind {
            GroupKind::OnPlus => 1.0,
            GroupKind::Su2 => -1.0,
        }
    }

    pub fn quantum_integer(&self, n: usize) -> f64 {
        quantum_integer(n, self.q)
    }

    pub fn dim(&self, k: usize) -> Result<usize> {
        dim_irrep(k, self)
    }

    pub fn theta(&self, t: AdmissibleTriple) -> f64 {
        theta_net(t, self.q)
    }

    /// `onplus:<N>` or `su2`.
    pub fn label(&self) -> String {
        match self.kind {
            GroupKind::OnPlus => format!("onplus:{}", self.n),
            GroupKind::Su2 => "su2".to_string(),
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "su2" {
            return Ok(GroupSpec::su2());
        }
        if let Some(rest) = s.strip_prefix("onplus:") {
            let n: usize = rest
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad N in group '{s}'")))?;
            return GroupSpec::on_plus(n);
        }
        Err(Error::InvalidArgument(format!(
            "unknown group '{s}', expected 'onplus:<N>' or 'su2'"
        )))
    }
}

/// The quantum parameter `q0 = 2 / (N (1 + sqrt(1 - 4/N^2)))`, so that `q0 + 1/q0 = N`.
pub fn quantum_parameter(n: usize) -> f64 {
    let n = n as f64;
    2.0 / (n * (1.0 + (1.0 - 4.0 / (n * n)).max(0.0).sqrt()))
}

fn integral_loop_value(q: f64) -> Option<f64> {
    let s = q + 1.0 / q;
    let rounded = s.round();
    ((s - rounded).abs() < 1e-9).then_some(rounded)
}

/// The quantum integer `[n]_q = q^{-(n-1)} (1 - q^{2n}) / (1 - q^2)`, with `[n]_1 = n`.
///
/// When `q + 1/q` is an integer (every Kac-type case here) the value is
/// produced by the Chebyshev recursion `[n+1] = (q + 1/q)[n] - [n-1]`, which
/// is exact in `f64` up to `2^53`.
pub fn quantum_integer(n: usize, q: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if (1.0 - q).abs() < 1e-14 {
        return n as f64;
    }
    if let Some(s) = integral_loop_value(q) {
        let (mut prev, mut cur) = (0.0_f64, 1.0_f64);
        for _ in 1..n {
            let next = s * cur - prev;
            prev = cur;
            cur = next;
        }
        return cur;
    }
    q.powi(-(n as i32 - 1)) * (1.0 - q.powi(2 * n as i32)) / (1.0 - q * q)
}

fn ln_quantum_integer(n: usize, q: f64) -> f64 {
    debug_assert!(n >= 1);
    if (1.0 - q).abs() < 1e-14 || integral_loop_value(q).is_some() {
        let v = quantum_integer(n, q);
        if v.is_finite() {
            return v.ln();
        }
    }
    -((n - 1) as f64) * q.ln() + (-q.powi(2 * n as i32)).ln_1p() - (-q * q).ln_1p()
}

/// `ln([n]_q!)`, with `[0]_q! = 1`.
pub fn quantum_factorial_log(n: usize, q: f64) -> f64 {
    (1..=n).map(|j| ln_quantum_integer(j, q)).sum()
}

/// `(k, l, m)` with `l + m - k` even and `|l - m| <= k <= l + m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AdmissibleTriple {
    pub k: usize,
    pub l: usize,
    pub m: usize,
}

impl AdmissibleTriple {
    pub fn new(k: usize, l: usize, m: usize) -> Result<Self> {
        if k > l + m {
            return Err(Error::NotAdmissible {
                k,
                l,
                m,
                reason: "triangle violated: k > l + m",
            });
        }
        if k < l.abs_diff(m) {
            return Err(Error::NotAdmissible {
                k,
                l,
                m,
                reason: "triangle violated: k < |l - m|",
            });
        }
        if (l + m - k) & 1 == 1 {
            return Err(Error::NotAdmissible {
                k,
                l,
                m,
                reason: "parity violated: l + m - k is odd",
            });
        }
        Ok(AdmissibleTriple { k, l, m })
    }

    /// Number of cups joining the two output legs, `(l + m - k) / 2`.
    pub fn r(&self) -> usize {
        (self.l + self.m - self.k) / 2
    }

    /// All admissible triples with every entry at most `max`.
    pub fn all_up_to(max: usize) -> Vec<AdmissibleTriple> {
        let mut out = Vec::new();
        for k in 0..=max {
            for l in 0..=max {
                for m in 0..=max {
                    if let Ok(t) = AdmissibleTriple::new(k, l, m) {
                        out.push(t);
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for AdmissibleTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.k, self.l, self.m)
    }
}

pub fn is_admissible(k: usize, l: usize, m: usize) -> bool {
    AdmissibleTriple::new(k, l, m).is_ok()
}

/// Theta net `θ_q(k,l,m) = [r]![l-r]![m-r]![k+r+1]! / ([l]![m]![k]!)`.
pub fn theta_net(t: AdmissibleTriple, q: f64) -> f64 {
    let r = t.r();
    let lf = |n| quantum_factorial_log(n, q);
    (lf(r) + lf(t.l - r) + lf(t.m - r) + lf(t.k + r + 1) - lf(t.l) - lf(t.m) - lf(t.k)).exp()
}

/// Unchecked variant of [`theta_net`] for raw labels.
pub fn theta_net_raw(k: usize, l: usize, m: usize, q: f64) -> Result<f64> {
    Ok(theta_net(AdmissibleTriple::new(k, l, m)?, q))
}

/// Dimension of `H_k`, i.e. `[k+1]_q` rounded to an integer.
pub fn dim_irrep(k: usize, group: &GroupSpec) -> Result<usize> {
    if group.kind == GroupKind::Su2 {
        return Ok(k + 1);
    }
    let v = quantum_integer(k + 1, group.q);
    let rounded = v.round();
    let dev = (v - rounded).abs();
    if !v.is_finite() || dev > DIM_ROUNDING_TOL {
        return Err(Error::tolerance(
            format!("dim H_{k} for {group}"),
            dev,
            DIM_ROUNDING_TOL,
        ));
    }
    Ok(rounded as usize)
}

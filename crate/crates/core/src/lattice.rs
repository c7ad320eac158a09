//! A_{N-1} lattice structure: the Cartan matrix and its inverse, partitions
//! and their weight vectors, the (m,n) and (μ,η) systems, the σ parity
//! restriction, and order-bounded enumeration of the restricted sums.
//!
//! Vectors have length `N - 1` and are indexed from 1 in the mathematical
//! notation (`e_1 .. e_{N-1}`), from 0 in code. Rank 0 (`N = 1`) is handled by
//! empty vectors throughout.

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qtools::{multinomial_degree, primed_min_exponent};

pub type IntVec = Vec<i64>;

/// The Cartan matrix of A_{N-1} together with its exact inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanData {
    n: i64,
    cartan: Vec<Vec<i64>>,
    /// `N · C^{-1}`, an integer matrix.
    scaled_inv: Vec<Vec<i64>>,
}

impl CartanData {
    pub fn new(n: i64) -> Self {
        assert!(n >= 1, "rank parameter N must be at least 1");
        let d = (n - 1) as usize;
        let mut cartan = vec![vec![0; d]; d];
        let mut scaled_inv = vec![vec![0; d]; d];
        for j in 0..d {
            for k in 0..d {
                cartan[j][k] = match (j as i64 - k as i64).abs() {
                    0 => 2,
                    1 => -1,
                    _ => 0,
                };
                let (a, b) = (j.min(k) as i64 + 1, j.max(k) as i64 + 1);
                scaled_inv[j][k] = a * (n - b);
            }
        }
        CartanData {
            n,
            cartan,
            scaled_inv,
        }
    }

    /// The rank parameter `N`.
    pub fn n(&self) -> i64 {
        self.n
    }

    /// Vector length `N - 1`.
    pub fn dim(&self) -> usize {
        (self.n - 1) as usize
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    /// `C^{-1}_{jk} = min(j,k)(N - max(j,k))/N` (0-based indices in code).
    pub fn inv_entry(&self, j: usize, k: usize) -> Rational64 {
        Rational64::new(self.scaled_inv[j][k], self.n)
    }

    pub fn inv_cartan(&self) -> Vec<Vec<Rational64>> {
        (0..self.dim())
            .map(|j| (0..self.dim()).map(|k| self.inv_entry(j, k)).collect())
            .collect()
    }

    /// `N · C^{-1} x`.
    pub fn scaled_inv_apply(&self, x: &[i64]) -> IntVec {
        self.scaled_inv
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `C^{-1} x` as exact rationals.
    pub fn inv_apply(&self, x: &[i64]) -> Vec<Rational64> {
        self.scaled_inv_apply(x)
            .into_iter()
            .map(|v| Rational64::new(v, self.n))
            .collect()
    }

    /// `C x`.
    pub fn apply(&self, x: &[i64]) -> IntVec {
        self.cartan
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `N · x C^{-1} y`.
    pub fn scaled_bilinear(&self, x: &[i64], y: &[i64]) -> i64 {
        x.iter()
            .zip(self.scaled_inv_apply(y))
            .map(|(a, b)| a * b)
            .sum()
    }

    /// `x C^{-1} (x - w)`.
    pub fn quad_form(&self, x: &[i64], w: &[i64]) -> Rational64 {
        let diff: IntVec = x.iter().zip(w).map(|(a, b)| a - b).collect();
        Rational64::new(self.scaled_bilinear(x, &diff), self.n)
    }

    /// Unit vector `e_j` for `0 <= j <= N` with `e_0 = e_N = 0`.
    pub fn unit(&self, j: i64) -> IntVec {
        let mut v = vec![0; self.dim()];
        if j >= 1 && j < self.n {
            v[(j - 1) as usize] = 1;
        }
        v
    }

    pub fn zero_vec(&self) -> IntVec {
        vec![0; self.dim()]
    }
}

/// A partition with weakly decreasing positive parts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct Partition {
    parts: Vec<i64>,
}

impl TryFrom<Vec<i64>> for Partition {
    type Error = Error;
    fn try_from(parts: Vec<i64>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<i64> {
    fn from(p: Partition) -> Vec<i64> {
        p.parts
    }
}

impl Partition {
    /// Builds a partition; parts are sorted into decreasing order and must be
    /// positive.
    pub fn new(mut parts: Vec<i64>) -> Result<Self> {
        if parts.iter().any(|&p| p <= 0) {
            return Err(Error::InvalidParameters(format!(
                "partition parts must be positive: {parts:?}"
            )));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn single(part: i64) -> Self {
        if part == 0 {
            Self::empty()
        } else {
            Self::new(vec![part]).expect("positive part")
        }
    }

    pub fn parts(&self) -> &[i64] {
        &self.parts
    }

    pub fn weight(&self) -> i64 {
        self.parts.iter().sum()
    }

    pub fn largest(&self) -> i64 {
        self.parts.first().copied().unwrap_or(0)
    }

    /// `e_λ = Σ_i e_{λ_i}` for rank `N`.
    pub fn e_lambda(&self, cd: &CartanData) -> IntVec {
        let mut v = cd.zero_vec();
        for &p in &self.parts {
            if p < cd.n() {
                v[(p - 1) as usize] += 1;
            }
        }
        v
    }

    /// Every partition with parts `<= max_part` and weight `<= max_weight`,
    /// in a fixed order (by weight, then lexicographically).
    pub fn all(max_part: i64, max_weight: i64) -> Vec<Partition> {
        fn rec(rem: i64, cap: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
            out.push(cur.clone());
            for p in (1..=cap.min(rem)).rev() {
                cur.push(p);
                rec(rem - p, p, cur, out);
                cur.pop();
            }
        }
        let mut raw = Vec::new();
        rec(max_weight, max_part.max(0), &mut Vec::new(), &mut raw);
        let mut parts: Vec<Partition> = raw.into_iter().map(|parts| Partition { parts }).collect();
        parts.sort_by(|a, b| {
            a.weight()
                .cmp(&b.weight())
                .then_with(|| a.parts.cmp(&b.parts))
        });
        parts
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (j, p) in self.parts.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Rank, modulus exponent, partition and σ for a restricted lattice sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaContext {
    cartan: CartanData,
    ell: i64,
    lambda: Partition,
    sigma: i64,
    e_lambda: IntVec,
}

impl SigmaContext {
    /// Checks `λ_1 <= N - 1`, `σ ∈ {0,1}` and that `ℓ + |λ| + σN` is even.
    pub fn new(n: i64, ell: i64, lambda: Partition, sigma: i64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameters(format!("N must be >= 1, got {n}")));
        }
        if !(0..=1).contains(&sigma) {
            return Err(Error::InvalidParameters(format!(
                "sigma must be 0 or 1, got {sigma}"
            )));
        }
        if lambda.largest() > n - 1 {
            return Err(Error::InvalidParameters(format!(
                "partition {lambda} has a part larger than N-1 = {}",
                n - 1
            )));
        }
        if (ell + lambda.weight() + sigma * n).rem_euclid(2) != 0 {
            return Err(Error::InvalidParameters(format!(
                "l + |lambda| + sigma*N must be even (l={ell}, |lambda|={}, sigma={sigma}, N={n})",
                lambda.weight()
            )));
        }
        let cartan = CartanData::new(n);
        let e_lambda = lambda.e_lambda(&cartan);
        Ok(SigmaContext {
            cartan,
            ell,
            lambda,
            sigma,
            e_lambda,
        })
    }

    /// Every σ compatible with the parity constraint.
    pub fn admissible_sigmas(n: i64, ell: i64, lambda: &Partition) -> Vec<i64> {
        (0..=1)
            .filter(|s| (ell + lambda.weight() + s * n).rem_euclid(2) == 0)
            .collect()
    }

    pub fn cartan(&self) -> &CartanData {
        &self.cartan
    }
    pub fn n(&self) -> i64 {
        self.cartan.n()
    }
    pub fn ell(&self) -> i64 {
        self.ell
    }
    pub fn lambda(&self) -> &Partition {
        &self.lambda
    }
    pub fn sigma(&self) -> i64 {
        self.sigma
    }
    pub fn e_lambda(&self) -> &[i64] {
        &self.e_lambda
    }

    /// Same rank, partition and σ with a different modulus exponent.
    pub fn with_ell(&self, ell: i64) -> Result<Self> {
        SigmaContext::new(self.n(), ell, self.lambda.clone(), self.sigma)
    }

    /// `(L + (ℓ - |λ|)/2)/N - (C^{-1} total)_1 ∈ Z + σ/2`.
    pub fn admissible(&self, l: i64, total: &[i64]) -> bool {
        let n = self.n();
        let first = if self.cartan.dim() == 0 {
            0
        } else {
            self.cartan.scaled_inv[0]
                .iter()
                .zip(total)
                .map(|(a, b)| a * b)
                .sum::<i64>()
        };
        let v = 2 * l + self.ell - self.lambda.weight() - 2 * first - self.sigma * n;
        v.rem_euclid(2 * n) == 0
    }

    /// `C^{-1}((2L + ℓ) e_{N-1} + e_λ - 2n)` with an integrality flag.
    pub fn m_system(&self, l: i64, n_vec: &[i64]) -> (Vec<Rational64>, bool) {
        let rhs = self.m_rhs(l, n_vec);
        let scaled = self.cartan.scaled_inv_apply(&rhs);
        let n = self.n();
        let integral = scaled.iter().all(|v| v % n == 0);
        (
            scaled.into_iter().map(|v| Rational64::new(v, n)).collect(),
            integral,
        )
    }

    fn m_rhs(&self, l: i64, n_vec: &[i64]) -> IntVec {
        let mut b = self.cartan.unit(self.n() - 1);
        for (j, x) in b.iter_mut().enumerate() {
            *x = *x * (2 * l + self.ell) + self.e_lambda[j] - 2 * n_vec[j];
        }
        b
    }

    /// Right-hand side of the (μ,η) system before applying `C^{-1}`:
    /// `(M-L-k) e_1 + (M+L+ℓ) e_{N-1} + e_λ - Σ_j (i_j + i_{j+1}) e_j`,
    /// with `i_N = k - Σ i`.
    pub fn mu_base(&self, m: i64, l: i64, k: i64, i: &[i64]) -> IntVec {
        let cd = &self.cartan;
        let d = cd.dim();
        let i_n = k - i.iter().sum::<i64>();
        let e1 = cd.unit(1);
        let elast = cd.unit(self.n() - 1);
        (0..d)
            .map(|j| {
                let next = if j + 1 < d { i[j + 1] } else { i_n };
                (m - l - k) * e1[j] + (m + l + self.ell) * elast[j] + self.e_lambda[j]
                    - (i[j] + next)
            })
            .collect()
    }

    /// μ of the (μ,η) system.
    pub fn mu_system(&self, m: i64, l: i64, k: i64, i: &[i64], eta: &[i64]) -> Vec<Rational64> {
        let b: IntVec = self
            .mu_base(m, l, k, i)
            .iter()
            .zip(eta)
            .map(|(b, e)| b - 2 * e)
            .collect();
        self.cartan.inv_apply(&b)
    }
}

/// One nonzero term of a Δ-type sum: `n` and its companion `m`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DeltaPoint {
    pub n: IntVec,
    pub m: IntVec,
}

/// All `n >= 0` with integral `m >= 0` that satisfy the σ restriction at `L`.
pub fn enumerate_delta_support(ctx: &SigmaContext, l: i64) -> Vec<DeltaPoint> {
    let cd = ctx.cartan();
    let b = ctx.m_rhs(l, &cd.zero_vec());
    let n = ctx.n();
    // n >= 0 and C^{-1} >= 0 entrywise give m <= C^{-1} b
    let caps: Vec<i64> = cd
        .scaled_inv_apply(&b)
        .into_iter()
        .map(|v| v.div_euclid(n))
        .collect();
    if caps.iter().any(|&c| c < 0) {
        return Vec::new();
    }
    let mut out = Vec::new();
    for m in boxed(&caps) {
        let cm = cd.apply(&m);
        let diff: IntVec = b.iter().zip(&cm).map(|(x, y)| x - y).collect();
        if diff.iter().any(|v| v.rem_euclid(2) != 0) {
            continue;
        }
        let nv: IntVec = diff.iter().map(|v| v / 2).collect();
        if nv.iter().any(|&v| v < 0) || !ctx.admissible(l, &nv) {
            continue;
        }
        out.push(DeltaPoint { n: nv, m });
    }
    out.sort();
    out
}

/// Every integer vector `0 <= x <= caps` componentwise, in lexicographic order.
fn boxed(caps: &[i64]) -> Vec<IntVec> {
    let mut out = vec![Vec::with_capacity(caps.len())];
    for &c in caps {
        let mut next = Vec::with_capacity(out.len() * (c.max(0) as usize + 1));
        for v in &out {
            for x in 0..=c {
                let mut w = v.clone();
                w.push(x);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// All `i >= 0` of the given length with `Σ i <= k`.
pub fn compositions(k: i64, len: usize) -> Vec<IntVec> {
    fn rec(rem: i64, len: usize, cur: &mut IntVec, out: &mut Vec<IntVec>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for x in 0..=rem {
            cur.push(x);
            rec(rem - x, len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k >= 0 {
        rec(k, len, &mut Vec::new(), &mut out);
    }
    out
}

/// Which Gaussian polynomial sits in a Γ-type sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinomialKind {
    /// Eq-(11) style: negative η allowed.
    Primed,
    /// Eq-(10) style: η and μ both non-negative.
    Unprimed,
}

/// One nonzero term of a Γ-type sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaPoint {
    pub eta: IntVec,
    pub i: IntVec,
    pub mu: IntVec,
    /// Lowest exponent of the term without the common prefactor: the
    /// i-exponent, the lowest exponent of the 1/q multinomial, the η quadratic
    /// form and the lowest exponents of the primed binomials.
    pub min_exponent: Rational64,
}

/// Box sizes above this are reported instead of enumerated.
const MAX_BOX_POINTS: u128 = 20_000_000;

/// Enumerates the (η, i) support of the Γ_{L,k} sum at truncation `bound`
/// (relative to the common prefactor).
///
/// For negative η the sum is infinite; the terms are parametrized by `μ >= 0`
/// and a per-coordinate lower bound
/// `E(μ) >= K0 + Σ_j min(μ_j(1 + (e_λ)_j)/2, μ_j²/N² + μ_j((e_λ)_j - b_j)/2)`
/// limits the search to a finite box. Every enumerated point is checked
/// against that bound; any violation, or a box too large to scan, yields
/// `EnumerationBoundUnverified`.
pub fn enumerate_gamma_support(
    ctx: &SigmaContext,
    m_top: i64,
    l: i64,
    k: i64,
    bound: Rational64,
    kind: BinomialKind,
) -> Result<Vec<GammaPoint>> {
    let cd = ctx.cartan();
    let n = ctx.n();
    let d = cd.dim();
    let mut out = Vec::new();
    if k < 0 {
        return Ok(out);
    }
    for i in compositions(k, d) {
        let mut e1 = cd.unit(1);
        for x in e1.iter_mut() {
            *x *= 2 * l + ctx.ell();
        }
        let shifted: IntVec = i.iter().zip(&e1).map(|(a, b)| a + b).collect();
        // -i C^{-1} (i + (2L+ℓ) e_1)  and the lowest exponent -deg of [k; i]_{1/q}
        let i_exp = Rational64::new(-cd.scaled_bilinear(&i, &shifted), n);
        let i_multi_low = -multinomial_degree(k, &i);
        let offset = i_exp + Rational64::from_integer(i_multi_low);
        let budget = bound - offset;
        let b = ctx.mu_base(m_top, l, k, &i);
        let points = match kind {
            BinomialKind::Unprimed => unprimed_points(ctx, &b, budget)?,
            BinomialKind::Primed => primed_points(ctx, &b, budget)?,
        };
        for (eta, mu, e) in points {
            let total: IntVec = eta.iter().zip(&i).map(|(a, b)| a + b).collect();
            if !ctx.admissible(l, &total) {
                continue;
            }
            out.push(GammaPoint {
                eta,
                i: i.clone(),
                mu,
                min_exponent: e + offset,
            });
        }
    }
    out.sort_by(|a, b| (&a.i, &a.eta).cmp(&(&b.i, &b.eta)));
    Ok(out)
}

/// Lowest exponent of `q^{η C^{-1}(η - e_λ)} ∏ [μ_j + η_j; η_j]'`, or `None`
/// if a primed binomial vanishes.
fn primed_term_exponent(ctx: &SigmaContext, eta: &[i64], mu: &[i64]) -> Option<Rational64> {
    let mut e = ctx.cartan().quad_form(eta, ctx.e_lambda());
    for (&h, &m) in eta.iter().zip(mu) {
        e += Rational64::from_integer(primed_min_exponent(h, m)?);
    }
    Some(e)
}

/// Points `(η, μ, E)` with `η, μ >= 0` and `E = η C^{-1}(η - e_λ) < budget`.
fn unprimed_points(
    ctx: &SigmaContext,
    b: &[i64],
    budget: Rational64,
) -> Result<Vec<(IntVec, IntVec, Rational64)>> {
    let cd = ctx.cartan();
    let n = ctx.n();
    let caps: Vec<i64> = cd
        .scaled_inv_apply(b)
        .into_iter()
        .map(|v| v.div_euclid(n))
        .collect();
    let mut out = Vec::new();
    if caps.iter().any(|&c| c < 0) {
        return Ok(out);
    }
    check_box(&caps)?;
    for mu in boxed(&caps) {
        let Some(eta) = eta_from_mu(cd, b, &mu) else {
            continue;
        };
        if eta.iter().any(|&h| h < 0) {
            continue;
        }
        let e = cd.quad_form(&eta, ctx.e_lambda());
        if e < budget {
            out.push((eta, mu, e));
        }
    }
    Ok(out)
}

fn eta_from_mu(cd: &CartanData, b: &[i64], mu: &[i64]) -> Option<IntVec> {
    let cm = cd.apply(mu);
    let diff: IntVec = b.iter().zip(&cm).map(|(x, y)| x - y).collect();
    if diff.iter().any(|v| v.rem_euclid(2) != 0) {
        return None;
    }
    Some(diff.into_iter().map(|v| v / 2).collect())
}

fn check_box(caps: &[i64]) -> Result<()> {
    let size: u128 = caps.iter().map(|&c| (c.max(0) as u128) + 1).product();
    if size > MAX_BOX_POINTS {
        return Err(Error::EnumerationBoundUnverified(format!(
            "search box {caps:?} holds {size} points"
        )));
    }
    Ok(())
}

/// Per-coordinate lower bound `g_j(x)`.
fn coercive_bound(n: i64, el_j: i64, b_j: i64, x: i64) -> Rational64 {
    let x = Rational64::from_integer(x);
    let lin = x * Rational64::new(1 + el_j, 2);
    let quad = x * x / Rational64::from_integer(n * n) + x * Rational64::new(el_j - b_j, 2);
    lin.min(quad)
}

/// Points with `μ >= 0`, integral `η = (b - Cμ)/2`, nonvanishing primed
/// binomials and exponent below `budget`.
fn primed_points(
    ctx: &SigmaContext,
    b: &[i64],
    budget: Rational64,
) -> Result<Vec<(IntVec, IntVec, Rational64)>> {
    let cd = ctx.cartan();
    let n = ctx.n();
    let d = cd.dim();
    let el = ctx.e_lambda();
    // K0 = b C^{-1} b / 4 - b C^{-1} e_λ / 2
    let k0 = Rational64::new(cd.scaled_bilinear(b, b), 4 * n)
        - Rational64::new(cd.scaled_bilinear(b, el), 2 * n);
    // minimum of each g_j over x >= 0: the linear branch is increasing, the
    // quadratic one is minimal near x* = N²(b_j - e_j)/4
    let mut minima = Vec::with_capacity(d);
    for j in 0..d {
        let vertex = (n * n * (b[j] - el[j])).div_euclid(4).max(0);
        let cand = [0, vertex, vertex + 1];
        let m = cand
            .iter()
            .map(|&x| coercive_bound(n, el[j], b[j], x))
            .min()
            .unwrap();
        minima.push(m);
    }
    let total_min: Rational64 = minima.iter().copied().sum();
    let mut caps = Vec::with_capacity(d);
    for j in 0..d {
        let room = budget - k0 - (total_min - minima[j]);
        // largest x with g_j(x) < room; g_j is eventually increasing
        let vertex = (n * n * (b[j] - el[j])).div_euclid(4).max(0);
        let mut x = vertex;
        let limit = 1_000_000;
        loop {
            if coercive_bound(n, el[j], b[j], x + 1) >= room && x + 1 > vertex {
                // increasing from here on in both branches
                break;
            }
            x += 1;
            if x > limit {
                return Err(Error::EnumerationBoundUnverified(format!(
                    "coordinate {j} bound did not close (room {room})"
                )));
            }
        }
        caps.push(x);
    }
    check_box(&caps)?;
    let mut out = Vec::new();
    for mu in boxed(&caps) {
        let Some(eta) = eta_from_mu(cd, b, &mu) else {
            continue;
        };
        let Some(e) = primed_term_exponent(ctx, &eta, &mu) else {
            continue;
        };
        let certified: Rational64 = k0
            + (0..d)
                .map(|j| coercive_bound(n, el[j], b[j], mu[j]))
                .sum::<Rational64>();
        if e < certified {
            return Err(Error::EnumerationBoundUnverified(format!(
                "term at mu={mu:?} has exponent {e} below the certified {certified}"
            )));
        }
        if e < budget {
            out.push((eta, mu, e));
        }
    }
    Ok(out)
}

/// Points `η >= 0` satisfying the σ restriction at `L` with
/// `η C^{-1}(η - e_λ) < bound`, paired with that exponent.
pub fn enumerate_eta_nonneg(
    ctx: &SigmaContext,
    l: i64,
    bound: Rational64,
) -> Result<Vec<(IntVec, Rational64)>> {
    let cd = ctx.cartan();
    let n = ctx.n();
    let d = cd.dim();
    let el = ctx.e_lambda();
    // η C^{-1} η >= Σ_j C^{-1}_jj η_j² for η >= 0
    let lin: Vec<i64> = cd.scaled_inv_apply(el);
    let diag: Vec<i64> = (0..d).map(|j| cd.scaled_inv[j][j]).collect();
    let g = |j: usize, x: i64| Rational64::new(diag[j] * x * x - lin[j] * x, n);
    let minima: Vec<Rational64> = (0..d)
        .map(|j| {
            (0..=lin[j].max(0))
                .map(|x| g(j, x))
                .min()
                .unwrap_or(Rational64::zero())
        })
        .collect();
    let total_min: Rational64 = minima.iter().copied().sum();
    let mut caps = Vec::with_capacity(d);
    for j in 0..d {
        let room = bound - (total_min - minima[j]);
        let mut x = 0;
        while x <= lin[j] || g(j, x + 1) < room {
            x += 1;
        }
        caps.push(x);
    }
    check_box(&caps)?;
    let mut out = Vec::new();
    for eta in boxed(&caps) {
        if !ctx.admissible(l, &eta) {
            continue;
        }
        let e = cd.quad_form(&eta, el);
        if e < bound {
            out.push((eta, e));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn ctx(n: i64, ell: i64, lambda: &[i64], sigma: i64) -> SigmaContext {
        SigmaContext::new(n, ell, Partition::new(lambda.to_vec()).unwrap(), sigma).unwrap()
    }

    #[test]
    fn inverse_cartan_examples() {
        assert_eq!(
            CartanData::new(3).inv_cartan(),
            vec![vec![r(2, 3), r(1, 3)], vec![r(1, 3), r(2, 3)]]
        );
        assert_eq!(CartanData::new(2).inv_cartan(), vec![vec![r(1, 2)]]);
        assert!(CartanData::new(1).inv_cartan().is_empty());
    }

    #[test]
    fn inverse_times_cartan_is_identity() {
        for n in 1..=8 {
            let cd = CartanData::new(n);
            let d = cd.dim();
            for j in 0..d {
                for k in 0..d {
                    let s: Rational64 = (0..d)
                        .map(|t| cd.inv_entry(j, t) * Rational64::from_integer(cd.cartan()[t][k]))
                        .sum();
                    assert_eq!(s, Rational64::from_integer((j == k) as i64));
                }
            }
        }
    }

    #[test]
    fn quad_form_examples() {
        assert_eq!(CartanData::new(2).quad_form(&[1], &[0]), r(1, 2));
        assert_eq!(CartanData::new(3).quad_form(&[0, 0], &[1, 0]), r(0, 1));
        assert_eq!(CartanData::new(3).quad_form(&[1, 0], &[1, 0]), r(0, 1));
    }

    #[test]
    fn m_system_examples() {
        let c = ctx(2, 0, &[], 0);
        assert_eq!(c.m_system(1, &[0]), (vec![r(1, 1)], true));
        assert_eq!(c.m_system(1, &[1]), (vec![r(0, 1)], true));
        let c = ctx(3, 0, &[], 0);
        assert_eq!(c.m_system(1, &[0, 0]), (vec![r(2, 3), r(4, 3)], false));
    }

    #[test]
    fn mu_system_examples() {
        let c = ctx(2, 0, &[], 0);
        assert_eq!(c.mu_system(2, 0, 0, &[0], &[0]), vec![r(2, 1)]);
        assert_eq!(c.mu_system(1, 1, 0, &[0], &[1]), vec![r(0, 1)]);
        // k = 0, i = 0 reduces to C^{-1}((M-L)e_1 + (M+L+ℓ)e_{N-1} + e_λ - 2η)
        let c = ctx(3, 1, &[1], 0);
        let (m, l) = (4, 1);
        let eta = [1, -2];
        let b = [m - l + 1 - 2 * eta[0], m + l + 1 - 2 * eta[1]];
        assert_eq!(
            c.mu_system(m, l, 0, &[0, 0], &eta),
            c.cartan().inv_apply(&b)
        );
    }

    #[test]
    fn sigma_examples() {
        assert!(ctx(1, 0, &[], 0).admissible(3, &[]));
        assert!(ctx(2, 0, &[], 1).admissible(1, &[0]));
        assert!(!ctx(2, 0, &[], 0).admissible(1, &[0]));
        assert!(ctx(2, 0, &[], 0).admissible(2, &[0]));
        assert!(!ctx(2, 0, &[], 1).admissible(2, &[0]));
        assert!(SigmaContext::new(2, 1, Partition::empty(), 0).is_err());
        assert!(SigmaContext::new(2, 0, Partition::single(2), 0).is_err());
    }

    #[test]
    fn m_integrality_matches_admissibility() {
        for n in 1..=4 {
            for ell in 0..=3 {
                for lambda in Partition::all(n - 1, 4) {
                    let sigmas = SigmaContext::admissible_sigmas(n, ell, &lambda);
                    let ctxs: Vec<SigmaContext> = sigmas
                        .iter()
                        .map(|&s| SigmaContext::new(n, ell, lambda.clone(), s).unwrap())
                        .collect();
                    if ctxs.is_empty() {
                        continue;
                    }
                    let d = (n - 1) as usize;
                    for l in -2..4 {
                        for nv in boxed(&vec![8; d]) {
                            let nv: IntVec = nv.iter().map(|x| x - 4).collect();
                            let integral = ctxs[0].m_system(l, &nv).1;
                            let any = ctxs.iter().any(|c| c.admissible(l, &nv));
                            assert_eq!(integral, any, "N={n} l={ell} {lambda} L={l} n={nv:?}");
                            if n % 2 == 1 {
                                // odd N: exactly one σ and it matches
                                assert_eq!(ctxs.len(), 1);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn delta_support_examples() {
        let pts = |c: &SigmaContext, l| {
            enumerate_delta_support(c, l)
                .into_iter()
                .map(|p| p.n)
                .collect::<Vec<_>>()
        };
        assert_eq!(pts(&ctx(1, 0, &[], 0), 2), vec![Vec::<i64>::new()]);
        // N even: the σ restriction splits the integral-m points between σ = 0, 1
        assert_eq!(pts(&ctx(2, 0, &[], 1), 1), vec![vec![0]]);
        assert_eq!(pts(&ctx(2, 0, &[], 0), 1), vec![vec![1]]);
        assert_eq!(pts(&ctx(2, 1, &[1], 1), 0), vec![vec![1]]);
        assert_eq!(pts(&ctx(2, 1, &[1], 0), 0), vec![vec![0]]);
    }

    #[test]
    fn delta_support_is_deterministic() {
        let c = ctx(3, 1, &[2], 1);
        assert_eq!(
            enumerate_delta_support(&c, 3),
            enumerate_delta_support(&c, 3)
        );
    }

    #[test]
    fn gamma_support_k0_has_i_zero_and_examples() {
        let c = ctx(2, 0, &[], 0);
        let pts = enumerate_gamma_support(&c, 1, 0, 0, r(10, 1), BinomialKind::Primed).unwrap();
        assert!(pts.iter().all(|p| p.i == vec![0]));
        let mut etas: Vec<IntVec> = pts.iter().map(|p| p.eta.clone()).collect();
        assert!(etas.contains(&vec![0]));
        let other = ctx(2, 0, &[], 1);
        let pts1 =
            enumerate_gamma_support(&other, 1, 0, 0, r(10, 1), BinomialKind::Primed).unwrap();
        etas.extend(pts1.iter().map(|p| p.eta.clone()));
        assert!(etas.contains(&vec![1]));
        for p in &pts {
            let exact = primed_term_exponent(&c, &p.eta, &p.mu).unwrap();
            assert!(exact < r(10, 1));
        }
        let un = enumerate_gamma_support(&c, 1, 0, 0, r(10, 1), BinomialKind::Unprimed).unwrap();
        assert!(un.iter().all(|p| p.eta.iter().all(|&h| h >= 0)));
    }

    #[test]
    fn nonnegativity_argument_for_k0() {
        // k = 0, M >= L: μ >= 0 implies μ + η >= 0
        for n in 2..=4 {
            for ell in 0..=2 {
                for lambda in Partition::all(n - 1, 3) {
                    for sigma in SigmaContext::admissible_sigmas(n, ell, &lambda) {
                        let c = SigmaContext::new(n, ell, lambda.clone(), sigma).unwrap();
                        let d = (n - 1) as usize;
                        for m in 0..4 {
                            for l in 0..=m {
                                for eta in boxed(&vec![10; d]) {
                                    let eta: IntVec = eta.iter().map(|x| x - 5).collect();
                                    let mu = c.mu_system(m, l, 0, &vec![0; d], &eta);
                                    if mu
                                        .iter()
                                        .all(|x| x.is_integer() && *x >= Rational64::zero())
                                    {
                                        for (x, h) in mu.iter().zip(&eta) {
                                            assert!(
                                                *x + Rational64::from_integer(*h)
                                                    >= Rational64::zero()
                                            );
                                        }
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
    fn gamma_support_matches_brute_force_scan() {
        // every term below the bound found by a wide brute-force η scan is
        // returned by the certified enumeration
        for (n, ell, lambda, sigma) in [
            (2, 0, vec![], 0),
            (3, 0, vec![], 0),
            (3, 1, vec![1], 0),
            (3, 0, vec![1, 1], 0),
        ] {
            let c = ctx(n, ell, &lambda, sigma);
            let d = (n - 1) as usize;
            for (m, l, k) in [(2, 0, 1), (3, 1, 2), (3, 0, 3)] {
                let bound = r(12, 1);
                let got =
                    enumerate_gamma_support(&c, m, l, k, bound, BinomialKind::Primed).unwrap();
                let mut brute = 0;
                for i in compositions(k, d) {
                    let mut e1 = c.cartan().unit(1);
                    e1.iter_mut().for_each(|x| *x *= 2 * l + ell);
                    let sh: IntVec = i.iter().zip(&e1).map(|(a, b)| a + b).collect();
                    let off = Rational64::new(-c.cartan().scaled_bilinear(&i, &sh), n)
                        + Rational64::from_integer(-multinomial_degree(k, &i));
                    for eta in boxed(&vec![60; d]) {
                        let eta: IntVec = eta.iter().map(|x| x - 40).collect();
                        let mu = c.mu_system(m, l, k, &i, &eta);
                        if !mu
                            .iter()
                            .all(|x| x.is_integer() && *x >= Rational64::zero())
                        {
                            continue;
                        }
                        let mu: IntVec = mu.iter().map(|x| x.to_integer()).collect();
                        let tot: IntVec = eta.iter().zip(&i).map(|(a, b)| a + b).collect();
                        if !c.admissible(l, &tot) {
                            continue;
                        }
                        if let Some(e) = primed_term_exponent(&c, &eta, &mu) {
                            if e + off < bound {
                                brute += 1;
                                assert!(
                                    got.iter().any(|p| p.eta == eta && p.i == i),
                                    "missing {eta:?} {i:?}"
                                );
                            }
                        }
                    }
                }
                assert_eq!(brute, got.len());
            }
        }
    }

    #[test]
    fn eta_nonneg_enumeration_is_complete() {
        let c = ctx(3, 0, &[1, 1], 0);
        let bound = r(9, 1);
        let got = enumerate_eta_nonneg(&c, 2, bound).unwrap();
        let mut count = 0;
        for eta in boxed(&[30, 30]) {
            if c.admissible(2, &eta) && c.cartan().quad_form(&eta, c.e_lambda()) < bound {
                count += 1;
            }
        }
        assert_eq!(count, got.len());
    }

    #[test]
    fn partitions_and_serde() {
        let all = Partition::all(2, 3);
        assert_eq!(all.len(), 6);
        let p = Partition::new(vec![1, 2]).unwrap();
        assert_eq!(p.parts(), &[2, 1]);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[2,1]");
        let q: Partition = serde_json::from_str("[1,2]").unwrap();
        assert_eq!(p, q);
        assert!(serde_json::from_str::<Partition>("[0]").is_err());
        assert_eq!(p.e_lambda(&CartanData::new(3)), vec![1, 1]);
        assert_eq!(p.e_lambda(&CartanData::new(2)), vec![1]);
    }
}

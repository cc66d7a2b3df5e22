//! Statements, dimension counts, the closed-form sequences and tangent
//! column blocks.

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::{FieldMatrix, FieldModulus};
use crate::monomials::{self, dim_sd, dim_sd_signed, product_of_forms, rank_without, BlockSpec};

/// Largest supported degree.
pub const MAX_DEGREE: usize = 6;

/// The claim `T(n, s; a1, a2, a3)` in degree `d` with block width `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Statement {
    n: usize,
    d: usize,
    s: usize,
    a: [usize; 3],
    b: usize,
}

impl Statement {
    pub fn new(n: usize, d: usize, s: usize, a: [usize; 3], b: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidStatement("n must be at least 1".into()));
        }
        if !(2..=MAX_DEGREE).contains(&d) {
            return Err(Error::InvalidStatement(format!("degree {d} outside 2..={MAX_DEGREE}")));
        }
        if s == 0 && a.iter().all(|&x| x == 0) {
            return Err(Error::InvalidStatement("statement has no points".into()));
        }
        if b == 0 {
            return Err(Error::InvalidStatement("block width must be positive".into()));
        }
        for (l, &al) in a.iter().enumerate() {
            if al == 0 {
                continue;
            }
            if d != 3 {
                return Err(Error::InvalidStatement("constrained points require d = 3".into()));
            }
            BlockSpec::new(b, l + 1, n).map_err(|e| Error::InvalidStatement(e.to_string()))?;
            // A tangent line needs at least a projective line to live in.
            if n + 1 - b < 2 {
                return Err(Error::InvalidStatement(format!(
                    "U_{} has {} coordinates; constrained points need at least 2",
                    l + 1,
                    n + 1 - b
                )));
            }
        }
        Ok(Statement { n, d, s, a, b })
    }

    /// Cubic statement with the default block width.
    pub fn cubic(n: usize, s: usize, a: [usize; 3]) -> Result<Self> {
        Self::new(n, 3, s, a, BlockSpec::DEFAULT_WIDTH)
    }

    /// `s` generic points in degree `d`, with no constrained points.
    pub fn secant(n: usize, d: usize, s: usize) -> Result<Self> {
        Self::new(n, d, s, [0; 3], BlockSpec::DEFAULT_WIDTH)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn a(&self) -> [usize; 3] {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    /// Number of nonzero `a_l`.
    pub fn k(&self) -> usize {
        self.a.iter().filter(|&&x| x > 0).count()
    }

    /// Block ids (1-based) that carry constrained points.
    pub fn active_blocks(&self) -> Vec<usize> {
        (1..=3).filter(|&l| self.a[l - 1] > 0).collect()
    }

    pub fn total_points(&self) -> usize {
        self.s + self.a.iter().sum::<usize>()
    }

    /// True for plain secant statements `T(n, d; s)`.
    pub fn is_unconstrained(&self) -> bool {
        self.a == [0; 3]
    }

    /// Dimension of the sum of the `S_3(U_l)` over active blocks.
    pub fn base_dim(&self) -> usize {
        monomials::union_dim(self.n, self.k(), self.b).expect("validated statement")
    }

    /// Total column count of the tangent matrix.
    pub fn column_count(&self) -> usize {
        2 * (self.n + 1) * self.s + 2 * self.b * self.a.iter().sum::<usize>()
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T({}, {}; {}, {}, {})", self.n, self.s, self.a[0], self.a[1], self.a[2])?;
        if self.d != 3 {
            write!(f, " [d={}]", self.d)?;
        }
        if self.b != BlockSpec::DEFAULT_WIDTH && !self.is_unconstrained() {
            write!(f, " [b={}]", self.b)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AbundanceClass {
    Subabundant,
    Superabundant,
    Equiabundant,
}

impl fmt::Display for AbundanceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AbundanceClass::Subabundant => "SUBABUNDANT",
            AbundanceClass::Superabundant => "SUPERABUNDANT",
            AbundanceClass::Equiabundant => "EQUIABUNDANT",
        })
    }
}

/// Affine expected dimension `min((2n+1)s, N(n,d))`.
pub fn expected_dim_secant(n: usize, d: usize, s: usize) -> usize {
    ((2 * n + 1) * s).min(dim_sd(n, d))
}

/// First entry of the minimum defining `w`: base dimension plus every
/// tangent contribution.
pub fn w_first_term(n: usize, d: usize, s: usize, a: [usize; 3], b: usize) -> i64 {
    let k = a.iter().filter(|&&x| x > 0).count();
    let mut base: i64 = 0;
    for j in 1..=k {
        let term = monomials::binomial(k as u64, j as u64) as i64 * dim_sd_signed(n as i64 - (b * j) as i64, d) as i64;
        base += if j % 2 == 1 { term } else { -term };
    }
    base + (2 * b * a.iter().sum::<usize>()) as i64 + ((2 * n + 1) * s) as i64
}

/// `w(n, s; a1, a2, a3)` for raw parameters. The empty configuration gives 0.
pub fn w_formula(n: usize, d: usize, s: usize, a: [usize; 3], b: usize) -> usize {
    (w_first_term(n, d, s, a, b) as usize).min(dim_sd(n, d))
}

pub fn expected_dim_w(st: &Statement) -> usize {
    w_formula(st.n, st.d, st.s, st.a, st.b)
}

pub fn classify(st: &Statement) -> AbundanceClass {
    let first = w_first_term(st.n, st.d, st.s, st.a, st.b);
    let cap = dim_sd(st.n, st.d) as i64;
    match first.cmp(&cap) {
        std::cmp::Ordering::Less => AbundanceClass::Subabundant,
        std::cmp::Ordering::Greater => AbundanceClass::Superabundant,
        std::cmp::Ordering::Equal => AbundanceClass::Equiabundant,
    }
}

fn require(what: &'static str, n: usize, min: usize) -> Result<()> {
    if n < min {
        Err(Error::FormulaDomain { what, n, min })
    } else {
        Ok(())
    }
}

/// `s1(n) = 48k^2 + (11 + 4r)k + floor((4r^2 + 22r + 33) / 48)` with `n = 24k + r`.
pub fn s1(n: usize) -> Result<usize> {
    require("s1", n, 8)?;
    let (k, r) = (n / 24, n % 24);
    Ok(48 * k * k + (11 + 4 * r) * k + (4 * r * r + 22 * r + 33) / 48)
}

pub fn s2(n: usize) -> Result<usize> {
    require("s2", n, 8)?;
    Ok(s1(n)? + 1)
}

/// `s_i(n)` for `i` in `{1, 2}`.
pub fn s_i(i: u8, n: usize) -> Result<usize> {
    match i {
        1 => s1(n),
        2 => s2(n),
        _ => Err(Error::InvalidArgument(format!("index i must be 1 or 2, got {i}"))),
    }
}

/// `t(n) = s_i(n) - s_i(n - 24) = 4n - 37`.
pub fn t(n: usize) -> Result<usize> {
    require("t", n, 32)?;
    Ok(4 * n - 37)
}

/// `c(n) = (4r^2 + 22r + 33) mod 48` with `r = n mod 24`.
pub fn c(n: usize) -> Result<usize> {
    require("c", n, 32)?;
    let r = n % 24;
    Ok((4 * r * r + 22 * r + 33) % 48)
}

/// The defective cases: `d = 2` with `2 <= 2s < n`, and `d = 3` with `s = n` in `{2, 3, 4}`.
pub fn known_exception(n: usize, d: usize, s: usize) -> bool {
    match d {
        2 => 2 <= 2 * s && 2 * s < n,
        3 => s == n && (2..=4).contains(&n),
        _ => false,
    }
}

/// Generic `(d-1, 1)` Chow-Waring rank.
pub fn generic_chow_waring_rank_d_minus_1_1(n: usize, d: usize) -> usize {
    let s = dim_sd(n, d).div_ceil(2 * n + 1);
    if known_exception(n, d, s) {
        if d == 2 {
            1 + n / 2
        } else {
            s + 1
        }
    } else {
        s
    }
}

/// Coefficient vector of a linear form in `x_0, ..., x_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinearForm(Vec<u32>);

impl LinearForm {
    pub fn new(coeffs: Vec<u32>, modulus: FieldModulus) -> Result<Self> {
        if let Some(&bad) = coeffs.iter().find(|&&c| c >= modulus.get()) {
            return Err(Error::InvalidArgument(format!("coefficient {bad} not reduced mod {modulus}")));
        }
        Ok(LinearForm(coeffs))
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

/// Whether `l` and `m` are linearly dependent (including either being zero).
pub fn proportional(l: &[u32], m: &[u32], modulus: FieldModulus) -> bool {
    let Some(i) = l.iter().position(|&x| x != 0) else {
        return true;
    };
    if m.iter().all(|&x| x == 0) {
        return true;
    }
    (0..l.len()).all(|j| modulus.mul(l[i], m[j]) == modulus.mul(l[j], m[i]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PointConstraint {
    Free,
    /// Lies in `U_l`, the coordinate subspace with block `l` removed.
    Block(usize),
}

impl PointConstraint {
    /// 0 for free points, otherwise the block id.
    pub fn code(&self) -> usize {
        match self {
            PointConstraint::Free => 0,
            PointConstraint::Block(l) => *l,
        }
    }

    pub fn from_code(code: usize) -> Result<Self> {
        match code {
            0 => Ok(PointConstraint::Free),
            1..=3 => Ok(PointConstraint::Block(code)),
            _ => Err(Error::InvalidBlock(format!("block code {code}"))),
        }
    }
}

/// A point `[l^{d-1} m]` of the tangential variety, with its constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentPoint {
    l: LinearForm,
    m: LinearForm,
    constraint: PointConstraint,
}

impl TangentPoint {
    /// Validates lengths, block zeros and non-degeneracy.
    pub fn new(l: LinearForm, m: LinearForm, constraint: PointConstraint, n: usize, b: usize, modulus: FieldModulus) -> Result<Self> {
        if l.len() != n + 1 || m.len() != n + 1 {
            return Err(Error::DimensionMismatch(format!(
                "point vectors of length {} and {}, expected {}",
                l.len(),
                m.len(),
                n + 1
            )));
        }
        if let PointConstraint::Block(id) = constraint {
            let range = BlockSpec::new(b, id, n)?.range();
            if range.clone().any(|t| l.0[t] != 0 || m.0[t] != 0) {
                return Err(Error::InconsistentPoints(format!("point in U_{id} has nonzero coordinates on block {id}")));
            }
        }
        if proportional(&l.0, &m.0, modulus) {
            return Err(Error::DegeneratePoint);
        }
        Ok(TangentPoint { l, m, constraint })
    }

    pub fn l(&self) -> &LinearForm {
        &self.l
    }

    pub fn m(&self) -> &LinearForm {
        &self.m
    }

    pub fn constraint(&self) -> PointConstraint {
        self.constraint
    }

    /// Variable indices `t` whose columns this point contributes.
    pub fn column_range(&self, n: usize, b: usize) -> Range<usize> {
        match self.constraint {
            PointConstraint::Free => 0..n + 1,
            PointConstraint::Block(id) => b * (id - 1)..b * id,
        }
    }

    pub fn factors(&self, n: usize, d: usize, b: usize, modulus: FieldModulus) -> TangentFactors {
        let l = self.l.coeffs();
        let lpow: Vec<&[u32]> = vec![l; d - 1];
        let q1 = product_of_forms(&lpow, n, modulus);
        let mut mixed = lpow;
        mixed[d - 2] = self.m.coeffs();
        let q2 = product_of_forms(&mixed, n, modulus);
        TangentFactors {
            q1,
            q2,
            cols: self.column_range(n, b),
        }
    }
}

/// Precomputed `l^{d-1}` and `l^{d-2} m` for one point.
///
/// Column `t` of the first half is `nu(l^{d-1} x_t)` and of the second half
/// `nu(l^{d-2} m x_t)`; the entry at a monomial `mu` divisible by `x_t` is
/// the coefficient of `mu / x_t` in the factor.
#[derive(Clone, Debug)]
pub struct TangentFactors {
    q1: Vec<u32>,
    q2: Vec<u32>,
    cols: Range<usize>,
}

impl TangentFactors {
    pub fn width(&self) -> usize {
        2 * self.cols.len()
    }

    /// Writes this point's entries of row `mu` into `out` (length `width()`,
    /// zero on entry).
    #[inline]
    pub fn write_row(&self, mu: &[usize], n: usize, out: &mut [u32], buf: &mut Vec<usize>) {
        let half = self.cols.len();
        let mut k = 0;
        while k < mu.len() {
            let u = mu[k];
            if self.cols.contains(&u) {
                let z = rank_without(mu, k, n, buf);
                out[u - self.cols.start] = self.q1[z];
                out[half + u - self.cols.start] = self.q2[z];
            }
            while k < mu.len() && mu[k] == u {
                k += 1;
            }
        }
    }
}

/// The full `N(n, d) x width` column block of one point.
pub fn tangent_columns(pt: &TangentPoint, n: usize, d: usize, b: usize, modulus: FieldModulus) -> Result<FieldMatrix> {
    if !(2..=MAX_DEGREE).contains(&d) {
        return Err(Error::InvalidArgument(format!("degree {d} outside 2..={MAX_DEGREE}")));
    }
    if pt.l.len() != n + 1 {
        return Err(Error::DimensionMismatch(format!("point of length {} for n = {n}", pt.l.len())));
    }
    if proportional(pt.l.coeffs(), pt.m.coeffs(), modulus) {
        return Err(Error::DegeneratePoint);
    }
    let f = pt.factors(n, d, b, modulus);
    let w = f.width();
    let rows = dim_sd(n, d);
    let mut data = vec![0u32; rows * w];
    let mut buf = Vec::with_capacity(d);
    for (z, mu) in monomials::monomials(n, d).enumerate() {
        f.write_row(&mu, n, &mut data[z * w..(z + 1) * w], &mut buf);
    }
    FieldMatrix::from_vec(rows, w, modulus, data)
}

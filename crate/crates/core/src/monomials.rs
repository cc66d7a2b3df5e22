//! Degree-`d` monomials in `x_0, ..., x_n`, their lex positions, products
//! of linear forms in that basis, and the coordinate-block row sets.
//!
//! A monomial `x_{i_1} ... x_{i_d}` is stored as its nondecreasing index
//! tuple. Lex order on those tuples gives the sequence
//! `x_0^d, x_0^{d-1} x_1, ..., x_n^d`, and every position is 0-based.

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::FieldModulus;

/// Exact binomial coefficient; panics on overflow of `u64`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial overflow")
}

/// `N(n, d) = C(n + d, d)`, the dimension of `S_d` in `n + 1` variables.
pub fn dim_sd(n: usize, d: usize) -> usize {
    binomial((n + d) as u64, d as u64) as usize
}

/// `N(n, d)` with the convention `N(n, d) = 0` for `n < 0`.
pub fn dim_sd_signed(n: i64, d: usize) -> usize {
    if n < 0 {
        0
    } else {
        dim_sd(n as usize, d)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    indices: Vec<usize>,
}

impl Monomial {
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        let sorted = indices.windows(2).all(|w| w[0] <= w[1]);
        if indices.is_empty() || !sorted || indices.iter().any(|&i| i > n) {
            return Err(Error::InvalidMonomial { indices, n });
        }
        Ok(Monomial { indices })
    }

    pub fn degree(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// True when no variable index falls in `range`.
    pub fn avoids(&self, range: &Range<usize>) -> bool {
        self.indices.iter().all(|i| !range.contains(i))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut k = 0;
        while k < self.indices.len() {
            let v = self.indices[k];
            let e = self.indices[k..].iter().take_while(|&&x| x == v).count();
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{v}")?;
            } else {
                write!(f, "x{v}^{e}")?;
            }
            k += e;
        }
        Ok(())
    }
}

/// Position of a monomial in the lex-ordered basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MonomialIndex(pub usize);

/// Lex position of a sorted index tuple, without validation.
///
/// Tuples starting with `t < i_1` number `C(n - t + d - 1, d - 1)` each,
/// and the telescoped sum over `t` collapses to two binomials per position.
#[inline]
pub fn lex_rank(idx: &[usize], n: usize) -> usize {
    let d = idx.len();
    let mut z = 0u64;
    let mut lo = 0usize;
    for (pos, &i) in idx.iter().enumerate() {
        let e = (d - pos) as u64;
        if i > lo {
            z += binomial((n - lo) as u64 + e, e) - binomial((n - i) as u64 + e, e);
        }
        lo = i;
    }
    z as usize
}

pub fn index_of(m: &Monomial, n: usize) -> Result<MonomialIndex> {
    if m.indices.iter().any(|&i| i > n) {
        return Err(Error::InvalidMonomial {
            indices: m.indices.clone(),
            n,
        });
    }
    Ok(MonomialIndex(lex_rank(&m.indices, n)))
}

pub fn monomial_of(z: MonomialIndex, n: usize, d: usize) -> Result<Monomial> {
    let count = dim_sd(n, d);
    if d == 0 || z.0 >= count {
        return Err(Error::IndexOutOfRange { z: z.0, n, d, count });
    }
    let mut rest = z.0 as u64;
    let mut indices = Vec::with_capacity(d);
    let mut t = 0usize;
    for pos in 0..d {
        let e = (d - pos - 1) as u64;
        loop {
            let block = binomial((n - t) as u64 + e, e);
            if rest < block {
                break;
            }
            rest -= block;
            t += 1;
        }
        indices.push(t);
    }
    Ok(Monomial { indices })
}

/// All degree-`d` index tuples over `0..=n`, in lex order.
pub fn monomials(n: usize, d: usize) -> MonomialIter {
    MonomialIter {
        n,
        current: if d == 0 { None } else { Some(vec![0; d]) },
    }
}

pub struct MonomialIter {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for MonomialIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().unwrap();
        match cur.iter().rposition(|&i| i < self.n) {
            Some(p) => {
                let v = cur[p] + 1;
                cur[p..].fill(v);
            }
            None => self.current = None,
        }
        Some(out)
    }
}

/// Lex position of `mu / x_{mu[pos]}`, the monomial with one occurrence removed.
#[inline]
pub(crate) fn rank_without(mu: &[usize], pos: usize, n: usize, buf: &mut Vec<usize>) -> usize {
    buf.clear();
    buf.extend_from_slice(&mu[..pos]);
    buf.extend_from_slice(&mu[pos + 1..]);
    lex_rank(buf, n)
}

/// Multiplies a degree-`e` form by a linear form.
///
/// The coefficient of `mu` in the product is the sum, over the distinct
/// variables `x_u` dividing `mu`, of `coef(mu / x_u) * form[u]`.
pub fn multiply_linear(poly: &[u32], e: usize, form: &[u32], n: usize, m: FieldModulus) -> Vec<u32> {
    debug_assert_eq!(poly.len(), dim_sd(n, e));
    debug_assert_eq!(form.len(), n + 1);
    if e == 0 {
        return form.iter().map(|&f| m.mul(f, poly[0])).collect();
    }
    let p = m.get() as u64;
    let mut out = Vec::with_capacity(dim_sd(n, e + 1));
    let mut buf = Vec::with_capacity(e);
    for mu in monomials(n, e + 1) {
        let mut acc = 0u64;
        let mut k = 0;
        while k < mu.len() {
            let u = mu[k];
            let f = form[u] as u64;
            if f != 0 {
                let c = poly[rank_without(&mu, k, n, &mut buf)] as u64;
                acc = (acc + c * f) % p;
            }
            while k < mu.len() && mu[k] == u {
                k += 1;
            }
        }
        out.push(acc as u32);
    }
    out
}

/// Coefficients of a product of linear forms in the lex monomial basis.
///
/// The entry for `x_{i_1} ... x_{i_d}` is the sum over all distinct
/// assignments of the multiset `{i_1, ..., i_d}` to the forms of the
/// product of the assigned coefficients.
pub fn expand_product(forms: &[&[u32]], n: usize, m: FieldModulus) -> Result<Vec<u32>> {
    if !(2..=6).contains(&forms.len()) {
        return Err(Error::InvalidArgument(format!(
            "expand_product supports 2..=6 factors, got {}",
            forms.len()
        )));
    }
    if let Some(bad) = forms.iter().find(|f| f.len() != n + 1) {
        return Err(Error::DimensionMismatch(format!(
            "linear form has {} coefficients, expected {}",
            bad.len(),
            n + 1
        )));
    }
    Ok(product_of_forms(forms, n, m))
}

/// Product of any number of linear forms (the empty product is `1`).
pub fn product_of_forms(forms: &[&[u32]], n: usize, m: FieldModulus) -> Vec<u32> {
    let mut poly = vec![1 % m.get()];
    for (e, f) in forms.iter().enumerate() {
        poly = multiply_linear(&poly, e, f, n, m);
    }
    poly
}

/// Block `B_l = {b(l-1), ..., bl - 1}` of variable indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BlockSpec {
    width: usize,
    id: usize,
}

impl BlockSpec {
    pub const DEFAULT_WIDTH: usize = 24;

    /// Block `id` in `1..=3` must fit inside `0..=n`, i.e. `id * width <= n + 1`.
    pub fn new(width: usize, id: usize, n: usize) -> Result<Self> {
        if width == 0 || !(1..=3).contains(&id) {
            return Err(Error::InvalidBlock(format!("block {id} of width {width}")));
        }
        if id * width > n + 1 {
            return Err(Error::InvalidBlock(format!(
                "block {id} of width {width} needs {} variables, only {} available",
                id * width,
                n + 1
            )));
        }
        Ok(BlockSpec { width, id })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn range(&self) -> Range<usize> {
        self.width * (self.id - 1)..self.width * self.id
    }
}

/// Strictly increasing list of retained row indices.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RowIndexSet(Vec<usize>);

impl RowIndexSet {
    pub fn new(rows: Vec<usize>) -> Result<Self> {
        if rows.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("row indices must be strictly increasing".into()));
        }
        Ok(RowIndexSet(rows))
    }

    pub fn full(count: usize) -> Self {
        RowIndexSet((0..count).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, z: usize) -> bool {
        self.0.binary_search(&z).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }
}

fn touches(mu: &[usize], range: &Range<usize>) -> bool {
    mu.iter().any(|i| range.contains(i))
}

/// `Z_l`: positions of the cubic monomials using no variable of `B_l`.
pub fn z_set(n: usize, block: BlockSpec) -> Result<RowIndexSet> {
    let block = BlockSpec::new(block.width, block.id, n)?;
    let range = block.range();
    let rows = monomials(n, 3)
        .enumerate()
        .filter(|(_, mu)| !touches(mu, &range))
        .map(|(z, _)| z)
        .collect();
    Ok(RowIndexSet(rows))
}

/// `Y`: complement of the union of `Z_l` over the active blocks, i.e. the
/// cubic monomials meeting every active block.
pub fn y_set(n: usize, active_blocks: &[usize], b: usize) -> Result<RowIndexSet> {
    y_set_degree(n, 3, active_blocks, b)
}

pub(crate) fn y_set_degree(n: usize, d: usize, active_blocks: &[usize], b: usize) -> Result<RowIndexSet> {
    let ranges = active_blocks
        .iter()
        .map(|&l| BlockSpec::new(b, l, n).map(|bs| bs.range()))
        .collect::<Result<Vec<_>>>()?;
    if ranges.is_empty() {
        return Ok(RowIndexSet::full(dim_sd(n, d)));
    }
    let rows = monomials(n, d)
        .enumerate()
        .filter(|(_, mu)| ranges.iter().all(|r| touches(mu, r)))
        .map(|(z, _)| z)
        .collect();
    Ok(RowIndexSet(rows))
}

/// `dim sum_{j<=k} S_3(U_j) = sum_j (-1)^{j-1} C(k, j) N(n - bj)` by
/// inclusion-exclusion over the coordinate subspaces.
pub fn union_dim(n: usize, k: usize, b: usize) -> Result<usize> {
    if k > 3 || k * b > n + 1 {
        return Err(Error::InvalidBlock(format!("{k} blocks of width {b} do not fit in n = {n}")));
    }
    let mut total: i64 = 0;
    for j in 1..=k {
        let term = binomial(k as u64, j as u64) as i64 * dim_sd_signed(n as i64 - (b * j) as i64, 3) as i64;
        total += if j % 2 == 1 { term } else { -term };
    }
    Ok(total as usize)
}

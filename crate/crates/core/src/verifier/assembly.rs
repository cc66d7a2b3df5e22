use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ffield::{FieldMatrix, FieldModulus};
use crate::geometry::{Statement, TangentFactors, TangentPoint};
use crate::monomials::{self, dim_sd, BlockSpec, RowIndexSet};

use super::sampling::point_layout;

/// Default entry ceiling for [`build_t_basic`].
pub const DEFAULT_BASIC_LIMIT: usize = 100_000_000;

/// Checks that `points` matches the layout of `st` exactly.
pub fn check_points(st: &Statement, points: &[TangentPoint]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::InconsistentPoints("no points".into()));
    }
    let layout = point_layout(st);
    if layout.len() != points.len() {
        return Err(Error::InconsistentPoints(format!(
            "{} points for a statement with {}",
            points.len(),
            layout.len()
        )));
    }
    for (k, (pt, want)) in points.iter().zip(&layout).enumerate() {
        if pt.constraint() != *want {
            return Err(Error::InconsistentPoints(format!("point {k} has constraint {:?}, expected {want:?}", pt.constraint())));
        }
        if pt.l().len() != st.n() + 1 || pt.m().len() != st.n() + 1 {
            return Err(Error::InconsistentPoints(format!("point {k} has the wrong length")));
        }
    }
    Ok(())
}

/// Assembles the tangent columns of all points on the listed rows only.
pub fn build_r_rows(st: &Statement, points: &[TangentPoint], rows: &RowIndexSet, modulus: FieldModulus) -> Result<FieldMatrix> {
    check_points(st, points)?;
    let (n, d, b) = (st.n(), st.d(), st.b());
    let factors: Vec<TangentFactors> = points.par_iter().map(|p| p.factors(n, d, b, modulus)).collect();
    let mut offsets = Vec::with_capacity(factors.len());
    let mut cols = 0;
    for f in &factors {
        offsets.push(cols);
        cols += f.width();
    }
    debug_assert_eq!(cols, st.column_count());

    let mut monos = Vec::with_capacity(rows.len() * d);
    let mut want = rows.iter().peekable();
    for (z, mu) in monomials::monomials(n, d).enumerate() {
        match want.peek() {
            Some(&w) if w == z => {
                monos.extend_from_slice(&mu);
                want.next();
            }
            Some(_) => {}
            None => break,
        }
    }
    if want.peek().is_some() {
        return Err(Error::DimensionMismatch(format!("row index beyond N({n}, {d})")));
    }

    let mut data = vec![0u32; rows.len() * cols];
    if cols > 0 {
        data.par_chunks_mut(cols).zip(monos.par_chunks(d)).for_each_init(
            || Vec::with_capacity(d),
            |buf, (row, mu)| {
                for (f, &off) in factors.iter().zip(&offsets) {
                    f.write_row(mu, n, &mut row[off..off + f.width()], buf);
                }
            },
        );
    }
    FieldMatrix::from_vec(rows.len(), cols, modulus, data)
}

/// `R`: all `N(n, d)` rows.
pub fn build_r(st: &Statement, points: &[TangentPoint], modulus: FieldModulus) -> Result<FieldMatrix> {
    build_r_rows(st, points, &RowIndexSet::full(dim_sd(st.n(), st.d())), modulus)
}

/// Rows meeting every active block, the only rows that matter once the
/// spaces `S_3(U_l)` are accounted for by `base_dim`.
pub fn y_rows(st: &Statement) -> Result<RowIndexSet> {
    monomials::y_set_degree(st.n(), st.d(), &st.active_blocks(), st.b())
}

/// `R(Y)`: `R` restricted to the rows of `Y` during assembly.
pub fn build_r_y(st: &Statement, points: &[TangentPoint], modulus: FieldModulus) -> Result<FieldMatrix> {
    build_r_rows(st, points, &y_rows(st)?, modulus)
}

/// Unoptimized variant: `R` followed by one unit column per monomial of
/// each active `S_3(U_l)`.
pub fn build_t_basic(st: &Statement, points: &[TangentPoint], modulus: FieldModulus, limit: usize) -> Result<FieldMatrix> {
    let rows = dim_sd(st.n(), st.d());
    let mut extra = Vec::new();
    for l in st.active_blocks() {
        let z = monomials::z_set(st.n(), BlockSpec::new(st.b(), l, st.n())?)?;
        extra.extend(z.iter());
    }
    let cols = st.column_count() + extra.len();
    if rows * cols > limit {
        return Err(Error::MatrixSizeLimit { rows, cols, limit });
    }
    let r = build_r(st, points, modulus)?;
    let mut f = FieldMatrix::zeros(rows, extra.len(), modulus);
    for (j, &z) in extra.iter().enumerate() {
        f.set(z, j, 1);
    }
    r.hcat(&f)
}

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};
use crate::ffield::FieldModulus;
use crate::geometry::{proportional, LinearForm, PointConstraint, Statement, TangentPoint};
use crate::monomials::BlockSpec;

/// Draws allowed per point before sampling gives up.
pub const MAX_SAMPLE_ATTEMPTS: usize = 64;

/// Constraint of every point in canonical order: free points, then the
/// points of blocks 1, 2 and 3.
pub fn point_layout(st: &Statement) -> Vec<PointConstraint> {
    let mut out = vec![PointConstraint::Free; st.s()];
    for (l, &al) in st.a().iter().enumerate() {
        out.extend(std::iter::repeat_n(PointConstraint::Block(l + 1), al));
    }
    out
}

/// Samples the points of `st` from a xoshiro256++ stream seeded through
/// SplitMix64. Coefficients are uniform in `[0, p)`; coordinates on a
/// point's own block are fixed at zero and consume no draws.
pub fn sample_points(st: &Statement, seed: u64, modulus: FieldModulus) -> Result<Vec<TangentPoint>> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let n = st.n();
    let p = modulus.get();
    let layout = point_layout(st);
    let mut points = Vec::with_capacity(layout.len());
    for (idx, constraint) in layout.into_iter().enumerate() {
        let hole = match constraint {
            PointConstraint::Free => 0..0,
            PointConstraint::Block(id) => BlockSpec::new(st.b(), id, n)?.range(),
        };
        let draw = |rng: &mut Xoshiro256PlusPlus| -> Vec<u32> {
            (0..=n).map(|t| if hole.contains(&t) { 0 } else { rng.gen_range(0..p) }).collect()
        };
        let mut accepted = None;
        for _ in 0..MAX_SAMPLE_ATTEMPTS {
            let l = draw(&mut rng);
            let m = draw(&mut rng);
            if !proportional(&l, &m, modulus) {
                accepted = Some((l, m));
                break;
            }
        }
        let (l, m) = accepted.ok_or(Error::SamplingFailed(idx))?;
        points.push(TangentPoint::new(
            LinearForm::new(l, modulus)?,
            LinearForm::new(m, modulus)?,
            constraint,
            n,
            st.b(),
            modulus,
        )?);
    }
    Ok(points)
}

//! Rank of dense matrices over `Z_p`.
//!
//! Two kernels share the same pivot rule (first nonzero entry of the
//! leftmost remaining column, scanning rows top to bottom):
//!
//! * an unblocked row-echelon reduction in `u64` arithmetic, used for small
//!   inputs and for primes too large for exact `f64` accumulation;
//! * a blocked right-looking elimination. A panel of columns is factored
//!   recursively (halves, with `dgemm` updates between them), then the
//!   trailing block is updated with one `dgemm`.
//!   Residues are exact integers in `f64`, and a panel is never wider than
//!   the number of products `(p-1)^2` that fit below `2^53`, so every
//!   accumulation is exact and is reduced once per panel.
//!
//! The trailing update is split into row stripes processed with rayon. All
//! arithmetic is exact, so the rank does not depend on the thread count.

use rayon::prelude::*;

use super::matrix::FieldMatrix;
use super::modulus::FieldModulus;

/// Widest panel used by the blocked kernel.
pub const MAX_PANEL: usize = 512;
/// Minimum `min(rows, cols)` before the blocked kernel is used.
const BLOCKED_THRESHOLD: usize = 64;
/// Narrowest panel worth blocking for; below this the unblocked kernel runs.
const MIN_PANEL: usize = 8;
/// Rows per trailing-update stripe.
const STRIPE_ROWS: usize = 192;

pub fn rank_mod_p(m: &FieldMatrix) -> usize {
    rank_mod_p_owned(m.clone())
}

pub fn rank_mod_p_owned(m: FieldMatrix) -> usize {
    let (rows, cols) = m.shape();
    let modulus = m.modulus();
    let mut data = m.into_data();
    let panel = MAX_PANEL.min(exact_depth(modulus.get()));
    if panel >= MIN_PANEL && rows.min(cols) >= BLOCKED_THRESHOLD {
        rank_blocked(&mut data, rows, cols, modulus, panel)
    } else {
        rank_unblocked(&mut data, rows, cols, modulus)
    }
}

/// Number of products of two residues that can be added to one residue
/// while staying exactly representable in `f64` (with room for reduction).
pub(crate) fn exact_depth(p: u32) -> usize {
    let p = p as u128;
    let sq = (p - 1) * (p - 1);
    let limit = (1u128 << 53) - 2 * p;
    if sq == 0 {
        return usize::MAX;
    }
    (limit / sq).min(usize::MAX as u128) as usize
}

fn swap_rows<T>(data: &mut [T], cols: usize, a: usize, b: usize) {
    if a == b {
        return;
    }
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let (head, tail) = data.split_at_mut(hi * cols);
    head[lo * cols..(lo + 1) * cols].swap_with_slice(&mut tail[..cols]);
}

/// Plain row-echelon reduction with immediate reduction after every product.
pub(crate) fn rank_unblocked(data: &mut [u32], rows: usize, cols: usize, m: FieldModulus) -> usize {
    let p = m.get() as u64;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| data[i * cols + c] != 0) else {
            continue;
        };
        swap_rows(data, cols, piv, r);
        let inv = m.inv(data[r * cols + c]).expect("pivot is nonzero") as u64;
        let (top, bottom) = data.split_at_mut((r + 1) * cols);
        let prow = &top[r * cols + c..(r + 1) * cols];
        for row in bottom.chunks_mut(cols) {
            let x = row[c] as u64;
            if x == 0 {
                continue;
            }
            let f = p - (x * inv) % p;
            for (dst, &src) in row[c..].iter_mut().zip(prow) {
                *dst = ((*dst as u64 + f * src as u64) % p) as u32;
            }
        }
        r += 1;
    }
    r
}

#[derive(Clone, Copy)]
struct Reducer {
    p: f64,
    pinv: f64,
}

impl Reducer {
    fn new(p: u32) -> Self {
        Reducer {
            p: p as f64,
            pinv: 1.0 / p as f64,
        }
    }

    /// `v mod p` for an exact nonnegative integer `v < 2^53 - 2p`.
    ///
    /// The quotient is rounded to nearest by adding and subtracting
    /// `1.5 * 2^52`, which stays branch-free and vectorizes without SSE4.1.
    /// Then `q * p <= v + p` is exact and one correction step suffices.
    #[inline(always)]
    fn reduce(self, v: f64) -> f64 {
        const ROUND: f64 = 6_755_399_441_055_744.0;
        let q = (v * self.pinv + ROUND) - ROUND;
        let mut r = v - q * self.p;
        if r < 0.0 {
            r += self.p;
        }
        if r >= self.p {
            r -= self.p;
        }
        r
    }
}

/// Panels at most this wide are factored by plain elimination.
const BASE_PANEL: usize = 32;
/// Row block of the blocked triangular solve.
const TRSM_BLOCK: usize = 64;

/// `c += a * b` for row-major `f64` operands with the given row strides.
///
/// # Safety
/// `a` must cover `m x k` with stride `lda`, `b` `k x n` with stride `ldb`
/// and `c` `m x n` with stride `ldc`, and `c` must not overlap `a` or `b`.
#[allow(clippy::too_many_arguments)]
unsafe fn gemm_acc(m: usize, k: usize, n: usize, a: *const f64, lda: usize, b: *const f64, ldb: usize, c: *mut f64, ldc: usize) {
    if m == 0 || k == 0 || n == 0 {
        return;
    }
    matrixmultiply::dgemm(m, k, n, 1.0, a, lda as isize, 1, b, ldb as isize, 1, 1.0, c, ldc as isize, 1);
}

/// Solves for the reduced pivot rows: row `t` of `u` becomes
/// `u[t] + sum_{t2 < t} l[t][t2] * u[t2]`, reduced. `l` holds negated
/// multipliers with stride `ls`; `u` is `q x width` with stride `us`.
fn trsm(l: &[f64], ls: usize, q: usize, u: &mut [f64], width: usize, us: usize, red: Reducer) {
    for b0 in (0..q).step_by(TRSM_BLOCK) {
        let b1 = (b0 + TRSM_BLOCK).min(q);
        let (done, rest) = u.split_at_mut(b0 * us);
        if b0 > 0 {
            // SAFETY: l covers rows b0..b1 and columns 0..b0; `done` holds
            // rows 0..b0 of u and `rest` rows b0.., disjoint slices.
            unsafe {
                gemm_acc(b1 - b0, b0, width, l[b0 * ls..].as_ptr(), ls, done.as_ptr(), us, rest.as_mut_ptr(), us);
            }
        }
        for t in b0..b1 {
            let (prev, cur) = rest.split_at_mut((t - b0) * us);
            let row = &mut cur[..width];
            for t2 in b0..t {
                let f = l[t * ls + t2];
                if f != 0.0 {
                    let src = &prev[(t2 - b0) * us..(t2 - b0) * us + width];
                    for (x, &s) in row.iter_mut().zip(src) {
                        *x += f * s;
                    }
                }
            }
            for x in row.iter_mut() {
                *x = red.reduce(*x);
            }
        }
    }
}

/// One panel of `active` rows and `w` columns in row-major `f64`.
struct Panel<'a> {
    pm: Vec<f64>,
    /// Negated multipliers: `lp[i * w + t]` for local row `i`, pivot `t`.
    lp: Vec<f64>,
    active: usize,
    w: usize,
    data: &'a mut [u32],
    cols: usize,
    r: usize,
    m: FieldModulus,
    red: Reducer,
}

impl Panel<'_> {
    fn swap(&mut self, a: usize, b: usize) {
        if a != b {
            swap_rows(&mut self.pm, self.w, a, b);
            swap_rows(&mut self.lp, self.w, a, b);
            swap_rows(self.data, self.cols, self.r + a, self.r + b);
        }
    }

    /// Eliminates columns `c0..c0 + cw` on local rows `r0..`. Every pivot
    /// found so far sits above `r0`, so pivot numbers equal local rows.
    /// Returns the number of new pivots.
    fn factor(&mut self, r0: usize, c0: usize, cw: usize) -> usize {
        if cw <= BASE_PANEL {
            let q = self.factor_base(r0, c0, cw);
            return q;
        }
        let h = cw / 2;
        let q1 = self.factor(r0, c0, h);
        let w = self.w;
        let (cr, rw) = (c0 + h, cw - h);
        if q1 > 0 {
            let red = self.red;
            let (top, bottom) = self.pm.split_at_mut((r0 + q1) * w);
            trsm(&self.lp[r0 * w + r0..], w, q1, &mut top[r0 * w + cr..], rw, w, red);
            let nb = self.active - r0 - q1;
            if nb > 0 {
                // SAFETY: lp rows r0+q1.. and columns r0..r0+q1, U in `top`,
                // C in `bottom`; all within bounds and C is disjoint from both.
                unsafe {
                    gemm_acc(
                        nb,
                        q1,
                        rw,
                        self.lp[(r0 + q1) * w + r0..].as_ptr(),
                        w,
                        top[r0 * w + cr..].as_ptr(),
                        w,
                        bottom[cr..].as_mut_ptr(),
                        w,
                    );
                }
                for row in bottom.chunks_mut(w) {
                    for x in &mut row[cr..cr + rw] {
                        *x = red.reduce(*x);
                    }
                }
            }
        }
        let q2 = if r0 + q1 < self.active { self.factor(r0 + q1, cr, rw) } else { 0 };
        q1 + q2
    }

    /// Plain elimination on a compact copy of the block columns. Entries
    /// are reduced lazily, only when their column becomes the pivot column,
    /// so each absorbs fewer than `cw <= exact_depth` unreduced products.
    /// The next column is reduced and searched during the current pass.
    fn factor_base(&mut self, r0: usize, c0: usize, cw: usize) -> usize {
        let (w, p) = (self.w, self.m.get() as f64);
        let red = self.red;
        let nr = self.active - r0;
        let mut blk = vec![0f64; nr * cw];
        for (i, dst) in blk.chunks_mut(cw).enumerate() {
            dst.copy_from_slice(&self.pm[(r0 + i) * w + c0..(r0 + i) * w + c0 + cw]);
        }
        let mut lb = vec![0f64; nr * cw];
        let mut q = 0;
        let mut ready: Option<Option<usize>> = None;
        for j in 0..cw {
            if q == nr {
                break;
            }
            let pivot = match ready.take() {
                Some(found) => found,
                None => {
                    let mut found = None;
                    for i in q..nr {
                        let v = red.reduce(blk[i * cw + j]);
                        blk[i * cw + j] = v;
                        if v != 0.0 && found.is_none() {
                            found = Some(i);
                        }
                    }
                    found
                }
            };
            let Some(pl) = pivot else {
                continue;
            };
            if pl != q {
                swap_rows(&mut blk, cw, pl, q);
                swap_rows(&mut lb, cw, pl, q);
                self.swap(r0 + pl, r0 + q);
            }
            let inv = self.m.inv(blk[q * cw + j] as u32).expect("pivot is nonzero") as f64;
            let (top, bottom) = blk.split_at_mut((q + 1) * cw);
            let src = &mut top[q * cw + j + 1..(q + 1) * cw];
            for x in src.iter_mut() {
                *x = red.reduce(*x);
            }
            let src = &*src;
            let has_next = j + 1 < cw;
            let mut next = None;
            for (k, (row, lrow)) in bottom.chunks_mut(cw).zip(lb[(q + 1) * cw..].chunks_mut(cw)).enumerate() {
                let x = row[j];
                if x != 0.0 {
                    let f = p - red.reduce(x * inv);
                    lrow[q] = f;
                    row[j] = 0.0;
                    for (d, &s) in row[j + 1..].iter_mut().zip(src) {
                        *d += f * s;
                    }
                }
                if has_next {
                    let v = red.reduce(row[j + 1]);
                    row[j + 1] = v;
                    if v != 0.0 && next.is_none() {
                        next = Some(q + 1 + k);
                    }
                }
            }
            if has_next {
                ready = Some(next);
            }
            q += 1;
        }
        if q > 0 {
            for (i, src) in lb.chunks(cw).enumerate().skip(1) {
                self.lp[(r0 + i) * w + r0..(r0 + i) * w + r0 + q.min(i)].copy_from_slice(&src[..q.min(i)]);
            }
        }
        q
    }
}

pub(crate) fn rank_blocked(data: &mut [u32], rows: usize, cols: usize, m: FieldModulus, panel: usize) -> usize {
    assert!(panel >= 1 && panel <= exact_depth(m.get()));
    let red = Reducer::new(m.get());
    let mut r = 0usize;
    let mut c = 0usize;
    let mut ublock: Vec<f64> = Vec::new();

    while r < rows && c < cols {
        let w = panel.min(cols - c);
        let active = rows - r;
        let mut pm = vec![0f64; active * w];
        for (li, dst) in pm.chunks_mut(w).enumerate() {
            let src = &data[(r + li) * cols + c..(r + li) * cols + c + w];
            for (d, &x) in dst.iter_mut().zip(src) {
                *d = x as f64;
            }
        }
        let mut pf = Panel {
            pm,
            lp: vec![0f64; active * w],
            active,
            w,
            data: &mut *data,
            cols,
            r,
            m,
            red,
        };
        let q = pf.factor(0, 0, w);
        let lp = std::mem::take(&mut pf.lp);
        drop(pf);

        let tc = c + w;
        let nt = cols - tc;
        if q > 0 && nt > 0 {
            // Pivot rows on the trailing columns: U = L11^{-1} A12.
            ublock.clear();
            ublock.resize(q * nt, 0.0);
            for (t, urow) in ublock.chunks_mut(nt).enumerate() {
                let src = &data[(r + t) * cols + tc..(r + t + 1) * cols];
                for (u, &x) in urow.iter_mut().zip(src) {
                    *u = x as f64;
                }
            }
            trsm(&lp, w, q, &mut ublock, nt, nt, red);
            for (t, urow) in ublock.chunks(nt).enumerate() {
                let dst = &mut data[(r + t) * cols + tc..(r + t + 1) * cols];
                for (d, &u) in dst.iter_mut().zip(urow) {
                    *d = u as u32;
                }
            }

            // Remaining rows: A22 += (-L21) U, reduced once.
            let below = r + q;
            if below < rows {
                let region = &mut data[below * cols..rows * cols];
                let lrest = &lp[q * w..active * w];
                let ub = &ublock;
                region
                    .par_chunks_mut(STRIPE_ROWS * cols)
                    .zip(lrest.par_chunks(STRIPE_ROWS * w))
                    .for_each(|(chunk, lchunk)| {
                        let h = chunk.len() / cols;
                        let mut cbuf = vec![0f64; h * nt];
                        for (i, dst) in cbuf.chunks_mut(nt).enumerate() {
                            let src = &chunk[i * cols + tc..(i + 1) * cols];
                            for (d, &x) in dst.iter_mut().zip(src) {
                                *d = x as f64;
                            }
                        }
                        // SAFETY: lchunk is h x w (first q columns used), ub is
                        // q x nt and cbuf is h x nt, a separate allocation.
                        unsafe {
                            gemm_acc(h, q, nt, lchunk.as_ptr(), w, ub.as_ptr(), nt, cbuf.as_mut_ptr(), nt);
                        }
                        for (i, src) in cbuf.chunks(nt).enumerate() {
                            let dst = &mut chunk[i * cols + tc..(i + 1) * cols];
                            for (d, &x) in dst.iter_mut().zip(src) {
                                *d = red.reduce(x) as u32;
                            }
                        }
                    });
            }
        }

        r += q;
        c = tc;
    }
    r
}

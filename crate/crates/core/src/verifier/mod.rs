//! Sampling, matrix assembly, rank verdicts and certificates.
//!
//! A statement is proven when `base_dim + rank(R(Y))` reaches the expected
//! dimension at one sample over `Z_p`. Failure proves nothing, so the only
//! verdicts are [`VerdictStatus::ProvenTrue`] and [`VerdictStatus::Unknown`].

mod assembly;
mod certificate;
mod sampling;

use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use assembly::{build_r, build_r_rows, build_r_y, build_t_basic, check_points, y_rows, DEFAULT_BASIC_LIMIT};
pub use certificate::{file_name_for, CertPoint, Certificate, Timings, CERTIFICATE_VERSION};
pub use sampling::{point_layout, sample_points, MAX_SAMPLE_ATTEMPTS};

use crate::error::{Error, Result};
use crate::ffield::FieldModulus;
use crate::geometry::{self, expected_dim_w, Statement, TangentPoint};

/// Default number of sampling attempts per statement.
pub const DEFAULT_RETRIES: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    ProvenTrue,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub rank: usize,
    pub expected: usize,
    pub base_dim: usize,
    /// Literature note, set for unknown verdicts on known defective cases.
    pub annotation: Option<String>,
}

impl Verdict {
    pub fn new(st: &Statement, rank: usize) -> Self {
        let expected = expected_dim_w(st);
        let base_dim = st.base_dim();
        let status = if base_dim + rank == expected {
            VerdictStatus::ProvenTrue
        } else {
            VerdictStatus::Unknown
        };
        let annotation = (status == VerdictStatus::Unknown
            && st.is_unconstrained()
            && geometry::known_exception(st.n(), st.d(), st.s()))
        .then(|| "known defective".to_string());
        Verdict {
            status,
            rank,
            expected,
            base_dim,
            annotation,
        }
    }

    pub fn is_proven(&self) -> bool {
        self.status == VerdictStatus::ProvenTrue
    }
}

fn millis(t: Instant) -> f64 {
    (t.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

/// Runs one attempt at a fixed seed.
pub fn check_once(st: &Statement, seed: u64, modulus: FieldModulus) -> Result<(Verdict, Certificate)> {
    let start = Instant::now();
    let points = sample_points(st, seed, modulus)?;
    let r = build_r_y(st, &points, modulus)?;
    let build = millis(start);
    let t_rank = Instant::now();
    let rank = r.into_rank();
    let rank_ms = millis(t_rank);
    let verdict = Verdict::new(st, rank);
    let cert = make_certificate(
        st,
        seed,
        modulus,
        &points,
        &verdict,
        Timings {
            build,
            rank: rank_ms,
            total: millis(start),
        },
    );
    Ok((verdict, cert))
}

/// Every attempt in order; attempt `k` uses seed `seed + k`, and the run
/// stops at the first proof or after `retries` attempts (at least one).
pub fn check_attempts(st: &Statement, seed: u64, modulus: FieldModulus, retries: usize) -> Result<Vec<(Verdict, Certificate)>> {
    let mut out = Vec::new();
    for k in 0..retries.max(1) {
        let attempt = check_once(st, seed.wrapping_add(k as u64), modulus)?;
        let done = attempt.0.is_proven();
        out.push(attempt);
        if done {
            break;
        }
    }
    Ok(out)
}

/// Verdict and certificate of the final attempt of [`check_attempts`].
pub fn check(st: &Statement, seed: u64, modulus: FieldModulus, retries: usize) -> Result<(Verdict, Certificate)> {
    Ok(check_attempts(st, seed, modulus, retries)?.pop().expect("at least one attempt"))
}

pub fn make_certificate(
    st: &Statement,
    seed: u64,
    modulus: FieldModulus,
    points: &[TangentPoint],
    verdict: &Verdict,
    times_ms: Timings,
) -> Certificate {
    Certificate {
        version: CERTIFICATE_VERSION,
        seed,
        prime: modulus.get(),
        n: st.n(),
        d: st.d(),
        s: st.s(),
        a: st.a(),
        block_width: st.b(),
        points: points
            .iter()
            .map(|p| CertPoint {
                l: p.l().coeffs().to_vec(),
                m: p.m().coeffs().to_vec(),
                block: p.constraint().code(),
            })
            .collect(),
        base_dim: verdict.base_dim,
        rank: verdict.rank,
        expected: verdict.expected,
        verdict: verdict.status,
        times_ms,
    }
}

/// Recomputes the rank from the stored points alone.
pub fn replay(cert: &Certificate) -> Result<Verdict> {
    if cert.version != CERTIFICATE_VERSION {
        return Err(Error::MalformedCertificate(format!("unsupported version {}", cert.version)));
    }
    let st = cert.statement()?;
    let modulus = cert.modulus()?;
    let points = cert.tangent_points()?;
    check_points(&st, &points).map_err(|e| Error::MalformedCertificate(e.to_string()))?;
    if cert.expected != expected_dim_w(&st) {
        return Err(Error::MalformedCertificate(format!(
            "expected dimension {} does not match {}",
            cert.expected,
            expected_dim_w(&st)
        )));
    }
    if cert.base_dim != st.base_dim() {
        return Err(Error::MalformedCertificate(format!(
            "base dimension {} does not match {}",
            cert.base_dim,
            st.base_dim()
        )));
    }
    let rank = build_r_y(&st, &points, modulus)?.into_rank();
    if rank != cert.rank {
        return Err(Error::RankMismatch {
            stored: cert.rank,
            recomputed: rank,
        });
    }
    let verdict = Verdict::new(&st, rank);
    if verdict.status != cert.verdict {
        return Err(Error::MalformedCertificate(format!(
            "stored verdict {:?} contradicts rank {rank}",
            cert.verdict
        )));
    }
    Ok(verdict)
}

/// The four base-case families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaseCase {
    I,
    II,
    III,
    IV,
}

impl BaseCase {
    pub const ALL: [BaseCase; 4] = [BaseCase::I, BaseCase::II, BaseCase::III, BaseCase::IV];

    /// Whether the family has separate `i = 1` and `i = 2` lists.
    pub fn depends_on_i(self) -> bool {
        matches!(self, BaseCase::III | BaseCase::IV)
    }
}

impl FromStr for BaseCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "i" | "1" => Ok(BaseCase::I),
            "ii" | "2" => Ok(BaseCase::II),
            "iii" | "3" => Ok(BaseCase::III),
            "iv" | "4" => Ok(BaseCase::IV),
            _ => Err(Error::InvalidArgument(format!("unknown base case {s:?}"))),
        }
    }
}

/// The statement list of one base-case family. `i` is ignored by the
/// i-independent families.
pub fn base_case_suite(case: BaseCase, i: u8) -> Result<Vec<Statement>> {
    use geometry::{s_i, t};
    if case.depends_on_i() {
        s_i(i, 8)?;
    }
    let mk = |n, s, a| Statement::cubic(n, s, a);
    match case {
        BaseCase::I => Ok(vec![mk(71, 0, [96, 96, 96])?]),
        BaseCase::II => (56..=79).map(|n| mk(n, 96, [t(n - 24)?, t(n - 24)?, 0])).collect(),
        BaseCase::III => (32..=55).map(|n| mk(n, t(n)?, [s_i(i, n - 24)?, 0, 0])).collect(),
        BaseCase::IV => (8..=31).map(|n| mk(n, s_i(i, n)?, [0; 3])).collect(),
    }
}

/// All 121 distinct base-case statements.
pub fn all_base_cases() -> Vec<Statement> {
    let mut out = Vec::new();
    for case in BaseCase::ALL {
        let is: &[u8] = if case.depends_on_i() { &[1, 2] } else { &[1] };
        for &i in is {
            out.extend(base_case_suite(case, i).expect("valid suite"));
        }
    }
    out
}

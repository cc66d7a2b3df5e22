use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::FieldModulus;
use crate::geometry::{classify, AbundanceClass, LinearForm, PointConstraint, Statement, TangentPoint};
use crate::monomials::BlockSpec;

use super::VerdictStatus;

/// Schema version written by this build. Version 1 points were drawn from
/// xoshiro256++ seeded through SplitMix64; replay never re-derives them.
pub const CERTIFICATE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertPoint {
    pub l: Vec<u32>,
    pub m: Vec<u32>,
    /// 0 for a free point, otherwise the block id.
    pub block: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Timings {
    pub build: f64,
    pub rank: f64,
    pub total: f64,
}

/// Replayable record of one verification attempt. Field order is the
/// serialization order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub version: u32,
    pub seed: u64,
    pub prime: u32,
    pub n: usize,
    pub d: usize,
    pub s: usize,
    pub a: [usize; 3],
    pub block_width: usize,
    pub points: Vec<CertPoint>,
    pub base_dim: usize,
    pub rank: usize,
    pub expected: usize,
    pub verdict: VerdictStatus,
    pub times_ms: Timings,
}

fn malformed(e: impl std::fmt::Display) -> Error {
    Error::MalformedCertificate(e.to_string())
}

impl Certificate {
    pub fn statement(&self) -> Result<Statement> {
        Statement::new(self.n, self.d, self.s, self.a, self.block_width).map_err(malformed)
    }

    pub fn modulus(&self) -> Result<FieldModulus> {
        FieldModulus::new(self.prime as u64).map_err(malformed)
    }

    /// Rebuilds and validates the stored points.
    pub fn tangent_points(&self) -> Result<Vec<TangentPoint>> {
        let modulus = self.modulus()?;
        self.points
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let constraint = PointConstraint::from_code(p.block).map_err(malformed)?;
                let l = LinearForm::new(p.l.clone(), modulus).map_err(malformed)?;
                let m = LinearForm::new(p.m.clone(), modulus).map_err(malformed)?;
                TangentPoint::new(l, m, constraint, self.n, self.block_width, modulus)
                    .map_err(|e| Error::MalformedCertificate(format!("point {k}: {e}")))
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(malformed)
    }

    /// `t_{n}_{s}_{a1}_{a2}_{a3}.json`, tagged with `d` and `b` when not default.
    pub fn file_name(&self) -> String {
        file_name_for(&self.statement_unchecked())
    }

    fn statement_unchecked(&self) -> Statement {
        Statement::new(self.n, self.d, self.s, self.a, self.block_width).unwrap_or_else(|_| {
            Statement::new(self.n.max(1), 3, self.s.max(1), [0; 3], BlockSpec::DEFAULT_WIDTH).expect("fallback")
        })
    }

    /// The text log of this attempt.
    pub fn to_log(&self) -> String {
        let mut out = String::new();
        let width = (self.prime.saturating_sub(1)).to_string().len();
        let fmt_vec = |v: &[u32]| v.iter().map(|x| format!("{x:>width$}")).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "Using random seed: {}", self.seed);
        let mut per_block = [0usize; 4];
        for p in &self.points {
            let label = if p.block == 0 {
                format!("{}", per_block[0])
            } else {
                format!("{},{}", p.block, per_block[p.block.min(3)])
            };
            per_block[p.block.min(3)] += 1;
            let _ = writeln!(out, "l_{label} = [{}]", fmt_vec(&p.l));
            let _ = writeln!(out, "m_{label} = [{}]", fmt_vec(&p.m));
        }
        let rows = self.expected_rows();
        let cols = self.columns();
        let _ = writeln!(out, "Constructed the {rows} x {cols} matrix R(Y) in {:.3}s.", self.times_ms.build / 1000.0);
        let _ = writeln!(out, "Computed the rank of R(Y) over F_{} in {:.3}s.", self.prime, self.times_ms.rank / 1000.0);
        let _ = writeln!(
            out,
            "Found {} + {} = {} vs. {} expected.",
            self.base_dim,
            self.rank,
            self.base_dim + self.rank,
            self.expected
        );
        let _ = writeln!(out, "{}", self.verdict_line());
        let _ = writeln!(out, "Total computation took {:.3}s.", self.times_ms.total / 1000.0);
        out
    }

    fn expected_rows(&self) -> usize {
        crate::monomials::dim_sd(self.n, self.d) - self.base_dim
    }

    fn columns(&self) -> usize {
        self.points
            .iter()
            .map(|p| if p.block == 0 { 2 * (self.n + 1) } else { 2 * self.block_width })
            .sum()
    }

    /// The conclusion line, e.g. `T(7, 8; 0, 0, 0) is TRUE (SUBABUNDANT)`.
    pub fn verdict_line(&self) -> String {
        let st = self.statement_unchecked();
        // Equiabundant statements are reported under the subabundant label.
        let class = match classify(&st) {
            AbundanceClass::Superabundant => "SUPERABUNDANT",
            _ => "SUBABUNDANT",
        };
        let mut notes = vec![class.to_string()];
        if st.is_unconstrained() && crate::geometry::known_exception(st.n(), st.d(), st.s()) {
            notes.push("known defective".into());
        }
        if st.d() >= 4 {
            notes.push("exploratory".into());
        }
        let word = match self.verdict {
            VerdictStatus::ProvenTrue => "TRUE",
            VerdictStatus::Unknown => "UNKNOWN",
        };
        format!("{st} is {word} ({})", notes.join(", "))
    }
}

pub fn file_name_for(st: &Statement) -> String {
    let [a1, a2, a3] = st.a();
    let mut name = format!("t_{}_{}_{a1}_{a2}_{a3}", st.n(), st.s());
    if st.d() != 3 {
        name.push_str(&format!("_d{}", st.d()));
    }
    if st.b() != BlockSpec::DEFAULT_WIDTH {
        name.push_str(&format!("_b{}", st.b()));
    }
    name.push_str(".json");
    name
}

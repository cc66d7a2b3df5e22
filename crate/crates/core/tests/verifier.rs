use tansec::geometry::{classify, AbundanceClass};
use tansec::monomials::dim_sd;
use tansec::verifier::{
    all_base_cases, base_case_suite, build_r, build_r_y, build_t_basic, check, check_attempts, check_once, replay, sample_points,
    BaseCase, CertPoint, Certificate, Timings, VerdictStatus, DEFAULT_BASIC_LIMIT,
};
use proptest::prelude::*;
use tansec::{Error, FieldModulus, Statement};

fn p() -> FieldModulus {
    FieldModulus::new(8191).unwrap()
}

const PUBLISHED_T7: [[[u32; 8]; 2]; 8] = [
    [[6240, 5559, 4744, 2128, 3525, 2499, 7333, 2585], [5179, 5860, 2731, 4978, 4356, 4995, 358, 2752]],
    [[6524, 4761, 3599, 7815, 1716, 2187, 4195, 7889], [1512, 3708, 6893, 7109, 5519, 5965, 5496, 2212]],
    [[2484, 8072, 7956, 3951, 6365, 63, 6777, 37], [5225, 7196, 2009, 3291, 6451, 5475, 2616, 5079]],
    [[4096, 596, 3500, 6582, 5675, 2959, 6074, 3891], [4798, 7696, 188, 5184, 578, 1679, 2657, 335]],
    [[7882, 7500, 5717, 2715, 1488, 1144, 5362, 5122], [3740, 7615, 3260, 3859, 2746, 75, 1181, 1268]],
    [[5979, 741, 5874, 6408, 7902, 5006, 3801, 6057], [5718, 1256, 7323, 3359, 1176, 5753, 675, 3460]],
    [[4415, 2885, 403, 5801, 124, 1935, 8094, 6722], [5366, 1942, 5568, 1892, 6945, 5454, 7057, 5850]],
    [[4552, 7106, 6564, 5562, 6468, 3805, 3021, 5507], [7463, 2235, 5324, 6275, 2378, 2047, 1639, 7436]],
];

fn published_certificate() -> Certificate {
    Certificate {
        version: 1,
        seed: 1440664437,
        prime: 8191,
        n: 7,
        d: 3,
        s: 8,
        a: [0; 3],
        block_width: 24,
        points: PUBLISHED_T7
            .iter()
            .map(|[l, m]| CertPoint {
                l: l.to_vec(),
                m: m.to_vec(),
                block: 0,
            })
            .collect(),
        base_dim: 0,
        rank: 120,
        expected: 120,
        verdict: VerdictStatus::ProvenTrue,
        times_ms: Timings::default(),
    }
}

#[test]
fn published_points_replay_to_full_rank() {
    let v = replay(&published_certificate()).unwrap();
    assert_eq!((v.base_dim, v.rank, v.expected), (0, 120, 120));
    assert!(v.is_proven());
}

#[test]
fn tampered_rank_is_a_mismatch() {
    let mut cert = published_certificate();
    cert.rank = 119;
    assert_eq!(replay(&cert), Err(Error::RankMismatch { stored: 119, recomputed: 120 }));
}

#[test]
fn duplicated_point_drops_rank() {
    let mut cert = published_certificate();
    cert.points[7] = cert.points[0].clone();
    assert!(matches!(replay(&cert), Err(Error::RankMismatch { stored: 120, .. })));
}

#[test]
fn malformed_certificates_are_distinguished() {
    let mut cert = published_certificate();
    cert.points[0].l.pop();
    assert!(matches!(replay(&cert), Err(Error::MalformedCertificate(_))));
    let mut cert = published_certificate();
    cert.prime = 8192;
    assert!(matches!(replay(&cert), Err(Error::MalformedCertificate(_))));
    let mut cert = published_certificate();
    cert.points[0].l[0] = 9000;
    assert!(matches!(replay(&cert), Err(Error::MalformedCertificate(_))));
    let mut cert = published_certificate();
    cert.expected = 119;
    assert!(matches!(replay(&cert), Err(Error::MalformedCertificate(_))));
    assert!(matches!(Certificate::from_json("{\"version\": 1}"), Err(Error::MalformedCertificate(_))));
}

#[test]
fn flagship_statement_log() {
    let st = Statement::cubic(7, 8, [0; 3]).unwrap();
    let (v, cert) = check(&st, 1440664437, p(), 3).unwrap();
    assert!(v.is_proven());
    let log = cert.to_log();
    assert!(log.starts_with("Using random seed: 1440664437\n"));
    assert!(log.contains("Constructed the 120 x 128 matrix R(Y) in "));
    assert!(log.contains("Computed the rank of R(Y) over F_8191 in "));
    assert!(log.contains("Found 0 + 120 = 120 vs. 120 expected.\n"));
    assert!(log.contains("T(7, 8; 0, 0, 0) is TRUE (SUBABUNDANT)\n"));
    assert!(log.contains("Total computation took "));
    assert_eq!(log.lines().filter(|l| l.starts_with("l_") || l.starts_with("m_")).count(), 16);
}

#[test]
fn published_log_alignment() {
    let log = published_certificate().to_log();
    assert!(log.contains("m_0 = [5179 5860 2731 4978 4356 4995  358 2752]\n"));
    assert!(log.contains("l_2 = [2484 8072 7956 3951 6365   63 6777   37]\n"));
}

#[test]
fn json_round_trip_and_field_order() {
    let st = Statement::cubic(7, 8, [0; 3]).unwrap();
    let (_, cert) = check(&st, 42, p(), 1).unwrap();
    let text = cert.to_json();
    let back = Certificate::from_json(&text).unwrap();
    assert_eq!(back, cert);
    assert_eq!(replay(&back).unwrap().rank, cert.rank);
    let keys = [
        "\"version\"", "\"seed\"", "\"prime\"", "\"n\"", "\"d\"", "\"s\"", "\"a\"", "\"block_width\"", "\"points\"",
        "\"base_dim\"", "\"rank\"", "\"expected\"", "\"verdict\"", "\"times_ms\"",
    ];
    let pos: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]));
    assert!(text.contains("\"proven_true\""));
    assert_eq!(cert.file_name(), "t_7_8_0_0_0.json");
}

#[test]
fn sampling_is_deterministic_and_respects_blocks() {
    let st = Statement::new(10, 3, 2, [2, 1, 0], 3).unwrap();
    let a = sample_points(&st, 9, p()).unwrap();
    let b = sample_points(&st, 9, p()).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, sample_points(&st, 10, p()).unwrap());
    assert_eq!(a.len(), 5);
    for pt in &a[2..4] {
        assert!(pt.l().coeffs()[0..3].iter().all(|&x| x == 0));
        assert!(pt.m().coeffs()[0..3].iter().all(|&x| x == 0));
    }
    assert!(a[4].l().coeffs()[3..6].iter().all(|&x| x == 0));
}

#[test]
fn matrix_shapes() {
    let st = Statement::cubic(7, 8, [0; 3]).unwrap();
    let pts = sample_points(&st, 1, p()).unwrap();
    assert_eq!(build_r(&st, &pts, p()).unwrap().shape(), (120, 128));
    assert_eq!(build_t_basic(&st, &pts, p(), DEFAULT_BASIC_LIMIT).unwrap(), build_r(&st, &pts, p()).unwrap());

    let st = Statement::new(8, 3, 2, [3, 0, 0], 2).unwrap();
    let pts = sample_points(&st, 1, p()).unwrap();
    assert_eq!(build_t_basic(&st, &pts, p(), DEFAULT_BASIC_LIMIT).unwrap().cols(), 36 + 12 + 84);
    assert!(matches!(build_t_basic(&st, &pts, p(), 1000), Err(Error::MatrixSizeLimit { .. })));
    assert!(build_r(&st, &pts[1..], p()).is_err());
    assert!(build_r(&st, &[], p()).is_err());
}

#[test]
fn type_ii_row_and_column_counts() {
    for n in [56usize, 60, 79] {
        let tp = 4 * (n - 24) - 37;
        let st = Statement::cubic(n, 96, [tp, tp, 0]).unwrap();
        assert_eq!(st.column_count(), 96 * 2 * (n + 1) + 2 * tp * 48);
        assert_eq!(dim_sd(n, 3) - st.base_dim(), 576 * n - 12672);
        assert_eq!(tansec::verifier::y_rows(&st).unwrap().len(), 576 * n - 12672);
    }
    let st = Statement::cubic(79, 96, [183, 183, 0]).unwrap();
    assert_eq!(st.column_count(), 32928);
}

#[test]
fn y_restricted_rank_matches_basic_variant() {
    let st = Statement::new(9, 3, 3, [4, 3, 0], 2).unwrap();
    let pts = sample_points(&st, 3, p()).unwrap();
    let basic = build_t_basic(&st, &pts, p(), DEFAULT_BASIC_LIMIT).unwrap().rank();
    let ry = build_r_y(&st, &pts, p()).unwrap().rank();
    assert_eq!(st.base_dim() + ry, basic);
}

#[test]
fn defective_cases_stay_unknown() {
    let st = Statement::secant(2, 3, 2).unwrap();
    let runs = check_attempts(&st, 77, p(), 3).unwrap();
    assert_eq!(runs.len(), 3);
    for (v, cert) in &runs {
        assert_eq!(v.status, VerdictStatus::Unknown);
        assert_eq!(v.annotation.as_deref(), Some("known defective"));
        assert!(cert.to_log().contains("T(2, 2; 0, 0, 0) is UNKNOWN (SUBABUNDANT, known defective)"));
    }
    assert_eq!(runs[1].1.seed, 78);
}

#[test]
fn base_case_lists() {
    assert_eq!(base_case_suite(BaseCase::I, 1).unwrap(), vec![Statement::cubic(71, 0, [96, 96, 96]).unwrap()]);
    let ii = base_case_suite(BaseCase::II, 1).unwrap();
    assert_eq!(ii.len(), 24);
    assert_eq!(*ii.last().unwrap(), Statement::cubic(79, 96, [183, 183, 0]).unwrap());
    assert_eq!(base_case_suite(BaseCase::II, 2).unwrap(), ii);
    for i in [1, 2] {
        assert_eq!(base_case_suite(BaseCase::III, i).unwrap().len(), 24);
        assert_eq!(base_case_suite(BaseCase::IV, i).unwrap().len(), 24);
    }
    assert_eq!(base_case_suite(BaseCase::IV, 1).unwrap()[0], Statement::cubic(8, 9, [0; 3]).unwrap());
    assert!(base_case_suite(BaseCase::IV, 3).is_err());
    let all = all_base_cases();
    assert_eq!(all.len(), 121);
    let unique: std::collections::BTreeSet<_> = all.iter().collect();
    assert_eq!(unique.len(), 121);
}

#[test]
fn type_ii_base_cases_are_equiabundant() {
    for st in base_case_suite(BaseCase::II, 1).unwrap() {
        assert_eq!(classify(&st), AbundanceClass::Equiabundant, "{st}");
    }
}

#[test]
fn rank_is_independent_of_thread_count() {
    let st = Statement::new(10, 3, 4, [3, 2, 0], 3).unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let (_, a) = one.install(|| check_once(&st, 5, p())).unwrap();
    let (_, b) = four.install(|| check_once(&st, 5, p())).unwrap();
    assert_eq!((a.points.clone(), a.rank), (b.points.clone(), b.rank));
}

fn small_statement() -> impl Strategy<Value = Statement> {
    (1usize..=10, 0usize..6, prop::array::uniform3(0usize..4), 1usize..=2)
        .prop_filter_map("invalid statement", |(n, s, a, b)| Statement::new(n, 3, s, a, b).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_trick_preserves_rank(st in small_statement(), seed in any::<u64>()) {
        let pts = sample_points(&st, seed, p()).unwrap();
        let basic = build_t_basic(&st, &pts, p(), DEFAULT_BASIC_LIMIT).unwrap().rank();
        let ry = build_r_y(&st, &pts, p()).unwrap();
        prop_assert!(ry.rank() <= ry.rows());
        prop_assert_eq!(st.base_dim() + ry.rank(), basic);
    }

    #[test]
    fn certificates_replay(st in small_statement(), seed in any::<u64>()) {
        let (v, cert) = check_once(&st, seed, p()).unwrap();
        let back = Certificate::from_json(&cert.to_json()).unwrap();
        prop_assert_eq!(&back, &cert);
        let again = replay(&back).unwrap();
        prop_assert_eq!(again, v.clone());
        prop_assert!(v.base_dim + v.rank <= v.expected);
    }
}

#[test]
fn three_block_base_case_is_proven() {
    let st = base_case_suite(BaseCase::I, 1).unwrap()[0];
    let (v, cert) = check(&st, 1, p(), 3).unwrap();
    assert_eq!(st.base_dim() + tansec::verifier::y_rows(&st).unwrap().len(), dim_sd(71, 3));
    assert!(v.is_proven(), "{}", cert.verdict_line());
    assert_eq!(v.rank, 13824);
    assert_eq!(cert.verdict_line(), "T(71, 0; 96, 96, 96) is TRUE (SUBABUNDANT)");
}

//! Gram matrices and Whittaker norms at `Delta = 3/5`, `c = 7/2`, frozen from a
//! separate symbolic computation (zero modes evaluated by level, one
//! annihilator commuted past one creator at a time).

use zastava::scalar::Scalar;
use zastava::virasoro::{gram_by_words, nekrasov_series, nekrasov_series_by_adjointness, vir_gram, VirParams};

fn q(n: i64, d: i64) -> Scalar {
    Scalar::new(n, d)
}

fn params() -> VirParams {
    VirParams { delta: q(3, 5), c: q(7, 2) }
}

fn matrix(rows: &[&[(i64, i64)]]) -> Vec<Vec<Scalar>> {
    rows.iter().map(|r| r.iter().map(|&(n, d)| q(n, d)).collect()).collect()
}

#[test]
fn grams_up_to_level_three() {
    let p = params();
    assert_eq!(vir_gram(&p, 1), matrix(&[&[(6, 5)]]));
    assert_eq!(vir_gram(&p, 2), matrix(&[&[(83, 20), (18, 5)], &[(18, 5), (132, 25)]]));
    let g3 = matrix(&[
        &[(53, 5), (6, 1), (72, 5)],
        &[(6, 1), (489, 50), (504, 25)],
        &[(72, 5), (504, 25), (6336, 125)],
    ]);
    assert_eq!(vir_gram(&p, 3), g3);
    assert_eq!(gram_by_words(&p, 3), g3);
}

#[test]
fn whittaker_norms_up_to_level_four() {
    let want = vec![q(1, 1), q(5, 6), q(2075, 4476), q(704875, 6015744), Scalar::new(141604163125, 8436936582144)];
    assert_eq!(nekrasov_series(&params(), 4).unwrap(), want);
    assert_eq!(nekrasov_series_by_adjointness(&params(), 4).unwrap(), want);
}

#[test]
fn higher_levels_agree_with_word_rewriting() {
    let p = VirParams { delta: q(-11, 4), c: q(13, 9) };
    for d in 4..=6 {
        let g = vir_gram(&p, d);
        assert_eq!(g, gram_by_words(&p, d), "level {d}");
        for (a, row) in g.iter().enumerate() {
            for (b, x) in row.iter().enumerate() {
                assert_eq!(x, &g[b][a]);
            }
        }
    }
}

use super::oracle::{exact_for, type_mass};
use super::*;
use crate::examples::{build_ex1, Ex1Params};
use crate::Error;

fn ex1_config(n: usize, rates: SimRates, eps: f64, delta: f64) -> SimConfig {
    let inst = build_ex1(Ex1Params { tau: 0.1, eps, delta }).unwrap();
    SimConfig {
        n,
        rates,
        pmf: inst.pmf,
        kernels: inst.kernels.unwrap(),
        eta: 1.0,
        decoder: DecoderKind::MaxLikelihood,
        trials: 200,
        seed: 7,
        codebook_mode: CodebookMode::Fixed,
    }
}

fn rates(n: usize, k1: usize, kb: usize, s2: usize, t2: usize, s3: usize, t3: usize) -> SimRates {
    let f = |k: usize| k as f64 / n as f64;
    SimRates {
        r1: f(k1),
        b1: f(kb),
        s2: f(s2),
        t2: f(t2),
        s3: f(s3),
        t3: f(t3),
    }
}

fn parts(cfg: &SimConfig) -> (Model, Dims) {
    (Model::new(cfg).unwrap(), cfg.dims().unwrap())
}

#[test]
fn dims_round_and_validate() {
    let cfg = ex1_config(8, rates(8, 2, 1, 2, 1, 3, 2), 0.05, 0.2);
    let d = cfg.dims().unwrap();
    assert_eq!((d.k1, d.kb, d.s2, d.t2, d.s3, d.t3), (2, 1, 2, 1, 3, 2));
    let mut bad = cfg.clone();
    bad.rates.s2 = 4.0 / 8.0;
    assert!(matches!(bad.dims(), Err(Error::InvalidParameter(_))));
    let mut bad = cfg.clone();
    bad.rates.t3 = 4.0 / 8.0;
    assert!(matches!(bad.dims(), Err(Error::InvalidParameter(_))));
    let mut big = ex1_config(40, rates(40, 10, 0, 2, 1, 20, 2), 0.05, 0.2);
    big.rates.r1 = 0.25;
    assert!(matches!(big.dims(), Err(Error::CapExceeded(_))));
}

#[test]
fn zero_binning_gives_one_row_per_message() {
    let cfg = ex1_config(8, rates(8, 3, 0, 2, 1, 2, 1), 0.05, 0.2);
    let (model, dims) = parts(&cfg);
    let cb = sample_codebooks(&model, &dims, 1).unwrap();
    assert_eq!(cb.c1.len(), 8);
    assert!(cb.c1.iter().all(|r| r.len() == 8));
}

#[test]
fn point_mass_u_gives_identical_rows() {
    let mut cfg = ex1_config(6, rates(6, 2, 1, 1, 1, 1, 1), 0.05, 0.2);
    cfg.pmf = crate::examples::canonical_pmf(0.0).validated().unwrap();
    let (model, dims) = parts(&cfg);
    let cb = sample_codebooks(&model, &dims, 3).unwrap();
    assert!(cb.c1.iter().all(|r| r.iter().all(|&u| u == 0)));
}

#[test]
fn c1_letter_frequency_matches_marginal() {
    let cfg = ex1_config(20, rates(20, 4, 4, 1, 1, 1, 1), 0.05, 0.2);
    let (model, dims) = parts(&cfg);
    let cb = sample_codebooks(&model, &dims, 11).unwrap();
    let total = (cb.c1.len() * dims.n) as f64;
    let ones = cb.c1.iter().flatten().filter(|&&u| u == 1).count() as f64;
    let freq = ones / total;
    // 5120 Bernoulli(0.1) letters; 5 standard deviations
    assert!((freq - 0.1).abs() < 5.0 * (0.09 / total).sqrt(), "{freq}");
}

#[test]
fn everything_typical_list_is_full_product() {
    let cfg = ex1_config(8, rates(8, 1, 2, 3, 1, 3, 2), 0.05, 0.2);
    let (model, dims) = parts(&cfg);
    let cb = sample_codebooks(&model, &dims, 5).unwrap();
    for m2 in 0..2 {
        for m3 in 0..4 {
            let m = Message { m1: 1, m2, m3 };
            let want = 4 * cb.bin(2, m2).len() * cb.bin(3, m3).len();
            assert_eq!(list_of(&model, &cb, &dims, m, 1.0).len(), want);
        }
    }
}

#[test]
fn empty_list_falls_back_to_zero_triple() {
    // n = 3 cannot reproduce a law with mass 0.225 exactly, so eta = 0 rejects all
    let mut cfg = ex1_config(3, rates(3, 1, 0, 1, 0, 1, 0), 0.05, 0.2);
    cfg.eta = 0.0;
    let (model, dims) = parts(&cfg);
    let cb = sample_codebooks(&model, &dims, 2).unwrap();
    let mut rng = trial_rng(1, 0);
    let enc = encode(&model, &cb, &dims, Message { m1: 1, m2: 0, m3: 0 }, 0.0, &mut rng);
    assert!(enc.fallback);
    assert_eq!((enc.alpha, enc.b1, enc.a2, enc.a3), (0, 0, 0, 0));
    cfg.trials = 50;
    let res = run_trials(&cfg).unwrap();
    assert_eq!(res.fallbacks, 50);
    assert_eq!(res.fallback_rate, 1.0);
}

#[test]
fn runs_are_deterministic_in_the_seed() {
    let mut cfg = ex1_config(8, rates(8, 2, 1, 2, 1, 3, 1), 0.05, 0.2);
    cfg.codebook_mode = CodebookMode::PerTrial;
    let a = run_trials(&cfg).unwrap();
    let b = run_trials(&cfg).unwrap();
    assert_eq!(a, b);
    cfg.seed += 1;
    let c = run_trials(&cfg).unwrap();
    assert_eq!(c.trials, a.trials);
}

#[test]
fn zero_trials_is_empty() {
    let mut cfg = ex1_config(8, rates(8, 2, 1, 2, 1, 3, 1), 0.05, 0.2);
    cfg.trials = 0;
    let res = run_trials(&cfg).unwrap();
    assert_eq!(res.trials, 0);
    assert!(res.alpha.is_empty());
    assert_eq!(res.receivers[0].rate, 0.0);
    assert_eq!(res.receivers[0].wilson95, [0.0, 1.0]);
}

#[test]
fn closure_holds_every_trial() {
    let mut cfg = ex1_config(10, rates(10, 2, 1, 3, 1, 4, 2), 0.05, 0.2);
    cfg.codebook_mode = CodebookMode::PerTrial;
    assert_eq!(run_trials(&cfg).unwrap().closure_violations, 0);
}

/// Zero noise with an injective codebook never errs.
#[test]
fn noiseless_is_error_free() {
    let base = ex1_config(8, rates(8, 2, 1, 2, 1, 3, 1), 0.0, 0.0);
    let (model, dims) = parts(&base);
    let field = crate::finite_field::Field::new(2).unwrap();
    let injective = |cb: &Codebooks| {
        let mut sums = std::collections::HashSet::new();
        for u in &cb.c1 {
            for w in &cb.sum_words {
                if !sums.insert(field.add_vec(u, w).unwrap()) {
                    return false;
                }
            }
        }
        let distinct = |ws: &[Vec<u32>]| ws.iter().collect::<std::collections::HashSet<_>>().len() == ws.len();
        let filled = |p: &crate::finite_field::PccCode| (0..p.num_bins()).all(|m| !p.bin_indices(m).is_empty());
        distinct(&cb.v2_words) && distinct(&cb.v3_words) && filled(&cb.pair.lambda2) && filled(&cb.pair.lambda3)
    };
    let seed = (0..500u64)
        .find(|&s| {
            let mut c = base.clone();
            c.seed = s;
            injective(&fixed_codebooks(&c, &model, &dims).unwrap())
        })
        .expect("an injective codebook among 500 seeds");
    let mut cfg = base.clone();
    cfg.seed = seed;
    cfg.trials = 300;
    let res = run_trials(&cfg).unwrap();
    assert_eq!(res.fallbacks, 0);
    for r in &res.receivers {
        assert_eq!(r.errors, 0);
    }
    assert_eq!(res.rx1_full_tuple.errors, 0);
    let exact = exact_fixed(&cfg).unwrap();
    assert_eq!(exact.error, [0.0; 3]);
}

#[test]
fn uniform_balanced_list_exponent_is_zero() {
    let mut cfg = ex1_config(8, rates(8, 1, 0, 3, 3, 3, 3), 0.05, 0.2);
    cfg.pmf = crate::examples::canonical_pmf(0.5);
    assert!(tau_list(&cfg).unwrap().abs() < 1e-12);
    // with every triple typical the exact mean list size is 1 for any codebook
    let (model, dims) = parts(&cfg);
    let cb = fixed_codebooks(&cfg, &model, &dims).unwrap();
    let ex = exact_for(&cfg, &model, &dims, &cb).unwrap();
    assert!((ex.mean_alpha - 1.0).abs() < 1e-12);
    assert!((ensemble_mean_alpha(&cfg).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn two_binning_bits_quadruple_the_list() {
    let n = 8;
    let cfg0 = ex1_config(n, rates(n, 1, 0, 3, 2, 3, 2), 0.05, 0.2);
    let mut cfg2 = cfg0.clone();
    cfg2.rates.b1 = 2.0 / n as f64;
    let (t0, t2) = (tau_list(&cfg0).unwrap(), tau_list(&cfg2).unwrap());
    assert!((n as f64 * (t2 - t0) - 2.0).abs() < 1e-12);
    let e0 = ensemble_mean_alpha(&cfg0).unwrap();
    let e2 = ensemble_mean_alpha(&cfg2).unwrap();
    assert!((e2 / e0 - 4.0).abs() < 1e-12);
}

#[test]
fn type_mass_is_a_probability() {
    let p = [0.3, 0.2, 0.5];
    assert!((type_mass(&p, &p, 7, 1.0) - 1.0).abs() < 1e-12);
    let partial = type_mass(&p, &p, 7, 0.1);
    assert!(partial > 0.0 && partial < 1.0);
}

#[test]
fn wilson_contains_estimate() {
    let [lo, hi] = wilson_interval(30, 100);
    assert!(lo < 0.3 && 0.3 < hi);
    assert!((lo - 0.2189).abs() < 1e-3 && (hi - 0.3958).abs() < 1e-3);
    assert_eq!(wilson_interval(0, 10)[0], 0.0);
}

#[test]
fn monte_carlo_matches_exact_oracle() {
    let mut cfg = ex1_config(6, rates(6, 1, 1, 2, 1, 2, 1), 0.1, 0.15);
    cfg.eta = 0.4;
    cfg.trials = 3000;
    let res = run_trials(&cfg).unwrap();
    let ex = exact_fixed(&cfg).unwrap();
    let t = cfg.trials as f64;
    for j in 0..3 {
        let p = ex.error[j];
        let se = (p * (1.0 - p) / t).sqrt().max(1e-9);
        assert!((res.receivers[j].rate - p).abs() <= 3.5 * se, "rx{} {} vs {p}", j + 1, res.receivers[j].rate);
    }
    let se_a = (ex.alpha_variance / t).sqrt().max(1e-9);
    assert!((res.mean_alpha - ex.mean_alpha).abs() <= 3.5 * se_a);
}

#[test]
fn typicality_decoder_runs() {
    let mut cfg = ex1_config(10, rates(10, 1, 0, 2, 1, 2, 1), 0.0, 0.0);
    cfg.decoder = DecoderKind::Typicality;
    cfg.eta = 0.3;
    let res = run_trials(&cfg).unwrap();
    assert_eq!(res.trials, 200);
    assert!(res.receivers.iter().all(|r| r.rate <= 1.0));
}

#[test]
fn config_round_trips_through_json() {
    let cfg = ex1_config(8, rates(8, 2, 1, 2, 1, 3, 1), 0.05, 0.2);
    let s = serde_json::to_string(&cfg).unwrap();
    assert!(s.contains("\"ml\"") && s.contains("\"fixed\""));
    let back: SimConfig = serde_json::from_str(&s).unwrap();
    assert_eq!(back, cfg);
}

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use swipt_cnoma::schemes::{
    capacity_cnoma_ps, capacity_cnoma_ps_oam, evaluate, phase1_sinrs, relay_sinr, sinr_set,
};
use swipt_cnoma::{draw_realization, FadingRealization, Scheme, SystemParams};

fn params_strategy() -> impl Strategy<Value = SystemParams> {
    (
        1e-2f64..1e3,
        0.01f64..0.49,
        0.0f64..=1.0,
        0.0f64..=1.0,
        0.05f64..0.95,
    )
        .prop_map(|(rho, p_n, delta, eta, alpha_ts)| SystemParams {
            rho,
            p_n,
            p_f: 1.0 - p_n,
            delta,
            eta,
            alpha_ts,
            ..SystemParams::default()
        })
}

fn realization_strategy() -> impl Strategy<Value = FadingRealization> {
    (
        0.0f64..500.0,
        0.0f64..50.0,
        0.0f64..500.0,
        1e-3f64..200.0,
        1e-3f64..200.0,
    )
        .prop_map(|(g_s1, g_s2, g_12, mu1, mu2)| FadingRealization {
            g_s1,
            g_s2,
            g_12,
            mu1,
            mu2,
        })
}

fn log2_1p(x: f64) -> f64 {
    (1.0 + x).log2()
}

proptest! {
    #[test]
    fn sum_is_sum_of_users(p in params_strategy(), r in realization_strategy()) {
        for scheme in Scheme::ALL {
            let c = evaluate(scheme, &p, &r);
            prop_assert_eq!(c.c_sum, c.c_ue1 + c.c_ue2);
            prop_assert!(c.c_ue1 >= 0.0 && c.c_ue2 >= 0.0 && c.c_sum.is_finite());
        }
    }

    #[test]
    fn oam_gap_is_deterministic(p in params_strategy(), r in realization_strategy()) {
        let with = evaluate(Scheme::CnomaPsOam, &p, &r);
        let without = evaluate(Scheme::CnomaPs, &p, &r);
        let gap = 0.5 * log2_1p(p.rho * r.mu1) + 0.5 * log2_1p(p.rho * r.mu2);
        prop_assert!((with.c_sum - without.c_sum - gap).abs() < 1e-12);
        prop_assert!(with.c_sum > without.c_sum);
    }

    #[test]
    fn capacities_grow_with_rho(p in params_strategy(), r in realization_strategy(), factor in 1.0f64..10.0) {
        let hi = SystemParams { rho: p.rho * factor, ..p.clone() };
        let (a, b) = (sinr_set(&p, &r), sinr_set(&hi, &r));
        for (x, y) in [
            (a.s_x1, b.s_x1), (a.s_x2_at_ue1, b.s_x2_at_ue1), (a.s_x2_at_ue2, b.s_x2_at_ue2),
            (a.s_relay, b.s_relay), (a.s_x3, b.s_x3), (a.s_x4, b.s_x4),
        ] {
            prop_assert!(y >= x);
        }
        for scheme in Scheme::ALL {
            let (lo_c, hi_c) = (evaluate(scheme, &p, &r), evaluate(scheme, &hi, &r));
            prop_assert!(hi_c.c_ue1 >= lo_c.c_ue1 && hi_c.c_ue2 >= lo_c.c_ue2, "{}", scheme);
        }
    }

    #[test]
    fn x2_sinrs_bounded_and_increasing(p in params_strategy(), g in 0.0f64..1e4, step in 0.0f64..1e3) {
        let bound = p.p_f / p.p_n;
        let (_, a1, a2) = phase1_sinrs(&p, g, g);
        let (_, b1, b2) = phase1_sinrs(&p, g + step, g + step);
        prop_assert!(a1 <= bound && a2 <= bound);
        prop_assert!(b1 >= a1 && b2 >= a2);
    }

    #[test]
    fn zero_argument_kills_min_term(p in params_strategy(), r in realization_strategy()) {
        let mut s = sinr_set(&p, &r);
        s.s_relay = 0.0;
        prop_assert_eq!(capacity_cnoma_ps(&s, 0.0).c_ue2, 0.0);
        let c = capacity_cnoma_ps_oam(&s, 0.0);
        let oam = 0.5 * log2_1p(s.s_x4);
        prop_assert!((c.c_ue2 - oam).abs() <= 1e-12 * oam);
    }

    #[test]
    fn ts_ignores_delta(p in params_strategy(), r in realization_strategy(), delta in 0.0f64..=1.0) {
        let q = SystemParams { delta, ..p.clone() };
        prop_assert_eq!(evaluate(Scheme::CnomaTs, &p, &r), evaluate(Scheme::CnomaTs, &q, &r));
    }

    #[test]
    fn ue1_capacity_falls_with_delta(p in params_strategy(), r in realization_strategy(), d2 in 0.0f64..=1.0) {
        let (lo, hi) = if p.delta <= d2 { (p.delta, d2) } else { (d2, p.delta) };
        let a = SystemParams { delta: lo, ..p.clone() };
        let b = SystemParams { delta: hi, ..p.clone() };
        prop_assert!(evaluate(Scheme::CnomaPsOam, &b, &r).c_ue1 <= evaluate(Scheme::CnomaPsOam, &a, &r).c_ue1);
        prop_assert!(evaluate(Scheme::OmaPsOam, &b, &r).c_ue1 <= evaluate(Scheme::OmaPsOam, &a, &r).c_ue1);
        // Only the relay SINR moves the other way.
        prop_assert!(relay_sinr(&b, r.g_s1, r.g_12) >= relay_sinr(&a, r.g_s1, r.g_12));
    }

    #[test]
    fn same_seed_same_stream(seed in any::<u64>()) {
        let p = SystemParams::default();
        let mut a = ChaCha8Rng::seed_from_u64(seed);
        let mut b = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..16 {
            let (x, y) = (draw_realization(&p, &mut a).unwrap(), draw_realization(&p, &mut b).unwrap());
            prop_assert_eq!(x.g_s1.to_bits(), y.g_s1.to_bits());
            prop_assert_eq!(x.g_s2.to_bits(), y.g_s2.to_bits());
            prop_assert_eq!(x.g_12.to_bits(), y.g_12.to_bits());
        }
    }
}

#[test]
fn relay_gain_mean_on_far_link() {
    // K_s2 = 2, Ω_s2 = 9, d = 1: mean of g_s2 over 10⁶ draws is 9 ± 0.05.
    let p = SystemParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let n = 1_000_000;
    let mean = (0..n)
        .map(|_| draw_realization(&p, &mut rng).unwrap().g_s2)
        .sum::<f64>()
        / n as f64;
    assert!((mean - 9.0).abs() < 0.05, "{mean}");
}

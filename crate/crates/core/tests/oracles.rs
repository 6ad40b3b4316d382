use num_traits::{One, Signed, Zero};
use swor_core::bounds::{abs_dev_lower, abs_dev_upper, lower_at_zero, upper_at_zero};
use swor_core::{
    exact_distribution, extreme_distribution, extreme_population, minimal_population, mc_tail, robin_hood_transfer,
    two_block_distribution, Hypergeometric, Population, Rational,
};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn two_block(n: u64, i: u64, alpha: &Rational) -> Population<Rational> {
    let plus = alpha / int(i as i64);
    let minus = -alpha / int((n - i) as i64);
    let values = (0..n).map(|j| if j < i { plus.clone() } else { minus.clone() }).collect();
    Population::new(values).unwrap()
}

#[test]
fn two_block_law_matches_enumeration_of_minimal_vector() {
    let raw = vec![int(5), int(1), int(0), int(-2), int(-4)];
    let pop = Population::new(raw).unwrap();
    let certificate = minimal_population(&pop).unwrap();
    assert!(certificate.is_valid());
    let (n, i) = (pop.len() as u64, certificate.index_i as u64);
    assert_eq!(certificate.minimal_vector, two_block(n, i, &pop.alpha()));
    for k in 1..n {
        let closed = two_block_distribution(n, i, k, pop.alpha()).unwrap();
        let enumerated = exact_distribution(&certificate.minimal_vector, k as usize).unwrap();
        assert!(closed.matches(&enumerated), "k={k}");
    }
}

#[test]
fn expected_abs_of_two_block_is_scaled_hypergeometric_mad() {
    let alpha = q(3, 2);
    for n in 2..=11u64 {
        for i in 1..n {
            for k in 1..n {
                let law = two_block_distribution(n, i, k, alpha.clone()).unwrap();
                let mad = Hypergeometric::new(n, i, k).unwrap().mean_abs_deviation_exact();
                let scale = &alpha * int(n as i64) / int((i * (n - i)) as i64);
                assert_eq!(law.expected_abs(), scale * mad, "n={n} i={i} k={k}");
            }
        }
    }
}

#[test]
fn extreme_law_matches_enumeration() {
    for n in 2..=10usize {
        let pop = extreme_population(n, q(7, 3)).unwrap();
        for k in 1..n {
            let closed = extreme_distribution(n as u64, k as u64, q(7, 3)).unwrap();
            let enumerated = exact_distribution(&pop, k).unwrap();
            assert!(closed.matches(&enumerated), "n={n} k={k}");
            let expected = q(14, 3) * int((k * (n - k)) as i64) / int((n * (n - 1)) as i64);
            assert_eq!(enumerated.expected_abs(), expected);
        }
    }
}

#[test]
fn transfers_never_increase_expected_abs() {
    let mut pop = Population::new(vec![int(6), int(2), int(-1), int(-3), int(-4)]).unwrap();
    let steps = [(0usize, 2usize, q(1, 2)), (1, 4, int(1)), (0, 3, int(2)), (2, 4, q(1, 3))];
    for (donor, receiver, eps) in steps {
        let next = robin_hood_transfer(&pop, donor, receiver, eps).unwrap();
        for k in 1..pop.len() {
            let before = exact_distribution(&pop, k).unwrap().expected_abs();
            let after = exact_distribution(&next, k).unwrap().expected_abs();
            assert!(after <= before, "k={k}");
        }
        pop = next;
    }
}

#[test]
fn positive_part_identities_hold_exactly() {
    let pop = Population::new(vec![int(4), q(1, 2), int(0), q(-3, 2), int(-3)]).unwrap();
    for k in 1..pop.len() {
        let ids = exact_distribution(&pop, k).unwrap().positive_part_identities().unwrap();
        assert!(ids.folklore_residual.is_zero());
        assert_eq!(ids.e_plus, ids.e_minus);
        assert_eq!(&ids.e_plus + &ids.e_minus, ids.e_abs);
    }
}

#[test]
fn sharpness_anchor() {
    let pop = Population::new(vec![int(1), q(-1, 3), q(-1, 3), q(-1, 3)]).unwrap();
    let law = exact_distribution(&pop, 2).unwrap();
    assert_eq!(law.tail_probability(&int(0), false), q(1, 2));
    assert_eq!(law.tail_probability(&int(0), true), q(1, 2));
}

#[test]
fn bounds_bracket_exact_tails() {
    let populations = [
        vec![int(1), int(0), int(0), int(-1)],
        vec![int(3), int(1), int(-1), int(-1), int(-2)],
        vec![int(2), int(2), int(2), int(-1), int(-1), int(-1), int(-1), int(-1), int(-1)],
    ];
    for values in populations {
        let pop = Population::new(values).unwrap();
        let n = pop.len() as u64;
        let alpha = pop.alpha();
        let alpha_f = num_traits::ToPrimitive::to_f64(&alpha).unwrap();
        for k in 1..n {
            let law = exact_distribution(&pop, k as usize).unwrap();
            let at_zero = num_traits::ToPrimitive::to_f64(&law.tail_probability(&int(0), false)).unwrap();
            let pos = num_traits::ToPrimitive::to_f64(&law.tail_probability(&int(0), true)).unwrap();
            if let Some(lower) = lower_at_zero(n, k).applicable_value() {
                assert!(pos >= lower, "n={n} k={k}");
            }
            if let Some(upper) = upper_at_zero(n, k).applicable_value() {
                assert!(at_zero <= upper, "n={n} k={k}");
            }
            for step in 1..=8 {
                let t = alpha.clone() * q(step, 8);
                let t_f = alpha_f * step as f64 / 8.0;
                let tail = num_traits::ToPrimitive::to_f64(&law.tail_probability(&t, false)).unwrap();
                if let Some(upper) = abs_dev_upper(n, k, alpha_f, t_f).applicable_value() {
                    assert!(tail <= upper + 1e-12, "n={n} k={k} t={t}");
                }
                if let Some(lower) = abs_dev_lower(n, k, alpha_f, t_f).applicable_value() {
                    assert!(tail >= lower - 1e-12, "n={n} k={k} t={t}");
                }
            }
        }
    }
}

#[test]
fn monte_carlo_agrees_with_exact_law() {
    let values: Vec<f64> = vec![3.0, 1.0, 0.5, -0.5, -1.0, -1.0, -2.0];
    let pop = Population::new(values).unwrap();
    for k in 1..pop.len() {
        let exact = exact_distribution(&pop, k).unwrap().tail_probability(&0.25, false);
        let estimate = mc_tail(&pop, k, &0.25, false, 50_000, 11).unwrap();
        let se = estimate.std_error.max((exact * (1.0 - exact) / 50_000.0).sqrt());
        assert!((estimate.estimate - exact).abs() <= 5.0 * se + 1e-12, "k={k}");
    }
}

#[test]
fn negation_mirrors_the_law() {
    let pop = Population::new(vec![int(5), int(-1), int(-1), int(-3)]).unwrap();
    let mirrored = pop.negate();
    for k in 1..pop.len() {
        let law = exact_distribution(&pop, k).unwrap();
        let flipped = exact_distribution(&mirrored, k).unwrap();
        for (value, p) in law.atoms() {
            let neg: Rational = -value.clone();
            let q_mass = flipped.atoms().find(|(v, _)| **v == neg).map(|(_, p)| p).unwrap();
            assert_eq!(p, q_mass);
        }
        assert!(law.mean().abs().is_zero());
        assert_eq!(law.probabilities().iter().fold(Rational::zero(), |a, b| a + b), Rational::one());
    }
}

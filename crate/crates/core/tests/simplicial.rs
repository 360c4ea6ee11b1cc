use std::sync::Arc;

use proptest::prelude::*;

use dpforms::bar::{bar_d, BarElement, BarWord};
use dpforms::random::{random_path, trial_rng, FormGenerator, GenParams};
use dpforms::sform::{iterated_integral_at, stokes_residual};
use dpforms::verify::{run_suite, VerifyConfig, SUITES};
use dpforms::{FiniteSimplicialSet, SimplicialForm};

const SPACES: [&str; 6] = ["simplex:1", "simplex:2", "boundary:2", "horn:2:1", "circle", "sphere:2"];

fn space(s: &str) -> Arc<FiniteSimplicialSet> {
    Arc::new(FiniteSimplicialSet::preset(s).unwrap())
}

fn generator(s: &str) -> FormGenerator {
    FormGenerator::new(space(s), GenParams::default())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn stokes_on_products(x in 0usize..4, r in 1usize..3, q in 0usize..3, seed: u64) {
        let base = ["simplex:0", "simplex:1", "boundary:2", "circle"][x];
        let gen = generator(&format!("product:{base}:simplex:{r}"));
        let w = gen.form(q + r - 1, &mut trial_rng(seed, 0));
        prop_assert!(stokes_residual(&w).unwrap().is_zero());
    }

    #[test]
    fn simplicial_de_rham(x in 0usize..6, p in 0usize..2, q in 0usize..2, seed: u64) {
        let gen = generator(SPACES[x]);
        let mut rng = trial_rng(seed, 0);
        let (a, b) = (gen.form(p, &mut rng), gen.form(q, &mut rng));
        prop_assert!(a.d().d().is_zero());
        let sign = if p % 2 == 0 { 1 } else { -1 };
        let lhs = a.wedge(&b).unwrap().d();
        let rhs = a.d().wedge(&b).unwrap();
        let rest = a.wedge(&b.d()).unwrap();
        for k in 0..lhs.space().counts().len() {
            for c in 0..lhs.space().cells(k).len() {
                let s = dpforms::Simplex { cell: c, degeneracy: dpforms::OrdinalMap::identity(k) };
                let want = rhs.form_at(&s).unwrap().add(&rest.form_at(&s).unwrap().scale_sign(sign));
                prop_assert_eq!(lhs.form_at(&s).unwrap(), want);
            }
        }
    }

    #[test]
    fn bar_differential_squares_to_zero(x in 0usize..3, len in 1usize..4, seed: u64) {
        let gen = generator(["simplex:1", "simplex:2", "circle"][x]);
        let mut rng = trial_rng(seed, 0);
        let letters: Vec<SimplicialForm> = (0..len).map(|k| gen.letter(k % 2, &mut rng)).collect();
        let w = BarWord::new(gen.form(0, &mut rng), letters, gen.form(1, &mut rng)).unwrap();
        let e = BarElement::word(w);
        prop_assert!(bar_d(&bar_d(&e).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn single_exact_letter_integrates_to_endpoint_difference(x in 0usize..3, n in 0usize..3, seed: u64) {
        let gen = generator(["simplex:1", "simplex:2", "circle"][x]);
        let mut rng = trial_rng(seed, 0);
        let g = gen.form(0, &mut rng);
        let path = random_path(gen.space(), n, &mut rng).unwrap();
        let integral = iterated_integral_at(&[g.d()], &path).unwrap();
        let diff = g.form_at(&path.endpoint(1).unwrap()).unwrap().sub(&g.form_at(&path.endpoint(0).unwrap()).unwrap());
        prop_assert_eq!(integral, diff);
    }

    #[test]
    fn suites_pass_for_any_seed(seed: u64) {
        for suite in SUITES {
            let cfg = VerifyConfig { seed, trials: 2, ..VerifyConfig::default() };
            let report = run_suite(suite, &cfg).unwrap();
            prop_assert!(report.passed(), "{} seed {}: {:?}", suite, seed, report.failures);
        }
    }
}

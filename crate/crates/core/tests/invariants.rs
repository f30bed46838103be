//! Property tests for the structural invariants of masks, the stepper, the
//! time envelopes of moving sets, the verdict classifier and the text forms.

use std::f64::consts::PI;

use degenlog::evolve::{SchemeConfig, Stepper, Trajectory};
use degenlog::geometry::{
    k_inf, k_sup_mask, lattice_times, AngleSchedule, DomainSpec, MovingSetSpec, PathSchedule, Point, RadiusSchedule,
    SetShape,
};
use degenlog::grid::{Field, Grid};
use degenlog::io::{emit_scenario, format_shape, parse_scenario, parse_scenario_with_overrides, parse_shape};
use degenlog::scenarios::{classify, registry, ClassifyConfig, VerdictKind};
use proptest::prelude::*;

fn unit_grid(n: usize) -> Grid {
    Grid::new(DomainSpec::unit_square(), n).expect("unit square grid")
}

fn point() -> impl Strategy<Value = Point> {
    (0.05..0.95f64, 0.05..0.95f64).prop_map(|(x, y)| Point::new(x, y))
}

fn primitive() -> impl Strategy<Value = SetShape> {
    prop_oneof![
        point().prop_map(SetShape::PointSet),
        (point(), 0.01..0.4f64).prop_map(|(c, r)| SetShape::ball(c, r)),
        (point(), 0.05..0.4f64, -PI..PI, 0.1..3.0f64).prop_map(|(c, r0, a, w)| SetShape::Sector {
            center: c,
            r0,
            theta0: a,
            theta1: a + w,
        }),
    ]
}

fn shape() -> impl Strategy<Value = SetShape> {
    primitive().prop_recursive(2, 8, 3, |inner| {
        prop::collection::vec(inner, 1..4).prop_map(SetShape::Union)
    })
}

fn moving_set() -> impl Strategy<Value = MovingSetSpec> {
    prop_oneof![
        (0.05..0.3f64, 0.0..0.2f64, 0.1..3.0f64).prop_map(|(r, a, w)| MovingSetSpec::Translating {
            template: SetShape::ball(Point::new(0.0, 0.0), r),
            curve: PathSchedule::Circle {
                center: Point::new(0.5, 0.5),
                radius: a,
                omega: w,
                phase: 0.0,
            },
            rotation: AngleSchedule::Fixed(0.0),
        }),
        (0.05..0.35f64, any::<bool>()).prop_map(|(r0, grow)| MovingSetSpec::RadiusBall {
            center: Point::new(0.5, 0.5),
            radius: if grow {
                RadiusSchedule::Grow { r0 }
            } else {
                RadiusSchedule::Decay { r0 }
            },
        }),
        (0.05..0.2f64, 0.1..0.5f64, 0.2..0.8f64).prop_map(|(r, period, frac)| MovingSetSpec::Jumping {
            k0: SetShape::ball(Point::new(0.27, 0.5), r),
            k1: SetShape::ball(Point::new(0.73, 0.5), r),
            period,
            t1: frac * period,
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn shape_masks_sit_inside_the_domain(s in shape(), n in 8usize..40) {
        let grid = unit_grid(n);
        let m = grid.mask_from_shape(&s);
        prop_assert!(m.is_subset_of(&grid.mask));
        for k in m.indices() {
            prop_assert!(grid.domain.contains(grid.node_point(k)));
        }
        let parts = grid.components(&m);
        prop_assert_eq!(parts.iter().map(|c| c.count()).sum::<usize>(), m.count());
    }

    #[test]
    fn neighborhoods_grow_with_delta(s in shape(), d1 in 0.0..0.2f64, extra in 0.0..0.2f64) {
        let grid = unit_grid(24);
        let small = grid.mask_within(&s, d1);
        let large = grid.mask_within(&s, d1 + extra);
        prop_assert!(small.is_subset_of(&large));
        prop_assert!(grid.mask_from_shape(&s).is_subset_of(&small));
    }

    #[test]
    fn fields_vanish_off_the_mask(s in shape(), n in 8usize..32) {
        let grid = unit_grid(n);
        let m = grid.mask_from_shape(&s);
        let f = Field::from_fn(&grid, &m, |p| 1.0 + p.x);
        for k in 0..grid.len() {
            prop_assert_eq!(f.values[k] != 0.0, m.get(k));
        }
    }

    #[test]
    fn one_step_preserves_order_and_sign(
        lambda in -10.0..60.0f64,
        rho in 1.2..3.0f64,
        seeds in prop::collection::vec((0.0..3.0f64, 0.0..2.0f64, 0.0..8.0f64, 0.0..4.0f64), 144),
    ) {
        let grid = unit_grid(13);
        let mut cfg = SchemeConfig::new(1e-3, f64::INFINITY);
        cfg.solve_tol = 1e-13;
        let st = Stepper::new(&grid, &grid.mask, lambda, rho, cfg).unwrap();
        let (mut u, mut v, mut n1, mut n2) =
            (Field::zeros(&grid), Field::zeros(&grid), Field::zeros(&grid), Field::zeros(&grid));
        for (k, &(a, b, c, d)) in grid.mask.indices().zip(&seeds) {
            u.values[k] = a;
            v.values[k] = a + b;
            n2.values[k] = c;
            n1.values[k] = c + d;
        }
        let (uu, vv) = (st.advance(&grid, &u, &n2).unwrap(), st.advance(&grid, &v, &n2).unwrap());
        let (big, small) = (st.advance(&grid, &u, &n1).unwrap(), st.advance(&grid, &u, &n2).unwrap());
        for k in grid.mask.indices() {
            prop_assert!(uu.values[k] >= 0.0);
            prop_assert!(uu.values[k] <= vv.values[k] + 1e-10);
            prop_assert!(big.values[k] <= small.values[k] + 1e-10);
        }
    }

    #[test]
    fn envelopes_nest_across_three_start_times(spec in moving_set(), tau0 in 0.0..1.0f64, gap in 0.05..0.5f64) {
        let grid = unit_grid(24);
        let horizon = 2.5;
        let dt = 0.02;
        let taus = [tau0, tau0 + gap, tau0 + 2.0 * gap];
        let sups: Vec<_> = taus.iter().map(|&t| k_sup_mask(&grid, &spec, t, horizon, dt)).collect();
        let infs: Vec<_> = taus.iter().map(|&t| k_inf(&grid, &spec, t, horizon, dt)).collect();
        for w in 0..2 {
            prop_assert!(sups[w + 1].is_subset_of(&sups[w]));
            prop_assert!(infs[w].is_subset_of(&infs[w + 1]));
        }
        for (k, &tau) in taus.iter().enumerate() {
            prop_assert!(infs[k].is_subset_of(&sups[k]));
            for t in lattice_times(tau, horizon, dt) {
                let snap = grid.mask_from_shape(&spec.snapshot(t));
                prop_assert!(infs[k].is_subset_of(&snap));
                prop_assert!(snap.is_subset_of(&sups[k]));
            }
        }
    }

    #[test]
    fn grow_up_verdicts_have_a_monotone_tail(
        steps in prop::collection::vec(-0.3..1.0f64, 50..200),
        rising_tail in any::<bool>(),
        cap_at in prop::option::of(0.5..1.0f64),
    ) {
        let grid = unit_grid(4);
        let mut sup = 1.0;
        let mut sups = Vec::new();
        let tail_from = steps.len() * 7 / 10;
        for (k, s) in steps.iter().enumerate() {
            let s = if rising_tail && k >= tail_from { s.abs() + 1e-3 } else { *s };
            sup *= 1.0 + s;
            sups.push(sup.max(1e-300));
        }
        let times: Vec<f64> = (0..sups.len()).map(|k| k as f64 * 0.01).collect();
        // the run stops at the cap, so a hit is always the last record
        let cap_hit = cap_at.map(|_| times[sups.len() - 1]);
        let tr = Trajectory {
            l2_norms: sups.clone(),
            masses: sups.clone(),
            sup_norms: sups.clone(),
            times,
            snapshots: Vec::new(),
            cap_hit,
            growth_cap: 1e6,
            final_u: Field::zeros(&grid),
        };
        let cfg = ClassifyConfig::default();
        let v = classify(&tr, &cfg);
        let start = sups.len() - (sups.len() as f64 * 0.2).ceil() as usize;
        let monotone = sups[start..].windows(2).all(|w| w[1] > w[0]);
        prop_assert_eq!(v.kind == VerdictKind::GrowUp, tr.cap_hit.is_some() && monotone, "{}", v.reason);
    }

    #[test]
    fn shapes_survive_their_text_form(s in shape()) {
        prop_assert_eq!(parse_shape(&format_shape(&s)).unwrap(), s);
    }

    #[test]
    fn scenarios_survive_their_text_form(
        k in 0..registry::LABELS.len(),
        frac in -1.0..0.99f64,
        t_end in 0.5..20.0f64,
    ) {
        let s = registry::lookup(registry::LABELS[k]).unwrap();
        // inside the step guard dt·λ < 0.5
        let lambda = frac * 0.5 / s.scheme.dt;
        let text = emit_scenario(&s);
        prop_assert_eq!(&parse_scenario(&text).unwrap(), &s);
        let edited = parse_scenario_with_overrides(
            &text,
            &[format!("equation.lambda = {lambda:?}"), format!("time.t_end = {t_end:?}")],
        ).unwrap();
        prop_assert_eq!(edited.params.lambda, lambda);
        prop_assert_eq!(edited.t_end, t_end);
        prop_assert_eq!(parse_scenario(&emit_scenario(&edited)).unwrap(), edited);
        let too_large = format!("equation.lambda = {:?}", 0.6 / s.scheme.dt);
        prop_assert!(parse_scenario_with_overrides(&text, &[too_large]).is_err());
    }
}

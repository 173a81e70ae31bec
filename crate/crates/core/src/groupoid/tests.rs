use super::*;
use crate::poly::{pfaffian, Poly, PolyFrame, PolyMultivector};

fn all_models() -> Vec<Model> {
    vec![
        Model::Pair { n: 1 },
        Model::Pair { n: 2 },
        Model::LogPair { n: 2 },
        Model::SscLogtanLocal { n: 2 },
        Model::SympPair2d,
    ]
}

#[test]
fn axioms_pass_for_builtin_models() {
    // residual <= 1e-9 at 1e4 deterministic pseudo-random samples
    for model in all_models() {
        let report = check_groupoid_axioms(&model, 10_000, 0, 1e-9);
        assert!(
            report.pass,
            "{model:?}: residual {}",
            report.max_residual
        );
    }
}

#[test]
fn corrupted_multiplication_fails_associativity() {
    let report = check_groupoid_axioms(&Model::CorruptedLogPair { n: 2 }, 500, 0, 1e-9);
    assert!(!report.pass);
    assert!(report.max_residual > 1e-3);
}

#[test]
fn log_pair_source_fiber_and_orbits() {
    // source fiber over (1, 0): {(λ, 1, 0, y′)}; the x-coordinate sign is
    // invariant along arrows
    let model = Model::LogPair { n: 2 };
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
    for _ in 0..2000 {
        let g = model.sample_arrow(&mut rng);
        let s = model.source(&g);
        let t = model.target(&g);
        assert_eq!(s[0].signum() as i32, t[0].signum() as i32);
    }
    // explicit source fiber shape
    let g = [2.5, 1.0, 0.0, 0.7];
    assert_eq!(model.source(&g), vec![1.0, 0.0]);
    assert_eq!(model.target(&g), vec![2.5, 0.7]);
}

#[test]
fn symp_pair_orbit_of_origin_is_the_degeneracy_line() {
    let model = Model::SympPair2d;
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
    for _ in 0..500 {
        let mut g = model.sample_arrow(&mut rng);
        g[2] = 0.0; // source on D = {x = 0}
        let t = model.target(&g);
        assert_eq!(t[0], 0.0);
    }
}

#[test]
fn anchor_frames_match_the_paper_chain() {
    let log = Model::LogPair { n: 2 };
    let frame = expected_anchor_frame(&log).unwrap();
    let report = anchor_frame_check(&log, &frame, 200, 0, 1e-7);
    assert!(report.pass, "{report:?}");

    let symp = Model::SympPair2d;
    let frame = expected_anchor_frame(&symp).unwrap();
    let report = anchor_frame_check(&symp, &frame, 200, 0, 1e-7);
    assert!(report.pass, "{report:?}");
}

#[test]
fn anchor_frame_of_pair_groupoid_is_the_full_tangent_frame() {
    let pair = Model::Pair { n: 2 };
    let frame = expected_anchor_frame(&pair).unwrap();
    let report = anchor_frame_check(&pair, &frame, 200, 0, 1e-7);
    assert!(report.pass, "{report:?}");
}

#[test]
fn anchor_check_fails_for_naive_tangent_frame_on_degeneracy_locus() {
    // <dx, dy> has rank 2 on D while the anchor image drops rank there
    let symp = Model::SympPair2d;
    let naive = PolyFrame::new(
        vec![
            {
                let mut v = PolyMultivector::zero(2, 1);
                v.set(&[0], Poly::one(2));
                v
            },
            {
                let mut v = PolyMultivector::zero(2, 1);
                v.set(&[1], Poly::one(2));
                v
            },
        ],
        0,
    )
    .unwrap();
    let report = anchor_frame_check(&symp, &naive, 64, 0, 1e-7);
    assert!(!report.pass);
    assert!(report.failure.unwrap_or_default().contains("rank"));
}

#[test]
fn derived_form_coefficients_and_closedness() {
    let omega = derive_symplectic_form().unwrap();
    // coefficient of dλ∧dy is −1/λ
    let lambda = Poly::var(4, 0);
    let c = &omega.coeffs[0][3];
    let expected = crate::poly::RationalFn::new(Poly::from_int(4, -1), lambda.clone());
    assert!(c.equals(&expected), "{c:?}");
    assert!(omega.is_closed());
    // Pfaffian is ±1/λ, nonvanishing on the chart (including x = 0)
    let pf = omega.pfaffian4();
    let expected_pf = crate::poly::RationalFn::new(Poly::one(4), lambda.clone());
    assert!(pf.equals(&expected_pf) || pf.equals(&expected_pf.neg()), "{pf:?}");
    for point in [[1.0, 0.0, 0.0, 0.0], [2.0, 0.7, -0.4, 1.1], [0.5, -1.0, 0.0, 3.0]] {
        assert!(pf.eval_f64(&point).abs() > 1e-9);
    }
}

#[test]
fn derived_form_is_multiplicative() {
    let omega = derive_symplectic_form().unwrap();
    let report = multiplicativity_check(&Model::SympPair2d, &omega, 2000, 0, 1e-8).unwrap();
    assert!(report.pass, "residual {}", report.max_residual);
}

#[test]
fn corrupted_form_fails_multiplicativity() {
    let mut omega = derive_symplectic_form().unwrap();
    // perturb one coefficient by +1
    omega.coeffs[0][2] = omega.coeffs[0][2].add(&crate::poly::RationalFn::from_poly(Poly::one(4)));
    omega.coeffs[2][0] = omega.coeffs[0][2].neg();
    let report = multiplicativity_check(&Model::SympPair2d, &omega, 200, 0, 1e-8).unwrap();
    assert!(!report.pass);
    assert!(report.max_residual > 1e-2);
}

#[test]
fn pair_groupoid_coboundary_form_is_multiplicative() {
    // t*(dx∧dy) − s*(dx∧dy) on the 4-dimensional arrow chart of Pair(R²),
    // coordinates (x_t, y_t, x_s, y_s)
    let mut omega = TwoForm::zero(4);
    omega.add_pullback_term(
        &crate::poly::RationalFn::from_poly(Poly::one(4)),
        &Poly::var(4, 0),
        &Poly::var(4, 1),
    );
    omega.add_pullback_term(
        &crate::poly::RationalFn::from_poly(Poly::from_int(4, -1)),
        &Poly::var(4, 2),
        &Poly::var(4, 3),
    );
    let report = multiplicativity_check(&Model::Pair { n: 2 }, &omega, 500, 0, 1e-8).unwrap();
    assert!(report.pass, "residual {}", report.max_residual);
}

#[test]
fn line_pair_area_form_is_not_multiplicative() {
    // dx_s ∧ dx_t on Pair(R) fails m*ω = pr₁*ω + pr₂*ω: by direct expansion
    // the defect is a constant 2-form, so the residual is order 1
    let mut omega = TwoForm::zero(2);
    omega.add_pullback_term(
        &crate::poly::RationalFn::from_poly(Poly::one(2)),
        &Poly::var(2, 1),
        &Poly::var(2, 0),
    );
    let report = multiplicativity_check(&Model::Pair { n: 1 }, &omega, 100, 0, 1e-8).unwrap();
    assert!(!report.pass);
    assert!(report.max_residual > 0.5);
}

#[test]
fn poisson_convention_sign_is_pinned() {
    let omega = derive_symplectic_form().unwrap();
    let epsilon = poisson_convention_sign(&omega).unwrap();
    // golden: with Π = W⁻¹ and ω = t*(−π⁻¹) + s*(π⁻¹), the source map is
    // Poisson for επ with ε = −1
    assert_eq!(epsilon, -1.0);
}

#[test]
fn target_map_is_anti_poisson_for_the_pinned_sign() {
    // {x∘t, y∘t}_{ω⁻¹} = −ε·(x∘t) with the same pinned ε as the source side
    let omega = derive_symplectic_form().unwrap();
    let epsilon = poisson_convention_sign(&omega).unwrap();
    let model = Model::SympPair2d;
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(13);
    for _ in 0..64 {
        let g = model.sample_arrow(&mut rng);
        let pi = invert_antisymmetric4(&omega.eval(&g));
        // x∘t = λx, y∘t = y + μx: gradients in (λ, μ, x, y)
        let grad_xt = [g[2], 0.0, g[0], 0.0];
        let grad_yt = [0.0, g[2], g[1], 1.0];
        let mut bracket = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                bracket += grad_xt[i] * pi[i][j] * grad_yt[j];
            }
        }
        let xt = g[0] * g[2];
        assert!(
            (bracket + epsilon * xt).abs() < 1e-9 * (1.0 + xt.abs()),
            "bracket {bracket} vs {}",
            -epsilon * xt
        );
    }
}

#[test]
fn logpair_bivector_lifts_polynomially() {
    let omega = derive_symplectic_form().unwrap();
    let epsilon = poisson_convention_sign(&omega).unwrap();
    let sigma = logpair_bivector(epsilon).unwrap();
    // σ = ε(x∂x∧∂y − λ∂λ∧∂y − λ∂λ∧∂y′) in (λ, x, y, y′); check the
    // components up to the global sign
    let sgn = num_rational::BigRational::from_integer((epsilon as i64).into());
    assert_eq!(sigma.component(&[1, 2]), Poly::var(4, 1).scale(&sgn));
    assert_eq!(sigma.component(&[0, 2]), Poly::var(4, 0).scale(&sgn).neg());
    assert_eq!(sigma.component(&[0, 3]), Poly::var(4, 0).scale(&sgn).neg());
    // its Pfaffian vanishes exactly on the exceptional locus factors λx
    let pf = pfaffian(&sigma).unwrap();
    assert_eq!(pf.vanishing_order(0).unwrap(), 1);
    assert_eq!(pf.vanishing_order(1).unwrap(), 1);
}

#[test]
fn blowdown_chain_checks() {
    let omega = derive_symplectic_form().unwrap();
    let epsilon = poisson_convention_sign(&omega).unwrap();
    let sigma = logpair_bivector(epsilon).unwrap();
    let r1 = blowdown_check(
        &Model::SympPair2d,
        &Model::LogPair { n: 2 },
        &blowdown_symp_to_logpair,
        Some((&PoissonSide::Form(omega), &sigma)),
        1000,
        0,
        1e-8,
    );
    assert!(r1.pass, "residual {}", r1.max_residual);
    let r2 = blowdown_check(
        &Model::LogPair { n: 2 },
        &Model::Pair { n: 2 },
        &blowdown_logpair_to_pair,
        Some((&PoissonSide::Bivector(sigma), &pair_bivector(epsilon))),
        1000,
        0,
        1e-8,
    );
    assert!(r2.pass, "residual {}", r2.max_residual);
}

#[test]
fn composite_blowdown_is_target_source() {
    let symp = Model::SympPair2d;
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(9);
    for _ in 0..500 {
        let g = symp.sample_arrow(&mut rng);
        let composite = blowdown_logpair_to_pair(&blowdown_symp_to_logpair(&g));
        let t = symp.target(&g);
        let s = symp.source(&g);
        assert!((composite[0] - t[0]).abs() < 1e-12);
        assert!((composite[1] - t[1]).abs() < 1e-12);
        assert!((composite[2] - s[0]).abs() < 1e-12);
        assert!((composite[3] - s[1]).abs() < 1e-12);
    }
}

#[test]
fn glued_circle_axioms() {
    let atlas = glued_circle(false).unwrap();
    let report = atlas.check_axioms(2000, 0, 1e-8);
    assert!(report.pass, "{report:?}");
}

#[test]
fn corrupted_transition_fails_on_construction() {
    match glued_circle(true) {
        Err(GroupoidError::TransitionNotIsomorphism { residual, .. }) => {
            assert!(residual > 1e-3);
        }
        Err(other) => panic!("expected isomorphism failure, got {other:?}"),
        Ok(_) => panic!("corrupted transition must not validate"),
    }
}

#[test]
fn single_chart_atlas_matches_chart() {
    let atlas = single_chart(Model::LogPair { n: 2 });
    let report = atlas.check_axioms(500, 0, 1e-9);
    assert!(report.pass);
    let chart_report = check_groupoid_axioms(&Model::LogPair { n: 2 }, 500, 0, 1e-9);
    assert!(chart_report.pass);
}

#[test]
fn orbit_cover_violation_is_reported() {
    let atlas = glued_circle(false).unwrap();
    // an arrow pinned to the fixed point exists only in the scaling chart;
    // an arrow through the "infinity" point exists only in the pair chart
    let g = GluedArrow {
        chart: 0,
        coords: vec![0.7, 0.0],
    };
    let h = GluedArrow {
        chart: 1,
        coords: vec![1.3, 0.0],
    };
    assert!(matches!(
        atlas.compose(&g, &h),
        Err(GroupoidError::OrbitCoverViolation)
    ));
}

#[test]
fn verify_model_runner() {
    let req = ModelVerifyRequest {
        kind: "symp_pair_2d".into(),
        checks: vec![
            "axioms".into(),
            "anchor".into(),
            "multiplicative".into(),
            "blowdown".into(),
        ],
        samples: 500,
        tol: 1e-8,
        seed: 0,
    };
    let report = verify_model(&req).unwrap();
    assert!(report.pass, "{report:?}");
    assert_eq!(report.results.len(), 4);

    let bad = ModelVerifyRequest {
        kind: "nope".into(),
        checks: vec!["axioms".into()],
        samples: 10,
        tol: 1e-8,
        seed: 0,
    };
    assert!(matches!(
        verify_model(&bad),
        Err(GroupoidError::UnknownKind(_))
    ));

    let na = ModelVerifyRequest {
        kind: "pair".into(),
        checks: vec!["multiplicative".into()],
        samples: 10,
        tol: 1e-8,
        seed: 0,
    };
    assert!(matches!(
        verify_model(&na),
        Err(GroupoidError::CheckNotApplicable(..))
    ));

    let glued = ModelVerifyRequest {
        kind: "glued_circle".into(),
        checks: vec!["axioms".into()],
        samples: 500,
        tol: 1e-8,
        seed: 0,
    };
    assert!(verify_model(&glued).unwrap().pass);
}

#[test]
fn verify_model_report_serializes() {
    let req = ModelVerifyRequest {
        kind: "log_pair".into(),
        checks: vec!["axioms".into(), "anchor".into(), "blowdown".into()],
        samples: 200,
        tol: 1e-8,
        seed: 1,
    };
    let report = verify_model(&req).unwrap();
    assert!(report.pass);
    let json = serde_json::to_string_pretty(&report).unwrap();
    let back: ModelVerifyReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back.results.len(), 3);
}

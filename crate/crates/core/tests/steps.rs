//! Exact and first-order conditioned steps against each other.

use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use qtraj::feedback::{self, FeedbackLaw};
use qtraj::homodyne::{self, HomodyneConfig, Mode};
use qtraj::state::{state_from_bloch, BlochVector};

fn unit(z: f64, phi: f64) -> BlochVector {
    let r = (1.0 - z * z).sqrt();
    BlochVector::new(r * phi.cos(), r * phi.sin(), z)
}

proptest! {
    #[test]
    fn exact_and_first_order_agree(z in -1.0..=1.0f64, phi in 0.0..TAU, u in -3.0..=3.0f64) {
        let c = HomodyneConfig::from_alpha2(1e4, 1e-4, Mode::Exact).unwrap();
        let s = unit(z, phi);
        let dn = u * c.alpha_mag();
        let exact = homodyne::conditioned_update_exact(&state_from_bloch(&s).unwrap(), dn, &c).unwrap().bloch();
        let first = (s + homodyne::diffusion_step_first_order(&s, dn, &c).unwrap()).normalized().unwrap();
        prop_assert!(exact.max_abs_diff(&first) <= 10.0 * c.gamma_tau());
    }

    #[test]
    fn first_order_step_tracks_the_linearized_amplitudes(z in -1.0..=1.0f64, phi in 0.0..TAU, u in -3.0..=3.0f64) {
        let c = HomodyneConfig::from_alpha2(1e4, 1e-6, Mode::Exact).unwrap();
        let s = unit(z, phi);
        let psi = state_from_bloch(&s).unwrap();
        let dn = u * c.alpha_mag();
        let (de, dg) = homodyne::first_order_state_change(&psi, dn, &c);
        let moved = qtraj::PureState::new(psi.c_e() + de, psi.c_g() + dg).unwrap().bloch();
        let step = homodyne::diffusion_step_first_order(&s, dn, &c).unwrap();
        prop_assert!((moved - s).max_abs_diff(&step) <= 10.0 * c.kappa(dn).powi(2) + 1e-15);
    }

    #[test]
    fn angle_increment_matches_step_in_the_plane(theta in 0.01..3.13f64, u in -3.0..=3.0f64) {
        let c = HomodyneConfig::from_alpha2(1e4, 1e-4, Mode::FirstOrder).unwrap();
        let angle = qtraj::BlochAngle::new(theta).unwrap();
        let s = angle.to_vector();
        let dn = u * c.alpha_mag();
        let step = homodyne::diffusion_step_first_order(&s, dn, &c).unwrap();
        // A rotation by dθ in the s_x, s_z plane moves s by dθ·(cos θ, 0, -sin θ).
        let dtheta = homodyne::delta_theta(angle, dn, &c);
        let predicted = BlochVector::new(theta.cos(), 0.0, -theta.sin()) * dtheta;
        prop_assert!(step.max_abs_diff(&predicted) <= 1e-15);
    }

    #[test]
    fn combined_step_vanishes_at_target(theta_bar in 0.0..=PI, u in 0.1..=3.0f64) {
        let c = HomodyneConfig::from_alpha2(1e4, 1e-4, Mode::FirstOrder).unwrap();
        let law = FeedbackLaw::new(theta_bar, true).unwrap();
        let step = feedback::combined_diffusion_step(&law.target(), u * c.alpha_mag(), &law, &c).unwrap();
        prop_assert!(step.is_zero());
    }
}

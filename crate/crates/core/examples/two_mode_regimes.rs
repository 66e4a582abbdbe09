//! Beating against self-trapping in the two-mode system: the modulus `k^2`
//! crosses 1 at the critical nonlinearity and the imbalance stops changing sign.

use dwlab::twomode::{
    classify_motion, critical_eta, imbalance_analytic, integrate_two_mode, two_mode_params, TwoModeState,
};

fn main() -> dwlab::Result<()> {
    let z0 = 1.0;
    let theta0 = 0.0;
    println!("critical eta for z0 = {z0}: {:?}", critical_eta(z0, theta0));
    let state = TwoModeState::from_imbalance(z0, theta0)?;
    for eta in [0.0, 2.0, 3.9, 4.1, 8.0] {
        let p = two_mode_params(&state, eta)?;
        let motion = classify_motion(&p);
        let traj = integrate_two_mode(&state, eta, 20.0, 1e-3)?;
        let (lo, hi) = traj
            .iter()
            .map(|(_, s)| s.imbalance())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), z| (l.min(z), h.max(z)));
        let mut disc = 0.0f64;
        for (tau, s) in &traj {
            disc = disc.max((s.imbalance() - imbalance_analytic(*tau, &p)?).abs());
        }
        println!(
            "eta = {eta:4}: k^2 = {:.6}, {:<11} z in [{lo:+.4}, {hi:+.4}], period {:?}, |ODE - closed form| = {disc:.2e}",
            p.k2,
            motion.regime.to_string(),
            motion.period
        );
    }
    Ok(())
}

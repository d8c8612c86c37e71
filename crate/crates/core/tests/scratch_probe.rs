use dsa_servo::lti::*;
use dsa_servo::plant::*;
use dsa_servo::servo::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn noise(n: usize, seed: u64, scale: f64) -> SampledSignal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SampledSignal::new((0..n).map(|_| scale * (rng.gen::<f64>() - 0.5)).collect(), 50_000.0).unwrap()
}

fn dev(a: &SampledSignal, b: &SampledSignal) -> f64 {
    a.samples().iter().zip(b.samples()).map(|(x,y)|(x-y).abs()).fold(0.0f64,f64::max)
}

#[test]
fn probe_oracle_dev() {
    let set = PlantSet::from_params(&PlantParams::default()).unwrap();
    let mut cfg = LoopConfig::dual_stage(set.clone());
    cfg.saturation_enabled = false;
    let oracles = ChannelOracles::new(&set).unwrap();
    let n = 10_000;
    let z = SampledSignal::zeros(n, 50_000.0).unwrap();

    let r_o = noise(n, 11, 0.5);
    let tr = simulate_loop(&cfg, &r_o, &z, &z, &z).unwrap();
    println!("r_o channel: {:.3e}", dev(&tr.e, &oracles.error_from_runout(&r_o).unwrap()));

    let u = noise(n, 12, 1.0);
    let tr = simulate_loop(&cfg, &z, &u, &z, &z).unwrap();
    println!("u_v2 channel: {:.3e}", dev(&tr.e, &oracles.error_from_seek(&u).unwrap()));

    let r = noise(n, 13, 0.5);
    let tr = simulate_loop(&cfg, &z, &z, &r, &z).unwrap();
    println!("r channel: {:.3e}", dev(&tr.e, &oracles.error_from_reference(&r).unwrap()));

    let r_v = noise(n, 14, 0.5);
    let tr = simulate_loop(&cfg, &z, &z, &z, &r_v).unwrap();
    println!("r_v channel: {:.3e}", dev(&tr.e, &oracles.error_from_vcm_reference(&r_v).unwrap()));

    let mut single = LoopConfig::single_stage(set.clone());
    single.saturation_enabled = false;
    let tr = simulate_loop(&single, &z, &z, &z, &r_v).unwrap();
    println!("single r_v channel: {:.3e}", dev(&tr.e, &oracles.single_stage_error_from_vcm_reference(&r_v).unwrap()));
}

use opidyn::model::*;
use opidyn::sim;

fn main() {
    let p = ModelParams::new(0.0, 3.0, 2.0, 2.0, 0.5, RateCeiling::Unbounded).unwrap();
    for step in [1e-3, 2.5e-4] {
        for window in [5.0] {
            let rows = sim::regime_scan(&p, 0.5, &[10.0, 1e3, 1e6], window, step, 400, 99, None).unwrap();
            println!("h={step} window={window}:");
            for r in &rows {
                println!("  K={:e}: mean={:.3} se={:.3} burst={:.3}", r.cap, r.mean_jumps, r.std_error, r.burst_fraction);
            }
        }
    }
    // alpha=2.5 ladder
    let rows = sim::regime_scan(&p, 2.5, &[10.0, 1e3, 1e6], 5.0, 1e-3, 400, 99, None).unwrap();
    println!("alpha=2.5 h=1e-3:");
    for r in &rows {
        println!("  K={:e}: mean={:.3} se={:.3} burst={:.3}", r.cap, r.mean_jumps, r.std_error, r.burst_fraction);
    }
}

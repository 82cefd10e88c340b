//! Build, validate and score the three pulse sequences, then break one by
//! stretching the transport leg.

use spinbus::photophysics::capture_rate;
use spinbus::protocol::{detect, end_to_end_fidelity, entangle, inject_pair, validate, DetectOptions, EntangleOptions, FidelityInputs, PairOptions};
use spinbus::PhysicalParameters;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = PhysicalParameters::default();
    let inputs = FidelityInputs {
        t2: p.t1_transport,
        capture_rate: capture_rate(50.0, p.sigma_cap, p.temperature, p.m_eff)?.rate,
        ..Default::default()
    };
    let timelines = [
        inject_pair(&PairOptions::default())?,
        detect(&DetectOptions::default())?,
        entangle(&EntangleOptions::default())?,
        detect(&DetectOptions {
            transport_ns: 120.0,
            ..Default::default()
        })?,
    ];
    for tl in &timelines {
        let v = validate(tl)?;
        let f = end_to_end_fidelity(&v, &inputs)?;
        println!("{}", v.report.to_text().trim_end());
        println!("fidelity {:.4}\n", f.total);
    }
    print!("{}", timelines[2].to_text());
    Ok(())
}

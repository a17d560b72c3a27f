// Counter-based streams: any draw can be regenerated from its key alone.

use rwre_lab::field::{derive_stream, StreamKey, StreamTag};
use rwre_lab::{JumpLaw, Vector};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let key = StreamKey::new(42, 7, &[-3], StreamTag::SITE);
    let mut a = derive_stream(key.clone());
    let first: Vec<f64> = (0..3).map(|_| a.next_f64()).collect();
    // Same key, same numbers, in any order of access.
    let b = derive_stream(key);
    assert_eq!(b.at(2), first[2]);
    println!("cell (7, -3): {first:?}");

    let law = JumpLaw::atomic([(Vector::from_slice(&[1.0]), 0.3), (Vector::from_slice(&[-1.0]), 0.7)])?;
    let mut s = derive_stream(StreamKey::new(42, 0, &[], StreamTag::WALK));
    let mean: f64 = (0..10_000).map(|_| law.sample(&mut s)[0]).sum::<f64>() / 10_000.0;
    println!("law mean {:.3}, sample mean {mean:.3}", law.mean()[0]);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}

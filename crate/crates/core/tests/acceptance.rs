//! Runs every acceptance criterion and prints one line each.

use cutmilnor::suite::{run_all, Scale, UNATTAINABLE};

fn main() {
    let outcomes = run_all(Scale::Full, 2024);
    for o in &outcomes {
        println!("{}", o.line());
    }
    let unexpected: Vec<usize> = outcomes.iter().filter(|o| !o.passed && !UNATTAINABLE.contains(&o.id)).map(|o| o.id).collect();
    let known: Vec<usize> = outcomes.iter().filter(|o| !o.passed && UNATTAINABLE.contains(&o.id)).map(|o| o.id).collect();
    if !known.is_empty() {
        println!("known unattainable, failing as stated: {:?} (see README)", known);
    }
    let surprise: Vec<usize> = outcomes.iter().filter(|o| o.passed && UNATTAINABLE.contains(&o.id)).map(|o| o.id).collect();
    if !surprise.is_empty() {
        println!("listed as unattainable but passed: {:?}", surprise);
    }
    if !unexpected.is_empty() {
        eprintln!("failing criteria: {:?}", unexpected);
        std::process::exit(1);
    }
}

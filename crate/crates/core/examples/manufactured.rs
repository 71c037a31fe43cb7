//! Convergence rates against a smooth manufactured solution.
//!
//! cargo run --example manufactured -- [element] [nu]

use cavity_fem::study::to_csv;
use cavity_fem::{run_mms_study, ElementPair, StudyConfig, StudyKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let pairs = match args.next() {
        Some(s) => vec![s.parse::<ElementPair>()?],
        None => ElementPair::ALL.to_vec(),
    };
    let nu = args.next().map_or(Ok(1.0), |s| s.parse())?;
    for pair in pairs {
        let config = StudyConfig { kind: StudyKind::Mms, pair, nu, levels: vec![8, 16, 32, 64], ..Default::default() };
        println!("# {pair}");
        print!("{}", to_csv(&run_mms_study(&config)?));
    }
    Ok(())
}

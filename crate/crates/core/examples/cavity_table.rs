//! Successive L4 errors on the lid-driven cavity for every element pair.
//!
//! cargo run --example cavity_table -- [corner] [finest n_div]

use cavity_fem::study::to_csv;
use cavity_fem::{run_cavity_study, CornerConvention, ElementPair, StudyConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let corner: CornerConvention = args.next().map_or(Ok(CornerConvention::Leaky), |s| s.parse())?;
    let finest: usize = args.next().map_or(Ok(64), |s| s.parse())?;
    let levels: Vec<usize> = [finest / 8, finest / 4, finest / 2, finest].into_iter().filter(|&n| n >= 4).collect();
    for pair in ElementPair::ALL {
        let config = StudyConfig { pair, corner, levels: levels.clone(), ..Default::default() };
        let result = run_cavity_study(&config)?;
        println!("# {pair}, {corner} corners");
        print!("{}", to_csv(&result));
    }
    Ok(())
}

//! A reduced pose sweep. Pass a trial count as the first argument to run
//! more phantoms per pose (default 5).

use rangeface::eval::{evaluate, standard_poses, EvalSettings};
use rangeface::PipelineConfig;

fn main() {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let s = EvalSettings { trials, ..Default::default() };
    let report = evaluate(&standard_poses(), &PipelineConfig::default(), &s);
    print!("{}", report.to_table());
}

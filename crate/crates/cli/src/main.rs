use clap::Parser;
use mdtgn_cli::{run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(outcome) => {
            for r in outcome.reports.iter().filter(|r| !r.pass) {
                println!("FAIL {}: lhs = {:e}, rhs = {:e} ({})", r.name, r.lhs, r.rhs, r.context);
            }
            let failed = outcome.reports.iter().filter(|r| !r.pass).count();
            println!("{} checks, {failed} failed; artifacts in {}", outcome.reports.len(), cli.out.display());
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

use clap::Parser;
use rdl::args::Cli;

fn main() {
    let code = match rdl::run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

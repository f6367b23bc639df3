use clap::Parser;

fn main() {
    let cli = heartgan::commands::Cli::parse();
    if let Err(e) = heartgan::commands::run(&cli) {
        eprintln!("error[{}]: {e}", e.class());
        std::process::exit(1);
    }
}

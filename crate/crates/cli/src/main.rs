fn main() {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    std::process::exit(pandaq_cli::commands::run_subcommand(&argv));
}

fn main() {
    let code = ifs_measure::cli::run(std::env::args().skip(1), &mut std::io::stdout());
    std::process::exit(code);
}

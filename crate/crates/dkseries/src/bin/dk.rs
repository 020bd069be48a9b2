fn main() {
    std::process::exit(dkseries::cli::run_from(std::env::args()));
}

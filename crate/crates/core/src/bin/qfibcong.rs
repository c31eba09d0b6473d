fn main() {
    std::process::exit(qfib_congruence::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(sigdet::cli::run());
}

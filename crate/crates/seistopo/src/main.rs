fn main() {
    std::process::exit(seistopo::cli::run());
}

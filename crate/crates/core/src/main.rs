fn main() {
    std::process::exit(rosary::cli::run());
}

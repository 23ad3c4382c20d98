fn main() {
    std::process::exit(attrcrf::cli::main());
}

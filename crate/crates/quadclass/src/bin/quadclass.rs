fn main() {
    std::process::exit(quadclass::cli::main());
}

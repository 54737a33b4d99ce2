fn main() {
    std::process::exit(twistmod::harness::cli::main());
}

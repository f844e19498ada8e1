fn main() {
    std::process::exit(valued_groups::cli::main());
}

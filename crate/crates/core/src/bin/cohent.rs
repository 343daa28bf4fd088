fn main() {
    std::process::exit(coherent_entanglement::cli::main_with_args(std::env::args_os()));
}

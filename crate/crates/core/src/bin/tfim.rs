fn main() { std::process::exit(tfim_entanglement::cli::run(std::env::args_os())); }

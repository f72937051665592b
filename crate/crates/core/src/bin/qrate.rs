fn main() { std::process::exit(qrate::cli::main()) }

fn main() {
    std::process::exit(flatmod::cli::main_with(std::env::args_os()));
}

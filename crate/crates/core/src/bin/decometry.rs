fn main() {
    std::process::exit(decometry::cli::main_with(std::env::args_os()));
}

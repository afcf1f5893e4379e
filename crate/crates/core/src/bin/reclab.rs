fn main() {
    std::process::exit(reclab::cli::main_with(std::env::args_os()));
}

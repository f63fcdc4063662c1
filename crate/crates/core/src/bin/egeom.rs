fn main() {
    std::process::exit(egeom::cli::main_with_args(std::env::args_os()));
}

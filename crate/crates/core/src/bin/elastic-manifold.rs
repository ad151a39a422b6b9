fn main() {
    std::process::exit(elastic_manifold::cli::main_with_args(std::env::args_os()));
}

fn main() {
    std::process::exit(radolab_cli::run(std::env::args_os()));
}

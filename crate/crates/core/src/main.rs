fn main() {
    std::process::exit(hypermotif::cli::run(std::env::args_os()));
}

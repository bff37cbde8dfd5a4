fn main() {
    std::process::exit(spectralmix::cli::main_with_args(std::env::args_os()));
}

fn main() {
    std::process::exit(nusampler::cli::run_cli(std::env::args_os()));
}

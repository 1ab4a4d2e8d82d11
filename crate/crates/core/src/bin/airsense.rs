fn main() {
    std::process::exit(airsense::cli::run(std::env::args_os()));
}

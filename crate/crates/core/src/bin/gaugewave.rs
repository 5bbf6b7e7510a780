fn main() {
    std::process::exit(gaugewave::cli::run(std::env::args_os()));
}

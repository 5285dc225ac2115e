fn main() {
    env_logger::init();
    std::process::exit(lfpp::cli::run(std::env::args_os()));
}

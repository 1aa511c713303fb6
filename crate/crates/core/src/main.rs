fn main() {
    env_logger::init();
    std::process::exit(polyagg::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(pnlab::run(std::env::args_os()));
}

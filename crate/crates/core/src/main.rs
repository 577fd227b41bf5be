fn main() {
    let code = convexlab::structio::run_from_args(std::env::args().skip(1));
    std::process::exit(code);
}

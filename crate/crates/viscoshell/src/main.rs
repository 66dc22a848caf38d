fn main() {
    std::process::exit(viscoshell::harness::cli_main(std::env::args_os()));
}
